//! Command-line front end for tandem tail analysis.
//!
//! Five commands cover the workflow end to end:
//!
//! * `bound` — evaluate analytic tail-bound curves on a grid;
//! * `simulate` — Monte Carlo estimate of the same tail;
//! * `compare` — bounds and simulation on one shared grid, plus a
//!   bound-dominates-simulation report;
//! * `verify` — statistical certification of the fixed-point equation and
//!   the certificate inequalities;
//! * `figure` — the standard three-load sweep (`ρ ∈ {0.5, 0.75, 0.95}`,
//!   `μ = 1`) for the deterministic- or Erlang-arrival tandem family.
//!
//! Runs are configured by an optional JSON manifest (see [`RunConfig`])
//! with command-line flags overriding individual fields, and are bit-exact
//! given a seed: identical configuration yields byte-identical output
//! files. CSV output uses the fixed header `x,value,stderr,kind`; JSON
//! output carries `"schema_version": 1`.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 unstable model,
//! 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use tandem_tails::curve::{CcdfCurve, CurveKind};
use tandem_tails::dist::Distribution;
use tandem_tails::error::Error;
use tandem_tails::polyexp::{eval_bound, fit_gim_mm, kingman_bound, ross_bound};
use tandem_tails::rates::solve_theta;
use tandem_tails::sim::{simulate, ArrivalProcess, Metric, ServiceMode, SimConfig, TandemSpec};
use tandem_tails::union_bounds::ld_curve;
use tandem_tails::verify::{
    check_dominance, check_eight_inequalities, check_fixed_point, check_gamma_inequality,
    VerificationReport, DEFAULT_HORIZON,
};

/// Default Monte Carlo protocol: scaled for desk runtimes; widen the grid
/// of a production run by raising `--runs`.
const DEFAULT_RUNS: u64 = 10_000;
const DEFAULT_PATH_LEN: u64 = 10_000;
const DEFAULT_SEED: u64 = 42;
/// Points per curve grid.
const GRID_POINTS: usize = 57;
/// Loads of the three-panel sweep.
const SWEEP_LOADS: [f64; 3] = [0.5, 0.75, 0.95];
/// Sigma multiplier for the dominance report written by `compare`.
const DOMINANCE_K_SIGMA: f64 = 3.0;

#[derive(Parser)]
#[command(
    name = "tandem-tails-cli",
    version,
    about = "Tail bounds, simulation, and verification for tandem queues",
    after_help = "Flags override fields of the JSON manifest given with --config."
)]
struct Cli {
    /// JSON run manifest; omitted fields fall back to defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed for all stochastic work.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Simulation paths (also the sample count of Monte Carlo checks).
    #[arg(long, global = true, value_name = "N")]
    runs: Option<u64>,
    /// Jobs per simulated path.
    #[arg(long = "path-len", global = true, value_name = "N")]
    path_len: Option<u64>,
    /// Target load at the first queue; rescales the arrival gaps.
    #[arg(long, global = true, value_name = "R", allow_negative_numbers = true)]
    rho: Option<f64>,
    /// Output file (a stem for `figure`, which writes one file per load).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, value_name = "FMT")]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Evaluate analytic tail-bound curves.
    Bound,
    /// Run the Monte Carlo simulator and write the empirical curve.
    Simulate,
    /// Bounds and simulation on one grid, plus a dominance report.
    Compare,
    /// Run verifier checks (all of them unless one is named).
    Verify {
        /// Single check to run.
        #[arg(value_enum)]
        check: Option<CheckKind>,
    },
    /// Three-load sweep (ρ = 0.5, 0.75, 0.95; μ = 1) for a tandem family.
    Figure {
        /// Arrival family of the swept tandem.
        #[arg(value_enum)]
        family: FigureFamily,
    },
}

impl CliCommand {
    fn kind(&self) -> CommandKind {
        match self {
            Self::Bound => CommandKind::Bound,
            Self::Simulate => CommandKind::Simulate,
            Self::Compare => CommandKind::Compare,
            Self::Verify { .. } => CommandKind::Verify,
            Self::Figure { .. } => CommandKind::Figure,
        }
    }
}

/// What a run does; the command-line subcommand overrides the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CommandKind {
    Bound,
    Simulate,
    Compare,
    Verify,
    Figure,
}

/// Analytic curves a run may request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BoundKind {
    /// Two-queue poly-exponential certificate bound.
    Polyexp,
    /// Two-queue large-deviations union bound.
    Ld,
    /// Single-queue exponential bound.
    Kingman,
    /// Single-queue bound with the sharpened prefactor.
    Ross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Arrival family of the `figure` sweep; both use rate-1 exponential
/// services at two queues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum FigureFamily {
    /// Deterministic gaps of length `1/ρ`.
    Dm2,
    /// Erlang-2 gaps with mean `1/ρ`.
    E2m2,
}

/// Selectable verifier checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
enum CheckKind {
    /// Paired-sampling test of the defining fixed-point equation.
    FixedPoint,
    /// Monte Carlo test of the certificate inequality.
    GammaInequality,
    /// Closed-form test of the eight coefficient inequalities.
    EightInequalities,
}

/// One experiment manifest. Every field has a default, so `{}` is a valid
/// manifest and flags alone can configure a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    /// Overridden by the subcommand when one is given on the command line.
    command: CommandKind,
    /// Tandem under study.
    model: TandemSpec,
    /// Monte Carlo protocol; filled with scaled defaults when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    sim: Option<SimConfig>,
    /// Requested analytic curves; defaults depend on the tandem size.
    bound_kinds: Vec<BoundKind>,
    /// Output file, or stem for multi-file commands.
    output_path: PathBuf,
    format: OutputFormat,
    /// Sweep family when `command` is `figure`.
    #[serde(skip_serializing_if = "Option::is_none")]
    figure: Option<FigureFamily>,
    /// Single check when `command` is `verify`; `null` runs all checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckKind>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: CommandKind::Compare,
            model: default_model(),
            sim: None,
            bound_kinds: Vec::new(),
            output_path: PathBuf::new(),
            format: OutputFormat::Csv,
            figure: None,
            check: None,
        }
    }
}

/// Two-queue tandem at load 0.5: deterministic gaps of length 2 feeding two
/// rate-1 exponential queues.
fn default_model() -> TandemSpec {
    TandemSpec {
        arrivals: ArrivalProcess::Renewal {
            dist: Distribution::deterministic(2.0).expect("constant gap"),
        },
        services: vec![
            Distribution::exponential(1.0).expect("unit rate"),
            Distribution::exponential(1.0).expect("unit rate"),
        ],
        mode: ServiceMode::Independent,
    }
}

/// A failed run, carrying its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn verification(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unstable(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type RunResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    // Usage errors are invalid configuration (exit 1); help and version
    // displays exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> RunResult<()> {
    let config = effective_config(cli)?;
    config.model.validate()?;
    match config.command {
        CommandKind::Bound => cmd_bound(&config),
        CommandKind::Simulate => cmd_simulate(&config),
        CommandKind::Compare => cmd_compare(&config),
        CommandKind::Verify => cmd_verify(&config),
        CommandKind::Figure => cmd_figure(&config),
    }
}

/// Loads the manifest (if any) and applies flag overrides and defaults.
fn effective_config(cli: &Cli) -> RunResult<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::invalid(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| {
                Failure::invalid(format!("cannot parse config {}: {e}", path.display()))
            })?
        }
        None => RunConfig::default(),
    };
    config.command = cli.command.kind();
    match &cli.command {
        CliCommand::Verify { check } => {
            if check.is_some() {
                config.check = *check;
            }
        }
        CliCommand::Figure { family } => config.figure = Some(*family),
        _ => {}
    }
    if let Some(rho) = cli.rho {
        config.model = retargeted_load(&config.model, rho)?;
    }
    if cli.seed.is_some() || cli.runs.is_some() || cli.path_len.is_some() {
        let mut sim = config.sim.take().unwrap_or_else(default_sim);
        if let Some(seed) = cli.seed {
            sim.seed = seed;
        }
        if let Some(runs) = cli.runs {
            sim.runs = runs;
        }
        if let Some(path_len) = cli.path_len {
            sim.path_len = path_len;
        }
        config.sim = Some(sim);
    }
    if let Some(out) = &cli.out {
        config.output_path = out.clone();
    }
    if let Some(format) = cli.format {
        config.format = format;
    }
    if config.output_path.as_os_str().is_empty() {
        config.output_path = PathBuf::from(match config.command {
            CommandKind::Bound => "bounds.csv",
            CommandKind::Simulate => "simulation.csv",
            CommandKind::Compare => "compare.csv",
            CommandKind::Verify => "verify.json",
            CommandKind::Figure => "figure.csv",
        });
    }
    Ok(config)
}

fn default_sim() -> SimConfig {
    SimConfig {
        runs: DEFAULT_RUNS,
        path_len: DEFAULT_PATH_LEN,
        seed: DEFAULT_SEED,
        x_grid: Vec::new(),
        metric: Metric::Waiting,
    }
}

/// The manifest's simulation protocol with an automatic grid when none was
/// given, validated against the model.
fn effective_sim(config: &RunConfig) -> RunResult<SimConfig> {
    let mut sim = config.sim.clone().unwrap_or_else(default_sim);
    if sim.x_grid.is_empty() {
        sim.x_grid = default_grid(&config.model);
    }
    sim.validate(config.model.num_queues())?;
    Ok(sim)
}

/// `n` equally spaced points from `a` to `b` inclusive.
fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + step * i as f64).collect()
}

/// Evaluation grid covering the tail down to roughly `e^{−14}`: 57 points
/// on `[0, ⌈14/θ⌉]`, falling back to `[0, 20]` when no decay rate exists.
fn default_grid(model: &TandemSpec) -> Vec<f64> {
    let x_max = match &model.arrivals {
        ArrivalProcess::Renewal { dist } => solve_theta(dist, &model.services[0])
            .map(|r| (14.0 / r.theta).ceil())
            .unwrap_or(20.0),
        ArrivalProcess::Alternating { .. } => 20.0,
    };
    linspace(0.0, x_max, GRID_POINTS)
}

/// Rescales the arrival gaps so the first queue runs at load `rho`.
fn retargeted_load(model: &TandemSpec, rho: f64) -> RunResult<TandemSpec> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Failure::invalid(format!(
            "--rho must be finite and positive, got {rho}"
        )));
    }
    let target_gap = model.services[0].mean() / rho;
    let factor = target_gap / model.arrivals.mean_gap();
    let mut scaled = model.clone();
    scaled.arrivals = match &model.arrivals {
        ArrivalProcess::Renewal { dist } => ArrivalProcess::Renewal {
            dist: scaled_gap(dist, factor)?,
        },
        ArrivalProcess::Alternating { dist1, dist2 } => ArrivalProcess::Alternating {
            dist1: scaled_gap(dist1, factor)?,
            dist2: scaled_gap(dist2, factor)?,
        },
    };
    Ok(scaled)
}

/// The law of `factor · X`, for the families closed under scaling.
fn scaled_gap(dist: &Distribution, factor: f64) -> RunResult<Distribution> {
    let scaled = match *dist {
        Distribution::Deterministic { value } => Distribution::deterministic(value * factor),
        Distribution::Exponential { rate } => Distribution::exponential(rate / factor),
        Distribution::Gamma { shape, rate } => Distribution::gamma(shape, rate / factor),
        Distribution::VeryLight { .. } => {
            return Err(Failure::invalid(
                "--rho cannot rescale a very-light arrival law",
            ))
        }
    };
    Ok(scaled?)
}

/// The arrival gap law and common service rate of a two-queue tandem with
/// equal exponential services — the shape the analytic machinery covers.
fn two_queue_exp(model: &TandemSpec) -> RunResult<(Distribution, f64)> {
    let gap = match &model.arrivals {
        ArrivalProcess::Renewal { dist } => dist.clone(),
        ArrivalProcess::Alternating { .. } => {
            return Err(Failure::invalid(
                "analytic bounds require a renewal arrival process",
            ))
        }
    };
    if model.services.len() != 2 {
        return Err(Failure::invalid(format!(
            "analytic tandem bounds cover exactly two queues, model has {}",
            model.services.len()
        )));
    }
    match (&model.services[0], &model.services[1]) {
        (Distribution::Exponential { rate: r0 }, Distribution::Exponential { rate: r1 })
            if r0 == r1 =>
        {
            Ok((gap, *r0))
        }
        _ => Err(Failure::invalid(
            "analytic tandem bounds require equal exponential service laws",
        )),
    }
}

/// The arrival gap law and service law of a single-queue model — the shape
/// the classical comparison bounds cover.
fn single_queue(model: &TandemSpec) -> RunResult<(Distribution, Distribution)> {
    let gap = match &model.arrivals {
        ArrivalProcess::Renewal { dist } => dist.clone(),
        ArrivalProcess::Alternating { .. } => {
            return Err(Failure::invalid(
                "classical single-queue bounds require a renewal arrival process",
            ))
        }
    };
    if model.services.len() != 1 {
        return Err(Failure::invalid(format!(
            "classical single-queue bounds cover one queue, model has {}",
            model.services.len()
        )));
    }
    Ok((gap, model.services[0].clone()))
}

/// Requested analytic kinds, defaulting by tandem size: certificate and
/// union bounds for two queues, the classical pair for one.
fn effective_bound_kinds(config: &RunConfig) -> Vec<BoundKind> {
    if !config.bound_kinds.is_empty() {
        return config.bound_kinds.clone();
    }
    if config.model.num_queues() == 1 {
        vec![BoundKind::Kingman, BoundKind::Ross]
    } else {
        vec![BoundKind::Polyexp, BoundKind::Ld]
    }
}

/// Evaluates the requested analytic curves on `grid`.
fn bound_curves(
    model: &TandemSpec,
    kinds: &[BoundKind],
    grid: &[f64],
) -> RunResult<Vec<CcdfCurve>> {
    let mut curves = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let curve = match kind {
            BoundKind::Polyexp => {
                let (gap, mu) = two_queue_exp(model)?;
                let params = fit_gim_mm(&gap, mu)?;
                let values: Vec<f64> = grid.iter().map(|&x| eval_bound(&params, x)).collect();
                CcdfCurve::from_values(CurveKind::PolyexpBound, grid, &values)?
            }
            BoundKind::Ld => {
                let (gap, mu) = two_queue_exp(model)?;
                ld_curve(&gap, mu, grid)?
            }
            BoundKind::Kingman => {
                let (gap, service) = single_queue(model)?;
                let values = grid
                    .iter()
                    .map(|&x| kingman_bound(&gap, &service, x))
                    .collect::<Result<Vec<f64>, Error>>()?;
                CcdfCurve::from_values(CurveKind::Kingman, grid, &values)?
            }
            BoundKind::Ross => {
                let (gap, service) = single_queue(model)?;
                let values = grid
                    .iter()
                    .map(|&x| ross_bound(&gap, &service, x))
                    .collect::<Result<Vec<f64>, Error>>()?;
                CcdfCurve::from_values(CurveKind::Ross, grid, &values)?
            }
        };
        curves.push(curve);
    }
    Ok(curves)
}

/// CSV image of a curve set: fixed header, one row per point, curves in
/// their listed order.
fn curves_to_csv(curves: &[CcdfCurve]) -> String {
    let mut out = String::from("x,value,stderr,kind\n");
    for curve in curves {
        for p in &curve.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.x,
                p.value,
                p.stderr,
                curve.kind.label()
            ));
        }
    }
    out
}

#[derive(Serialize)]
struct CurvesDocument<'a> {
    schema_version: u32,
    curves: &'a [CcdfCurve],
}

#[derive(Serialize)]
struct ReportsDocument<'a> {
    schema_version: u32,
    reports: &'a [VerificationReport],
}

fn render_curves(curves: &[CcdfCurve], format: OutputFormat) -> RunResult<String> {
    match format {
        OutputFormat::Csv => Ok(curves_to_csv(curves)),
        OutputFormat::Json => {
            let doc = CurvesDocument {
                schema_version: 1,
                curves,
            };
            let mut text = serde_json::to_string_pretty(&doc)
                .map_err(|e| Failure::invalid(format!("serialization failed: {e}")))?;
            text.push('\n');
            Ok(text)
        }
    }
}

fn write_file(path: &Path, content: &str) -> RunResult<()> {
    std::fs::write(path, content)
        .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_bound(config: &RunConfig) -> RunResult<()> {
    let sim = effective_sim(config)?;
    let kinds = effective_bound_kinds(config);
    let curves = bound_curves(&config.model, &kinds, &sim.x_grid)?;
    write_file(&config.output_path, &render_curves(&curves, config.format)?)
}

fn cmd_simulate(config: &RunConfig) -> RunResult<()> {
    let sim = effective_sim(config)?;
    let curve = simulate(&config.model, &sim)?;
    write_file(
        &config.output_path,
        &render_curves(std::slice::from_ref(&curve), config.format)?,
    )
}

fn cmd_compare(config: &RunConfig) -> RunResult<()> {
    let sim = effective_sim(config)?;
    if sim.metric != Metric::Waiting {
        return Err(Failure::invalid(
            "compare pairs analytic waiting-time bounds with simulation; \
             set the sim metric to \"waiting\"",
        ));
    }
    let kinds = effective_bound_kinds(config);
    let mut curves = bound_curves(&config.model, &kinds, &sim.x_grid)?;
    let empirical = simulate(&config.model, &sim)?;
    let reports = curves
        .iter()
        .map(|bound| check_dominance(bound, &empirical, DOMINANCE_K_SIGMA))
        .collect::<Result<Vec<VerificationReport>, Error>>()?;
    curves.push(empirical);
    write_file(&config.output_path, &render_curves(&curves, config.format)?)?;
    for report in &reports {
        print!("{}", report.render_text());
    }
    let doc = ReportsDocument {
        schema_version: 1,
        reports: &reports,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Failure::invalid(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(&config.output_path.with_extension("report.json"), &text)
}

/// Fan of `(u, v)` points with `v ≥ max(u, floor)`.
fn fan_grid(us: &[f64], offsets: &[f64], floor: f64) -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(us.len() * offsets.len());
    for &u in us {
        for &d in offsets {
            grid.push((u, u.max(floor) + d));
        }
    }
    grid
}

fn cmd_verify(config: &RunConfig) -> RunResult<()> {
    let sim = config.sim.clone().unwrap_or_else(default_sim);
    let n_mc = sim.runs as usize;
    let seed = sim.seed;
    let (gap, mu) = two_queue_exp(&config.model)?;
    let service = Distribution::exponential(mu)?;
    let checks = match config.check {
        Some(kind) => vec![kind],
        None => vec![
            CheckKind::EightInequalities,
            CheckKind::GammaInequality,
            CheckKind::FixedPoint,
        ],
    };
    let mut reports = Vec::with_capacity(checks.len());
    for kind in checks {
        let report = match kind {
            CheckKind::FixedPoint => {
                let mut grid = Vec::new();
                for u in linspace(-1.0, 8.0, 5) {
                    for v in linspace(u, 8.0, 5) {
                        grid.push((u, v));
                    }
                }
                check_fixed_point(&gap, &service, &service, &grid, n_mc, DEFAULT_HORIZON, seed)?
            }
            CheckKind::GammaInequality => {
                let params = fit_gim_mm(&gap, mu)?;
                let us = linspace(-params.a.max(0.0), 8.0, 5);
                let grid = fan_grid(&us, &[0.0, 1.0, 4.0], -params.a);
                check_gamma_inequality(&params, &gap, mu, &grid, n_mc, seed)?
            }
            CheckKind::EightInequalities => {
                let params = fit_gim_mm(&gap, mu)?;
                let us = linspace(-params.a.max(0.0), 8.0, 5);
                let grid = fan_grid(&us, &[0.0, 2.0], -params.a);
                check_eight_inequalities(&params, &gap, mu, &grid, 1e-8)?
            }
        };
        print!("{}", report.render_text());
        reports.push(report);
    }
    let doc = ReportsDocument {
        schema_version: 1,
        reports: &reports,
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Failure::invalid(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(&config.output_path, &text)?;
    // The stochastic fixed-point check may lose isolated grid points to
    // 4σ noise; anything beyond that, or any inequality failure, is fatal.
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| {
            if r.check_name == "fixed-point" {
                r.pass_fraction() < 0.95
            } else {
                !r.passed()
            }
        })
        .map(|r| r.check_name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::verification(format!(
            "verification failed: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_figure(config: &RunConfig) -> RunResult<()> {
    let family = config
        .figure
        .ok_or_else(|| Failure::invalid("figure requires a family (dm2 or e2m2)"))?;
    let base = config.sim.clone().unwrap_or_else(default_sim);
    let stem = config.output_path.with_extension("");
    for rho in SWEEP_LOADS {
        let gap = match family {
            FigureFamily::Dm2 => Distribution::deterministic(1.0 / rho),
            FigureFamily::E2m2 => Distribution::gamma(2.0, 2.0 * rho),
        }?;
        let model = TandemSpec {
            arrivals: ArrivalProcess::Renewal { dist: gap },
            services: vec![
                Distribution::exponential(1.0)?,
                Distribution::exponential(1.0)?,
            ],
            mode: ServiceMode::Independent,
        };
        model.validate()?;
        let sim = SimConfig {
            runs: base.runs,
            path_len: base.path_len,
            // Distinct deterministic seed per panel.
            seed: base.seed + (100.0 * rho).round() as u64,
            x_grid: default_grid(&model),
            metric: Metric::Waiting,
        };
        sim.validate(model.num_queues())?;
        let mut curves = bound_curves(&model, &[BoundKind::Polyexp, BoundKind::Ld], &sim.x_grid)?;
        curves.push(simulate(&model, &sim)?);
        let path = PathBuf::from(format!(
            "{}-rho{:.2}.{}",
            stem.display(),
            rho,
            config.format.extension()
        ));
        write_file(&path, &render_curves(&curves, config.format)?)?;
    }
    Ok(())
}
