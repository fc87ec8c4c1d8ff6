//! Acceptance suite: ten end-to-end checks, one per headline guarantee of
//! the workspace. Each test prints a single `[PASS]`/`[FAIL]` line (visible
//! with `--nocapture`) before asserting, so a full run reads as a checklist.
//!
//! Covered, in order: exact agreement of the departure recursion with the
//! exhaustive oracle and with both reversed pathwise forms; exactness on the
//! single exponential queue; bound-over-simulation dominance across the two
//! figure sweeps; far-tail log-slopes of the fitted bound; the fixed-point
//! and coefficient certificates; the degree predictor; the
//! alternating-arrival and shared-service reductions; and byte-level
//! determinism of the command-line binary.

use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use tandem_tails::dist::Distribution;
use tandem_tails::polyexp::{eval_bound, fit_gim_mm, ross_bound};
use tandem_tails::rates::{solve_theta, theta_cascade};
use tandem_tails::rng::StreamRng;
use tandem_tails::sim::{
    brute_force_exit_time, lindley_exit_time, packet_reversed_waiting, run_samples, simulate,
    two_queue_reversed_waiting, ArrivalProcess, Metric, ServiceMode, SimConfig, TandemSpec,
};
use tandem_tails::union_bounds::ld_curve;
use tandem_tails::verify::{check_eight_inequalities, check_fixed_point, DEFAULT_HORIZON};

/// Prints the single verdict line for one check, then asserts it.
fn verdict(name: &str, ok: bool, elapsed: Duration, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {name} ({:.1}s): {detail}", elapsed.as_secs_f64());
    assert!(ok, "{name}: {detail}");
}

fn exp(rate: f64) -> Distribution {
    Distribution::exponential(rate).unwrap()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Evaluation grid used by the figure sweeps: 57 points out to `⌈14/θ⌉`.
fn figure_grid(theta: f64) -> Vec<f64> {
    linspace(0.0, (14.0 / theta).ceil(), 57)
}

/// Two queues with unit-rate exponential services fed by `gap` renewals.
fn two_queue_spec(gap: Distribution) -> TandemSpec {
    TandemSpec {
        arrivals: ArrivalProcess::Renewal { dist: gap },
        services: vec![exp(1.0), exp(1.0)],
        mode: ServiceMode::Independent,
    }
}

fn waiting_cfg(x_grid: Vec<f64>, seed: u64) -> SimConfig {
    SimConfig {
        runs: 10_000,
        path_len: 10_000,
        seed,
        x_grid,
        metric: Metric::Waiting,
    }
}

/// 1000 random small tandems, alternating independent and shared-service
/// modes, half with integer-valued draws and half continuous: the rolling
/// recursion must match the exhaustive chain enumeration to 1e−9, and the
/// reversed-walk waiting-time forms must match the recursion pathwise.
#[test]
fn c01_exit_time_oracles_and_reversed_forms_agree() {
    let t0 = Instant::now();
    let (mut worst_oracle, mut worst_reversed) = (0.0f64, 0.0f64);
    let (mut two_queue_checks, mut packet_checks) = (0usize, 0usize);
    for t in 0..1000u64 {
        let mut rng = StreamRng::new(4242, t, 0, 0);
        let n = 1 + (rng.uniform() * 8.0) as usize;
        let m = 1 + (rng.uniform() * 3.0) as usize;
        let integers = t < 500;
        let mut draw = |rng: &mut StreamRng, scale: f64| {
            let u = rng.uniform() * scale;
            if integers {
                u.floor()
            } else {
                u
            }
        };
        let gaps: Vec<f64> = (0..n - 1).map(|_| draw(&mut rng, 5.0)).collect();
        let packet = t % 2 == 1;
        let services: Vec<Vec<f64>> = if packet {
            let row: Vec<f64> = (0..n).map(|_| draw(&mut rng, 4.0)).collect();
            vec![row; m]
        } else {
            (0..m)
                .map(|_| (0..n).map(|_| draw(&mut rng, 4.0)).collect())
                .collect()
        };
        let exits = lindley_exit_time(&gaps, &services).unwrap();
        let brute = brute_force_exit_time(&gaps, &services).unwrap();
        worst_oracle = worst_oracle.max((exits[n - 1] - brute).abs());

        // Waiting time of the last job straight from the recursion …
        let arrival_last: f64 = gaps.iter().sum();
        let own: f64 = services.iter().map(|row| row[n - 1]).sum();
        let from_recursion = exits[n - 1] - arrival_last - own;
        // … against the reversed maximal-walk forms.
        if packet {
            let w = packet_reversed_waiting(&gaps, &services[0], m).unwrap();
            worst_reversed = worst_reversed.max((w - from_recursion).abs());
            packet_checks += 1;
        } else if m == 2 {
            let w = two_queue_reversed_waiting(&gaps, &services[0], &services[1]).unwrap();
            worst_reversed = worst_reversed.max((w - from_recursion).abs());
            two_queue_checks += 1;
        }
    }
    let elapsed = t0.elapsed();
    let ok = worst_oracle <= 1e-9
        && worst_reversed <= 1e-9
        && two_queue_checks > 0
        && packet_checks > 0
        && elapsed < Duration::from_secs(30);
    verdict(
        "01 exit-time oracles",
        ok,
        elapsed,
        &format!(
            "1000 instances: |recursion − exhaustive| ≤ {worst_oracle:.1e}; reversed forms \
             ({two_queue_checks} two-queue, {packet_checks} shared-service) ≤ {worst_reversed:.1e}"
        ),
    );
}

/// Single exponential queue at half load: the stationary-increment bound
/// collapses to the exact tail `0.5·e^{−x/2}`, and a full-size simulation
/// must sit within 3σ of it on a four-point grid.
#[test]
fn c02_single_exponential_queue_matches_the_exact_tail() {
    let t0 = Instant::now();
    let (gap, svc) = (exp(0.5), exp(1.0));
    let xs = vec![0.5, 1.0, 2.0, 5.0];
    let spec = TandemSpec {
        arrivals: ArrivalProcess::Renewal { dist: gap.clone() },
        services: vec![svc.clone()],
        mode: ServiceMode::Independent,
    };
    let sim = simulate(
        &spec,
        &SimConfig {
            runs: 10_000,
            path_len: 10_000,
            seed: 42,
            x_grid: xs.clone(),
            metric: Metric::Waiting,
        },
    )
    .unwrap();
    let (mut worst_formula, mut worst_sigma) = (0.0f64, 0.0f64);
    for (i, &x) in xs.iter().enumerate() {
        let exact = 0.5 * (-0.5 * x).exp();
        worst_formula = worst_formula.max((ross_bound(&gap, &svc, x).unwrap() - exact).abs());
        let p = &sim.points[i];
        worst_sigma = worst_sigma.max((p.value - exact).abs() / p.stderr);
    }
    let elapsed = t0.elapsed();
    // The closed form is reproduced up to the decay-rate root tolerance
    // (1e−10 in θ, ≲2e−11 in the value on this grid).
    let ok = worst_formula <= 1e-9 && worst_sigma <= 3.0 && elapsed < Duration::from_secs(60);
    verdict(
        "02 single-queue exactness",
        ok,
        elapsed,
        &format!(
            "|bound − 0.5·e^(−x/2)| ≤ {worst_formula:.1e}; simulation within {worst_sigma:.2}σ"
        ),
    );
}

/// One full figure sweep over three loads: the fitted and union bounds must
/// dominate a 10⁴-path simulation at every grid point (3σ floor); at the two
/// higher loads the fitted bound must sit at or below the union bound for
/// every `x ≥ 5`; optionally the mid-grid union/fitted ratio must reach 10
/// at the highest load. Returns `(ok, one-line detail)`.
fn dominance_sweep(
    make_gap: &dyn Fn(f64) -> Distribution,
    check_mid_ratio: bool,
) -> (bool, String) {
    let mut ok = true;
    let mut detail = String::new();
    for rho in [0.5f64, 0.75, 0.95] {
        let t_rho = Instant::now();
        let gap = make_gap(rho);
        let theta = solve_theta(&gap, &exp(1.0)).unwrap().theta;
        let grid = figure_grid(theta);
        let params = fit_gim_mm(&gap, 1.0).unwrap();
        let fitted: Vec<f64> = grid.iter().map(|&x| eval_bound(&params, x)).collect();
        let union = ld_curve(&gap, 1.0, &grid).unwrap();
        let seed = 42 + (100.0 * rho).round() as u64;
        let sim = simulate(&two_queue_spec(gap), &waiting_cfg(grid.clone(), seed)).unwrap();

        let hi = *grid.last().unwrap();
        let (mut fit_margin, mut union_margin) = (f64::INFINITY, f64::INFINITY);
        let mut ordering = f64::INFINITY;
        let mut mid_ratio = f64::INFINITY;
        for (i, &x) in grid.iter().enumerate() {
            let floor = sim.points[i].value - 3.0 * sim.points[i].stderr;
            fit_margin = fit_margin.min(fitted[i] - floor);
            union_margin = union_margin.min(union.points[i].value - floor);
            if rho >= 0.75 && x >= 5.0 {
                ordering = ordering.min(union.points[i].value - fitted[i]);
            }
            if check_mid_ratio && rho == 0.95 && x >= hi / 3.0 && x <= 2.0 * hi / 3.0 {
                mid_ratio = mid_ratio.min(union.points[i].value / fitted[i]);
            }
        }
        let rho_ok = fit_margin >= 0.0
            && union_margin >= 0.0
            && ordering >= -1e-12
            && (mid_ratio.is_infinite() || mid_ratio >= 10.0)
            && t_rho.elapsed() < Duration::from_secs(300);
        ok &= rho_ok;
        let _ = write!(detail, "rho={rho}: margins {fit_margin:+.1e}/{union_margin:+.1e}");
        if ordering.is_finite() {
            let _ = write!(detail, ", order {ordering:+.1e}");
        }
        if mid_ratio.is_finite() {
            let _ = write!(detail, ", mid ratio ≥ {mid_ratio:.0}");
        }
        let _ = write!(detail, "; ");
    }
    (ok, detail)
}

/// Deterministic inter-arrival gaps (`1/ρ`) into two unit-exponential
/// queues, including the mid-grid ratio check at the highest load.
#[test]
fn c03_deterministic_gap_sweep_keeps_bounds_above_simulation() {
    let t0 = Instant::now();
    let (ok, detail) = dominance_sweep(&|rho| Distribution::deterministic(1.0 / rho).unwrap(), true);
    verdict("03 deterministic-gap sweep", ok, t0.elapsed(), &detail);
}

/// Gamma(2) gaps with matched mean (`rate = 2ρ`) into the same tandem.
#[test]
fn c04_gamma_gap_sweep_keeps_bounds_above_simulation() {
    let t0 = Instant::now();
    let (ok, detail) = dominance_sweep(&|rho| Distribution::gamma(2.0, 2.0 * rho).unwrap(), false);
    verdict("04 gamma-gap sweep", ok, t0.elapsed(), &detail);
}

/// The fitted bound's log-slope between x=200 and x=240 should track the
/// decay rate θ within 3% for all six (gap law, load) combinations.
#[test]
fn c05_far_tail_log_slope_tracks_the_decay_rate() {
    let t0 = Instant::now();
    let mut rows = Vec::new();
    let mut ok = true;
    let make_det: fn(f64) -> Distribution = |rho| Distribution::deterministic(1.0 / rho).unwrap();
    let make_gamma: fn(f64) -> Distribution = |rho| Distribution::gamma(2.0, 2.0 * rho).unwrap();
    for (name, make) in [("det", make_det), ("gamma", make_gamma)] {
        for rho in [0.5f64, 0.75, 0.95] {
            let gap = make(rho);
            let theta = solve_theta(&gap, &exp(1.0)).unwrap().theta;
            let params = fit_gim_mm(&gap, 1.0).unwrap();
            let slope = (eval_bound(&params, 200.0).ln() - eval_bound(&params, 240.0).ln()) / 40.0;
            let rel = (slope - theta).abs() / theta;
            ok &= rel <= 0.03;
            rows.push(format!("{name} rho={rho}: {:.2}%", 100.0 * rel));
        }
    }
    let elapsed = t0.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    let mut detail = format!("relative slope error vs 3% cap — {}", rows.join(", "));
    if !ok {
        detail.push_str(
            "; the x-linear factor in front of the exponential lowers the local log-slope by \
             ≈1/x ≈ 0.0045 at x≈220, which exceeds 3% of θ whenever θ < ≈0.15 — both \
             highest-load fits sit below that threshold, so the 3% target is unreachable \
             there by the very shape of the bound",
        );
    }
    verdict("05 far-tail log-slope", ok, elapsed, &detail);
}

/// The distributional fixed point of the two-dimensional supremum must hold
/// (4σ, paired streams, 10⁵ replications) on ≥95% of a 25-point grid, both
/// for the deterministic-gap tandem at half load and for a degenerate
/// (zero) second service.
#[test]
fn c06_fixed_point_certificate_holds_on_the_grid() {
    let t0 = Instant::now();
    let mut grid = Vec::with_capacity(25);
    for u in linspace(-1.0, 8.0, 5) {
        for v in linspace(u, 8.0, 5) {
            grid.push((u, v));
        }
    }
    let x = Distribution::deterministic(2.0).unwrap();
    let (y, z) = (exp(1.0), exp(1.0));
    let tandem = check_fixed_point(&x, &y, &z, &grid, 100_000, DEFAULT_HORIZON, 7).unwrap();
    let zero = Distribution::deterministic(0.0).unwrap();
    let degenerate = check_fixed_point(&x, &y, &zero, &grid, 100_000, DEFAULT_HORIZON, 8).unwrap();
    let elapsed = t0.elapsed();
    let ok = tandem.pass_fraction() >= 0.95
        && degenerate.pass_fraction() >= 0.95
        && elapsed < Duration::from_secs(120);
    verdict(
        "06 fixed-point certificate",
        ok,
        elapsed,
        &format!(
            "pass fraction {:.2} (tandem) / {:.2} (zero second service) on 25 points at 4σ",
            tandem.pass_fraction(),
            degenerate.pass_fraction()
        ),
    );
}

/// The eight coefficient inequalities behind the fitted certificate must
/// hold on a 100-point (u, v) grid for the deterministic-gap fits at loads
/// 0.5 and 0.75, with inequalities 6 and 8 vacuous (continuous services,
/// nonnegative shift) and 1–5 enforced everywhere.
#[test]
fn c07_coefficient_inequalities_hold_with_the_expected_vacuities() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for rho in [0.5f64, 0.75] {
        let gap = Distribution::deterministic(1.0 / rho).unwrap();
        let params = fit_gim_mm(&gap, 1.0).unwrap();
        let mut grid = Vec::with_capacity(100);
        for u in linspace(-params.a.max(0.0), 8.0, 10) {
            let vlo = u.max(-params.a);
            for v in linspace(vlo, vlo + 8.0, 10) {
                grid.push((u, v));
            }
        }
        let report = check_eight_inequalities(&params, &gap, 1.0, &grid, 1e-8).unwrap();
        let sixth_and_eighth_vacuous = report
            .details
            .iter()
            .filter(|r| r.note.starts_with("ineq-6") || r.note.starts_with("ineq-8"))
            .all(|r| !r.enforced && r.pass);
        let first_five_enforced = ["ineq-1", "ineq-2", "ineq-3", "ineq-4", "ineq-5"]
            .iter()
            .all(|label| {
                let records: Vec<_> =
                    report.details.iter().filter(|r| r.note == *label).collect();
                records.len() == grid.len() && records.iter().all(|r| r.enforced)
            });
        ok &= report.passed() && sixth_and_eighth_vacuous && first_five_enforced;
        let _ = write!(
            detail,
            "rho={rho}: {} points, worst margin deficit {:+.1e}; ",
            grid.len(),
            report.worst_violation
        );
    }
    let elapsed = t0.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    verdict("07 coefficient inequalities", ok, elapsed, &detail);
}

/// Tail-polynomial degrees across a four-queue tandem: counting up when all
/// queues share the bottleneck rate, flat zero when the first queue is the
/// strict bottleneck, and flat one from the second queue on when that one is.
#[test]
fn c08_cascade_degrees_follow_the_bottleneck_position() {
    let t0 = Instant::now();
    let homogeneous = theta_cascade(&exp(0.5), &vec![exp(1.0); 4]).unwrap();
    let x = exp(0.4);
    let first = theta_cascade(&x, &[exp(0.8), exp(1.2), exp(1.2), exp(1.2)]).unwrap();
    let second = theta_cascade(&x, &[exp(1.2), exp(0.8), exp(1.2), exp(1.2)]).unwrap();
    let elapsed = t0.elapsed();
    let ok = homogeneous.degrees == [0, 1, 2, 3]
        && first.degrees == [0, 0, 0, 0]
        && second.degrees == [0, 1, 1, 1]
        && elapsed < Duration::from_secs(1);
    verdict(
        "08 degree predictor",
        ok,
        elapsed,
        &format!(
            "homogeneous {:?}, bottleneck-first {:?}, bottleneck-second {:?}",
            homogeneous.degrees, first.degrees, second.degrees
        ),
    );
}

/// Reductions: alternating arrivals with two equal laws must reproduce the
/// renewal tail within 3σ, and a single-queue shared-service run must be
/// sample-identical to the independent-service run at the same seed.
#[test]
fn c09_alternating_and_shared_service_reductions_hold() {
    let t0 = Instant::now();
    let grid = vec![0.0, 0.5, 1.0, 2.0, 4.0];
    let renewal = simulate(&two_queue_spec(exp(0.5)), &waiting_cfg(grid.clone(), 7)).unwrap();
    let alternating = simulate(
        &TandemSpec {
            arrivals: ArrivalProcess::Alternating {
                dist1: exp(0.5),
                dist2: exp(0.5),
            },
            services: vec![exp(1.0), exp(1.0)],
            mode: ServiceMode::Independent,
        },
        &waiting_cfg(grid.clone(), 8),
    )
    .unwrap();
    let mut worst_sigma = 0.0f64;
    for (a, b) in renewal.points.iter().zip(&alternating.points) {
        let sigma = (a.stderr * a.stderr + b.stderr * b.stderr).sqrt();
        worst_sigma = worst_sigma.max((a.value - b.value).abs() / sigma);
    }

    let packet_spec = TandemSpec {
        arrivals: ArrivalProcess::Renewal { dist: exp(0.5) },
        services: vec![exp(1.0)],
        mode: ServiceMode::Packet,
    };
    let independent_spec = TandemSpec {
        mode: ServiceMode::Independent,
        ..packet_spec.clone()
    };
    let cfg = SimConfig {
        runs: 2_000,
        path_len: 2_000,
        seed: 42,
        x_grid: grid,
        metric: Metric::Waiting,
    };
    let identical =
        run_samples(&packet_spec, &cfg).unwrap() == run_samples(&independent_spec, &cfg).unwrap();

    let elapsed = t0.elapsed();
    let ok = worst_sigma <= 3.0 && identical && elapsed < Duration::from_secs(60);
    verdict(
        "09 arrival/service reductions",
        ok,
        elapsed,
        &format!(
            "alternating vs renewal within {worst_sigma:.2}σ; \
             single-queue shared-service samples identical: {identical}"
        ),
    );
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tandem-tails-cli"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

/// Every command, rerun with the same seed in a fresh directory, must
/// reproduce its exit status, stdout, and every output file byte for byte.
#[test]
fn c10_every_command_reruns_byte_identically() {
    let t0 = Instant::now();
    let commands: [(&str, Vec<&str>, Vec<&str>); 5] = [
        ("bound", vec!["bound", "--out", "b.csv"], vec!["b.csv"]),
        (
            "simulate",
            vec!["simulate", "--runs", "300", "--path-len", "500", "--out", "s.csv"],
            vec!["s.csv"],
        ),
        (
            "compare",
            vec!["compare", "--runs", "300", "--path-len", "500", "--out", "c.csv"],
            vec!["c.csv", "c.report.json"],
        ),
        (
            "verify",
            vec!["verify", "--runs", "2000", "--out", "v.json"],
            vec!["v.json"],
        ),
        (
            "figure",
            vec!["figure", "dm2", "--runs", "200", "--path-len", "400", "--out", "f.csv"],
            vec!["f-rho0.50.csv", "f-rho0.75.csv", "f-rho0.95.csv"],
        ),
    ];
    let mut ok = true;
    let mut checked = Vec::new();
    for (name, args, files) in &commands {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let o1 = run_in(d1.path(), args);
        let o2 = run_in(d2.path(), args);
        let mut same = o1.status.code() == o2.status.code() && o1.stdout == o2.stdout;
        for f in files {
            same &= std::fs::read(d1.path().join(f)).unwrap()
                == std::fs::read(d2.path().join(f)).unwrap();
        }
        ok &= same;
        checked.push(format!("{name}:{}", if same { "=" } else { "≠" }));
    }
    verdict("10 byte-identical reruns", ok, t0.elapsed(), &checked.join(" "));
}
