//! Monte Carlo simulation of tandem queues.
//!
//! A tandem is `M` FIFO single-server queues in series: job `k` arrives at
//! epoch `A[k]` (cumulated inter-arrival gaps), is served at queue 0, then
//! queue 1, and so on. Departures follow the per-queue recursion
//!
//! ```text
//! D[j][k] = max(D[j−1][k], D[j][k−1]) + S[j][k],      D[−1][k] = A[k],
//! ```
//!
//! where `S[j][k]` is job `k`'s service requirement at queue `j` — drawn
//! independently per queue ([`ServiceMode::Independent`]) or once per job and
//! reused by every queue ([`ServiceMode::Packet`]). The end-to-end waiting
//! time of job `k` is `D[M−1][k] − A[k] − Σ_j S[j][k]` and its sojourn time
//! is `D[M−1][k] − A[k]`.
//!
//! [`simulate`] estimates the steady-state CCDF of the last job on a path of
//! `path_len` jobs across `runs` independent paths, reporting binomial
//! standard errors. Runs are embarrassingly parallel: every `(run, lane)`
//! pair owns a counter-based random stream (lane 0 = arrivals, lane `1+j` =
//! services of queue `j`; packet mode uses lane 1), so results are identical
//! across thread counts and across the parallel and sequential engines.
//!
//! Correctness anchors, used heavily by the tests:
//! * [`brute_force_exit_time`] — exhaustive maximum over all monotone switch
//!   chains through the `M×n` service lattice, equal to the recursion;
//! * [`two_queue_reversed_waiting`] / [`packet_reversed_waiting`] — closed
//!   time-reversed random-walk forms of the last job's waiting time.

use serde::{Deserialize, Serialize};

use crate::curve::{CcdfCurve, CcdfPoint, CurveKind};
use crate::dist::{Distribution, Sampler};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Random-stream lane carrying the arrival process of a run.
const LANE_ARRIVALS: u64 = 0;
/// First service lane; queue `j` draws from lane `LANE_SERVICE_BASE + j`.
const LANE_SERVICE_BASE: u64 = 1;

/// How inter-arrival gaps are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ArrivalProcess {
    /// I.i.d. gaps from one law.
    Renewal {
        /// Gap law.
        dist: Distribution,
    },
    /// Gaps alternate between two laws; a fair coin picks which law goes
    /// first, once per path.
    Alternating {
        /// Law of the first phase (if the coin picks it to start).
        dist1: Distribution,
        /// Law of the other phase.
        dist2: Distribution,
    },
}

impl ArrivalProcess {
    /// Mean gap: the plain mean for a renewal process, the average of the two
    /// phase means for an alternating process.
    pub fn mean_gap(&self) -> f64 {
        match self {
            Self::Renewal { dist } => dist.mean(),
            Self::Alternating { dist1, dist2 } => 0.5 * (dist1.mean() + dist2.mean()),
        }
    }
}

/// Whether each queue regenerates service times or jobs carry one service
/// requirement through the whole tandem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ServiceMode {
    /// `S[j][k]` drawn independently for every queue `j`.
    Independent,
    /// One draw per job, shared by all queues (all service laws must agree).
    Packet,
}

/// Which per-job statistic the CCDF describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// End-to-end waiting time (sojourn minus the job's own services).
    Waiting,
    /// End-to-end sojourn time (departure minus arrival).
    Sojourn,
}

/// Full model of a tandem: arrivals, per-queue service laws, service mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TandemSpec {
    /// Arrival process shared by all queues.
    pub arrivals: ArrivalProcess,
    /// Service law of queue `j` at index `j`; length is the tandem size `M`.
    pub services: Vec<Distribution>,
    /// Independent or shared (packet) services.
    pub mode: ServiceMode,
}

impl TandemSpec {
    /// Number of queues.
    pub fn num_queues(&self) -> usize {
        self.services.len()
    }

    /// Validates structural invariants: at least one queue, strict stability
    /// (mean gap above every mean service), and equal service laws in packet
    /// mode.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] for shape violations,
    /// [`Error::Unstable`] if some queue's mean service reaches the mean gap.
    pub fn validate(&self) -> Result<()> {
        if self.services.is_empty() {
            return Err(Error::InvalidParameter(
                "tandem needs at least one queue".into(),
            ));
        }
        let mean_gap = self.arrivals.mean_gap();
        for (j, s) in self.services.iter().enumerate() {
            if !(mean_gap > s.mean()) {
                return Err(Error::Unstable(format!(
                    "queue {j}: mean service {} must stay below mean inter-arrival gap {mean_gap}",
                    s.mean()
                )));
            }
        }
        if self.mode == ServiceMode::Packet {
            if let Some((j, s)) = self
                .services
                .iter()
                .enumerate()
                .find(|(_, s)| **s != self.services[0])
            {
                return Err(Error::InvalidParameter(format!(
                    "packet mode shares one service law across queues, but queue {j} ({s:?}) \
                     differs from queue 0 ({:?})",
                    self.services[0]
                )));
            }
        }
        Ok(())
    }
}

/// Monte Carlo protocol: how many paths, how long, where to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of independent paths; one sample (the last job) per path.
    pub runs: u64,
    /// Jobs per path; the last job's statistic approximates steady state.
    pub path_len: u64,
    /// Master seed; all lanes and runs derive from it.
    pub seed: u64,
    /// Strictly increasing nonnegative evaluation grid.
    pub x_grid: Vec<f64>,
    /// Waiting or sojourn time.
    pub metric: Metric,
}

impl SimConfig {
    /// Validates the protocol against a given tandem size.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] if `runs < 100`, `path_len` is shorter
    /// than the tandem, or the grid is empty/unsorted/negative.
    pub fn validate(&self, num_queues: usize) -> Result<()> {
        if self.runs < 100 {
            return Err(Error::InvalidParameter(format!(
                "runs = {} but at least 100 are required for a usable CCDF",
                self.runs
            )));
        }
        if (self.path_len as usize) < num_queues || self.path_len == 0 {
            return Err(Error::InvalidParameter(format!(
                "path_len = {} must be at least the number of queues ({num_queues})",
                self.path_len
            )));
        }
        if self.x_grid.is_empty() {
            return Err(Error::InvalidParameter("x_grid must be nonempty".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &x in &self.x_grid {
            if !x.is_finite() || x < 0.0 || x <= prev {
                return Err(Error::InvalidParameter(format!(
                    "x_grid must be nonnegative and strictly increasing (offending entry {x})"
                )));
            }
            prev = x;
        }
        Ok(())
    }
}

/// Rolling one-column state of the departure recursion: `departures[j]` is
/// the previous job's departure epoch from queue `j`.
struct LindleySweep {
    departures: Vec<f64>,
}

impl LindleySweep {
    fn new(num_queues: usize) -> Self {
        Self {
            departures: vec![f64::NEG_INFINITY; num_queues],
        }
    }

    /// Advances all queues by one job arriving at `arrival`; `service(j)` is
    /// called once per queue in order. Returns the job's departure from the
    /// last queue.
    fn push_column<F: FnMut(usize) -> f64>(&mut self, arrival: f64, service: F) -> f64 {
        self.push_column_with_wait(arrival, service).0
    }

    /// Like [`Self::push_column`], but also returns the job's total waiting
    /// time across the tandem. Each per-queue wait is the exact difference
    /// `start − entry`, so a job that never queues gets a waiting time of
    /// exactly zero — subtracting accumulated epochs after the fact would
    /// smear the atom at zero with rounding noise.
    fn push_column_with_wait<F: FnMut(usize) -> f64>(
        &mut self,
        arrival: f64,
        mut service: F,
    ) -> (f64, f64) {
        let mut chain = arrival;
        let mut waited = 0.0;
        for (j, d) in self.departures.iter_mut().enumerate() {
            let start = chain.max(*d);
            waited += start - chain;
            let out = start + service(j);
            *d = out;
            chain = out;
        }
        (chain, waited)
    }
}

fn check_dimensions(inter_arrivals: &[f64], services: &[Vec<f64>]) -> Result<(usize, usize)> {
    let m = services.len();
    if m == 0 {
        return Err(Error::DimensionMismatch("no service rows".into()));
    }
    let n = services[0].len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty service rows".into()));
    }
    if let Some((j, row)) = services.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "service row {j} has {} entries, expected {n}",
            row.len()
        )));
    }
    if inter_arrivals.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "{} inter-arrival gaps for {n} jobs (need n−1)",
            inter_arrivals.len()
        )));
    }
    Ok((m, n))
}

/// Departure epochs of every job from the last queue, by the per-queue
/// recursion in `O(M·n)`. Job 0 arrives at epoch 0; `inter_arrivals[k]` is
/// the gap between jobs `k` and `k+1`; `services[j][k]` is job `k`'s demand
/// at queue `j`.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] for ragged input or a gap count different
/// from `n−1`.
pub fn lindley_exit_time(inter_arrivals: &[f64], services: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (_m, n) = check_dimensions(inter_arrivals, services)?;
    let mut sweep = LindleySweep::new(services.len());
    let mut arrival = 0.0;
    let mut exits = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            arrival += inter_arrivals[k - 1];
        }
        exits.push(sweep.push_column(arrival, |j| services[j][k]));
    }
    Ok(exits)
}

/// Exit epoch of the *last* job by exhaustive enumeration: the recursion
/// unrolls to a maximum over monotone switch chains `c_0 ≤ … ≤ c_{M−1}`,
/// where the chain enters queue `j` at job `c_j`:
///
/// ```text
/// max  A[c_0] + Σ_j Σ_{k=c_j}^{c_{j+1}} S[j][k]        (c_M := n−1),
/// ```
///
/// switch jobs counted in both adjacent queues. `O(C(n+M−1, M))` chains.
///
/// # Errors
///
/// [`Error::TooLarge`] beyond the guard `n ≤ 12, M ≤ 4`;
/// [`Error::DimensionMismatch`] as in [`lindley_exit_time`].
pub fn brute_force_exit_time(inter_arrivals: &[f64], services: &[Vec<f64>]) -> Result<f64> {
    let (m, n) = check_dimensions(inter_arrivals, services)?;
    if n > 12 || m > 4 {
        return Err(Error::TooLarge(format!(
            "exhaustive chain enumeration guarded to n ≤ 12, M ≤ 4 (got n={n}, M={m})"
        )));
    }
    let mut arrivals = vec![0.0; n];
    for k in 1..n {
        arrivals[k] = arrivals[k - 1] + inter_arrivals[k - 1];
    }
    // Row prefix sums: prefix[j][k+1] = Σ_{t ≤ k} S[j][t].
    let prefix: Vec<Vec<f64>> = services
        .iter()
        .map(|row| {
            let mut p = vec![0.0; n + 1];
            for (k, s) in row.iter().enumerate() {
                p[k + 1] = p[k] + s;
            }
            p
        })
        .collect();
    let segment = |j: usize, from: usize, to: usize| prefix[j][to + 1] - prefix[j][from];

    let mut chain = vec![0usize; m];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut v = arrivals[chain[0]];
        for j in 0..m {
            let to = if j + 1 < m { chain[j + 1] } else { n - 1 };
            v += segment(j, chain[j], to);
        }
        best = best.max(v);

        // Next nondecreasing chain: digit 0 is least significant, digit j is
        // capped by digit j+1; lower digits reset to 0 on carry.
        let mut advanced = false;
        for j in 0..m {
            let cap = if j + 1 < m { chain[j + 1] } else { n - 1 };
            if chain[j] < cap {
                chain[j] += 1;
                for c in chain.iter_mut().take(j) {
                    *c = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Ok(best);
        }
    }
}

/// Last job's end-to-end waiting time in a two-queue tandem from its
/// time-reversed random-walk representation.
///
/// Counting `r` jobs back from the last job `L`, with gap `X[k]` between
/// jobs `k` and `k+1`, define the reversed increments
///
/// ```text
/// U_r = S1[L−r] − X[L−r],
/// V_r = S2[L−r] − X[L−r] + S1[L−r] − S1[L−r+1],
/// ```
///
/// (the second-queue walk carries a telescoping first-queue correction from
/// the job where the bottleneck switches queues). Then
///
/// ```text
/// W = max_{0 ≤ i ≤ j ≤ L} [ Σ_{r≤i} V_r + Σ_{i<r≤j} U_r ],
/// ```
///
/// computed in `O(L)` with prefix sums and a running maximum. Agrees exactly
/// with the departure recursion on every path; the tests enforce this.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] if the arrays disagree on the job count.
pub fn two_queue_reversed_waiting(
    inter_arrivals: &[f64],
    services1: &[f64],
    services2: &[f64],
) -> Result<f64> {
    let n = services1.len();
    if services2.len() != n || n == 0 || inter_arrivals.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "got {} gaps, {n} first-queue and {} second-queue services",
            inter_arrivals.len(),
            services2.len()
        )));
    }
    let last = n - 1;
    let (mut su, mut sv) = (0.0f64, 0.0f64);
    let mut best_head = 0.0f64; // max_{i ≤ current j} (SV_i − SU_i), includes i = 0
    let mut best = 0.0f64; // j = 0 term
    for r in 1..=last {
        let k = last - r;
        su += services1[k] - inter_arrivals[k];
        sv += services2[k] - inter_arrivals[k] + services1[k] - services1[k + 1];
        best_head = best_head.max(sv - su);
        best = best.max(su + best_head);
    }
    Ok(best)
}

/// Last job's end-to-end waiting time in an `M`-queue *packet* tandem
/// (every queue reuses the job's single service draw `Y[k]`) from its
/// reversed representation:
///
/// ```text
/// W = max_{0 ≤ m ≤ L} [ Σ_{r≤m} (Y[L−r] − X[L−r]) + (M−1)·(max_{r≤m} Y[L−r] − Y[L]) ],
/// ```
///
/// the running maximum including the last job's own draw. Shared services
/// collapse the chain maximum: the switch jobs all sit at the largest
/// service in the window, hence the `(M−1)·max` term. Exact pathwise; `M=1`
/// reduces to the single-queue reversed walk.
///
/// # Errors
///
/// [`Error::DimensionMismatch`] for inconsistent lengths,
/// [`Error::InvalidParameter`] for `num_queues = 0`.
pub fn packet_reversed_waiting(
    inter_arrivals: &[f64],
    shared_services: &[f64],
    num_queues: usize,
) -> Result<f64> {
    let n = shared_services.len();
    if n == 0 || inter_arrivals.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "got {} gaps for {n} shared services",
            inter_arrivals.len()
        )));
    }
    if num_queues == 0 {
        return Err(Error::InvalidParameter("num_queues must be ≥ 1".into()));
    }
    let last = n - 1;
    let extra = (num_queues - 1) as f64;
    let mut walk = 0.0f64;
    let mut run_max = shared_services[last];
    let mut best = 0.0f64;
    for r in 1..=last {
        let k = last - r;
        walk += shared_services[k] - inter_arrivals[k];
        run_max = run_max.max(shared_services[k]);
        best = best.max(walk + extra * (run_max - shared_services[last]));
    }
    Ok(best)
}

/// Alternating-renewal gap sequence: a fair coin (one uniform) picks which
/// law starts, then laws alternate deterministically. Returns `n` gaps.
///
/// # Errors
///
/// [`Error::Unsupported`] if either law cannot be sampled.
pub fn ar_stream(
    dist1: &Distribution,
    dist2: &Distribution,
    rng: &mut StreamRng,
    n: usize,
) -> Result<Vec<f64>> {
    let samplers = [Sampler::new(dist1)?, Sampler::new(dist2)?];
    let start = usize::from(rng.uniform() >= 0.5);
    Ok((0..n)
        .map(|i| samplers[(start + i) % 2].draw(rng))
        .collect())
}

/// Streaming gap source used by the engine; mirrors [`ar_stream`] draw for
/// draw so both produce identical sequences from the same stream.
enum GapStream {
    Renewal(Sampler),
    Alternating { samplers: [Sampler; 2], next: usize },
}

impl GapStream {
    fn start(spec: &ArrivalProcess, rng: &mut StreamRng) -> Result<Self> {
        match spec {
            ArrivalProcess::Renewal { dist } => Ok(Self::Renewal(Sampler::new(dist)?)),
            ArrivalProcess::Alternating { dist1, dist2 } => Ok(Self::Alternating {
                samplers: [Sampler::new(dist1)?, Sampler::new(dist2)?],
                next: usize::from(rng.uniform() >= 0.5),
            }),
        }
    }

    fn next(&mut self, rng: &mut StreamRng) -> f64 {
        match self {
            Self::Renewal(s) => s.draw(rng),
            Self::Alternating { samplers, next } => {
                let g = samplers[*next].draw(rng);
                *next = 1 - *next;
                g
            }
        }
    }
}

/// Pre-validated per-run execution plan.
struct Plan {
    arrivals: ArrivalProcess,
    services: Vec<Sampler>,
    packet: bool,
    num_queues: usize,
    path_len: usize,
    seed: u64,
}

impl Plan {
    fn build(spec: &TandemSpec, cfg: &SimConfig) -> Result<Self> {
        spec.validate()?;
        cfg.validate(spec.num_queues())?;
        let services = if spec.mode == ServiceMode::Packet {
            vec![Sampler::new(&spec.services[0])?]
        } else {
            spec.services
                .iter()
                .map(Sampler::new)
                .collect::<Result<_>>()?
        };
        Ok(Self {
            arrivals: spec.arrivals.clone(),
            services,
            packet: spec.mode == ServiceMode::Packet,
            num_queues: spec.num_queues(),
            path_len: cfg.path_len as usize,
            seed: cfg.seed,
        })
    }

    /// Simulates one path and returns `(waiting, sojourn)` of its last job.
    fn run(&self, run: u64) -> (f64, f64) {
        let mut arr_rng = StreamRng::new(self.seed, run, LANE_ARRIVALS, 0);
        let mut gaps = GapStream::start(&self.arrivals, &mut arr_rng)
            .expect("plan was validated at construction");
        let mut svc_rngs: Vec<StreamRng> = (0..self.services.len() as u64)
            .map(|j| StreamRng::new(self.seed, run, LANE_SERVICE_BASE + j, 0))
            .collect();
        let mut sweep = LindleySweep::new(self.num_queues);
        let mut arrival = 0.0;
        let (mut exit, mut waiting) = (0.0, 0.0);
        for k in 0..self.path_len {
            if k > 0 {
                arrival += gaps.next(&mut arr_rng);
            }
            let (e, waited) = if self.packet {
                let y = self.services[0].draw(&mut svc_rngs[0]);
                sweep.push_column_with_wait(arrival, |_| y)
            } else {
                sweep.push_column_with_wait(arrival, |j| self.services[j].draw(&mut svc_rngs[j]))
            };
            if k + 1 == self.path_len {
                exit = e;
                waiting = waited;
            }
        }
        (waiting, exit - arrival)
    }
}

fn pick(metric: Metric, outcome: (f64, f64)) -> f64 {
    match metric {
        Metric::Waiting => outcome.0,
        Metric::Sojourn => outcome.1,
    }
}

/// One sample (the last job's waiting or sojourn time) per run, in run
/// order. Uses the rayon thread pool when the `parallel` feature is enabled,
/// with output identical to [`run_samples_sequential`].
///
/// # Errors
///
/// Validation errors of [`TandemSpec::validate`]/[`SimConfig::validate`], or
/// [`Error::Unsupported`] for laws that cannot be sampled.
pub fn run_samples(spec: &TandemSpec, cfg: &SimConfig) -> Result<Vec<f64>> {
    let plan = Plan::build(spec, cfg)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..cfg.runs)
            .into_par_iter()
            .map(|r| pick(cfg.metric, plan.run(r)))
            .collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..cfg.runs)
            .map(|r| pick(cfg.metric, plan.run(r)))
            .collect())
    }
}

/// Single-threaded variant of [`run_samples`], always available; the
/// parallel engine must agree with it bit for bit.
///
/// # Errors
///
/// Same as [`run_samples`].
pub fn run_samples_sequential(spec: &TandemSpec, cfg: &SimConfig) -> Result<Vec<f64>> {
    let plan = Plan::build(spec, cfg)?;
    Ok((0..cfg.runs)
        .map(|r| pick(cfg.metric, plan.run(r)))
        .collect())
}

/// Empirical CCDF of the configured metric on `cfg.x_grid`, with binomial
/// standard errors `sqrt(p̂(1−p̂)/runs)`; one sample per run (the last job).
///
/// # Errors
///
/// Same as [`run_samples`].
pub fn simulate(spec: &TandemSpec, cfg: &SimConfig) -> Result<CcdfCurve> {
    let mut samples = run_samples(spec, cfg)?;
    samples.sort_by(f64::total_cmp);
    let runs = samples.len() as f64;
    let points = cfg
        .x_grid
        .iter()
        .map(|&x| {
            let above = samples.len() - samples.partition_point(|&s| s <= x);
            let p = above as f64 / runs;
            CcdfPoint {
                x,
                value: p,
                stderr: (p * (1.0 - p) / runs).sqrt(),
            }
        })
        .collect();
    CcdfCurve::new(CurveKind::Simulation, points)
}
