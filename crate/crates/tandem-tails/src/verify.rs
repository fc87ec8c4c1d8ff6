//! Statistical certification of the tail-bound machinery.
//!
//! The waiting-time analysis rests on a two-dimensional fixed-point equation
//! and on a small set of coefficient inequalities. This module turns both
//! into numerical checks with explicit tolerances, plus a generic
//! bound-vs-simulation dominance test. Every check is deterministic given a
//! seed and emits a [`VerificationReport`] that serializes to JSON and
//! renders as a fixed-width text summary.
//!
//! # The fixed point
//!
//! With per-step increments `(U, V) = (Y − X, Z − X)` (both services share
//! the gap `X` of their step), define the reversed-walk suprema
//!
//! ```text
//! T¹ = sup_{i ≥ 1} (U_1 + … + U_i),
//! T² = sup_{1 ≤ i < j} (V_1 + … + V_i + U_{i+1} + … + U_j),
//! ```
//!
//! and `ψ(u, v) = P(T¹ ≤ u, T² ≤ v)`. Peeling one step off both suprema
//! shows that `ψ` solves
//!
//! ```text
//! E[ 1{u ≥ U} · ψ((u−U) ∧ (v−V), v−V) ] = ψ(u, v),
//! ```
//!
//! and it is the unique bounded solution with limit 1 at `(+∞, +∞)`.
//! [`estimate_psi`] samples the truncated walk with a drift-based early exit
//! and reports a bound on the truncation bias; [`check_fixed_point`] compares
//! the two sides of the equation with paired sampling at 4σ.
//!
//! # Pairing scheme
//!
//! Estimating both sides from the *same* streams is vacuous: the one-step
//! peel makes the two indicators identical sample by sample, so their
//! difference is identically zero and the check would pass even for wrong
//! code. Instead, sample `r` of the direct side uses stream `r` in full,
//! while sample `r` of the expectation side pairs the first increment of
//! stream `r` with the continuation of stream `r+1 mod n`. Every sample
//! remains exactly distributed; neighbouring differences share a stream, so
//! most of the indicator variance cancels while the comparison stays
//! informative. The difference sequence is 1-dependent, hence standard
//! errors come from batch means over 100 contiguous batches.
//!
//! # Early exit
//!
//! `T¹` and `T²` are suprema of negative-drift walks, so a path can stop as
//! soon as the current running maxima can no longer flip the indicator. For
//! a rate `θ_c` with `E[e^{θ_c U}] ≤ 1` and `ρ = E[e^{θ_c V}] < 1`, the
//! probability that the remaining path raises `T¹` above `u` or `T²` above
//! `v` is at most
//!
//! ```text
//! e^{−θ_c(u − SU)} + e^{−θ_c(v − SU − P)} + ρ/(1−ρ) · e^{−θ_c(v − SV)},
//! ```
//!
//! where `SU`, `SV` are the running sums and `P` the running maximum of
//! `SV_i − SU_i`. The walk stops once this residual drops below 1e−9; paths
//! that exhaust the horizon report their residual as a bias bound.

use serde::{Deserialize, Serialize};

use crate::curve::CcdfCurve;
use crate::dist::{Distribution, Sampler};
use crate::error::{Error, Result};
use crate::polyexp::PolyExpParams;
use crate::rates::solve_theta;
use crate::rng::StreamRng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default walk truncation used by the checkers.
pub const DEFAULT_HORIZON: usize = 2000;
/// Smallest accepted walk truncation.
const MIN_HORIZON: usize = 100;
/// Residual flip probability below which a path stops early.
const EXIT_TOL: f64 = 1e-9;
/// Batch count for the 1-dependent difference sequence.
const NUM_BATCHES: usize = 100;
/// Sigma multiplier for stochastic equality checks.
const K_SIGMA_EQUALITY: f64 = 4.0;

const LANE_X: u64 = 0;
const LANE_Y: u64 = 1;
const LANE_Z: u64 = 2;

/// One evaluated constraint inside a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    /// Evaluation point `(u, v)`; curve checks store `(x, 0)`.
    pub point: (f64, f64),
    /// Left-hand side of the constraint as checked.
    pub lhs: f64,
    /// Right-hand side of the constraint as checked.
    pub rhs: f64,
    /// Standard error of the comparison (0 for deterministic checks).
    pub stderr: f64,
    /// Signed violation; `≤ 0` means the constraint holds within tolerance.
    pub violation: f64,
    /// Whether the constraint holds (vacuous points always pass).
    pub pass: bool,
    /// Whether the constraint was actually required at this point.
    pub enforced: bool,
    /// Label or vacuity reason; empty for plain enforced points.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

/// Outcome of one verification check over a grid of points.
///
/// `pass_count + fail_count` equals the grid size, and `worst_violation`
/// (the maximum signed violation over enforced points, 0 if there are none)
/// is `≤ 0` exactly when every point passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Which check produced this report.
    pub check_name: String,
    /// Evaluation points, one per detail record.
    pub grid: Vec<(f64, f64)>,
    /// Number of passing points.
    pub pass_count: usize,
    /// Number of failing points.
    pub fail_count: usize,
    /// Largest signed violation over enforced points.
    pub worst_violation: f64,
    /// Tolerance: a sigma multiplier for stochastic checks, an absolute
    /// margin for deterministic ones.
    pub tolerance: f64,
    /// Per-point records.
    pub details: Vec<PointRecord>,
}

impl VerificationReport {
    fn from_details(check_name: &str, tolerance: f64, details: Vec<PointRecord>) -> Self {
        let pass_count = details.iter().filter(|d| d.pass).count();
        let worst_violation = details
            .iter()
            .filter(|d| d.enforced)
            .map(|d| d.violation)
            .fold(f64::MIN, f64::max);
        Self {
            check_name: check_name.to_string(),
            grid: details.iter().map(|d| d.point).collect(),
            pass_count,
            fail_count: details.len() - pass_count,
            worst_violation: if worst_violation == f64::MIN {
                0.0
            } else {
                worst_violation
            },
            tolerance,
            details,
        }
    }

    /// Whether every point passed.
    pub fn passed(&self) -> bool {
        self.fail_count == 0
    }

    /// Fraction of passing points (1.0 for an empty grid).
    pub fn pass_fraction(&self) -> f64 {
        if self.details.is_empty() {
            1.0
        } else {
            self.pass_count as f64 / self.details.len() as f64
        }
    }

    /// Fixed-width one-line summary plus one line per failing point.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "{:<26} points {:>5}  pass {:>5}  fail {:>5}  worst {:>13.5e}  tol {}\n",
            self.check_name,
            self.grid.len(),
            self.pass_count,
            self.fail_count,
            self.worst_violation,
            self.tolerance,
        );
        for rec in self.details.iter().filter(|r| !r.pass) {
            out.push_str(&format!(
                "  FAIL {:<10} at ({:>9.4}, {:>9.4})  lhs {:>13.6e}  rhs {:>13.6e}  stderr {:>10.3e}\n",
                rec.note, rec.point.0, rec.point.1, rec.lhs, rec.rhs, rec.stderr,
            ));
        }
        out
    }
}

/// Monte Carlo estimate of `ψ(u, v)` with a truncation-bias bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiEstimate {
    /// Estimated probability `P(T¹ ≤ u, T² ≤ v)`.
    pub value: f64,
    /// Binomial standard error.
    pub stderr: f64,
    /// Mean residual flip probability at path exit; bounds the (upward)
    /// truncation bias of `value`.
    pub bias_bound: f64,
}

/// Contraction rate for the drift-based early exit.
struct ExitRule {
    theta: f64,
    /// `ρ/(1−ρ)` with `ρ = E[e^{θV}]`, weighting the mixed-walk term.
    mixed: f64,
}

impl ExitRule {
    /// Residual flip probability given the current slacks
    /// `c1 = u − SU`, `c2 = v − SU − P`, `c3 = v − SV`.
    fn residual(&self, c1: f64, c2: f64, c3: f64) -> f64 {
        let term = |c: f64| {
            if c == f64::INFINITY {
                0.0
            } else {
                (-self.theta * c).exp()
            }
        };
        term(c1) + term(c2) + self.mixed * term(c3)
    }
}

/// Picks `θ_c` with `E[e^{θ_c U}] ≤ 1` and `E[e^{θ_c V}] < 1`: 90% of the
/// smallest decay-rate root when one exists, otherwise a halving search from
/// the arrival rate (a stable walk always admits such a rate).
fn exit_rule(x: &Distribution, y: &Distribution, z: &Distribution) -> Result<ExitRule> {
    let mut theta = f64::INFINITY;
    if let Ok(report) = solve_theta(x, y) {
        theta = theta.min(report.theta);
    }
    if let Ok(report) = solve_theta(x, z) {
        theta = theta.min(report.theta);
    }
    theta = if theta.is_finite() {
        0.9 * theta
    } else {
        1.0 / x.mean()
    };
    for _ in 0..200 {
        let rho_u = y.mgf(theta) * x.laplace(theta);
        let rho_v = z.mgf(theta) * x.laplace(theta);
        if rho_u <= 1.0 && rho_v < 1.0 {
            return Ok(ExitRule {
                theta,
                mixed: rho_v / (1.0 - rho_v),
            });
        }
        theta *= 0.5;
    }
    Err(Error::Numerics(
        "no contraction rate found for the early-exit rule".to_string(),
    ))
}

fn require_stable(x: &Distribution, y: &Distribution, z: &Distribution) -> Result<()> {
    if y.mean() >= x.mean() || z.mean() >= x.mean() {
        return Err(Error::Unstable(format!(
            "service means ({}, {}) must both lie below the gap mean {}",
            y.mean(),
            z.mean(),
            x.mean()
        )));
    }
    Ok(())
}

/// Runs one truncated walk and returns `(indicator, bias bound)` for the
/// event `{T¹ ≤ u, T² ≤ v}`. The first `skip` increment triples of the
/// stream are discarded, which lets a caller reuse a stream's continuation.
#[allow(clippy::too_many_arguments)]
fn walk_indicator(
    sx: &Sampler,
    sy: &Sampler,
    sz: &Sampler,
    seed: u64,
    run: u64,
    skip: usize,
    u: f64,
    v: f64,
    horizon: usize,
    exit: &ExitRule,
) -> (f64, f64) {
    let mut rx = StreamRng::new(seed, run, LANE_X, 0);
    let mut ry = StreamRng::new(seed, run, LANE_Y, 0);
    let mut rz = StreamRng::new(seed, run, LANE_Z, 0);
    for _ in 0..skip {
        sx.draw(&mut rx);
        sy.draw(&mut ry);
        sz.draw(&mut rz);
    }
    let (mut su, mut sv) = (0.0_f64, 0.0_f64);
    let (mut t1, mut t2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut prefdiff = f64::NEG_INFINITY;
    let mut residual = 1.0;
    for _ in 0..horizon {
        let gap = sx.draw(&mut rx);
        su += sy.draw(&mut ry) - gap;
        sv += sz.draw(&mut rz) - gap;
        // T² pairs the running U-sum with the best earlier V-switch, which
        // must come strictly before the current step.
        if prefdiff > f64::NEG_INFINITY {
            t2 = t2.max(su + prefdiff);
        }
        t1 = t1.max(su);
        prefdiff = prefdiff.max(sv - su);
        if t1 > u || t2 > v {
            return (0.0, 0.0);
        }
        residual = exit.residual(u - su, v - su - prefdiff, v - sv);
        if residual <= EXIT_TOL {
            return (1.0, residual);
        }
    }
    (1.0, residual.min(1.0))
}

/// Monte Carlo estimate of `ψ(u, v) = P(T¹ ≤ u, T² ≤ v)` for the walk with
/// increments `(Y − X, Z − X)`.
///
/// Paths are truncated at `horizon` steps with the drift-based early exit
/// described in the module docs; the mean residual is returned as
/// [`PsiEstimate::bias_bound`]. `(+∞, +∞)` short-circuits to probability 1.
///
/// # Errors
///
/// * [`Error::InvalidParameter`] — NaN coordinates, `horizon < 100`, or
///   `n_mc = 0`;
/// * [`Error::Unstable`] — a service mean at or above the gap mean.
#[allow(clippy::too_many_arguments)]
pub fn estimate_psi(
    x: &Distribution,
    y: &Distribution,
    z: &Distribution,
    u: f64,
    v: f64,
    horizon: usize,
    n_mc: usize,
    seed: u64,
) -> Result<PsiEstimate> {
    if u.is_nan() || v.is_nan() {
        return Err(Error::InvalidParameter(
            "evaluation point must not be NaN".to_string(),
        ));
    }
    if horizon < MIN_HORIZON {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is below the minimum {MIN_HORIZON}"
        )));
    }
    if n_mc == 0 {
        return Err(Error::InvalidParameter("n_mc must be positive".to_string()));
    }
    require_stable(x, y, z)?;
    if u == f64::INFINITY && v == f64::INFINITY {
        return Ok(PsiEstimate {
            value: 1.0,
            stderr: 0.0,
            bias_bound: 0.0,
        });
    }
    let exit = exit_rule(x, y, z)?;
    let (sx, sy, sz) = (Sampler::new(x)?, Sampler::new(y)?, Sampler::new(z)?);
    let run_one = |r: u64| walk_indicator(&sx, &sy, &sz, seed, r, 0, u, v, horizon, &exit);
    #[cfg(feature = "parallel")]
    let samples: Vec<(f64, f64)> = (0..n_mc as u64).into_par_iter().map(run_one).collect();
    #[cfg(not(feature = "parallel"))]
    let samples: Vec<(f64, f64)> = (0..n_mc as u64).map(run_one).collect();
    let n = n_mc as f64;
    let value = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let bias_bound = samples.iter().map(|s| s.1).sum::<f64>() / n;
    Ok(PsiEstimate {
        value,
        stderr: (value * (1.0 - value) / n).sqrt(),
        bias_bound,
    })
}

/// Mean and batch-means standard error of a (possibly 1-dependent) sequence.
///
/// The sequence length must be a multiple of the batch count.
fn batch_means(values: &[f64], batches: usize) -> (f64, f64) {
    debug_assert!(batches >= 2 && values.len() % batches == 0);
    let size = values.len() / batches;
    let means: Vec<f64> = values
        .chunks_exact(size)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
    (grand, (var / batches as f64).sqrt())
}

/// Compares both sides of the defining fixed-point equation at each grid
/// point, flagging `|lhs − rhs| > 4σ` with the paired-stream estimator from
/// the module docs.
///
/// `n_mc` is rounded down to a multiple of 100 (the batch count). The
/// expectation side is `lhs`, the direct `ψ` estimate is `rhs`.
///
/// # Errors
///
/// * [`Error::InvalidParameter`] — `horizon < 100` or `n_mc < 200`;
/// * [`Error::Unstable`] — a service mean at or above the gap mean.
#[allow(clippy::too_many_arguments)]
pub fn check_fixed_point(
    x: &Distribution,
    y: &Distribution,
    z: &Distribution,
    grid: &[(f64, f64)],
    n_mc: usize,
    horizon: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if horizon < MIN_HORIZON {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is below the minimum {MIN_HORIZON}"
        )));
    }
    if n_mc < 2 * NUM_BATCHES {
        return Err(Error::InvalidParameter(format!(
            "n_mc = {n_mc} is too small for {NUM_BATCHES} batches"
        )));
    }
    require_stable(x, y, z)?;
    let exit = exit_rule(x, y, z)?;
    let (sx, sy, sz) = (Sampler::new(x)?, Sampler::new(y)?, Sampler::new(z)?);
    let n = (n_mc / NUM_BATCHES) * NUM_BATCHES;

    let evaluate = |&(u, v): &(f64, f64)| -> PointRecord {
        let mut diffs = Vec::with_capacity(n);
        let (mut lhs_sum, mut rhs_sum) = (0.0, 0.0);
        for r in 0..n as u64 {
            let rhs = walk_indicator(&sx, &sy, &sz, seed, r, 0, u, v, horizon, &exit).0;
            // Redraw the first increment triple of stream r (identical to
            // the one consumed by the direct side: common random numbers).
            let mut rx = StreamRng::new(seed, r, LANE_X, 0);
            let mut ry = StreamRng::new(seed, r, LANE_Y, 0);
            let mut rz = StreamRng::new(seed, r, LANE_Z, 0);
            let gap = sx.draw(&mut rx);
            let step_u = sy.draw(&mut ry) - gap;
            let step_v = sz.draw(&mut rz) - gap;
            let lhs = if u >= step_u {
                let next = (r + 1) % n as u64;
                walk_indicator(
                    &sx,
                    &sy,
                    &sz,
                    seed,
                    next,
                    1,
                    (u - step_u).min(v - step_v),
                    v - step_v,
                    horizon - 1,
                    &exit,
                )
                .0
            } else {
                0.0
            };
            lhs_sum += lhs;
            rhs_sum += rhs;
            diffs.push(lhs - rhs);
        }
        let (diff_mean, diff_stderr) = batch_means(&diffs, NUM_BATCHES);
        let violation = diff_mean.abs() - K_SIGMA_EQUALITY * diff_stderr;
        PointRecord {
            point: (u, v),
            lhs: lhs_sum / n as f64,
            rhs: rhs_sum / n as f64,
            stderr: diff_stderr,
            violation,
            pass: violation <= 0.0,
            enforced: true,
            note: String::new(),
        }
    };
    #[cfg(feature = "parallel")]
    let details: Vec<PointRecord> = grid.par_iter().map(evaluate).collect();
    #[cfg(not(feature = "parallel"))]
    let details: Vec<PointRecord> = grid.iter().map(evaluate).collect();
    Ok(VerificationReport::from_details(
        "fixed-point",
        K_SIGMA_EQUALITY,
        details,
    ))
}

/// Monte Carlo check of the one-sided certificate condition
/// `E[1{u ≥ U} γ((u−U) ∧ (v−V), v−V)] ≥ γ(u, v)` for an arbitrary
/// certificate function, at 4σ on points where `γ(u, v) > 0` strictly
/// (other points pass vacuously).
///
/// All grid points share one pool of `n_mc` increment draws, so reports are
/// deterministic and points are directly comparable.
///
/// # Errors
///
/// [`Error::InvalidParameter`] if `n_mc < 2`.
pub fn check_certificate_inequality<F>(
    gamma: &F,
    x: &Distribution,
    y: &Distribution,
    z: &Distribution,
    grid: &[(f64, f64)],
    n_mc: usize,
    seed: u64,
) -> Result<VerificationReport>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    if n_mc < 2 {
        return Err(Error::InvalidParameter(
            "n_mc must be at least 2".to_string(),
        ));
    }
    let (sx, sy, sz) = (Sampler::new(x)?, Sampler::new(y)?, Sampler::new(z)?);
    let increments: Vec<(f64, f64)> = (0..n_mc as u64)
        .map(|r| {
            let mut rx = StreamRng::new(seed, r, LANE_X, 0);
            let mut ry = StreamRng::new(seed, r, LANE_Y, 0);
            let mut rz = StreamRng::new(seed, r, LANE_Z, 0);
            let gap = sx.draw(&mut rx);
            (sy.draw(&mut ry) - gap, sz.draw(&mut rz) - gap)
        })
        .collect();

    let evaluate = |&(u, v): &(f64, f64)| -> PointRecord {
        let rhs = gamma(u, v);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for &(step_u, step_v) in &increments {
            let s = if u >= step_u {
                gamma((u - step_u).min(v - step_v), v - step_v)
            } else {
                0.0
            };
            sum += s;
            sum_sq += s * s;
        }
        let n = n_mc as f64;
        let lhs = sum / n;
        let stderr = (((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0) / n).sqrt();
        if rhs > 0.0 {
            let violation = rhs - lhs - K_SIGMA_EQUALITY * stderr;
            PointRecord {
                point: (u, v),
                lhs,
                rhs,
                stderr,
                violation,
                pass: violation <= 0.0,
                enforced: true,
                note: String::new(),
            }
        } else {
            PointRecord {
                point: (u, v),
                lhs,
                rhs,
                stderr,
                violation: 0.0,
                pass: true,
                enforced: false,
                note: "vacuous: certificate is nonpositive here".to_string(),
            }
        }
    };
    #[cfg(feature = "parallel")]
    let details: Vec<PointRecord> = grid.par_iter().map(evaluate).collect();
    #[cfg(not(feature = "parallel"))]
    let details: Vec<PointRecord> = grid.iter().map(evaluate).collect();
    Ok(VerificationReport::from_details(
        "certificate-inequality",
        K_SIGMA_EQUALITY,
        details,
    ))
}

/// [`check_certificate_inequality`] specialized to a fitted poly-exponential
/// certificate: `γ` is the certificate masked to zero outside its validity
/// region, and both services are exponential with rate `mu`.
///
/// # Errors
///
/// [`Error::InvalidParameter`] for a non-positive `mu`, `n_mc < 2`, or a
/// `mu` inconsistent with `params`.
pub fn check_gamma_inequality(
    params: &PolyExpParams,
    x: &Distribution,
    mu: f64,
    grid: &[(f64, f64)],
    n_mc: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if (mu - params.mu).abs() > 1e-12 * mu.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} disagrees with the fitted service rate {}",
            params.mu
        )));
    }
    let service = Distribution::exponential(mu)?;
    let gamma = |u: f64, v: f64| {
        if params.domain_contains(u, v) {
            params.certificate(u, v)
        } else {
            0.0
        }
    };
    check_certificate_inequality(&gamma, x, &service, &service, grid, n_mc, seed)
}

/// Closed-form check of the eight coefficient inequalities that make a
/// fitted certificate valid, at each grid point.
///
/// With both services exponential, the service-side conditional moments
/// collapse to the constants `k₀ = μ/(μ−θ)` and `k₁ = μ/(μ−θ)²`; the
/// remaining expectations run over the gap law by exact evaluation or
/// adaptive quadrature. Inequality 6 is vacuous for continuous services,
/// inequality 7 whenever `P(u + X < 0) = 0`, and inequality 8 whenever
/// `a ≥ 0`; vacuous points pass with an explanatory note. The report holds
/// eight records per grid point and compares margins against the absolute
/// tolerance `tol`.
///
/// # Errors
///
/// * [`Error::InvalidParameter`] — `mu` inconsistent with `params`, or a
///   grid point outside `u ≥ −a₊`, `v ≥ −a`, `v ≥ u`;
/// * [`Error::Numerics`] — quadrature failure for the gap-law expectations.
pub fn check_eight_inequalities(
    params: &PolyExpParams,
    x: &Distribution,
    mu: f64,
    grid: &[(f64, f64)],
    tol: f64,
) -> Result<VerificationReport> {
    if (mu - params.mu).abs() > 1e-12 * mu.abs().max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "mu = {mu} disagrees with the fitted service rate {}",
            params.mu
        )));
    }
    let (theta, a) = (params.theta, params.a);
    let (ca, cb, cc, cd) = (
        params.coef_a,
        params.coef_b,
        params.coef_c,
        params.coef_d,
    );
    for &(u, v) in grid {
        if u < -a.max(0.0) - 1e-12 || v < -a - 1e-12 || v < u - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "grid point ({u}, {v}) violates u ≥ −a₊, v ≥ −a, v ≥ u for a = {a}"
            )));
        }
    }
    let k0 = mu / (mu - theta);
    let k1 = mu / ((mu - theta) * (mu - theta));
    let laplace = x.laplace(theta);
    let l1 = x.expect(|s| s * (-theta * s).exp())?;

    // Point-independent margins: 2 pairs the walk's exponential moments with
    // the B/C trade-off, 3 is the boundary-level condition, 4 ties C to D.
    let lhs2 = cb * (k1 * laplace - k0 * l1) + cc * k0 * (laplace / mu - l1);
    let lhs3 = (theta * a).exp() * ((ca + cd) * k0 - (cb + cc) * (a * k0 + k1));
    let lhs4 = cc * k1 + cd * (1.0 - k0);

    let enforced = |label: &str, point: (f64, f64), lhs: f64, rhs: f64| PointRecord {
        point,
        lhs,
        rhs,
        stderr: 0.0,
        violation: rhs - lhs - tol,
        pass: rhs - lhs - tol <= 0.0,
        enforced: true,
        note: label.to_string(),
    };
    let vacuous = |label: &str, point: (f64, f64), reason: &str| PointRecord {
        point,
        lhs: 0.0,
        rhs: 0.0,
        stderr: 0.0,
        violation: 0.0,
        pass: true,
        enforced: false,
        note: format!("{label} vacuous: {reason}"),
    };

    let mut details = Vec::with_capacity(8 * grid.len());
    for &(u, v) in grid {
        let point = (u, v);
        // 1: positivity of the polynomial part against the conditioned walk.
        let w = |s: f64| (-(mu * (u + s).max(0.0))).exp();
        let ew = x.expect(|s| (-theta * s).exp() * w(s))?;
        let pu = x.expect(w)?;
        let n1 = k0 * ew;
        let n2 = k0 * x.expect(|s| (v + s) * (-theta * s).exp() * w(s))? - k1 * ew;
        let h = |s: f64| {
            let t = u + s;
            if t >= 0.0 {
                -(-(mu * t)).exp() / mu
            } else {
                t - 1.0 / mu
            }
        };
        let n3 = k0 * x.expect(|s| (-theta * s).exp() * h(s))?;
        details.push(enforced(
            "ineq-1",
            point,
            (ca * n1 + cb * n2 + cc * n3) / pu,
            0.0,
        ));
        details.push(enforced("ineq-2", point, lhs2, 0.0));
        details.push(enforced("ineq-3", point, lhs3, 1.0));
        details.push(enforced("ineq-4", point, lhs4, 0.0));
        // 5: the D coefficient covers the mass where the first service
        // outlasts the slack.
        let p5 = x.expect(|s| {
            let t = u + s;
            if t >= 0.0 {
                (-(mu * t)).exp()
            } else {
                0.0
            }
        })?;
        details.push(enforced("ineq-5", point, cd * k0 * p5, p5));
        details.push(vacuous("ineq-6", point, "P(Y = 0) = 0"));
        // 7: conditioned on a negative slack, the discount e^{−θ(u+X)}
        // exceeds 1, so D·k₀ = 1 suffices; vacuous when the event is null.
        let p7 = match *x {
            Distribution::Deterministic { value } => {
                if value < -u {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 1.0 - x.tail(-u),
        };
        if p7 > 0.0 {
            let n7 = x.expect(|s| {
                if s < -u {
                    (-(theta * (u + s))).exp()
                } else {
                    0.0
                }
            })?;
            details.push(enforced("ineq-7", point, cd * k0 * n7 / p7, 1.0));
        } else {
            details.push(vacuous("ineq-7", point, "P(u + X < 0) = 0"));
        }
        if a >= 0.0 {
            details.push(vacuous("ineq-8", point, "a ≥ 0, all indicators empty"));
        } else {
            // 8 (negative shift only): both services exceed their shifted
            // levels while the first lands inside the width-|a| window.
            let zf = |s: f64| (-(mu * (v + a + s).max(0.0))).exp();
            let window = |s: f64| {
                let t = u + s;
                (-(mu * (t + a).max(0.0))).exp() - (-(mu * t.max(0.0))).exp()
            };
            let gc = |s: f64| {
                let t = u + s;
                if t <= 0.0 {
                    return 0.0;
                }
                let lo = (t + a).max(0.0);
                (t - lo) * (-(mu * lo)).exp() - ((-(mu * lo)).exp() - (-(mu * t)).exp()) / mu
            };
            let gd = |s: f64| {
                let t = u + s;
                if t <= 0.0 {
                    return 0.0;
                }
                let lo = (t + a).max(0.0);
                mu * (-(theta * t)).exp() * (((theta - mu) * t).exp() - ((theta - mu) * lo).exp())
                    / (theta - mu)
            };
            let q = x.expect(|s| window(s) * zf(s))?;
            let ec = x.expect(|s| gc(s) * zf(s))?;
            let ed = x.expect(|s| gd(s) * zf(s))?;
            let boost = (theta * a).exp();
            let lhs8 = boost * (ca * k0 - cb * (k1 + a * k0)) * q + cc * boost * k0 * ec + cd * ed;
            details.push(enforced("ineq-8", point, lhs8, q));
        }
    }
    Ok(VerificationReport::from_details(
        "eight-inequalities",
        tol,
        details,
    ))
}

/// Checks that an analytic bound curve dominates a simulated curve:
/// `bound ≥ sim − k_sigma·stderr` at every shared grid point.
///
/// # Errors
///
/// [`Error::GridMismatch`] if the two curves are not sampled on the same
/// x-grid.
pub fn check_dominance(
    bound: &CcdfCurve,
    sim: &CcdfCurve,
    k_sigma: f64,
) -> Result<VerificationReport> {
    if !bound.same_grid(sim) {
        return Err(Error::GridMismatch(format!(
            "{} and {} curves are sampled on different grids",
            bound.kind, sim.kind
        )));
    }
    let details = bound
        .points
        .iter()
        .zip(&sim.points)
        .map(|(b, s)| {
            let violation = s.value - b.value - k_sigma * s.stderr;
            PointRecord {
                point: (b.x, 0.0),
                lhs: b.value,
                rhs: s.value,
                stderr: s.stderr,
                violation,
                pass: violation <= 0.0,
                enforced: true,
                note: String::new(),
            }
        })
        .collect();
    Ok(VerificationReport::from_details(
        &format!("dominance:{}-over-{}", bound.kind, sim.kind),
        k_sigma,
        details,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CcdfCurve, CurveKind};
    use crate::polyexp::fit_gim_mm;

    fn det(v: f64) -> Distribution {
        Distribution::deterministic(v).unwrap()
    }

    fn exp(r: f64) -> Distribution {
        Distribution::exponential(r).unwrap()
    }

    /// u-values paired with a few v-offsets, keeping v ≥ max(u, floor).
    fn fan_grid(us: &[f64], offsets: &[f64], floor: f64) -> Vec<(f64, f64)> {
        let mut grid = Vec::new();
        for &u in us {
            for &d in offsets {
                grid.push((u, u.max(floor) + d));
            }
        }
        grid
    }

    #[test]
    fn psi_estimate_edge_cases() {
        let (x, y, z) = (det(2.0), exp(1.0), exp(1.0));
        let inf = estimate_psi(&x, &y, &z, f64::INFINITY, f64::INFINITY, 200, 10, 1).unwrap();
        assert_eq!(
            inf,
            PsiEstimate {
                value: 1.0,
                stderr: 0.0,
                bias_bound: 0.0
            }
        );
        // T¹ is at least the first increment, which is at least −2 here.
        let impossible = estimate_psi(&x, &y, &z, -3.0, 5.0, 200, 4000, 1).unwrap();
        assert_eq!(impossible.value, 0.0);
        assert!(matches!(
            estimate_psi(&x, &y, &z, 1.0, 1.0, 50, 100, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            estimate_psi(&x, &y, &z, 1.0, 1.0, 200, 0, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            estimate_psi(&x, &y, &z, f64::NAN, 1.0, 200, 100, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            estimate_psi(&det(0.5), &y, &z, 1.0, 1.0, 200, 100, 1),
            Err(Error::Unstable(_))
        ));
    }

    #[test]
    fn psi_estimate_is_monotone_with_tiny_bias() {
        let (x, y, z) = (det(2.0), exp(1.0), exp(1.0));
        let lo = estimate_psi(&x, &y, &z, 0.0, 1.0, 400, 20_000, 7).unwrap();
        let hi = estimate_psi(&x, &y, &z, 2.0, 3.0, 400, 20_000, 7).unwrap();
        assert!(lo.value >= 0.0 && hi.value <= 1.0);
        let sigma = lo.stderr.hypot(hi.stderr);
        assert!(
            hi.value >= lo.value - 3.0 * sigma,
            "monotonicity violated: {} vs {}",
            lo.value,
            hi.value
        );
        assert!(lo.bias_bound < 1e-6 && hi.bias_bound < 1e-6);
    }

    #[test]
    fn psi_estimate_is_insensitive_to_horizon_doubling() {
        let (x, y, z) = (det(2.0), exp(1.0), exp(1.0));
        let short = estimate_psi(&x, &y, &z, 1.0, 2.0, 200, 20_000, 11).unwrap();
        let long = estimate_psi(&x, &y, &z, 1.0, 2.0, 400, 20_000, 11).unwrap();
        let sigma = short.stderr.hypot(long.stderr).max(1e-12);
        assert!((short.value - long.value).abs() < 3.0 * sigma);
    }

    /// Degenerate second queue: the walk probability transferred through the
    /// service pair reproduces the known closed-form single-queue tail
    /// λ/μ·e^{−(μ−λ)x} for exponential gaps.
    #[test]
    fn psi_with_zero_second_service_recovers_the_mm1_tail() {
        let (lambda, mu) = (0.5, 1.0);
        let (x, y, z) = (exp(lambda), exp(mu), det(0.0));
        let exit = exit_rule(&x, &y, &z).unwrap();
        let (sx, sy, sz) = (
            Sampler::new(&x).unwrap(),
            Sampler::new(&y).unwrap(),
            Sampler::new(&z).unwrap(),
        );
        let sy_outer = Sampler::new(&y).unwrap();
        let n = 40_000_u64;
        for target in [1.0, 3.0] {
            let mut hits = 0.0;
            for r in 0..n {
                let mut outer = StreamRng::new(991, r, 9, 0);
                let own = sy_outer.draw(&mut outer);
                hits += walk_indicator(
                    &sx, &sy, &sz, 991, r, 0, target, target + own, 600, &exit,
                )
                .0;
            }
            let p = 1.0 - hits / n as f64;
            let exact = lambda / mu * (-(mu - lambda) * target).exp();
            let stderr = (exact * (1.0 - exact) / n as f64).sqrt();
            assert!(
                (p - exact).abs() < 4.0 * stderr,
                "x={target}: {p} vs {exact}"
            );
        }
    }

    #[test]
    fn fixed_point_holds_on_a_small_grid() {
        let (x, y, z) = (det(2.0), exp(1.0), exp(1.0));
        let mut grid = fan_grid(&[-1.0, 2.0, 6.0], &[0.0, 3.0], 0.0);
        grid.push((f64::INFINITY, f64::INFINITY));
        let report = check_fixed_point(&x, &y, &z, &grid, 30_000, 600, 5).unwrap();
        assert_eq!(report.pass_count + report.fail_count, grid.len());
        assert_eq!(report.fail_count, 0, "{}", report.render_text());
        assert!(report.worst_violation <= 0.0);
        let last = report.details.last().unwrap();
        assert_eq!((last.lhs, last.rhs, last.stderr), (1.0, 1.0, 0.0));
        // The pairing must not collapse to an identity: some finite point
        // needs genuine sampling noise.
        assert!(report.details.iter().any(|d| d.stderr > 0.0));
    }

    #[test]
    fn fixed_point_holds_with_degenerate_second_service() {
        let (x, y, z) = (det(2.0), exp(1.0), det(0.0));
        let grid = fan_grid(&[0.5, 3.0], &[0.5], 0.0);
        let report = check_fixed_point(&x, &y, &z, &grid, 20_000, 400, 6).unwrap();
        assert!(report.passed(), "{}", report.render_text());
    }

    #[test]
    fn fixed_point_reports_are_reproducible() {
        let (x, y, z) = (det(2.0), exp(1.0), exp(1.0));
        let grid = [(1.0, 2.0), (4.0, 6.0)];
        let a = check_fixed_point(&x, &y, &z, &grid, 10_000, 300, 9).unwrap();
        let b = check_fixed_point(&x, &y, &z, &grid, 10_000, 300, 9).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn gamma_inequality_passes_for_fitted_certificates() {
        for rho in [0.5, 0.75] {
            let x = det(1.0 / rho);
            let p = fit_gim_mm(&x, 1.0).unwrap();
            let grid = fan_grid(&[-1.5, -0.5, 0.5, 2.0, 5.0], &[0.0, 1.0, 4.0], -p.a);
            let report = check_gamma_inequality(&p, &x, 1.0, &grid, 20_000, 13).unwrap();
            assert!(report.passed(), "rho={rho}:\n{}", report.render_text());
            assert!(report.details.iter().any(|d| d.enforced));
        }
    }

    #[test]
    fn gamma_inequality_detects_a_broken_certificate() {
        let x = det(2.0);
        let mut p = fit_gim_mm(&x, 1.0).unwrap();
        p.coef_a *= 0.5;
        let grid = fan_grid(&[-1.5, -0.5, 0.5, 2.0], &[0.0, 1.0], -p.a);
        let report = check_gamma_inequality(&p, &x, 1.0, &grid, 20_000, 13).unwrap();
        assert!(
            report.fail_count >= 1,
            "halved level coefficient went undetected:\n{}",
            report.render_text()
        );
    }

    /// Degenerate second service turns the condition into the classical
    /// single-queue exponential-certificate check.
    #[test]
    fn certificate_inequality_recovers_the_single_queue_bound() {
        let (x, mu) = (exp(0.5), 1.0);
        let theta = solve_theta(&x, &exp(mu)).unwrap().theta;
        assert!((theta - 0.5).abs() < 1e-9);
        let gamma = move |u: f64, v: f64| {
            if u >= 0.0 && v >= u {
                1.0 - (-theta * u).exp()
            } else {
                0.0
            }
        };
        let grid = fan_grid(&[0.5, 1.0, 3.0, 6.0], &[0.0, 2.0], 0.0);
        let report =
            check_certificate_inequality(&gamma, &x, &exp(mu), &det(0.0), &grid, 30_000, 17)
                .unwrap();
        assert!(report.passed(), "{}", report.render_text());
    }

    #[test]
    fn eight_inequalities_hold_with_vacuous_six_and_eight() {
        for rho in [0.5, 0.75] {
            let x = det(1.0 / rho);
            let p = fit_gim_mm(&x, 1.0).unwrap();
            assert!(p.a > 0.0);
            let grid = fan_grid(&[-p.a, -0.5 * p.a, 0.0, 1.0, 4.0], &[0.0, 2.0], -p.a);
            let report = check_eight_inequalities(&p, &x, 1.0, &grid, 1e-8).unwrap();
            assert_eq!(report.details.len(), 8 * grid.len());
            assert_eq!(report.pass_count + report.fail_count, report.grid.len());
            assert!(report.passed(), "rho={rho}:\n{}", report.render_text());
            assert!(report.worst_violation <= 0.0);
            for label in ["ineq-6", "ineq-8"] {
                assert!(report
                    .details
                    .iter()
                    .filter(|d| d.note.starts_with(label))
                    .all(|d| !d.enforced));
            }
            // The B and C fits make margins 2 and 4 exact zeros.
            for label in ["ineq-2", "ineq-4"] {
                let rec = report
                    .details
                    .iter()
                    .find(|d| d.note == label)
                    .unwrap();
                assert!((rec.lhs - rec.rhs).abs() < 1e-10, "{label}: {}", rec.lhs);
            }
        }
    }

    #[test]
    fn eighth_inequality_is_enforced_for_negative_shift() {
        let x = det(1.0 / 0.95);
        let p = fit_gim_mm(&x, 1.0).unwrap();
        assert!(p.a < 0.0);
        let grid = fan_grid(&[0.0, 1.0, 3.0], &[0.0, 1.5], -p.a);
        let report = check_eight_inequalities(&p, &x, 1.0, &grid, 1e-8).unwrap();
        let eighth: Vec<_> = report
            .details
            .iter()
            .filter(|d| d.note == "ineq-8")
            .collect();
        assert_eq!(eighth.len(), grid.len());
        assert!(eighth.iter().all(|d| d.enforced && d.pass));
        assert!(report.passed(), "{}", report.render_text());
        assert!(matches!(
            check_eight_inequalities(&p, &x, 1.0, &[(-1.0, 6.0)], 1e-8),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn dominance_compares_curves_pointwise() {
        let sim = CcdfCurve::new(
            CurveKind::Simulation,
            vec![
                crate::curve::CcdfPoint {
                    x: 0.0,
                    value: 0.5,
                    stderr: 0.01,
                },
                crate::curve::CcdfPoint {
                    x: 1.0,
                    value: 0.25,
                    stderr: 0.01,
                },
            ],
        )
        .unwrap();
        let self_check = check_dominance(&sim, &sim, 0.0).unwrap();
        assert!(self_check.passed());
        let bound =
            CcdfCurve::from_values(CurveKind::Kingman, &[0.0, 1.0], &[0.51, 0.22]).unwrap();
        let report = check_dominance(&bound, &sim, 3.0).unwrap();
        assert!(report.passed());
        let tight = check_dominance(&bound, &sim, 0.0).unwrap();
        assert_eq!(tight.fail_count, 1);
        assert!(tight.worst_violation > 0.0);
        let other = CcdfCurve::from_values(CurveKind::Kingman, &[0.0, 2.0], &[0.5, 0.2]).unwrap();
        assert!(matches!(
            check_dominance(&other, &sim, 3.0),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn reports_serialize_and_render() {
        let x = det(2.0);
        let p = fit_gim_mm(&x, 1.0).unwrap();
        let report = check_eight_inequalities(&p, &x, 1.0, &[(0.0, 1.0)], 1e-8).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let text = report.render_text();
        assert!(text.starts_with("eight-inequalities"));
        assert!(text.contains("pass"));
        assert!((report.pass_fraction() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn batch_means_matches_iid_formula_on_independent_data() {
        let mut rng = StreamRng::new(3, 0, 0, 0);
        let data: Vec<f64> = (0..10_000).map(|_| rng.uniform()).collect();
        let (mean, stderr) = batch_means(&data, 100);
        let naive_mean = data.iter().sum::<f64>() / data.len() as f64;
        let naive_var =
            data.iter().map(|d| (d - naive_mean).powi(2)).sum::<f64>() / (data.len() - 1) as f64;
        let naive_stderr = (naive_var / data.len() as f64).sqrt();
        assert!((mean - naive_mean).abs() < 1e-12);
        assert!((stderr - naive_stderr).abs() / naive_stderr < 0.25);
        let constant = vec![0.25; 400];
        assert_eq!(batch_means(&constant, 100), (0.25, 0.0));
    }
}
