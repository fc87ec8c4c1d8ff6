//! Large-deviations union bound for the two-queue exponential-service tandem.
//!
//! With service rate `μ` at both queues and gap law `X`, let
//! `β(θ) = μ/(μ−θ) · E[e^{−θX}]`. For every `θ` with `β(θ) < 1` — i.e.
//! `θ` strictly between 0 and the decay rate — a union bound over the two
//! reversed-maximum terms of the waiting time gives
//!
//! ```text
//! P(W > x) ≤ ( β/(1−β) · (2μ−θ)/(2(μ−θ))
//!            + (β/(1−β))² · μ²/((μ−θ)(μ+θ)) ) · e^{−θx},
//! ```
//!
//! and [`ld_bound`] minimizes the right-hand side over the feasible `θ` for
//! each `x` separately (400-point grid plus golden refinement), clamping the
//! result to 1. The optimizer `θ*(x)` increases towards the decay rate as
//! `x` grows, so the bound attains the exact exponential slope
//! asymptotically while paying a prefactor that blows up near the rate — a
//! useful baseline that the poly-exponential certificate beats at large `x`.

use serde::{Deserialize, Serialize};

use crate::curve::{CcdfCurve, CcdfPoint, CurveKind};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::num::golden::grid_then_golden;
use crate::rates::solve_theta;

/// Outcome of the per-`x` optimization in [`ld_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdBoundResult {
    /// Minimizing decay parameter `θ* ∈ (0, rate)`.
    pub theta_star: f64,
    /// `β(θ*)`; always in `(0, 1)`.
    pub beta_star: f64,
    /// The optimized bound, clamped to `[0, 1]`.
    pub value: f64,
}

/// Minimizes the union bound over the feasible decay parameter at one `x`.
///
/// # Errors
///
/// * [`Error::InvalidParameter`] — non-positive/non-finite `mu` or negative `x`;
/// * [`Error::Unstable`] — `E[X] ≤ 1/μ` (no feasible `θ` exists);
/// * [`Error::NoFeasibleTheta`] — defensive: the scan found no `θ` with
///   `β(θ) < 1` despite a stable model.
pub fn ld_bound(arrival: &Distribution, mu: f64, x: f64) -> Result<LdBoundResult> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "service rate mu = {mu} must be positive and finite"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "evaluation point x = {x} must be nonnegative"
        )));
    }
    let service = Distribution::exponential(mu)?;
    let rate = solve_theta(arrival, &service)?.theta;
    debug_assert!(rate.is_finite() && rate > 0.0 && rate < mu);

    let log_objective = |theta: f64| -> f64 {
        if theta <= 0.0 || theta >= rate {
            return f64::INFINITY;
        }
        let beta = mu / (mu - theta) * arrival.laplace(theta);
        if !(beta < 1.0) {
            return f64::INFINITY;
        }
        let odds = beta / (1.0 - beta);
        let prefactor = odds * (2.0 * mu - theta) / (2.0 * (mu - theta))
            + odds * odds * mu * mu / ((mu - theta) * (mu + theta));
        // Optimizing the logarithm keeps the huge prefactor and the tiny
        // exponential factor on comparable scales at large x.
        prefactor.ln() - theta * x
    };
    let (theta_star, log_min) = grid_then_golden(&log_objective, 0.0, rate, 400, 1e-12);
    if !log_min.is_finite() {
        return Err(Error::NoFeasibleTheta(format!(
            "no decay parameter with beta < 1 found in (0, {rate})"
        )));
    }
    let beta_star = mu / (mu - theta_star) * arrival.laplace(theta_star);
    Ok(LdBoundResult {
        theta_star,
        beta_star,
        value: log_min.exp().min(1.0),
    })
}

/// Evaluates [`ld_bound`] across a grid, packaged as a `ld-bound` curve
/// (standard errors are zero — the bound is deterministic).
///
/// # Errors
///
/// Same as [`ld_bound`], plus curve-shape validation.
pub fn ld_curve(arrival: &Distribution, mu: f64, x_grid: &[f64]) -> Result<CcdfCurve> {
    let points = x_grid
        .iter()
        .map(|&x| {
            ld_bound(arrival, mu, x).map(|r| CcdfPoint {
                x,
                value: r.value,
                stderr: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CcdfCurve::new(CurveKind::LdBound, points)
}
