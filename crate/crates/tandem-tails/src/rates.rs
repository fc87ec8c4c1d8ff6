//! Decay rates of waiting-time tails.
//!
//! For a stable single queue with inter-arrival law `X` and service law `Y`,
//! the waiting-time tail decays exponentially with rate
//!
//! ```text
//! θ = sup{ r > 0 : E[e^{r(Y−X)}] ≤ 1 }.
//! ```
//!
//! The transform `φ(r) = E[e^{rU}]`, `U = Y − X`, is convex with `φ(0) = 1`
//! and negative slope at 0 under stability, so exactly one of two things
//! happens on `(0, θ⁺]` (θ⁺ the abscissa of convergence of the MGF of `U`):
//!
//! * `φ` crosses 1 again — θ is that root, found by bisection;
//! * `φ` stays below 1 all the way to θ⁺ ("subunit at the abscissa", possible
//!   when the MGF is finite *at* θ⁺, e.g. the very-light service law) —
//!   then θ = θ⁺ and the tail is lighter than every `e^{−rx}` with `r < θ`.
//!
//! For a tandem of `M` queues with common arrivals and service laws
//! `Y^{(1)}, …, Y^{(M)}`, define per-prefix rates
//! `θ_i = min_{j ≤ i} θ^{(j)}` and equality indicators
//! `I_i = 1{E[e^{θ_i·(Y^{(i)}−X)}] = 1}`. The polynomial degree of the
//! end-to-end tail bound for the length-`i` prefix is
//!
//! ```text
//! d_i = Σ_{j=2}^{i} I_j(θ_i)
//! ```
//!
//! — every queue beyond the first whose transform sits exactly at 1 when
//! evaluated at the prefix bottleneck rate contributes one degree. With a
//! single bottleneck: degree `i−1` if all queues tie (homogeneous case),
//! `0` if the strict bottleneck comes first, and `1` if it comes anywhere
//! later.

use serde::Serialize;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::num::root::{bisect, expand_upper};

/// Tolerance used to decide whether a transform value "equals" 1.
const EQUALITY_TOL: f64 = 1e-8;

/// Bracket width at which bisection stops.
const ROOT_X_TOL: f64 = 1e-10;

/// Decay-rate diagnosis for one queue.
///
/// Serialization note: a non-finite `theta_plus`/`theta` (possible when the
/// service law is deterministic and never exceeds the inter-arrival time)
/// becomes JSON `null`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayReport {
    /// Abscissa of convergence of the MGF of `U = Y − X`; `+∞` when `Y` is
    /// deterministic.
    pub theta_plus: f64,
    /// The decay rate `sup{r > 0 : E[e^{rU}] ≤ 1}`.
    pub theta: f64,
    /// True iff `E[e^{θ⁺U}] < 1`, i.e. the transform never returns to 1 and
    /// `theta == theta_plus` without solving a root equation.
    pub subunit_at_theta_plus: bool,
}

/// Per-prefix decay rates, equality indicators, and tail-polynomial degrees
/// for a tandem; entry `i` (0-based) describes the prefix of `i+1` queues.
#[derive(Debug, Clone, Serialize)]
pub struct CascadeReport {
    /// Non-increasing prefix rates `θ_{i+1} = min_{j ≤ i+1} θ^{(j)}`.
    pub thetas: Vec<f64>,
    /// `1` iff queue `i+1`'s transform equals 1 at its prefix rate.
    pub indicators: Vec<u8>,
    /// Predicted polynomial degree of the prefix tail bound; `degrees[0] = 0`
    /// and `degrees[i] ≤ i`.
    pub degrees: Vec<usize>,
}

/// `E[e^{θ(Y−X)}]` as an extended real, using independence of `X` and `Y`.
///
/// At `θ = +∞` (only reachable when the whole prefix has deterministic
/// services shorter than every inter-arrival) the limit under strict
/// stability is 0.
fn transform(x: &Distribution, y: &Distribution, theta: f64) -> f64 {
    if theta.is_infinite() {
        return 0.0;
    }
    let m = y.mgf(theta);
    if m.is_infinite() {
        f64::INFINITY
    } else {
        m * x.laplace(theta)
    }
}

/// Solves for the decay rate of a single queue.
///
/// # Errors
///
/// [`Error::Unstable`] if `mean(X) ≤ mean(Y)`; [`Error::Numerics`] if
/// bracketing or bisection fails (not expected for the supported laws).
///
/// # Examples
///
/// ```
/// use tandem_tails::dist::Distribution;
/// use tandem_tails::rates::solve_theta;
///
/// let x = Distribution::exponential(0.5).unwrap();
/// let y = Distribution::exponential(1.0).unwrap();
/// let r = solve_theta(&x, &y).unwrap();
/// assert!((r.theta - 0.5).abs() < 1e-9); // M/M/1: θ = μ − λ
/// ```
pub fn solve_theta(x: &Distribution, y: &Distribution) -> Result<DecayReport> {
    if !(x.mean() > y.mean()) {
        return Err(Error::Unstable(format!(
            "mean inter-arrival {} must exceed mean service {}",
            x.mean(),
            y.mean()
        )));
    }
    let theta_plus = y.mgf_abscissa();
    let phi = |t: f64| transform(x, y, t);

    if theta_plus.is_infinite() {
        // Deterministic service Y ≡ v. If X ≥ v almost surely, U ≤ 0 and the
        // transform stays below 1 for every positive θ: the tail is zero
        // beyond the deterministic backlog and the rate is +∞.
        if x.essential_infimum() >= y.essential_infimum() {
            return Ok(DecayReport {
                theta_plus,
                theta: f64::INFINITY,
                subunit_at_theta_plus: true,
            });
        }
        // Otherwise some arrivals undercut the service time and φ blows up;
        // expand a bracket geometrically, then bisect.
        let hi = expand_upper(&|t| phi(t) - 1.0, 1e-6, 1e-6, 1e9)?;
        let theta = bisect(&|t| phi(t) - 1.0, 1e-6, hi, ROOT_X_TOL)?;
        return Ok(DecayReport {
            theta_plus,
            theta,
            subunit_at_theta_plus: false,
        });
    }

    if phi(theta_plus) < 1.0 {
        return Ok(DecayReport {
            theta_plus,
            theta: theta_plus,
            subunit_at_theta_plus: true,
        });
    }

    // φ(θ⁺) ≥ 1 (possibly +∞): the root lies in (0, θ⁺]. Walk the lower end
    // toward 0 until φ < 1, then bisect against the abscissa.
    let mut lo = 0.5 * theta_plus;
    let mut tries = 0;
    while phi(lo) >= 1.0 {
        lo *= 0.5;
        tries += 1;
        if tries > 200 {
            return Err(Error::Numerics(
                "decay-rate transform never drops below 1 near 0; system is critically loaded"
                    .into(),
            ));
        }
    }
    let theta = bisect(&|t| phi(t) - 1.0, lo, theta_plus, ROOT_X_TOL)?;
    Ok(DecayReport {
        theta_plus,
        theta,
        subunit_at_theta_plus: false,
    })
}

/// Computes the per-prefix rates, indicators and degrees for a tandem with
/// common arrival law `x` and per-queue service laws `services`.
///
/// # Errors
///
/// [`Error::InvalidParameter`] if `services` is empty; [`Error::Unstable`] if
/// any single queue violates `mean(X) > mean(Y^{(j)})`.
pub fn theta_cascade(x: &Distribution, services: &[Distribution]) -> Result<CascadeReport> {
    if services.is_empty() {
        return Err(Error::InvalidParameter(
            "tandem needs at least one queue".into(),
        ));
    }
    let per_queue: Vec<DecayReport> = services
        .iter()
        .map(|y| solve_theta(x, y))
        .collect::<Result<_>>()?;

    let mut thetas = Vec::with_capacity(services.len());
    let mut running_min = f64::INFINITY;
    for r in &per_queue {
        running_min = running_min.min(r.theta);
        thetas.push(running_min);
    }

    let at_one = |j: usize, theta: f64| -> u8 {
        let v = transform(x, &services[j], theta);
        u8::from(v.is_finite() && (v - 1.0).abs() < EQUALITY_TOL)
    };

    let indicators: Vec<u8> = (0..services.len()).map(|j| at_one(j, thetas[j])).collect();

    // Degree of the prefix ending at queue i: count the queues after the
    // first whose transform sits at 1 when evaluated at the *prefix* rate.
    let degrees: Vec<usize> = (0..services.len())
        .map(|i| (1..=i).filter(|&j| at_one(j, thetas[i]) == 1).count())
        .collect();

    Ok(CascadeReport {
        thetas,
        indicators,
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn exp(rate: f64) -> Distribution {
        Distribution::exponential(rate).unwrap()
    }

    fn det(value: f64) -> Distribution {
        Distribution::deterministic(value).unwrap()
    }

    #[test]
    fn mm1_rate_is_mu_minus_lambda() {
        let r = solve_theta(&exp(0.5), &exp(1.0)).unwrap();
        assert_abs_diff_eq!(r.theta, 0.5, epsilon = 1e-9);
        assert_eq!(r.theta_plus, 1.0);
        assert!(!r.subunit_at_theta_plus);
        let phi = transform(&exp(0.5), &exp(1.0), r.theta);
        assert!((phi - 1.0).abs() < 1e-8);
    }

    #[test]
    fn dm1_rate_solves_scalar_equation() {
        // X ≡ 2, Y ~ Exp(1): θ satisfies e^{−2θ} = 1 − θ. Independent
        // oracle: direct bisection on that scalar equation.
        let r = solve_theta(&det(2.0), &exp(1.0)).unwrap();
        // e^{−2θ} − (1 − θ) is negative at 0.5 and positive at 0.999.
        let (mut lo, mut hi) = (0.5f64, 0.999f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (-2.0 * mid).exp() - (1.0 - mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert_abs_diff_eq!(r.theta, 0.5 * (lo + hi), epsilon = 1e-9);
        assert_abs_diff_eq!(r.theta, 0.7968, epsilon = 1e-4);
        assert!(!r.subunit_at_theta_plus);
    }

    #[test]
    fn erlang2_arrivals_rate() {
        // Gamma(2, 2ρμ) arrivals at ρ=0.5, μ=1: root of
        // (β/(β+θ))² · μ/(μ−θ) = 1 with β = 1. That cubic reduces to
        // θ² + θ − 1 = 0, i.e. θ = (√5 − 1)/2.
        let x = Distribution::gamma(2.0, 1.0).unwrap();
        let r = solve_theta(&x, &exp(1.0)).unwrap();
        assert_abs_diff_eq!(r.theta, (5f64.sqrt() - 1.0) / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn very_light_service_hits_abscissa_below_one() {
        let y = Distribution::very_light(1.0).unwrap();
        // φ(θ⁺) = (απ/2)·e^{−2} < 1 for X ≡ 2 since απ/2 ≈ 2.53.
        let r = solve_theta(&det(2.0), &y).unwrap();
        assert_eq!(r.theta, 1.0);
        assert_eq!(r.theta_plus, 1.0);
        assert!(r.subunit_at_theta_plus);
        assert!(transform(&det(2.0), &y, 1.0) < 1.0);
    }

    #[test]
    fn deterministic_service_below_arrivals_gives_infinite_rate() {
        let r = solve_theta(&det(2.0), &det(1.0)).unwrap();
        assert!(r.theta.is_infinite());
        assert!(r.subunit_at_theta_plus);
        // Zero service (degenerate queue) behaves the same under any X.
        let r = solve_theta(&exp(0.5), &det(0.0)).unwrap();
        assert!(r.theta.is_infinite());
        assert!(r.subunit_at_theta_plus);
    }

    #[test]
    fn deterministic_service_with_undercutting_arrivals_has_root() {
        // X ~ Exp(0.25) (mean 4), Y ≡ 2: some inter-arrivals fall below 2,
        // so φ blows up and a positive root exists.
        let r = solve_theta(&exp(0.25), &det(2.0)).unwrap();
        assert!(r.theta.is_finite() && r.theta > 0.0);
        let phi = transform(&exp(0.25), &det(2.0), r.theta);
        assert!((phi - 1.0).abs() < 1e-8, "residual {}", phi - 1.0);
    }

    #[test]
    fn unstable_inputs_are_rejected() {
        assert!(matches!(
            solve_theta(&exp(2.0), &exp(1.0)),
            Err(Error::Unstable(_))
        ));
        assert!(matches!(
            solve_theta(&det(1.0), &det(1.0)),
            Err(Error::Unstable(_))
        ));
    }

    #[test]
    fn slower_arrivals_never_decrease_theta() {
        let y = exp(1.0);
        let mut prev = 0.0;
        for v in [2.0, 2.5, 3.0] {
            let r = solve_theta(&det(v), &y).unwrap();
            assert!(r.theta >= prev, "theta decreased at X≡{v}");
            prev = r.theta;
        }
    }

    #[test]
    fn cascade_of_one_matches_solve_theta() {
        let x = det(2.0);
        let y = exp(1.0);
        let single = solve_theta(&x, &y).unwrap();
        let c = theta_cascade(&x, std::slice::from_ref(&y)).unwrap();
        assert_eq!(c.thetas, vec![single.theta]);
        assert_eq!(c.degrees, vec![0]);
        assert_eq!(c.indicators, vec![1]);
    }

    #[test]
    fn two_queue_cascade_takes_the_minimum() {
        let x = exp(0.4);
        let slow = exp(0.8);
        let fast = exp(1.2);
        let a = solve_theta(&x, &slow).unwrap().theta;
        let b = solve_theta(&x, &fast).unwrap().theta;
        let c = theta_cascade(&x, &[slow, fast]).unwrap();
        assert_abs_diff_eq!(c.thetas[1], a.min(b), epsilon = 1e-12);
        assert!(c.thetas[0] >= c.thetas[1]);
    }

    #[test]
    fn homogeneous_tandem_degrees_count_up() {
        let x = exp(0.5);
        let services = vec![exp(1.0); 4];
        let c = theta_cascade(&x, &services).unwrap();
        assert_eq!(c.degrees, vec![0, 1, 2, 3]);
        assert_eq!(c.indicators, vec![1, 1, 1, 1]);
        for w in c.thetas.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn strict_bottleneck_first_gives_degree_zero() {
        let x = exp(0.4);
        let services = vec![exp(0.8), exp(1.2), exp(1.2), exp(1.2)];
        let c = theta_cascade(&x, &services).unwrap();
        assert_eq!(c.degrees, vec![0, 0, 0, 0]);
    }

    #[test]
    fn strict_bottleneck_second_gives_degree_one() {
        let x = exp(0.4);
        let services = vec![exp(1.2), exp(0.8), exp(1.2), exp(1.2)];
        let c = theta_cascade(&x, &services).unwrap();
        assert_eq!(c.degrees, vec![0, 1, 1, 1]);
        assert_eq!(c.indicators, vec![1, 1, 0, 0]);
    }

    #[test]
    fn degrees_never_exceed_prefix_length() {
        let x = exp(0.3);
        let services = vec![exp(1.0), exp(0.7), exp(1.3), exp(0.7), exp(1.0)];
        let c = theta_cascade(&x, &services).unwrap();
        for (i, &d) in c.degrees.iter().enumerate() {
            assert!(d <= i);
        }
        assert_eq!(c.degrees[0], 0);
    }

    #[test]
    fn reports_serialize() {
        let r = solve_theta(&exp(0.5), &exp(1.0)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("theta_plus"));
        let c = theta_cascade(&exp(0.5), &[exp(1.0), exp(1.0)]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("degrees"));
    }
}
