//! Closed-form poly-exponential tail bounds for two-queue GI/M → ·/M tandems.
//!
//! Both queues serve at rate `μ`; inter-arrival gaps follow a law `X` with
//! `E[X] > 1/μ`. The end-to-end waiting time `W` of a job in steady state
//! admits an explicit upper bound built from a two-argument *certificate*
//!
//! ```text
//! γ(u, v) = 1 − (A + B·v + C·u)·e^{−θv} − D·e^{−θu}
//! on the shifted quadrant 𝒟_a = { u ≥ −a₊,  v ≥ max(−a, u) },
//! ```
//!
//! where `θ ∈ (0, μ)` solves `E[e^{−θX}] = (μ−θ)/μ` (the decay rate of a
//! single GI/M/1 stage). The certificate is a sub-solution of the integral
//! equation satisfied by the joint tail of the reversed two-stage maxima, so
//! averaging it against the difference of two service draws yields, in closed
//! form, `P(W > x) ≤` [`eval_bound`]. The coefficients are
//!
//! ```text
//! D = (μ−θ)/μ,         C = θ·(μ−θ)·D/μ,
//! B = C·(μ·E[X e^{−θX}] − D)₊ / (1 − μ·E[X e^{−θX}]),
//! ```
//!
//! and `A` is the smallest value compatible with three envelope constraints
//! `A₁(a)`, `A₂(a)`, `A₃(a)` (functions of the domain shift `a`); the fit
//! searches `a ≥ 0` — where the binding pair is `A₁ ∨ A₂` — and `a < 0` —
//! where all three bind — and keeps the smaller certificate.
//!
//! The module also provides two classical single-stage baselines on the same
//! decay rate: [`kingman_bound`] (`e^{−θx}`) and [`ross_bound`]
//! (`σ·e^{−θx}` with the conditional-overshoot prefactor
//! `σ = 1 / inf_{u≥0} E[e^{θ(U−u)} | U > u]`, `U = Y − X`), and a Monte
//! Carlo extension of the waiting-time certificate to the end-to-end
//! *sojourn* time ([`sojourn_bound`]).

use serde::{Deserialize, Serialize};

use crate::dist::{Distribution, Sampler};
use crate::error::{Error, Result};
use crate::num::golden::grid_then_golden;
use crate::rates::solve_theta;
use crate::rng::StreamRng;

/// Step of the coarse scan used when maximizing the first envelope over its
/// negative half-interval.
const ENVELOPE_SCAN_STEP: f64 = 0.05;

/// Fitted certificate `γ(u,v) = 1 − (A + Bv + Cu)e^{−θv} − De^{−θu}` on the
/// shifted quadrant `𝒟_a`, together with the service rate it was fitted for.
///
/// Serialized field names follow the algebra (`A`, `B`, `C`, `D_coef`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyExpParams {
    /// Service rate of both queues.
    pub mu: f64,
    /// Exponential decay rate; the root of `E[e^{−θX}] = (μ−θ)/μ` in `(0, μ)`.
    pub theta: f64,
    /// Domain shift of the certificate; either sign is possible.
    pub a: f64,
    /// Constant polynomial coefficient.
    #[serde(rename = "A")]
    pub coef_a: f64,
    /// Coefficient of `v` (multiplies the slower `e^{−θv}` factor).
    #[serde(rename = "B")]
    pub coef_b: f64,
    /// Coefficient of `u`.
    #[serde(rename = "C")]
    pub coef_c: f64,
    /// Coefficient of the pure `e^{−θu}` term; named `D_coef` in JSON to
    /// avoid clashing with sojourn-time notation.
    #[serde(rename = "D_coef")]
    pub coef_d: f64,
}

impl PolyExpParams {
    /// Certificate value `1 − (A + Bv + Cu)e^{−θv} − De^{−θu}`, with no
    /// domain mask; see [`Self::domain_contains`].
    pub fn certificate(&self, u: f64, v: f64) -> f64 {
        1.0 - (self.coef_a + self.coef_b * v + self.coef_c * u) * (-self.theta * v).exp()
            - self.coef_d * (-self.theta * u).exp()
    }

    /// Whether `(u, v)` lies in the certificate's validity region
    /// `𝒟_a = {u ≥ −a₊, v ≥ max(−a, u)}`.
    pub fn domain_contains(&self, u: f64, v: f64) -> bool {
        u >= -self.a.max(0.0) && v >= (-self.a).max(u)
    }
}

/// `E[X e^{−θX}]` for the supported arrival laws, in closed form.
fn x_exp_moment(arrival: &Distribution, theta: f64) -> f64 {
    match *arrival {
        Distribution::Deterministic { value } => value * (-theta * value).exp(),
        Distribution::Exponential { rate } => rate / (rate + theta).powi(2),
        Distribution::Gamma { shape, rate } => {
            shape * rate.powf(shape) / (rate + theta).powf(shape + 1.0)
        }
        Distribution::VeryLight { .. } => f64::NAN,
    }
}

/// Golden-section minimum of a fallible function on `[lo, hi]`.
fn golden_min_result<F: Fn(f64) -> Result<f64>>(
    f: &F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while hi - lo > x_tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d)?;
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm)?;
    if fm <= fc.min(fd) {
        Ok((xm, fm))
    } else if fc <= fd {
        Ok((c, fc))
    } else {
        Ok((d, fd))
    }
}

/// Coarse grid (`n` cells) then golden refinement around the best node, for a
/// fallible objective; returns the located minimum.
fn grid_min_result<F: Fn(f64) -> Result<f64>>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
    x_tol: f64,
) -> Result<(f64, f64)> {
    debug_assert!(n >= 1 && hi >= lo);
    if hi == lo {
        return Ok((lo, f(lo)?));
    }
    let step = (hi - lo) / n as f64;
    let (mut best_i, mut best_x, mut best_f) = (0usize, lo, f(lo)?);
    for i in 1..=n {
        let x = if i == n { hi } else { lo + step * i as f64 };
        let fx = f(x)?;
        if fx < best_f {
            (best_i, best_x, best_f) = (i, x, fx);
        }
    }
    let (gx, gf) = golden_min_result(
        f,
        (lo + step * best_i.saturating_sub(1) as f64).max(lo),
        (lo + step * (best_i + 1) as f64).min(hi),
        x_tol,
    )?;
    if gf < best_f {
        Ok((gx, gf))
    } else {
        Ok((best_x, best_f))
    }
}

/// Shared context of the three envelope functions during a fit.
struct Fit<'a> {
    arrival: &'a Distribution,
    mu: f64,
    theta: f64,
    b: f64,
    c: f64,
    d: f64,
    /// `N(x)/Den(x)` on `x ≥ 0`, where it is constant.
    ratio_nonneg: f64,
    mean_x: f64,
}

impl Fit<'_> {
    /// The positive-part weight `w(t) = e^{−μt}` for `t ≥ 0`, else `1`.
    fn weight(&self, t: f64) -> f64 {
        if t >= 0.0 {
            (-self.mu * t).exp()
        } else {
            1.0
        }
    }

    /// Ratio `N(x)/Den(x)` driving the first envelope:
    ///
    /// ```text
    /// Den(x) = E[e^{−θX} w(X+x)],
    /// N(x)   = B·E[(1/(μ−θ) − X) e^{−θX} w(X+x)] + C·E[e^{−θX} g(X+x)],
    /// g(t)   = e^{−μt}/μ for t ≥ 0, else 1/μ − t.
    /// ```
    fn envelope_ratio(&self, x: f64) -> Result<f64> {
        let (mu, theta, b, c) = (self.mu, self.theta, self.b, self.c);
        let den = self
            .arrival
            .expect(|s| (-theta * s).exp() * self.weight(s + x))?;
        let num = self.arrival.expect(|s| {
            let e = (-theta * s).exp();
            let g = if s + x >= 0.0 {
                (-mu * (s + x)).exp() / mu
            } else {
                1.0 / mu - s - x
            };
            b * (1.0 / (mu - theta) - s) * e * self.weight(s + x) + c * e * g
        })?;
        if !(den > 0.0) {
            return Err(Error::Numerics(format!(
                "degenerate envelope denominator {den} at x = {x}"
            )));
        }
        Ok(num / den)
    }

    /// First envelope `A₁(a) = aB + sup_{x ≥ −a₊} N(x)/Den(x)`. The ratio is
    /// constant on `x ≥ 0`; for `a > 0` the sup additionally scans
    /// `x ∈ [−a, 0)` on a 0.05 grid with golden refinement.
    fn a1(&self, a: f64) -> Result<f64> {
        let mut sup = self.ratio_nonneg;
        if a > 0.0 {
            let cells = ((a / ENVELOPE_SCAN_STEP).ceil() as usize).max(2);
            let neg = |x: f64| self.envelope_ratio(x).map(|r| -r);
            let (_, m) = grid_min_result(&neg, -a, 0.0, cells, 1e-10)?;
            sup = sup.max(-m);
        }
        Ok(a * self.b + sup)
    }

    /// Second envelope `A₂(a) = a(B+C) + D e^{−θa} + (B+C)/(μ−θ) − D`.
    fn a2(&self, a: f64) -> f64 {
        a * (self.b + self.c) + self.d * (-self.theta * a).exp()
            + (self.b + self.c) / (self.mu - self.theta)
            - self.d
    }

    /// Third envelope, binding only for `a ≤ 0`:
    ///
    /// ```text
    /// A₃(a) = B(a + 1/(μ−θ)) + C·E[X] + D e^{−θa} − min_r h(r),
    /// h(r)  = [D e^{−θa}(1 − e^{(θ−μ)r}) + C·r] / (1 − e^{−μr}),
    /// ```
    ///
    /// minimized over `r ∈ [min(essinf X, −a), −a]` with the continuous
    /// extension `h(0) = (D e^{−θa}(μ−θ) + C)/μ`.
    fn a3(&self, a: f64) -> f64 {
        let (mu, theta, c, d) = (self.mu, self.theta, self.c, self.d);
        let de = d * (-theta * a).exp();
        let h = |r: f64| {
            if r < 1e-9 {
                (de * (mu - theta) + c) / mu
            } else {
                (de * (1.0 - ((theta - mu) * r).exp()) + c * r) / (1.0 - (-mu * r).exp())
            }
        };
        let r_hi = -a;
        let r_lo = self.arrival.essential_infimum().min(r_hi);
        let h_min = if r_hi - r_lo < 1e-12 {
            h(r_hi)
        } else {
            grid_then_golden(&h, r_lo, r_hi, 200, 1e-9).1
        };
        self.b * (a + 1.0 / (mu - theta)) + c * self.mean_x + de - h_min
    }
}

/// Fits the poly-exponential certificate for a two-queue tandem with
/// exponential rate-`μ` services at both stages and i.i.d. inter-arrival
/// gaps `arrival`.
///
/// # Errors
///
/// * [`Error::UnsupportedArrival`] — the arrival law is outside
///   {deterministic, exponential, gamma};
/// * [`Error::Unstable`] — `E[X] ≤ 1/μ`;
/// * [`Error::InvalidParameter`] — non-positive or non-finite `mu`;
/// * [`Error::Numerics`] — the load is so close to critical that the
///   coefficient formulas degenerate.
///
/// # Examples
///
/// ```
/// use tandem_tails::dist::Distribution;
/// use tandem_tails::polyexp::{eval_bound, fit_gim_mm};
///
/// let gaps = Distribution::deterministic(2.0).unwrap(); // load 0.5
/// let p = fit_gim_mm(&gaps, 1.0).unwrap();
/// assert!((p.coef_d - (1.0 - p.theta)).abs() < 1e-12);
/// assert!(eval_bound(&p, 5.0) < eval_bound(&p, 1.0));
/// ```
pub fn fit_gim_mm(arrival: &Distribution, mu: f64) -> Result<PolyExpParams> {
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "service rate mu = {mu} must be positive and finite"
        )));
    }
    if matches!(arrival, Distribution::VeryLight { .. }) {
        return Err(Error::UnsupportedArrival(format!(
            "certificate fitting needs closed transforms of the arrival law; got {arrival:?}"
        )));
    }
    let service = Distribution::exponential(mu)?;
    let decay = solve_theta(arrival, &service)?;
    let theta = decay.theta;
    debug_assert!(theta.is_finite() && theta > 0.0 && theta < mu);

    let d = (mu - theta) / mu;
    let c = theta * (mu - theta) * d / mu;
    let g = x_exp_moment(arrival, theta);
    let slack = 1.0 - mu * g;
    if !(slack > 0.0) {
        return Err(Error::Numerics(format!(
            "load too close to critical: 1 − μ·E[X e^{{−θX}}] = {slack}"
        )));
    }
    let b = c * (mu * g - d).max(0.0) / slack;

    let fit = Fit {
        arrival,
        mu,
        theta,
        b,
        c,
        d,
        ratio_nonneg: 0.0,
        mean_x: arrival.mean(),
    };
    let fit = Fit {
        ratio_nonneg: fit.envelope_ratio(0.0)?,
        ..fit
    };

    // Branch a ≥ 0: A₁ is nondecreasing and A₂ eventually increases, so the
    // best admissible pair sits at the largest a ≤ a_cap with A₁(a) ≤ A₂(a).
    let a_cap = (theta * (mu - theta) / (mu * (b + c))).ln() / theta;
    let a_cap = a_cap.max(0.0);
    let feasible = |a: f64| -> Result<bool> { Ok(fit.a1(a)? <= fit.a2(a)) };
    let a_pos = if a_cap == 0.0 || !feasible(0.0)? {
        0.0
    } else if feasible(a_cap)? {
        a_cap
    } else {
        let n = 200;
        let step = a_cap / n as f64;
        let mut lo = 0.0;
        let mut hi = a_cap;
        for i in (0..n).rev() {
            let x = step * i as f64;
            if feasible(x)? {
                lo = x;
                hi = step * (i + 1) as f64;
                break;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let v_pos = fit.a1(a_pos)?.max(fit.a2(a_pos));

    // Branch a ≤ 0: all three envelopes bind; scan a ∈ [−20/θ, 0]. Here A₁
    // has no negative half-interval, so the whole objective is cheap.
    let ratio0 = fit.ratio_nonneg;
    let objective = |a: f64| {
        (a * b + ratio0).max(fit.a2(a)).max(fit.a3(a))
    };
    let (a_neg, v_neg) = grid_then_golden(&objective, -20.0 / theta, 0.0, 200, 1e-9);

    let (a, coef_a) = if v_neg < v_pos {
        (a_neg, v_neg)
    } else {
        (a_pos, v_pos)
    };
    Ok(PolyExpParams {
        mu,
        theta,
        a,
        coef_a,
        coef_b: b,
        coef_c: c,
        coef_d: d,
    })
}

/// Closed-form upper bound on `P(W > x)` for the end-to-end waiting time of
/// the fitted two-queue tandem, clamped to `[0, 1]`.
///
/// The bound averages the certificate against the difference of two
/// independent rate-`μ` service draws (a Laplace(μ) variable); the average
/// has two regimes split at `x = −a` (relevant only when `a < 0`). Negative
/// `x` returns 1.
pub fn eval_bound(p: &PolyExpParams, x: f64) -> f64 {
    if x < 0.0 {
        return 1.0;
    }
    let (mu, theta, a) = (p.mu, p.theta, p.a);
    let (ca, cb, cc, cd) = (p.coef_a, p.coef_b, p.coef_c, p.coef_d);
    let raw = if x >= (-a).max(0.0) {
        let e_t = (-theta * x).exp();
        let e_m = (-mu * x + (theta - mu) * a).exp();
        let k1 = mu * mu / (mu * mu - theta * theta);
        let k2 = mu / (2.0 * (mu - theta) * (mu - theta));
        let k3 = mu / (2.0 * (mu - theta));
        let lin_a = 1.0 + (mu - theta) * a;
        0.5 * (-mu * (x + a)).exp()
            + cd * ((2.0 * mu - theta) * e_t - mu * e_m) / (2.0 * (mu - theta))
            + cc * (x * k1 * e_t + lin_a * k2 * e_m - k2 * e_t)
            + ca * (k1 * e_t - k3 * e_m)
            + cb * (k1 * x * e_t
                - 2.0 * mu * mu * theta / ((mu * mu - theta * theta) * (mu * mu - theta * theta))
                    * e_t
                + lin_a * k2 * e_m)
    } else {
        1.0 - 0.5 * (mu * (x + a)).exp()
            + 0.5 * cd * ((mu - theta) * x + mu * a).exp()
            + mu / (2.0 * (mu + theta))
                * ((mu + theta) * a + mu * x).exp()
                * (ca + cb * (1.0 / (mu + theta) - a) + cc * x)
    };
    raw.clamp(0.0, 1.0)
}

/// Which argument feeds the first certificate slot when bounding the sojourn
/// time (the defining identity leaves the grouping ambiguous; both are
/// exposed, [`SojournVariant::ServicePlusMax`] is the default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SojournVariant {
    /// First slot `x − (Z₁ + max(Z₂, Y))`.
    ServicePlusMax,
    /// First slot `x − max(Z₁ + Z₂, Y)`.
    MaxOfSums,
}

/// Monte Carlo value and standard error of a sojourn-time bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SojournEstimate {
    /// Bound on `P(D > x)`, clamped to `[0, 1]`.
    pub value: f64,
    /// Standard error of the Monte Carlo average.
    pub stderr: f64,
}

/// Upper bound on the sojourn tail `P(D > x)` with the default argument
/// grouping; see [`sojourn_bound_with`].
///
/// # Errors
///
/// [`Error::InvalidParameter`] if `n_mc < 1000`.
pub fn sojourn_bound(
    p: &PolyExpParams,
    mu: f64,
    x: f64,
    n_mc: u64,
    rng: &mut StreamRng,
) -> Result<SojournEstimate> {
    sojourn_bound_with(p, mu, x, n_mc, rng, SojournVariant::ServicePlusMax)
}

/// Monte Carlo upper bound on the sojourn tail: with `Z₁, Z₂, Y` i.i.d.
/// exponential rate-`μ` draws,
///
/// ```text
/// P(D > x) ≤ 1 − E[ 1{Z₁ + Y < x} · γ⁺(first, x − (Z₁+Z₂)) ],
/// ```
///
/// where `γ⁺` is the certificate clamped below at 0 and masked to its
/// validity region, and `first` is chosen by `variant`. `x ≤ 0` returns the
/// exact trivial bound 1.
///
/// # Errors
///
/// [`Error::InvalidParameter`] if `n_mc < 1000`.
pub fn sojourn_bound_with(
    p: &PolyExpParams,
    mu: f64,
    x: f64,
    n_mc: u64,
    rng: &mut StreamRng,
    variant: SojournVariant,
) -> Result<SojournEstimate> {
    if n_mc < 1000 {
        return Err(Error::InvalidParameter(format!(
            "n_mc = {n_mc} is below the minimum of 1000 samples"
        )));
    }
    if x <= 0.0 {
        return Ok(SojournEstimate {
            value: 1.0,
            stderr: 0.0,
        });
    }
    let exp_mu = Sampler::new(&Distribution::exponential(mu)?)?;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n_mc {
        let z1 = exp_mu.draw(rng);
        let z2 = exp_mu.draw(rng);
        let y = exp_mu.draw(rng);
        let g = if z1 + y < x {
            let first = match variant {
                SojournVariant::ServicePlusMax => x - (z1 + z2.max(y)),
                SojournVariant::MaxOfSums => x - (z1 + z2).max(y),
            };
            let second = x - (z1 + z2);
            if p.domain_contains(first, second) {
                p.certificate(first, second).max(0.0)
            } else {
                0.0
            }
        } else {
            0.0
        };
        sum += g;
        sum_sq += g * g;
    }
    let n = n_mc as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(SojournEstimate {
        value: (1.0 - mean).clamp(0.0, 1.0),
        stderr: (var / n).sqrt(),
    })
}

/// Kingman's exponential bound `P(W > x) ≤ e^{−θx}` for one GI/G/1 stage
/// with gap law `arrival` and service law `service`.
///
/// # Errors
///
/// Propagates [`crate::rates::solve_theta`] failures (e.g. instability).
pub fn kingman_bound(arrival: &Distribution, service: &Distribution, x: f64) -> Result<f64> {
    let theta = solve_theta(arrival, service)?.theta;
    Ok(decay_eval(1.0, theta, x))
}

/// Evaluates `min(1, pre·e^{−θx})` handling `θ = ∞` (all-deterministic
/// prefixes) and negative `x`.
fn decay_eval(pre: f64, theta: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 1.0;
    }
    if !theta.is_finite() {
        return if x == 0.0 { pre.min(1.0) } else { 0.0 };
    }
    (pre * (-theta * x).exp()).min(1.0)
}

/// Ross's refinement of the Kingman bound: same decay rate, multiplied by
/// the prefactor `σ = 1 / inf_{u ≥ 0} E[e^{θ(U−u)} | U > u]` with
/// `U = service − gap`. Always at most the Kingman bound (the conditional
/// overshoot transform exceeds 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RossBound {
    /// Decay rate shared with the Kingman bound.
    pub theta: f64,
    /// Prefactor `σ ∈ (0, 1]`.
    pub prefactor: f64,
}

impl RossBound {
    /// Solves the decay rate and evaluates the prefactor. For exponential
    /// services the memoryless overshoot makes the conditional transform
    /// constant in `u`, giving `σ = (μ−θ)/μ` exactly; other service laws go
    /// through quadrature over a grid of conditioning levels.
    ///
    /// # Errors
    ///
    /// [`Error::Unsupported`] when the decay rate is infinite (deterministic
    /// service dominated by every gap), plus solver/quadrature failures.
    pub fn new(arrival: &Distribution, service: &Distribution) -> Result<Self> {
        let theta = solve_theta(arrival, service)?.theta;
        if !theta.is_finite() {
            return Err(Error::Unsupported(
                "overshoot prefactor is undefined at an infinite decay rate".into(),
            ));
        }
        let prefactor = match *service {
            Distribution::Exponential { rate } => (rate - theta) / rate,
            _ => general_prefactor(arrival, service, theta)?,
        };
        Ok(Self { theta, prefactor })
    }

    /// `min(1, σ·e^{−θx})`; 1 for negative `x`.
    pub fn eval(&self, x: f64) -> f64 {
        decay_eval(self.prefactor, self.theta, x)
    }
}

/// Prefactor by direct minimization: for each level `u`,
/// `E[e^{θ(U−u)}; U > u] = E_X[ P(Y > X+u) · E[e^{θ(Y−X−u)} | Y > X+u] ]`,
/// normalized by `P(U > u)`; the conditioning level range is cut where the
/// service tail drops below `1e−10`.
fn general_prefactor(
    arrival: &Distribution,
    service: &Distribution,
    theta: f64,
) -> Result<f64> {
    let mut u_max = 1.0;
    while service.tail(u_max) >= 1e-10 {
        u_max *= 2.0;
        if u_max > 1e9 {
            return Err(Error::Numerics(
                "service tail does not reach 1e-10 below u = 1e9".into(),
            ));
        }
    }
    let transform = |u: f64| -> Result<f64> {
        // Both integrands are normalized by tail(u) so their magnitude stays
        // O(1) for every level u; the ratio is unaffected and the quadrature
        // keeps full relative accuracy where the raw integrals would shrink
        // below its absolute floor.
        let scale = service.tail(u);
        if scale == 0.0 {
            // Beyond the service support P(U > u) = 0: no constraint here.
            return Ok(f64::INFINITY);
        }
        let num = arrival.expect(|s| {
            let t = service.tail(s + u) / scale;
            if t == 0.0 {
                0.0
            } else {
                // A failed inner quadrature surfaces as NaN and is caught by
                // the outer integrator's convergence check.
                t * service.cond_exp_moment(theta, 0, s + u).unwrap_or(f64::NAN)
            }
        })?;
        let den = arrival.expect(|s| service.tail(s + u) / scale)?;
        if !(den > 0.0) {
            return Ok(f64::INFINITY);
        }
        Ok(num / den)
    };
    let (_, inf) = grid_min_result(&transform, 0.0, u_max, 200, 1e-8)?;
    Ok(1.0 / inf)
}

/// Convenience wrapper: builds [`RossBound`] and evaluates it at `x`.
///
/// # Errors
///
/// Same as [`RossBound::new`].
pub fn ross_bound(arrival: &Distribution, service: &Distribution, x: f64) -> Result<f64> {
    Ok(RossBound::new(arrival, service)?.eval(x))
}
