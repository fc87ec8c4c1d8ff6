//! Probability laws for inter-arrival and service times.
//!
//! Every law used by the simulator, the bound fitters and the verifier is a
//! variant of [`Distribution`]:
//!
//! | variant                      | support  | mean        | MGF `E[e^{tR}]`                     |
//! |------------------------------|----------|-------------|-------------------------------------|
//! | `Deterministic { value }`    | `{v}`    | `v`         | `e^{tv}`                            |
//! | `Exponential { rate }`       | `[0,∞)`  | `1/μ`       | `μ/(μ−t)` for `t<μ`, else `+∞`      |
//! | `Gamma { shape, rate }`      | `[0,∞)`  | `α/β`       | `(β/(β−t))^α` for `t<β`, else `+∞`  |
//! | `VeryLight { rate, .. }`     | `[0,∞)`  | quadrature  | finite iff `t ≤ μ` (quadrature)     |
//!
//! `VeryLight` has density `α·e^{−μx}/(1+x²)` on `x ≥ 0`. Its MGF is finite
//! *at* the abscissa `t = μ` (where it equals `α·π/2`) and infinite beyond —
//! the feature that makes it interesting as a service law: the decay-rate
//! solver can hit the abscissa with the transform still below one. The
//! normalizer `α` is computed once by quadrature when the law is constructed
//! and cached inside the variant; it is never serialized.
//!
//! Infinite MGF values are ordinary `f64::INFINITY` returns, not errors, so
//! root finders can probe the boundary freely.
//!
//! JSON forms are flat tagged objects:
//! `{"kind":"exponential","rate":1.0}`, `{"kind":"deterministic","value":2.0}`,
//! `{"kind":"gamma","shape":2.0,"rate":1.0}`, `{"kind":"verylight","rate":1.0}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::gamma::{ln_gamma, reg_lower_gamma, reg_upper_gamma};
use crate::num::quad::integrate_half_line_default;
use crate::rng::StreamRng;

/// A nonnegative probability law with exact or quadrature-backed transforms.
///
/// Construct through the checked constructors ([`Distribution::exponential`],
/// [`Distribution::deterministic`], [`Distribution::gamma`],
/// [`Distribution::very_light`]); the variants themselves are exposed for
/// pattern matching.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Unit mass at `value` (`value = 0` is allowed: an always-zero service).
    Deterministic {
        /// The single support point, in time units.
        value: f64,
    },
    /// Exponential with rate `μ` (mean `1/μ`).
    Exponential {
        /// Rate `μ > 0`, in 1/time.
        rate: f64,
    },
    /// Gamma with shape `α` and rate `β` (mean `α/β`).
    Gamma {
        /// Shape `α > 0`.
        shape: f64,
        /// Rate `β > 0`, in 1/time.
        rate: f64,
    },
    /// Density `α·e^{−μx}/(1+x²)` on `x ≥ 0`: exponential envelope with a
    /// polynomial correction that keeps the MGF finite at its abscissa.
    VeryLight {
        /// Envelope rate `μ > 0`.
        rate: f64,
        /// Cached normalizer `α = 1/∫₀^∞ e^{−μx}/(1+x²) dx`.
        normalizer: f64,
    },
}

fn require_finite_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )));
    }
    Ok(())
}

impl Distribution {
    /// Unit mass at `value ≥ 0`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] if `value` is negative or not finite.
    pub fn deterministic(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "deterministic value must be finite and >= 0, got {value}"
            )));
        }
        Ok(Self::Deterministic { value })
    }

    /// Exponential law with the given rate.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] if `rate` is not finite and positive.
    pub fn exponential(rate: f64) -> Result<Self> {
        require_finite_positive("exponential rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    /// Gamma law with the given shape and rate.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] if either parameter is not finite and
    /// positive.
    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        require_finite_positive("gamma shape", shape)?;
        require_finite_positive("gamma rate", rate)?;
        Ok(Self::Gamma { shape, rate })
    }

    /// Very-light law with envelope rate `μ`; the normalizer is computed here
    /// by quadrature and cached.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] if `rate` is not finite and positive;
    /// [`Error::Numerics`] if the normalizing integral fails to converge.
    pub fn very_light(rate: f64) -> Result<Self> {
        require_finite_positive("very-light rate", rate)?;
        let q = integrate_half_line_default(&|x| (-rate * x).exp() / (1.0 + x * x), 0.0);
        if !q.converged || !(q.value > 0.0) {
            return Err(Error::Numerics(
                "very-light normalizing integral did not converge".into(),
            ));
        }
        Ok(Self::VeryLight {
            rate,
            normalizer: 1.0 / q.value,
        })
    }

    /// Mean of the law (quadrature for [`Distribution::VeryLight`]).
    pub fn mean(&self) -> f64 {
        match *self {
            Self::Deterministic { value } => value,
            Self::Exponential { rate } => 1.0 / rate,
            Self::Gamma { shape, rate } => shape / rate,
            Self::VeryLight { rate, normalizer } => {
                normalizer
                    * integrate_half_line_default(&|x| x * (-rate * x).exp() / (1.0 + x * x), 0.0)
                        .value
            }
        }
    }

    /// Moment generating function `E[e^{tR}]` as an extended real.
    ///
    /// Returns `f64::INFINITY` where the transform diverges: `t ≥ μ`
    /// (exponential), `t ≥ β` (gamma), `t > μ` (very-light; at `t = μ` the
    /// value `α·π/2` is finite).
    pub fn mgf(&self, t: f64) -> f64 {
        match *self {
            Self::Deterministic { value } => (t * value).exp(),
            Self::Exponential { rate } => {
                if t < rate {
                    rate / (rate - t)
                } else {
                    f64::INFINITY
                }
            }
            Self::Gamma { shape, rate } => {
                if t < rate {
                    (rate / (rate - t)).powf(shape)
                } else {
                    f64::INFINITY
                }
            }
            Self::VeryLight { rate, normalizer } => {
                if t > rate {
                    f64::INFINITY
                } else if t == rate {
                    normalizer * std::f64::consts::FRAC_PI_2
                } else {
                    normalizer
                        * integrate_half_line_default(
                            &|x: f64| ((t - rate) * x).exp() / (1.0 + x * x),
                            0.0,
                        )
                        .value
                }
            }
        }
    }

    /// Laplace transform `E[e^{−θR}]` for `θ ≥ 0`; always finite since the
    /// support is nonnegative.
    pub fn laplace(&self, theta: f64) -> f64 {
        debug_assert!(theta >= 0.0);
        self.mgf(-theta)
    }

    /// Tail probability `P(R > r)`; equals 1 for every `r < 0`.
    pub fn tail(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 1.0;
        }
        match *self {
            Self::Deterministic { value } => {
                if r < value {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Exponential { rate } => (-rate * r).exp(),
            Self::Gamma { shape, rate } => reg_upper_gamma(shape, rate * r),
            Self::VeryLight { rate, normalizer } => {
                normalizer
                    * integrate_half_line_default(&|x| (-rate * x).exp() / (1.0 + x * x), r).value
            }
        }
    }

    /// Conditional exponential moment
    /// `K_i(r) = E[(R−r)^i · e^{θ(R−r)} | R > r]`.
    ///
    /// Closed forms for the deterministic law (a shifted point mass) and the
    /// exponential law, where memorylessness makes the result
    /// `μ·i!/(μ−θ)^{i+1}`, independent of `r`. Gamma and very-light laws use
    /// adaptive quadrature over the conditional density. A divergent moment
    /// (e.g. exponential with `θ ≥ μ`) is reported as `f64::INFINITY`.
    ///
    /// # Errors
    ///
    /// [`Error::ConditioningOnNull`] if `P(R > r) = 0` (deterministic law with
    /// `r ≥ value`); [`Error::Numerics`] if quadrature fails to converge.
    pub fn cond_exp_moment(&self, theta: f64, i: u32, r: f64) -> Result<f64> {
        let tail = self.tail(r);
        if tail <= 0.0 {
            return Err(Error::ConditioningOnNull(format!(
                "P(R > {r}) = 0 for {self:?}"
            )));
        }
        if i == 0 && theta == 0.0 {
            return Ok(1.0);
        }
        match *self {
            Self::Deterministic { value } => {
                let d = value - r;
                Ok(d.powi(i as i32) * (theta * d).exp())
            }
            Self::Exponential { rate } => {
                if theta >= rate {
                    return Ok(f64::INFINITY);
                }
                let mut fact = 1.0;
                for k in 1..=i {
                    fact *= f64::from(k);
                }
                Ok(rate * fact / (rate - theta).powi(i as i32 + 1))
            }
            Self::Gamma { rate, .. } => {
                if theta >= rate {
                    return Ok(f64::INFINITY);
                }
                self.cond_exp_moment_by_quadrature(theta, i, r, tail)
            }
            Self::VeryLight { rate, .. } => {
                if theta > rate || (theta == rate && i > 0) {
                    return Ok(f64::INFINITY);
                }
                self.cond_exp_moment_by_quadrature(theta, i, r, tail)
            }
        }
    }

    fn cond_exp_moment_by_quadrature(&self, theta: f64, i: u32, r: f64, tail: f64) -> Result<f64> {
        let lo = r.max(0.0);
        // Density evaluated first: where it has underflown to 0 the product
        // is taken as 0 even if the exponential factor has overflown, which
        // is exact up to mass below the subnormal threshold whenever θ sits
        // a positive margin below the MGF abscissa (the guarded call sites).
        let q = integrate_half_line_default(
            &|x| {
                let d = self.density(x);
                if d == 0.0 {
                    0.0
                } else {
                    d * (x - r).powi(i as i32) * (theta * (x - r)).exp()
                }
            },
            lo,
        );
        if !q.converged {
            return Err(Error::Numerics(format!(
                "conditional moment quadrature stalled for {self:?} at r={r}, theta={theta}, i={i}"
            )));
        }
        Ok(q.value / tail)
    }

    /// Probability density at `x` for the absolutely continuous laws; the
    /// deterministic law returns 0 everywhere (its mass point carries no
    /// density).
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            Self::Deterministic { .. } => 0.0,
            Self::Exponential { rate } => rate * (-rate * x).exp(),
            Self::Gamma { shape, rate } => {
                if x == 0.0 {
                    // Finite only for shape ≥ 1; the quadrature never
                    // evaluates interval endpoints, so this is a convention.
                    return if shape > 1.0 {
                        0.0
                    } else if shape == 1.0 {
                        rate
                    } else {
                        f64::INFINITY
                    };
                }
                (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
            }
            Self::VeryLight { rate, normalizer } => {
                normalizer * (-rate * x).exp() / (1.0 + x * x)
            }
        }
    }

    /// Expectation `E[f(R)]` of a piecewise-smooth, at-most-exponentially
    /// growing function: exact for the deterministic law, adaptive quadrature
    /// against the density otherwise.
    ///
    /// # Errors
    ///
    /// [`Error::Numerics`] if quadrature fails to converge.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        match *self {
            Self::Deterministic { value } => Ok(f(value)),
            _ => {
                // Density-first evaluation; see cond_exp_moment_by_quadrature
                // for why a vanished density short-circuits the product.
                let q = integrate_half_line_default(
                    &|x| {
                        let d = self.density(x);
                        if d == 0.0 {
                            0.0
                        } else {
                            d * f(x)
                        }
                    },
                    0.0,
                );
                if !q.converged {
                    return Err(Error::Numerics(format!(
                        "expectation quadrature stalled for {self:?}"
                    )));
                }
                Ok(q.value)
            }
        }
    }

    /// Essential infimum of the support: `value` for the deterministic law,
    /// 0 for every other variant.
    pub fn essential_infimum(&self) -> f64 {
        match *self {
            Self::Deterministic { value } => value,
            _ => 0.0,
        }
    }

    /// Abscissa of convergence of the MGF: the largest `t` (possibly `+∞`)
    /// such that `mgf(s) < ∞` for all `s < t`. Whether the MGF is finite *at*
    /// the abscissa varies by variant; probe with [`Distribution::mgf`].
    pub fn mgf_abscissa(&self) -> f64 {
        match *self {
            Self::Deterministic { .. } => f64::INFINITY,
            Self::Exponential { rate }
            | Self::Gamma { rate, .. }
            | Self::VeryLight { rate, .. } => rate,
        }
    }

    /// One draw from the law.
    ///
    /// Deterministic and exponential laws invert the CDF directly (one
    /// uniform per draw); the gamma law uses a standard shape/scale sampler
    /// that may consume several uniforms per draw. Sequences are reproducible
    /// given the stream's key.
    ///
    /// # Errors
    ///
    /// [`Error::Unsupported`] for [`Distribution::VeryLight`], which exists
    /// for transform evaluation only.
    pub fn sample(&self, rng: &mut StreamRng) -> Result<f64> {
        Ok(Sampler::new(self)?.draw(rng))
    }
}

/// Pre-validated, allocation-free sampler used in simulation hot loops.
#[derive(Debug, Clone)]
pub(crate) enum Sampler {
    Det(f64),
    Exp(f64),
    Gamma(rand_distr::Gamma<f64>),
}

impl Sampler {
    pub(crate) fn new(d: &Distribution) -> Result<Self> {
        match *d {
            Distribution::Deterministic { value } => Ok(Self::Det(value)),
            Distribution::Exponential { rate } => Ok(Self::Exp(rate)),
            Distribution::Gamma { shape, rate } => Ok(Self::Gamma(
                rand_distr::Gamma::new(shape, 1.0 / rate)
                    .map_err(|e| Error::InvalidParameter(format!("gamma sampler: {e}")))?,
            )),
            Distribution::VeryLight { .. } => Err(Error::Unsupported(
                "sampling the very-light law (transform evaluation only)".into(),
            )),
        }
    }

    pub(crate) fn draw(&self, rng: &mut StreamRng) -> f64 {
        match self {
            Self::Det(v) => *v,
            Self::Exp(rate) => -(1.0 - rng.uniform()).ln() / rate,
            Self::Gamma(g) => rand_distr::Distribution::sample(g, rng),
        }
    }
}

/// Regularized lower incomplete gamma ratio as a distribution function:
/// `P(Gamma(shape α, rate β) ≤ x)`, 0 for `x ≤ 0`.
pub fn reg_incomplete_gamma(x: f64, shape: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        reg_lower_gamma(shape, rate * x)
    }
}

/// Flat JSON image of [`Distribution`]; `verylight` omits the cached
/// normalizer, which is recomputed on deserialization.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DistributionRepr {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    VeryLight { rate: f64 },
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match *self {
            Self::Deterministic { value } => DistributionRepr::Deterministic { value },
            Self::Exponential { rate } => DistributionRepr::Exponential { rate },
            Self::Gamma { shape, rate } => DistributionRepr::Gamma { shape, rate },
            Self::VeryLight { rate, .. } => DistributionRepr::VeryLight { rate },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DistributionRepr::deserialize(deserializer)?;
        let dist = match repr {
            DistributionRepr::Deterministic { value } => Distribution::deterministic(value),
            DistributionRepr::Exponential { rate } => Distribution::exponential(rate),
            DistributionRepr::Gamma { shape, rate } => Distribution::gamma(shape, rate),
            DistributionRepr::VeryLight { rate } => Distribution::very_light(rate),
        };
        dist.map_err(|e| D::Error::custom(e.to_string()))
    }
}
