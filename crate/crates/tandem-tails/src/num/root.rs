//! Bracketing and bisection root finding.
//!
//! Tailored to decay-rate equations of the form `E[e^{θU}] − 1 = 0`: the
//! objective may legitimately evaluate to `+∞` (moment generating function at
//! or past its abscissa), which bisection treats as an ordinary positive
//! value. `NaN` is rejected as an error.

use crate::error::{Error, Result};

/// Sign of a possibly-infinite objective value; `NaN` is an error.
fn sign(v: f64) -> Result<i8> {
    if v.is_nan() {
        return Err(Error::Numerics("objective evaluated to NaN".into()));
    }
    Ok(if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    })
}

/// Bisection on `[lo, hi]` for a root of `f`, given `f(lo)` and `f(hi)` of
/// opposite (non-zero) sign. Stops when the bracket width is ≤ `x_tol`.
///
/// Returns the bracket midpoint. Infinite objective values participate with
/// their sign, so the root of `E[e^{θU}] = 1` can be bracketed against the
/// MGF abscissa.
///
/// # Errors
/// `Error::Numerics` if the endpoints do not bracket a sign change or the
/// objective returns `NaN`.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64> {
    let mut s_lo = sign(f(lo))?;
    let s_hi = sign(f(hi))?;
    if s_lo == 0 {
        return Ok(lo);
    }
    if s_hi == 0 {
        return Ok(hi);
    }
    if s_lo == s_hi {
        return Err(Error::Numerics(format!(
            "no sign change on [{lo}, {hi}] (f(lo) and f(hi) share sign {s_lo})"
        )));
    }

    // 200 halvings exhaust f64 resolution from any finite bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let s_mid = sign(f(mid))?;
        if s_mid == 0 {
            return Ok(mid);
        }
        if s_mid == s_lo {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grow `hi` geometrically from `lo` until `f` changes sign relative to
/// `f(lo)`, up to `cap`. Returns the bracketing upper end.
///
/// # Errors
/// `Error::Numerics` if no sign change is found below `cap`.
pub fn expand_upper<F: Fn(f64) -> f64>(f: &F, lo: f64, first_step: f64, cap: f64) -> Result<f64> {
    let s_lo = sign(f(lo))?;
    let mut step = first_step;
    let mut hi = lo + step;
    for _ in 0..200 {
        if hi > cap {
            hi = cap;
        }
        if sign(f(hi))? != s_lo {
            return Ok(hi);
        }
        if hi >= cap {
            return Err(Error::Numerics(format!(
                "no sign change found on [{lo}, {cap}] while expanding bracket"
            )));
        }
        step *= 2.0;
        hi = lo + step;
    }
    Err(Error::Numerics("bracket expansion exceeded iteration budget".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn finds_square_root_of_two() {
        let r = bisect(&|x: f64| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-11);
    }

    #[test]
    fn tolerates_infinite_upper_value() {
        // f(θ) = 1/(1−θ) − 2 on [0, 1]; f(1) = +∞, root at 0.5.
        let f = |t: f64| {
            if t >= 1.0 {
                f64::INFINITY
            } else {
                1.0 / (1.0 - t) - 2.0
            }
        };
        let r = bisect(&f, 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(r, 0.5, epsilon = 1e-11);
    }

    #[test]
    fn rejects_same_sign_bracket() {
        assert!(bisect(&|x: f64| x * x + 1.0, -1.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn expands_until_sign_change() {
        let f = |x: f64| x - 37.0;
        let hi = expand_upper(&f, 0.0, 1.0, 1e6).unwrap();
        assert!(hi >= 37.0);
        let r = bisect(&f, 0.0, hi, 1e-12).unwrap();
        assert_relative_eq!(r, 37.0, epsilon = 1e-9);
    }
}
