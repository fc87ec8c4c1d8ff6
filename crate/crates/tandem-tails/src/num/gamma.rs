//! Log-gamma and the regularized incomplete gamma function.
//!
//! `reg_lower_gamma(a, x) = γ(a, x)/Γ(a)` is evaluated with the classical
//! pairing of a power series (for `x < a + 1`) and a modified-Lentz continued
//! fraction (otherwise), each run to machine-level convergence; absolute error
//! is well below the 1e−12 contract of the distribution layer across the
//! parameter ranges used here (shape ≤ ~50).

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS: [f64; 8] = [
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    debug_assert!(z > 0.0, "ln_gamma requires z > 0, got {z}");
    if z < 0.5 {
        // Reflection: Γ(z)Γ(1−z) = π / sin(πz).
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = 0.999_999_999_999_809_93;
    for (i, c) in LANCZOS.iter().enumerate() {
        acc += c / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma function
/// `P(a, x) = γ(a, x)/Γ(a)` for `a > 0`, `x ≥ 0`.
///
/// `P(a, 0) = 0`; `P(a, ∞) = 1`. Values for `x < 0` clamp to 0 (the callers
/// treat the argument as a nonnegative measure cutoff).
pub fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0, "reg_lower_gamma requires shape a > 0, got {a}");
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }

    // exp(−x + a·ln x − ln Γ(a)), the common prefactor of both expansions.
    let log_pre = -x + a * x.ln() - ln_gamma(a);
    if log_pre < -745.0 {
        // Prefactor underflows; decide by which side of the mean we are on.
        return if x > a { 1.0 } else { 0.0 };
    }
    let pre = log_pre.exp();

    if x < a + 1.0 {
        // Series: P(a,x) = pre · Σ_{n≥0} xⁿ / (a(a+1)…(a+n)).
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * f64::EPSILON {
                break;
            }
        }
        (pre * sum).clamp(0.0, 1.0)
    } else {
        // Continued fraction for Q(a,x) (modified Lentz).
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < f64::EPSILON {
                break;
            }
        }
        (1.0 - pre * h).clamp(0.0, 1.0)
    }
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 − P(a, x)`.
pub fn reg_upper_gamma(a: f64, x: f64) -> f64 {
    1.0 - reg_lower_gamma(a, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_matches_factorials() {
        for n in 1..15u64 {
            let exact: f64 = (1..n).map(|k| (k as f64).ln()).sum();
            assert_relative_eq!(ln_gamma(n as f64), exact, epsilon = 1e-12, max_relative = 1e-13);
        }
        // Γ(1/2) = √π.
        assert_relative_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn shape_one_is_exponential_cdf() {
        for &x in &[0.0, 0.05, 0.5, 1.0, 2.5, 10.0, 40.0] {
            assert_relative_eq!(
                reg_lower_gamma(1.0, x),
                1.0 - (-x as f64).exp(),
                epsilon = 1e-14,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn integer_shape_matches_erlang_sum() {
        // P(k, x) = 1 − e^{−x} Σ_{j<k} x^j/j!.
        for k in 1..8u32 {
            for &x in &[0.3, 1.0, 3.7, 9.0] {
                let mut term = 1.0;
                let mut sum = 1.0;
                for j in 1..k {
                    term *= x / j as f64;
                    sum += term;
                }
                let exact = 1.0 - (-x as f64).exp() * sum;
                assert_relative_eq!(
                    reg_lower_gamma(k as f64, x),
                    exact,
                    epsilon = 1e-13,
                    max_relative = 1e-11
                );
            }
        }
    }

    #[test]
    fn endpoints_and_extremes() {
        assert_eq!(reg_lower_gamma(2.0, 0.0), 0.0);
        assert_eq!(reg_lower_gamma(2.0, f64::INFINITY), 1.0);
        assert!(reg_lower_gamma(3.0, 1e4) > 1.0 - 1e-12);
        assert!(reg_lower_gamma(3.0, 1e-8) < 1e-12);
    }

    #[test]
    fn agrees_with_independent_reference_implementation() {
        // Cross-library oracle on a parameter sweep.
        for &a in &[0.5, 1.0, 1.7, 2.0, 3.5, 10.0, 25.0] {
            for &x in &[0.01, 0.3, 1.0, 2.0, 5.0, 12.0, 60.0] {
                let ours = reg_lower_gamma(a, x);
                let reference = statrs::function::gamma::gamma_lr(a, x);
                assert_relative_eq!(ours, reference, epsilon = 1e-12, max_relative = 1e-11);
            }
        }
    }
}
