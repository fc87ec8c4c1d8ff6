//! Golden-section minimization with a coarse-grid warm start.
//!
//! The objectives minimized in this crate (envelope constants over a shift
//! parameter, per-x decay-rate optimization) are continuous and piecewise
//! unimodal but not globally unimodal, so a uniform grid scan first locates
//! the best basin and golden-section then refines inside the two neighboring
//! grid cells.

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)`. Stops when the bracket is shorter than `x_tol`
/// or after `max_evals` objective evaluations.
pub fn golden_min<F: Fn(f64) -> f64>(
    f: &F,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
    max_evals: usize,
) -> (f64, f64) {
    const INV_PHI2: f64 = 0.381_966_011_250_105; // 2 − φ
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }

    let mut x1 = a + INV_PHI2 * (b - a);
    let mut x2 = b - INV_PHI2 * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;

    while evals < max_evals && (b - a) > x_tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_PHI2 * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - INV_PHI2 * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }

    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimize `f` on `[a, b]`: scan `n` uniform grid cells, then refine with
/// golden-section inside the cells adjacent to the best grid point.
///
/// Returns `(x_min, f_min)`. With `n = 0` the grid degenerates to the
/// endpoints only.
pub fn grid_then_golden<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    n: usize,
    x_tol: f64,
) -> (f64, f64) {
    if !(b > a) {
        return (a, f(a));
    }
    let n = n.max(1);
    let step = (b - a) / n as f64;

    let mut best_i = 0usize;
    let mut best_f = f64::INFINITY;
    for i in 0..=n {
        let x = a + step * i as f64;
        let v = f(x);
        if v < best_f {
            best_f = v;
            best_i = i;
        }
    }

    let lo = a + step * best_i.saturating_sub(1) as f64;
    let hi = a + step * (best_i + 1).min(n) as f64;
    let (xr, fr) = golden_min(f, lo, hi, x_tol, 200);
    if fr < best_f {
        (xr, fr)
    } else {
        (a + step * best_i as f64, best_f)
    }
}
