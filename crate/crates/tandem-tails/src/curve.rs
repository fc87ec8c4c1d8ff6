//! Tail curves: a labelled CCDF sampled on an increasing x-grid.
//!
//! Every producer in this crate — the simulator, the poly-exponential bound,
//! the union bound, Kingman and Ross — emits the same shape of data: a grid
//! of `x` values with `P(W > x)` estimates and (for stochastic curves) a
//! standard error per point. [`CcdfCurve`] is that common currency; the
//! comparison and dominance checks consume it, and the CLI serializes it.
//!
//! CSV output is line-oriented with the fixed header `x,value,stderr,kind`
//! and one row per point. Numbers are printed with Rust's shortest
//! round-trip `f64` formatting, so a rerun with the same seed produces
//! byte-identical files.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which producer generated a curve; doubles as the CSV `kind` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// Closed-form poly-exponential upper bound.
    PolyexpBound,
    /// Large-deviations union bound with per-x optimized decay parameter.
    LdBound,
    /// Single-queue exponential bound `e^{−θx}`.
    Kingman,
    /// Single-queue bound with the sharpened constant prefactor.
    Ross,
    /// Monte Carlo estimate with binomial standard errors.
    Simulation,
}

impl CurveKind {
    /// Stable lower-case label used in CSV/JSON output.
    pub fn label(self) -> &'static str {
        match self {
            Self::PolyexpBound => "polyexp-bound",
            Self::LdBound => "ld-bound",
            Self::Kingman => "kingman",
            Self::Ross => "ross",
            Self::Simulation => "simulation",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One grid point of a tail curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcdfPoint {
    /// Abscissa (waiting/sojourn time threshold), nonnegative.
    pub x: f64,
    /// `P(W > x)` value or estimate, in `[0, 1]`.
    pub value: f64,
    /// Standard error of `value`; exactly 0 for analytic curves.
    pub stderr: f64,
}

/// A labelled CCDF on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    /// Producer label.
    pub kind: CurveKind,
    /// Grid points with values and standard errors.
    pub points: Vec<CcdfPoint>,
}

impl CcdfCurve {
    /// Builds a curve after validating the grid and ranges: `x` nonnegative
    /// and strictly increasing, values in `[0, 1]`, standard errors
    /// nonnegative and finite.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] describing the first offending point.
    pub fn new(kind: CurveKind, points: Vec<CcdfPoint>) -> Result<Self> {
        let mut prev = f64::NEG_INFINITY;
        for (i, p) in points.iter().enumerate() {
            if !p.x.is_finite() || p.x < 0.0 || p.x <= prev {
                return Err(Error::InvalidParameter(format!(
                    "curve x-grid must be nonnegative and strictly increasing; point {i} has x={}",
                    p.x
                )));
            }
            if !p.value.is_finite() || !(0.0..=1.0).contains(&p.value) {
                return Err(Error::InvalidParameter(format!(
                    "curve value at x={} is {}, outside [0,1]",
                    p.x, p.value
                )));
            }
            if !p.stderr.is_finite() || p.stderr < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "curve stderr at x={} is {}, must be finite and >= 0",
                    p.x, p.stderr
                )));
            }
            prev = p.x;
        }
        Ok(Self { kind, points })
    }

    /// Builds an analytic (zero-stderr) curve from parallel `x`/`value`
    /// slices.
    ///
    /// # Errors
    ///
    /// [`Error::DimensionMismatch`] if the slices differ in length, plus the
    /// validation errors of [`CcdfCurve::new`].
    pub fn from_values(kind: CurveKind, xs: &[f64], values: &[f64]) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} x values vs {} curve values",
                xs.len(),
                values.len()
            )));
        }
        let points = xs
            .iter()
            .zip(values)
            .map(|(&x, &value)| CcdfPoint {
                x,
                value,
                stderr: 0.0,
            })
            .collect();
        Self::new(kind, points)
    }

    /// The x-grid as a fresh vector.
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    /// True if `other` is sampled on the identical x-grid (bitwise equality,
    /// as grids are supposed to be constructed once and shared).
    pub fn same_grid(&self, other: &CcdfCurve) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| a.x == b.x)
    }

    /// Writes this curve's rows (with header) as CSV.
    ///
    /// # Errors
    ///
    /// [`Error::Io`] on write failure.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        write_csv(std::slice::from_ref(self), w)
    }
}

/// Writes several curves into one CSV stream: a single `x,value,stderr,kind`
/// header, then each curve's rows in the order given.
///
/// # Errors
///
/// [`Error::Io`] on write failure.
pub fn write_csv<W: Write>(curves: &[CcdfCurve], w: &mut W) -> Result<()> {
    writeln!(w, "x,value,stderr,kind")?;
    for c in curves {
        for p in &c.points {
            writeln!(w, "{},{},{},{}", p.x, p.value, p.stderr, c.kind)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, value: f64, stderr: f64) -> CcdfPoint {
        CcdfPoint { x, value, stderr }
    }

    #[test]
    fn validation_rejects_bad_grids() {
        let bad_order = CcdfCurve::new(CurveKind::Kingman, vec![pt(1.0, 0.5, 0.0), pt(1.0, 0.4, 0.0)]);
        assert!(bad_order.is_err());
        let bad_value = CcdfCurve::new(CurveKind::Kingman, vec![pt(0.0, 1.2, 0.0)]);
        assert!(bad_value.is_err());
        let bad_stderr = CcdfCurve::new(CurveKind::Simulation, vec![pt(0.0, 0.5, -1.0)]);
        assert!(bad_stderr.is_err());
        let neg_x = CcdfCurve::new(CurveKind::Kingman, vec![pt(-1.0, 0.5, 0.0)]);
        assert!(neg_x.is_err());
        assert!(CcdfCurve::new(CurveKind::Kingman, vec![]).is_ok());
    }

    #[test]
    fn from_values_checks_lengths() {
        assert!(matches!(
            CcdfCurve::from_values(CurveKind::Ross, &[0.0, 1.0], &[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        let c = CcdfCurve::from_values(CurveKind::Ross, &[0.0, 1.0], &[1.0, 0.5]).unwrap();
        assert_eq!(c.points[1].stderr, 0.0);
    }

    #[test]
    fn csv_format_is_stable() {
        let a = CcdfCurve::from_values(CurveKind::Kingman, &[0.0, 2.5], &[1.0, 0.25]).unwrap();
        let b = CcdfCurve::new(
            CurveKind::Simulation,
            vec![pt(0.0, 1.0, 0.0), pt(2.5, 0.2475, 0.004)],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&[a, b], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "x,value,stderr,kind\n\
             0,1,0,kingman\n\
             2.5,0.25,0,kingman\n\
             0,1,0,simulation\n\
             2.5,0.2475,0.004,simulation\n"
        );
    }

    #[test]
    fn json_round_trip_and_labels() {
        let c = CcdfCurve::from_values(CurveKind::PolyexpBound, &[0.0, 1.0], &[1.0, 0.125]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains(r#""kind":"polyexp-bound""#));
        let back: CcdfCurve = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        assert_eq!(CurveKind::LdBound.to_string(), "ld-bound");
        assert_eq!(CurveKind::Ross.label(), "ross");
    }

    #[test]
    fn grid_comparison() {
        let a = CcdfCurve::from_values(CurveKind::Kingman, &[0.0, 1.0], &[1.0, 0.5]).unwrap();
        let b = CcdfCurve::from_values(CurveKind::Ross, &[0.0, 1.0], &[0.9, 0.4]).unwrap();
        let c = CcdfCurve::from_values(CurveKind::Ross, &[0.0, 2.0], &[0.9, 0.4]).unwrap();
        assert!(a.same_grid(&b));
        assert!(!a.same_grid(&c));
        assert_eq!(a.xs(), vec![0.0, 1.0]);
    }
}
