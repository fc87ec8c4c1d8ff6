//! Shared numerical routines.
//!
//! Small, dependency-free building blocks used across the crate:
//!
//! * [`quad`] — adaptive Gauss–Kronrod quadrature on finite intervals and
//!   half-lines;
//! * [`root`] — bracketing + bisection root finding tolerant of `+∞`
//!   function values (moment generating functions past their abscissa);
//! * [`golden`] — golden-section minimization with a coarse-grid warm start;
//! * [`gamma`] — log-gamma and the regularized incomplete gamma function.
//!
//! All routines are deterministic and allocation-light; tolerances are passed
//! explicitly by callers so that module-level accuracy contracts stay visible
//! at the call site.

pub mod gamma;
pub mod golden;
pub mod quad;
pub mod root;
