//! Tail bounds and Monte Carlo estimation for tandem queues.
//!
//! A tandem of M FIFO queues is fed by a stationary arrival process; each job
//! visits every queue in order. This crate estimates and bounds the
//! complementary distribution (CCDF) of the *end-to-end* waiting time of a job
//! in steady state:
//!
//! * [`sim`] — a discrete-event simulator for GI/G/1 → ·/G/1 → … tandems
//!   (independent per-queue services, or one shared service per job), with an
//!   exhaustive nested-maximum oracle for small instances;
//! * [`polyexp`] — closed-form poly-exponential upper bounds
//!   `P(W > x) ≤ (A + Bv + Cu)·e^{−θv} + D·e^{−θu}`-style two-argument
//!   certificates specialized to GI/M/1 → ·/M/1 tandems;
//! * [`union_bounds`] — a large-deviations union-bound baseline with a per-x
//!   optimized decay parameter;
//! * [`rates`] — decay-rate solvers (single stage and per-stage cascade with
//!   polynomial-degree accounting);
//! * [`verify`] — statistical certification of the defining integral equation
//!   and of the coefficient inequalities behind the closed-form bounds;
//! * [`dist`] — the small family of inter-arrival/service laws used
//!   throughout, with exact moments, transforms and tails.
//!
//! All Monte Carlo entry points are deterministic: every (run, lane, job)
//! triple owns a counter-based RNG stream derived from the user seed, so
//! results are bit-identical across thread counts and across the parallel and
//! sequential engines.

pub mod curve;
pub mod dist;
pub mod error;
pub mod num;
pub mod polyexp;
pub mod rates;
pub mod rng;
pub mod sim;
pub mod union_bounds;
pub mod verify;

pub use curve::{CcdfCurve, CcdfPoint, CurveKind};
pub use dist::Distribution;
pub use error::{Error, Result};
pub use polyexp::PolyExpParams;
pub use rates::{CascadeReport, DecayReport};
pub use sim::{ArrivalProcess, Metric, ServiceMode, SimConfig, TandemSpec};
pub use union_bounds::LdBoundResult;
pub use verify::{PointRecord, PsiEstimate, VerificationReport};
