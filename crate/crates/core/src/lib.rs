//! Solvers for the scalar fractional delay equation
//!
//! ```text
//! D^α y(t) + a·y(t − T) = b(t),   y(0) = y0,   y(t) = 0 for t < 0
//! ```
//!
//! in two flavours: the conformable derivative `T_α f = t^{1−α} f'` and the
//! Caputo derivative. Each flavour has a closed-form delay series that serves
//! as the reference, plus explicit time-steppers on a uniform mesh aligned
//! with the delay.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below are what the experiment driver uses.

pub mod analysis;
pub mod caputo;
pub mod conformable;
mod error;
pub mod experiment;
pub mod forcing;
pub mod mesh;
mod scalar;
mod series;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use analysis::{compare, compare_from, convergence_study, stability_margin, ConvergenceLevel, ErrorReport, Scheme};
pub use conformable::{Family, ProblemConfig};
pub use forcing::{ForcingKind, ForcingSeries};
pub use mesh::{build_mesh, DelayIndexing, Mesh, Trajectory};

pub type Mesh64 = Mesh<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type ProblemConfig64 = ProblemConfig<f64>;
pub type ForcingSeries64 = ForcingSeries<f64>;
pub type ErrorReport64 = ErrorReport<f64>;

pub type Mesh32 = Mesh<f32>;
pub type Trajectory32 = Trajectory<f32>;
pub type ProblemConfig32 = ProblemConfig<f32>;
pub type ForcingSeries32 = ForcingSeries<f32>;
pub type ErrorReport32 = ErrorReport<f32>;
