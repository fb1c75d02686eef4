//! Radial solutions of `Δ²u = u^alpha` in `R^n` and their behaviour at
//! infinity.
//!
//! Everything numerical is generic over [`Real`] (`f32`, `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod acceptance;
pub mod asymptotics;
pub mod error;
pub mod extraction;
pub mod integrator;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod scalar;
pub mod series;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
pub use problem::{OriginData, Problem};
pub use scalar::{Field, Real};

pub type Problem64 = Problem<f64>;
pub type OriginData64 = OriginData<f64>;
pub type Trajectory64 = integrator::Trajectory<f64>;
pub type IntegratorControls64 = integrator::IntegratorControls<f64>;
pub type AsymptoticLaw64 = asymptotics::AsymptoticLaw<f64>;
pub type LimitEstimate64 = extraction::LimitEstimate<f64>;
pub type FunctionalValues64 = extraction::FunctionalValues<f64>;
pub type PicardSolution64 = oracle::PicardSolution<f64>;
pub type CaseSpec64 = report::CaseSpec<f64>;
pub type CaseReport64 = report::CaseReport<f64>;
