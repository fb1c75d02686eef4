//! Limits of `u/f` along trajectories, and the solution functionals that
//! enter the asymptotic constants.

mod fit;
mod intermediate;
mod quadrature;

pub use fit::{estimate_limit, ratio_series, FitModel, LimitEstimate, MIN_DECADES, MIN_POINTS, WINDOWS};
pub use intermediate::{
    compose_headline, composition_identity_error, composition_targets, intermediate_limits, IntermediateLimit,
};
pub use quadrature::{
    aux_integral, cumulative_integral, tail_integral, tail_integral_with, AuxKind, FunctionalValues, TailModel,
    TailOptions, Weight, MIN_TAIL_RMAX, TAIL_RESIDUAL_THRESHOLD,
};
