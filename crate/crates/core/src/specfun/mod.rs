//! Gamma, Bessel and the closed-form modes of the linear problem.

mod bessel;
mod gamma;
mod modes;

pub use bessel::{
    bessel_i, bessel_i_asymptotic, bessel_i_series, bessel_j_series, crossover_radius, BesselEval,
    ALTERNATING_SERIES_MAX_R, ASYMPTOTIC_TERMS,
};
pub use gamma::{gamma_fn, ln_gamma};
pub use modes::{exp_mode_coeffs, exp_mode_u1, exp_mode_u1_ln, osc_mode_coeffs, osc_mode_u2};
