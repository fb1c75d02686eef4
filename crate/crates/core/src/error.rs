use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Values are carried as `f64` regardless of the scalar type used by the
/// failing routine so that the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("{what} overflows at r = {r}; use the scaled form")]
    Overflow { what: &'static str, r: f64 },

    #[error("{what}: cancellation exceeds working precision at r = {r}")]
    Precision { what: &'static str, r: f64 },

    #[error("origin value u(0) = {0} must be positive")]
    NonPositiveOrigin(f64),

    #[error("dimension n = {0} must be at least 1")]
    Dimension(usize),

    #[error("series order {order} outside the supported range [2, {max}]")]
    SeriesOrder { order: usize, max: usize },

    #[error("power of the leading series coefficient is not representable")]
    SeriesPower,

    #[error("r = {r} beyond the series validity radius {radius}")]
    BeyondSeriesRadius { r: f64, radius: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("alpha = {alpha} lies in the {regime} band; integration refused")]
    CatalogOnly { alpha: f64, regime: &'static str },

    #[error("missing solution functional: {0}")]
    MissingFunctional(&'static str),

    #[error("invalid integrator controls: {0}")]
    Controls(String),

    #[error("need at least {need} points spanning {decades} decades, got {got} points over {span:.3} decades")]
    InsufficientPoints { need: usize, decades: f64, got: usize, span: f64 },

    #[error("degenerate least-squares fit: {0}")]
    DegenerateFit(&'static str),

    #[error("tail fit residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    TailResidual { residual: f64, threshold: f64 },

    #[error("tail exponent {exponent} is not integrable (needs < -1)")]
    NotIntegrable { exponent: f64 },

    #[error("trajectory ended early ({0}); functional or limit unavailable")]
    Incomplete(String),

    #[error("Picard iteration did not converge within {iterations} iterations (last update {last_update:.3e})")]
    PicardNonConvergence { iterations: usize, last_update: f64 },

    #[error("Picard iterate lost positivity at the minimal radius R = {radius}")]
    PicardPositivity { radius: f64 },

    #[error("invalid sweep configuration: {0}")]
    Config(String),

    #[error("invalid Picard configuration: {0}")]
    PicardConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
