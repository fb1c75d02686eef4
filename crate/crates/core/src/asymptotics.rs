//! Regime catalog for `Δ²u = u^alpha`: classification of `(n, alpha)`,
//! the comparison function `f(r)` with `u ~ f`, and the closed-form
//! constants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::scalar::Real;
use crate::specfun::gamma_fn;

/// Exponents closer than this to a regime boundary are treated as equal to it.
pub const ALPHA_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    ExpGrowth,
    PowerLaw,
    LogCritical,
    SolutionDependent,
    SupercriticalCatalog,
    NonexistenceCatalog,
    CriticalCatalog,
}

impl RegimeTag {
    pub fn name(self) -> &'static str {
        match self {
            RegimeTag::ExpGrowth => "ExpGrowth",
            RegimeTag::PowerLaw => "PowerLaw",
            RegimeTag::LogCritical => "LogCritical",
            RegimeTag::SolutionDependent => "SolutionDependent",
            RegimeTag::SupercriticalCatalog => "SupercriticalCatalog",
            RegimeTag::NonexistenceCatalog => "NonexistenceCatalog",
            RegimeTag::CriticalCatalog => "CriticalCatalog",
        }
    }

    pub fn is_catalog_only(self) -> bool {
        matches!(self, RegimeTag::SupercriticalCatalog | RegimeTag::NonexistenceCatalog | RegimeTag::CriticalCatalog)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime<T> {
    pub tag: RegimeTag,
    pub alpha_c: T,
    /// `p_S(2)`; `None` stands for `+∞` (`n <= 4`).
    pub p_sobolev: Option<T>,
}

/// `-1` for `n >= 2`, `-1/3` for `n = 1`.
pub fn critical_alpha<T: Real>(n: usize) -> T {
    if n == 1 {
        -T::one() / T::lit(3.0)
    } else {
        -T::one()
    }
}

/// `(n+4)/(n-4)` for `n >= 5`.
pub fn sobolev_exponent<T: Real>(n: usize) -> Option<T> {
    (n >= 5).then(|| T::from_usize_lossy(n + 4) / T::from_usize_lossy(n - 4))
}

fn near<T: Real>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(ALPHA_MATCH_TOL) * T::one().max(b.abs())
}

/// Total classification of `(n, alpha)`.
pub fn classify<T: Real>(n: usize, alpha: T) -> Regime<T> {
    let alpha_c = critical_alpha::<T>(n);
    let p_sobolev = sobolev_exponent::<T>(n);
    let tag = if near(alpha, T::one()) {
        RegimeTag::ExpGrowth
    } else if near(alpha, alpha_c) {
        RegimeTag::LogCritical
    } else if alpha < alpha_c {
        RegimeTag::SolutionDependent
    } else if alpha < T::one() {
        RegimeTag::PowerLaw
    } else {
        match p_sobolev {
            Some(p) if near(alpha, p) => RegimeTag::CriticalCatalog,
            Some(p) if alpha > p => RegimeTag::SupercriticalCatalog,
            _ => RegimeTag::NonexistenceCatalog,
        }
    };
    Regime { tag, alpha_c, p_sobolev }
}

/// The problem with `alpha` moved exactly onto a boundary it matched within
/// [`ALPHA_MATCH_TOL`] (`1` or `alpha_c`).
pub fn snap_alpha<T: Real>(problem: &Problem<T>) -> Problem<T> {
    let regime = classify(problem.n, problem.alpha);
    let alpha = match regime.tag {
        RegimeTag::ExpGrowth => T::one(),
        RegimeTag::LogCritical => regime.alpha_c,
        _ => problem.alpha,
    };
    Problem { n: problem.n, alpha }
}

/// `Δ²(r^m) = m (m+n-2) (m-2) (m+n-4) r^{m-4}`: the coefficient.
pub fn bilaplacian_power_factor<T: Real>(n: usize, m: T) -> T {
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    m * (m + nf - two) * (m - two) * (m + nf - two * two)
}

fn mismatch<T: Real>(what: &str, n: usize, alpha: T, tag: RegimeTag) -> Error {
    Error::RegimeMismatch(format!("{what} needs a different regime; (n = {n}, alpha = {alpha}) is {}", tag.name()))
}

/// `L = [(n+β)(n+β+2)(β+2)(β+4)]^{-1/(1-α)}` with `β = 4α/(1-α)`, the
/// constant of the exact solution `L r^{4/(1-α)}`.
pub fn powerlaw_constant<T: Real>(n: usize, alpha: T) -> Result<T> {
    let regime = classify(n, alpha);
    if regime.tag != RegimeTag::PowerLaw {
        return Err(mismatch("powerlaw_constant", n, alpha, regime.tag));
    }
    let product = powerlaw_product(n, alpha);
    if !(product > T::zero()) {
        return Err(Error::RegimeMismatch(format!("power-law factors not positive for n = {n}, alpha = {alpha}")));
    }
    Ok(product.powf(-(T::one() - alpha).recip()))
}

/// `(n+β)(n+β+2)(β+2)(β+4)`.
pub fn powerlaw_product<T: Real>(n: usize, alpha: T) -> T {
    let beta = T::lit(4.0) * alpha / (T::one() - alpha);
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    (nf + beta) * (nf + beta + two) * (beta + two) * (beta + two * two)
}

/// `M = prod_{l=1,2} (4/(1-α) - 2l + 2)(n + 4/(1-α) - 2l)`.
pub fn subsolution_constant<T: Real>(n: usize, alpha: T) -> T {
    let kappa = T::lit(4.0) / (T::one() - alpha);
    bilaplacian_power_factor(n, kappa)
}

/// Smallest relative margin `(v^α - Δ²v)/v^α` over `r_grid` for
/// `v(r) = v0 + lapv0 r²/(2n) + ε r^{4/(1-α)}`.
///
/// Non-negative exactly when `v` is a subsolution on the grid. Dividing by
/// `v^α` keeps the margin O(1) at large `r`, where both terms grow like
/// `r^{4α/(1-α)}`.
pub fn subsolution_margin<T: Real>(n: usize, alpha: T, epsilon: T, v0: T, lapv0: T, r_grid: &[T]) -> Result<T> {
    if !(alpha >= T::zero() && alpha < T::one()) {
        return Err(Error::Domain { what: "subsolution exponent (0 <= alpha < 1)", value: alpha.as_f64() });
    }
    if !(epsilon > T::zero()) {
        return Err(Error::Domain { what: "subsolution epsilon", value: epsilon.as_f64() });
    }
    let kappa = T::lit(4.0) / (T::one() - alpha);
    let m = subsolution_constant(n, alpha);
    // ε^{1-α} M: equals 1 in the equality configuration
    let lead = epsilon.powf(T::one() - alpha) * m;
    let two_n = T::lit(2.0) * T::from_usize_lossy(n);
    let mut margin = T::infinity();
    for &r in r_grid {
        if !(r > T::zero()) {
            return Err(Error::Domain { what: "subsolution radius", value: r.as_f64() });
        }
        let top = epsilon * r.powf(kappa);
        // v / (ε r^κ) >= 1
        let w = T::one() + (v0 + lapv0 * r * r / two_n) / top;
        margin = margin.min(T::one() - lead * w.powf(-alpha));
    }
    Ok(margin)
}

/// `L = [m(m+2)(n-2-m)(n-4-m)]^{-1/(1-α)}` with `m = 4/(α-1)`, for
/// `n >= 5` and `α > p_S(2)`. Catalog data only.
pub fn supercritical_constant<T: Real>(n: usize, alpha: T) -> Result<T> {
    let regime = classify(n, alpha);
    if regime.tag != RegimeTag::SupercriticalCatalog {
        return Err(mismatch("supercritical_constant", n, alpha, regime.tag));
    }
    let m = T::lit(4.0) / (alpha - T::one());
    let nf = T::from_usize_lossy(n);
    let two = T::lit(2.0);
    let product = m * (m + two) * (nf - two - m) * (nf - two * two - m);
    Ok(product.powf(-(T::one() - alpha).recip()))
}

/// Shape of the comparison function, up to its constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum LawForm<T> {
    /// `r^κ`
    RPower { kappa: T },
    /// `r² (ln r)^{1/2}`
    R2SqrtLog,
    /// `r² ln r`
    R2Log,
    /// `r² ln r (ln ln r)^{1/2}`
    R2LogSqrtLogLog,
    /// `r³ (ln r)^{3/4}`
    R3Log34,
    /// `r^{(1-n)/2} e^r`
    ExpMode,
}

impl<T: Real> LawForm<T> {
    pub fn label(&self) -> String {
        match self {
            LawForm::RPower { kappa } => format!("r^{kappa}"),
            LawForm::R2SqrtLog => "r^2 (ln r)^(1/2)".into(),
            LawForm::R2Log => "r^2 ln r".into(),
            LawForm::R2LogSqrtLogLog => "r^2 ln r (ln ln r)^(1/2)".into(),
            LawForm::R3Log34 => "r^3 (ln r)^(3/4)".into(),
            LawForm::ExpMode => "r^((1-n)/2) e^r".into(),
        }
    }

    /// Radii at or below this value leave the logarithms undefined or
    /// non-positive.
    pub fn min_radius(&self) -> T {
        match self {
            LawForm::RPower { .. } | LawForm::ExpMode => T::zero(),
            LawForm::R2SqrtLog | LawForm::R2Log | LawForm::R3Log34 => T::one(),
            LawForm::R2LogSqrtLogLog => T::E(),
        }
    }

    /// `ln` of the shape at `r`, or `None` at or below [`min_radius`](Self::min_radius).
    pub fn ln_shape(&self, n: usize, r: T) -> Option<T> {
        if !(r > self.min_radius()) {
            return None;
        }
        let lr = r.ln();
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        Some(match *self {
            LawForm::RPower { kappa } => kappa * lr,
            LawForm::R2SqrtLog => two * lr + half * lr.ln(),
            LawForm::R2Log => two * lr + lr.ln(),
            LawForm::R2LogSqrtLogLog => two * lr + lr.ln() + half * lr.ln().ln(),
            LawForm::R3Log34 => T::lit(3.0) * lr + T::lit(0.75) * lr.ln(),
            LawForm::ExpMode => r + (T::one() - T::from_usize_lossy(n)) * half * lr,
        })
    }

    /// Leading power of `r`, used for tail completion.
    pub fn leading_power(&self, n: usize) -> T {
        match *self {
            LawForm::RPower { kappa } => kappa,
            LawForm::R2SqrtLog | LawForm::R2Log | LawForm::R2LogSqrtLogLog => T::lit(2.0),
            LawForm::R3Log34 => T::lit(3.0),
            LawForm::ExpMode => (T::one() - T::from_usize_lossy(n)) / T::lit(2.0),
        }
    }
}

/// Inputs a constant may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    U0,
    Lap0,
    /// `∫_0^∞ t u^α dt`
    D,
    /// `∫_0^∞ u^α dt`
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ConstantSpec<T> {
    ClosedForm(T),
    NeedsFunctionals(Vec<FunctionalKind>),
}

/// Row of the catalog before any solution data is known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawTemplate<T> {
    pub form: LawForm<T>,
    pub constant: ConstantSpec<T>,
}

/// Values for [`FunctionalKind`]s.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LawInputs<T> {
    pub u0: Option<T>,
    pub lap0: Option<T>,
    pub d: Option<T>,
    pub n_integral: Option<T>,
}

impl<T: Real> LawInputs<T> {
    fn get(&self, kind: FunctionalKind) -> Result<T> {
        let (v, name) = match kind {
            FunctionalKind::U0 => (self.u0, "u(0)"),
            FunctionalKind::Lap0 => (self.lap0, "Δu(0)"),
            FunctionalKind::D => (self.d, "D"),
            FunctionalKind::N => (self.n_integral, "N"),
        };
        v.ok_or(Error::MissingFunctional(name))
    }
}

/// Comparison function with a resolved constant: `u(r) ~ constant * shape(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticLaw<T> {
    pub form: LawForm<T>,
    pub constant: T,
    pub source: ConstantSpec<T>,
}

impl<T: Real> AsymptoticLaw<T> {
    /// `ln f(r)`.
    pub fn ln_f(&self, n: usize, r: T) -> Option<T> {
        Some(self.constant.ln() + self.form.ln_shape(n, r)?)
    }
}

/// Catalog row for `(n, alpha)`.
pub fn law_template<T: Real>(n: usize, alpha: T) -> Result<LawTemplate<T>> {
    if n == 0 {
        return Err(Error::Dimension(n));
    }
    let regime = classify(n, alpha);
    let nf = T::from_usize_lossy(n);
    use ConstantSpec::*;
    use FunctionalKind::*;
    let (form, constant) = match regime.tag {
        RegimeTag::ExpGrowth => (LawForm::ExpMode, NeedsFunctionals(vec![U0, Lap0])),
        RegimeTag::PowerLaw => (
            LawForm::RPower { kappa: T::lit(4.0) / (T::one() - alpha) },
            ClosedForm(powerlaw_constant(n, alpha)?),
        ),
        RegimeTag::LogCritical => match n {
            1 => (LawForm::R3Log34, ClosedForm((T::lit(2.0) / T::lit(9.0)).powf(T::lit(0.75)))),
            2 => (LawForm::R2LogSqrtLogLog, ClosedForm(T::lit(0.5).sqrt())),
            _ => (LawForm::R2SqrtLog, ClosedForm((nf * (nf - T::lit(2.0))).sqrt().recip())),
        },
        RegimeTag::SolutionDependent => match n {
            1 => (LawForm::RPower { kappa: T::lit(3.0) }, NeedsFunctionals(vec![N])),
            2 => (LawForm::R2Log, NeedsFunctionals(vec![D])),
            _ => (LawForm::RPower { kappa: T::lit(2.0) }, NeedsFunctionals(vec![Lap0, D])),
        },
        tag => {
            return Err(Error::CatalogOnly { alpha: alpha.as_f64(), regime: tag.name() });
        }
    };
    Ok(LawTemplate { form, constant })
}

/// Resolved law for a problem, given the data its constant needs.
pub fn predicted_law<T: Real>(problem: &Problem<T>, inputs: Option<&LawInputs<T>>) -> Result<AsymptoticLaw<T>> {
    let n = problem.n;
    let template = law_template(n, problem.alpha)?;
    let constant = match &template.constant {
        ConstantSpec::ClosedForm(c) => *c,
        ConstantSpec::NeedsFunctionals(_) => {
            let empty = LawInputs::default();
            let inputs = inputs.unwrap_or(&empty);
            let nf = T::from_usize_lossy(n);
            let two = T::lit(2.0);
            match classify(n, problem.alpha).tag {
                RegimeTag::ExpGrowth => {
                    let s = inputs.get(FunctionalKind::U0)? + inputs.get(FunctionalKind::Lap0)?;
                    s * gamma_fn(nf / two)? * two.powf((nf - T::lit(5.0)) / two) / T::PI().sqrt()
                }
                _ => match n {
                    1 => inputs.get(FunctionalKind::N)? / T::lit(6.0),
                    2 => inputs.get(FunctionalKind::D)? / T::lit(4.0),
                    _ => {
                        let lap0 = inputs.get(FunctionalKind::Lap0)?;
                        let d = inputs.get(FunctionalKind::D)?;
                        (lap0 + d / (nf - two)) / (two * nf)
                    }
                },
            }
        }
    };
    Ok(AsymptoticLaw { form: template.form, constant, source: template.constant })
}
