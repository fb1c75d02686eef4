use serde::Serialize;

use crate::asymptotics::{classify, law_template, RegimeTag};
use crate::error::{Error, Result};
use crate::integrator::{StateVector, Trajectory};
use crate::scalar::Real;

/// Default bound on the log-residual of the power-law tail model over the
/// final decade.
pub const TAIL_RESIDUAL_THRESHOLD: f64 = 0.5;
/// Minimum `rmax` for tail completion.
pub const MIN_TAIL_RMAX: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `∫ t u^p dt`
    TimesT,
    /// `∫ u^p dt`
    Plain,
}

impl Weight {
    fn power(self) -> usize {
        match self {
            Weight::TimesT => 1,
            Weight::Plain => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AuxKind {
    /// `∫_0^r s/u ds` (`n >= 3`, `alpha = -1`)
    F,
    /// `∫_0^r t/u dt` (`n = 2`, `alpha = -1`); same integrand as `F`
    G,
    /// `∫_0^r u^{-1/3} ds` (`n = 1`, `alpha = -1/3`)
    H,
}

/// How the unreachable part `(rmax, ∞)` is completed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailModel<T> {
    /// Fit `u ≈ c r^κ` at `rmax`, `κ` taken from the regime's law.
    LawPower,
    /// Fit `u ≈ c r^κ` with the given `κ`; regime checks are skipped.
    ForcedPower(T),
    /// No completion; regime checks are skipped.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailOptions<T> {
    pub model: TailModel<T>,
    pub residual_threshold: T,
}

impl<T: Real> Default for TailOptions<T> {
    fn default() -> Self {
        Self { model: TailModel::LawPower, residual_threshold: T::lit(TAIL_RESIDUAL_THRESHOLD) }
    }
}

/// `D` or `N` split into the quadrature over the trajectory and the
/// analytic tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValues<T> {
    /// `∫_0^∞ t u^α dt`
    pub d: Option<T>,
    /// `∫_0^∞ u^α dt`
    pub n: Option<T>,
    pub finite_part: T,
    pub tail_part: T,
    /// `κ α + w` of the tail integrand `t^w (c t^κ)^α`.
    pub tail_model_exponent: T,
    /// Largest `|ln(u / (c r^κ))|` over the final decade.
    pub tail_fit_residual: T,
    /// `tail_part * tail_fit_residual` plus a quadrature error estimate.
    pub error_estimate: T,
}

impl<T: Real> FunctionalValues<T> {
    pub fn value(&self) -> T {
        self.finite_part + self.tail_part
    }
}

/// Integrand `g = r^w u^p` with its first two derivatives at a sample.
fn integrand<T: Real>(s: &StateVector<T>, n: usize, w: usize, p: T) -> [T; 3] {
    let (r, u, du) = (s.r, s.u, s.du);
    let d2u = s.d2u(n);
    let up = u.powf(p);
    let g1u = p * up / u * du;
    let g2u = p * (p - T::one()) * up / (u * u) * du * du + p * up / u * d2u;
    match w {
        0 => [up, g1u, g2u],
        _ => {
            // w = 1: (r f)' = f + r f', (r f)'' = 2 f' + r f''
            [r * up, up + r * g1u, T::lit(2.0) * g1u + r * g2u]
        }
    }
}

/// `∫_a^b g` from values and two derivatives at both ends (quintic Hermite),
/// with the cubic-Hermite difference as an error indicator.
fn hermite_panel<T: Real>(h: T, a: &[T; 3], b: &[T; 3]) -> (T, T) {
    let two = T::lit(2.0);
    let fifth = h / two * (a[0] + b[0]) + h * h / T::lit(10.0) * (a[1] - b[1]) + h * h * h / T::lit(120.0) * (a[2] + b[2]);
    let cubic = h / two * (a[0] + b[0]) + h * h / T::lit(12.0) * (a[1] - b[1]);
    (fifth, (fifth - cubic).abs())
}

/// Running `∫_0^{r_i} t^w u^p dt` at every sample, with the error indicator
/// at the end. Starts from the series on `[0, handoff]` unless the first
/// sample sits at `r = 0`.
pub fn cumulative_integral<T: Real>(traj: &Trajectory<T>, weight: Weight, p: T) -> Result<(Vec<(T, T)>, T)> {
    if traj.sample_log_scales.iter().any(|&s| s != T::zero()) {
        return Err(Error::RegimeMismatch("integrals of renormalized trajectories are not supported".into()));
    }
    let n = traj.problem.n;
    let w = weight.power();
    let first = &traj.samples[0];
    let mut acc = if first.r > T::zero() { traj.series.integral_of_power(p, w, first.r)? } else { T::zero() };
    let mut err = T::zero();
    let mut out = Vec::with_capacity(traj.samples.len());
    out.push((first.r, acc));
    let mut prev = integrand(first, n, w, p);
    for pair in traj.samples.windows(2) {
        let cur = integrand(&pair[1], n, w, p);
        let (v, e) = hermite_panel(pair[1].r - pair[0].r, &prev, &cur);
        acc = acc + v;
        err = err + e;
        out.push((pair[1].r, acc));
        prev = cur;
    }
    Ok((out, err))
}

/// `D = ∫_0^∞ t u^α dt` (`TimesT`) or `N = ∫_0^∞ u^α dt` (`Plain`) with
/// the law's power-law tail completion.
pub fn tail_integral<T: Real>(traj: &Trajectory<T>, weight: Weight) -> Result<FunctionalValues<T>> {
    tail_integral_with(traj, weight, &TailOptions::default())
}

pub fn tail_integral_with<T: Real>(
    traj: &Trajectory<T>,
    weight: Weight,
    options: &TailOptions<T>,
) -> Result<FunctionalValues<T>> {
    let n = traj.problem.n;
    let alpha = traj.problem.alpha;
    if !traj.reached_rmax() {
        return Err(Error::Incomplete(traj.termination.label().into()));
    }
    let kappa = match options.model {
        TailModel::LawPower => {
            let regime = classify(n, alpha);
            let ok = regime.tag == RegimeTag::SolutionDependent
                && match weight {
                    Weight::TimesT => n >= 2,
                    Weight::Plain => n == 1,
                };
            if !ok {
                let what = if weight == Weight::TimesT { "D" } else { "N" };
                return Err(Error::RegimeMismatch(format!(
                    "{what} is defined for alpha below the critical exponent ({} for n = {n} weighting), got alpha = {alpha}",
                    if n == 1 { "-1/3, N" } else { "-1, D" }
                )));
            }
            if traj.last().r < T::lit(MIN_TAIL_RMAX) {
                return Err(Error::Controls(format!("tail completion needs rmax >= {MIN_TAIL_RMAX}")));
            }
            Some(law_template(n, alpha)?.form.leading_power(n))
        }
        TailModel::ForcedPower(k) => Some(k),
        TailModel::None => None,
    };
    let (cum, quad_err) = cumulative_integral(traj, weight, alpha)?;
    let finite_part = cum[cum.len() - 1].1;
    let w = T::from_usize_lossy(weight.power());

    let (tail_part, exponent, residual) = match kappa {
        None => (T::zero(), T::zero(), T::zero()),
        Some(kappa) => {
            let last = traj.last();
            let big_r = last.r;
            let c = last.u / big_r.powf(kappa);
            let residual = traj
                .samples
                .iter()
                .filter(|s| s.r >= big_r / T::lit(10.0) * T::lit(1.0 - 1e-12))
                .map(|s| (s.u / (c * s.r.powf(kappa))).ln().abs())
                .fold(T::zero(), T::max);
            if residual > options.residual_threshold {
                return Err(Error::TailResidual { residual: residual.as_f64(), threshold: options.residual_threshold.as_f64() });
            }
            let exponent = kappa * alpha + w;
            if !(exponent < -T::one()) {
                return Err(Error::NotIntegrable { exponent: exponent.as_f64() });
            }
            let e1 = exponent + T::one();
            (c.powf(alpha) * big_r.powf(e1) / -e1, exponent, residual)
        }
    };
    let value = finite_part + tail_part;
    let (d, n_integral) = match weight {
        Weight::TimesT => (Some(value), None),
        Weight::Plain => (None, Some(value)),
    };
    Ok(FunctionalValues {
        d,
        n: n_integral,
        finite_part,
        tail_part,
        tail_model_exponent: exponent,
        tail_fit_residual: residual,
        error_estimate: tail_part.abs() * residual + quad_err,
    })
}

/// Running `F`, `G` or `H` at every sample.
pub fn aux_integral<T: Real>(traj: &Trajectory<T>, kind: AuxKind) -> Result<Vec<(T, T)>> {
    let n = traj.problem.n;
    let tag = classify(n, traj.problem.alpha).tag;
    let ok = tag == RegimeTag::LogCritical
        && match kind {
            AuxKind::F => n >= 3,
            AuxKind::G => n == 2,
            AuxKind::H => n == 1,
        };
    if !ok {
        return Err(Error::RegimeMismatch(format!(
            "{kind:?} belongs to a different log-critical case than (n = {n}, alpha = {})",
            traj.problem.alpha
        )));
    }
    let (weight, p) = match kind {
        AuxKind::F | AuxKind::G => (Weight::TimesT, -T::one()),
        AuxKind::H => (Weight::Plain, -T::one() / T::lit(3.0)),
    };
    Ok(cumulative_integral(traj, weight, p)?.0)
}
