use serde::Serialize;

use crate::asymptotics::{law_template, AsymptoticLaw};
use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::scalar::Real;

/// Minimum number of points for [`estimate_limit`].
pub const MIN_POINTS: usize = 8;
/// Minimum span, in decades, for [`estimate_limit`].
pub const MIN_DECADES: f64 = 2.0;
/// Window lengths in decades, measured back from the last point. The first
/// one produces the reported value.
pub const WINDOWS: [f64; 3] = [2.0, 1.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    LastValue,
    InverseLogFit,
    PowerCorrectionFit,
    AitkenAccel,
}

impl FitModel {
    pub fn name(self) -> &'static str {
        match self {
            FitModel::LastValue => "last",
            FitModel::InverseLogFit => "invlog",
            FitModel::PowerCorrectionFit => "power",
            FitModel::AitkenAccel => "aitken",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "last" => Some(FitModel::LastValue),
            "invlog" => Some(FitModel::InverseLogFit),
            "power" => Some(FitModel::PowerCorrectionFit),
            "aitken" => Some(FitModel::AitkenAccel),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate<T> {
    pub value: T,
    pub model: FitModel,
    /// Half the spread of the estimates over [`WINDOWS`].
    pub uncertainty: T,
    /// Running minimum of the ratio over the final decade.
    pub tail_min: T,
    /// Running maximum of the ratio over the final decade.
    pub tail_max: T,
    /// One estimate per entry of [`WINDOWS`].
    pub window_values: Vec<T>,
    /// Correction exponent `p` chosen by the power-correction fit.
    pub correction_power: Option<T>,
}

/// `u(r)/f(r)` along the trajectory, restricted to radii where `f` is
/// defined and positive. Computed in log space, so the renormalized
/// `alpha = 1` path is handled transparently.
pub fn ratio_series<T: Real>(traj: &Trajectory<T>, law: &AsymptoticLaw<T>) -> Result<Vec<(T, T)>> {
    if !traj.reached_rmax() {
        return Err(Error::Incomplete(traj.termination.label().into()));
    }
    let n = traj.problem.n;
    let expected = law_template(n, traj.problem.alpha)?;
    if expected.form != law.form {
        return Err(Error::RegimeMismatch(format!(
            "law {} does not belong to (n = {n}, alpha = {}), expected {}",
            law.form.label(),
            traj.problem.alpha,
            expected.form.label()
        )));
    }
    Ok(traj
        .samples
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let ln_f = law.ln_f(n, s.r)?;
            Some((s.r, (traj.ln_u(i) - ln_f).exp()))
        })
        .collect())
}

fn check_span<T: Real>(series: &[(T, T)], need: usize, decades: f64) -> Result<()> {
    let got = series.len();
    let span = match (series.first(), series.last()) {
        (Some(a), Some(b)) if got > 1 => (b.0 / a.0).log10().as_f64(),
        _ => 0.0,
    };
    if got < need || !(span >= decades - 1e-9) {
        return Err(Error::InsufficientPoints { need, decades, got, span });
    }
    Ok(())
}

fn window<T: Real>(series: &[(T, T)], decades: f64) -> &[(T, T)] {
    let r_last = series[series.len() - 1].0;
    let r_start = r_last / T::lit(10f64.powf(decades)) * T::lit(1.0 - 1e-12);
    let i = series.partition_point(|p| p.0 < r_start);
    &series[i..]
}

/// Least squares for `y ≈ c0 + c1 x`; returns `(c0, c1, rms residual)`.
fn linear_fit<T: Real>(pts: impl Iterator<Item = (T, T)> + Clone) -> Result<(T, T, T)> {
    let mut m = T::zero();
    let mut sx = T::zero();
    let mut sy = T::zero();
    for (x, y) in pts.clone() {
        m = m + T::one();
        sx = sx + x;
        sy = sy + y;
    }
    if m < T::lit(2.0) {
        return Err(Error::DegenerateFit("fewer than two points"));
    }
    let (mx, my) = (sx / m, sy / m);
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (x, y) in pts.clone() {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
        syy = syy + (y - my) * (y - my);
    }
    if !(sxx > T::epsilon() * T::lit(16.0) * (mx * mx * m).max(T::min_positive_value())) {
        return Err(Error::DegenerateFit("regressor does not vary"));
    }
    let c1 = sxy / sxx;
    let c0 = my - c1 * mx;
    let rss = (syy - c1 * sxy).max(T::zero());
    Ok((c0, c1, (rss / m).sqrt()))
}

fn inverse_log<T: Real>(w: &[(T, T)]) -> Result<T> {
    let pts = w.iter().filter(|p| p.0 > T::one()).map(|&(r, y)| (r.ln().recip(), y));
    Ok(linear_fit(pts)?.0)
}

/// Exponents scanned by the power-correction fit: `k/20` for `k = 5..=80`.
pub const POWER_SCAN: (usize, usize, f64) = (5, 80, 20.0);

/// `c0 + c1 r^{-p}` with `p` minimizing the residual: a scan over
/// [`POWER_SCAN`] followed by golden-section refinement around the best
/// grid exponent.
fn power_correction<T: Real>(w: &[(T, T)]) -> Result<(T, T)> {
    let r_last = w[w.len() - 1].0;
    // scale r by the last radius so the regressor stays O(1)
    let fit = |p: T| linear_fit(w.iter().map(|&(r, y)| ((r / r_last).powf(-p), y)));
    let (lo, hi, den) = POWER_SCAN;
    let mut best: Option<(T, T, T)> = None;
    for k in lo..=hi {
        let p = T::from_usize_lossy(k) / T::lit(den);
        let (c0, _, res) = fit(p)?;
        if best.map_or(true, |b| res < b.2) {
            best = Some((c0, p, res));
        }
    }
    let (c0, p, res) = best.expect("non-empty scan");
    let step = T::one() / T::lit(den);
    let golden = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = ((p - step).max(T::lit(1e-3)), p + step);
    for _ in 0..60 {
        let x1 = b - golden * (b - a);
        let x2 = a + golden * (b - a);
        if fit(x1)?.2 < fit(x2)?.2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let q = (a + b) / T::lit(2.0);
    let (c, _, r) = fit(q)?;
    Ok(if r < res { (c, q) } else { (c0, p) })
}

fn nearest_index<T: Real>(series: &[(T, T)], r: T) -> usize {
    let lr = r.ln();
    let mut best = 0;
    for (i, p) in series.iter().enumerate() {
        if (p.0.ln() - lr).abs() < (series[best].0.ln() - lr).abs() {
            best = i;
        }
    }
    best
}

/// Aitken Δ² on three points spaced `decades / 2` apart in `log10 r`,
/// ending at the last sample.
fn aitken<T: Real>(series: &[(T, T)], decades: f64) -> T {
    let last = series.len() - 1;
    let r_last = series[last].0;
    let i0 = nearest_index(series, r_last / T::lit(10f64.powf(decades)));
    let i1 = nearest_index(series, r_last / T::lit(10f64.powf(decades / 2.0)));
    let (x0, x1, x2) = (series[i0].1, series[i1].1, series[last].1);
    let denom = x2 - x1 - (x1 - x0);
    let scale = x0.abs().max(x1.abs()).max(x2.abs());
    if denom.abs() <= T::lit(64.0) * T::epsilon() * scale {
        return x2;
    }
    x2 - (x2 - x1) * (x2 - x1) / denom
}

/// Extrapolated limit of a ratio series with the chosen correction model.
pub fn estimate_limit<T: Real>(series: &[(T, T)], model: FitModel) -> Result<LimitEstimate<T>> {
    check_span(series, MIN_POINTS, MIN_DECADES)?;
    if series.iter().any(|p| !(p.0 > T::zero()) || !p.1.is_finite()) {
        return Err(Error::DegenerateFit("non-positive radius or non-finite ratio"));
    }
    let mut values = Vec::with_capacity(WINDOWS.len());
    let mut correction_power = None;
    for (k, &d) in WINDOWS.iter().enumerate() {
        let w = window(series, d);
        let v = match model {
            FitModel::LastValue => {
                // the ratio 0, 0.5 and 1 decade before the end
                let back = WINDOWS[0] - d;
                series[nearest_index(series, series[series.len() - 1].0 / T::lit(10f64.powf(back)))].1
            }
            FitModel::InverseLogFit => inverse_log(w)?,
            FitModel::PowerCorrectionFit => {
                let (c0, p) = power_correction(w)?;
                if k == 0 {
                    correction_power = Some(p);
                }
                c0
            }
            FitModel::AitkenAccel => aitken(series, d),
        };
        if !v.is_finite() {
            return Err(Error::DegenerateFit("non-finite estimate"));
        }
        values.push(v);
    }
    let (lo, hi) = values.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), &v| (a.min(v), b.max(v)));
    let tail = window(series, 1.0);
    let (tail_min, tail_max) = tail.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), p| (a.min(p.1), b.max(p.1)));
    Ok(LimitEstimate {
        value: values[0],
        model,
        uncertainty: (hi - lo) / T::lit(2.0),
        tail_min,
        tail_max,
        window_values: values,
        correction_power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(r0: f64, r1: f64, per_decade: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        let decades = (r1 / r0).log10();
        let m = (decades * per_decade as f64).round() as usize;
        (0..=m).map(|k| {
            let r = r0 * 10f64.powf(k as f64 / per_decade as f64);
            (r, f(r))
        })
        .collect()
    }

    #[test]
    fn constant_series_is_exact_for_every_model() {
        let s = geometric(1.0, 1e4, 8, |_| 0.75);
        for m in [FitModel::LastValue, FitModel::InverseLogFit, FitModel::PowerCorrectionFit, FitModel::AitkenAccel] {
            let e = estimate_limit(&s, m).unwrap();
            assert!((e.value - 0.75).abs() < 1e-14, "{m:?}");
            assert!(e.uncertainty < 1e-14, "{m:?}");
        }
    }

    #[test]
    fn inverse_log_model_recovers_the_limit() {
        let s = geometric(1e2, 1e6, 8, |r| 1.0 + 3.0 / r.ln());
        let e = estimate_limit(&s, FitModel::InverseLogFit).unwrap();
        assert!((e.value - 1.0).abs() < 1e-6);
        assert!(e.uncertainty < 1e-6);
        assert!(e.tail_min <= e.tail_max);
    }

    #[test]
    fn power_correction_recovers_the_limit() {
        let s = geometric(1.0, 1e4, 16, |r| 2.0 + 5.0 / r);
        let e = estimate_limit(&s, FitModel::PowerCorrectionFit).unwrap();
        assert!((e.value - 2.0).abs() < 1e-9);
        assert!((e.correction_power.unwrap() - 1.0).abs() < 1e-6);
        let s = geometric(1.0, 1e3, 16, |r| 2.0 - 7.0 / (r * r));
        let e = estimate_limit(&s, FitModel::PowerCorrectionFit).unwrap();
        assert!((e.value - 2.0).abs() < 1e-9);
        assert!((e.correction_power.unwrap() - 2.0).abs() < 1e-6);
        let s = geometric(1.0, 1e4, 16, |r| 1.0 + 0.3 * r.powf(-1.164));
        let e = estimate_limit(&s, FitModel::PowerCorrectionFit).unwrap();
        assert!((e.value - 1.0).abs() < 1e-9);
        assert!((e.correction_power.unwrap() - 1.164).abs() < 1e-6);
    }

    #[test]
    fn aitken_accelerates_geometric_convergence() {
        // r^{-1/2} on a log grid is a geometric sequence: Aitken is exact
        let s = geometric(1.0, 1e4, 8, |r| 3.0 + r.powf(-0.5));
        let e = estimate_limit(&s, FitModel::AitkenAccel).unwrap();
        assert!((e.value - 3.0).abs() < 1e-9);
        let last = estimate_limit(&s, FitModel::LastValue).unwrap();
        assert!((last.value - 3.0).abs() > 1e-3);
    }

    #[test]
    fn insufficient_data_is_refused() {
        let short = geometric(1.0, 10.0, 32, |_| 1.0);
        assert!(matches!(estimate_limit(&short, FitModel::LastValue), Err(Error::InsufficientPoints { .. })));
        let sparse = geometric(1.0, 1e4, 1, |_| 1.0);
        assert!(matches!(estimate_limit(&sparse, FitModel::LastValue), Err(Error::InsufficientPoints { .. })));
    }

    #[test]
    fn model_names_round_trip() {
        for m in [FitModel::LastValue, FitModel::InverseLogFit, FitModel::PowerCorrectionFit, FitModel::AitkenAccel] {
            assert_eq!(FitModel::parse(m.name()), Some(m));
        }
        assert_eq!(FitModel::parse("spline"), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn uncertainty_is_non_negative_and_value_finite(
                c in -5.0f64..5.0, a in -10.0f64..10.0, b in -10.0f64..10.0
            ) {
                let s = geometric(10.0, 1e5, 8, |r| c + a / r.ln() + b / r);
                for m in [FitModel::LastValue, FitModel::InverseLogFit, FitModel::PowerCorrectionFit, FitModel::AitkenAccel] {
                    let e = estimate_limit(&s, m).unwrap();
                    prop_assert!(e.uncertainty >= 0.0);
                    prop_assert!(e.value.is_finite());
                }
            }

            #[test]
            fn matching_models_recover_synthetic_limits(c in -5.0f64..5.0, a in -10.0f64..10.0) {
                let s = geometric(10.0, 1e6, 8, |r| c + a / r.ln());
                let e = estimate_limit(&s, FitModel::InverseLogFit).unwrap();
                prop_assert!((e.value - c).abs() <= 1e-6 * c.abs().max(1.0));
                let s = geometric(1.0, 1e4, 8, |r| c + a / (r * r));
                let e = estimate_limit(&s, FitModel::PowerCorrectionFit).unwrap();
                prop_assert!((e.value - c).abs() <= 1e-6 * c.abs().max(1.0));
            }
        }
    }
}
