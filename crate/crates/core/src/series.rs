//! Power-series startup at the origin.
//!
//! A smooth radial function is even in `r`, so it is stored as a series in
//! `x = r^2`. The radial Laplacian acts on monomials by
//! `Δ(r^{2j+2}) = (2j+2)(2j+n) r^{2j}`, which turns `Δ²u = u^α` into a
//! two-step recursion between the coefficients of `u`, of `Δu` and of `u^α`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{OriginData, Problem};
use crate::scalar::{Field, Real};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 8;
/// Largest order accepted by [`taylor_coeffs`].
pub const MAX_ORDER: usize = 40;
/// Relative size of the last retained term at the handoff radius.
pub const HANDOFF_TOLERANCE: f64 = 1e-14;
/// Upper bound on the handoff radius for O(1) data.
pub const HANDOFF_CAP: f64 = 1e-2;

/// Truncated series `sum_j c_j r^{2j}`, `j = 0..=order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenSeries<T> {
    pub coeffs: Vec<T>,
}

impl<T: Field> EvenSeries<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Series of the radial Laplacian, one order shorter.
    pub fn laplacian(&self, n: usize) -> EvenSeries<T> {
        let coeffs = (0..self.order())
            .map(|j| self.coeffs[j + 1].clone() * lift_factor::<T>(j, n))
            .collect();
        EvenSeries { coeffs }
    }

    /// Inverse of [`laplacian`](Self::laplacian) with a prescribed constant
    /// term: returns `s` with `Δs = self` and `s(0) = value_at_origin`.
    pub fn inverse_laplacian(&self, n: usize, value_at_origin: T) -> EvenSeries<T> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(value_at_origin);
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / lift_factor::<T>(j, n));
        }
        EvenSeries { coeffs }
    }

    pub fn truncated(&self, order: usize) -> EvenSeries<T> {
        EvenSeries { coeffs: self.coeffs.iter().take(order + 1).cloned().collect() }
    }
}

/// `(2j+2)(2j+n)`: the factor relating `r^{2j+2}` to its Laplacian.
fn lift_factor<T: Field>(j: usize, n: usize) -> T {
    T::from_usize((2 * j + 2) * (2 * j + n)).expect("small integer")
}

/// Largest integer exponent for which [`series_pow`] returns the full
/// polynomial instead of truncating at the input order.
pub const EXACT_POWER_MAX: usize = 8;

/// Truncated series of `s^alpha` by the logarithmic-derivative recurrence
/// `k a_0 b_k = sum_{j=1..k} ((alpha+1) j - k) a_j b_{k-j}`.
///
/// For `alpha` in `0..=EXACT_POWER_MAX` the polynomial power is complete:
/// its length is `(len - 1) * alpha + 1` when that exceeds the input length.
pub fn series_pow<T: Field>(s: &EvenSeries<T>, alpha: &T) -> Result<EvenSeries<T>> {
    let mut len = s.coeffs.len();
    if let Some(k) = (0..=EXACT_POWER_MAX).find(|&k| T::from_usize(k).as_ref() == Some(alpha)) {
        len = len.max(len.saturating_sub(1) * k + 1);
    }
    series_pow_truncated(s, alpha, len)
}

/// First `len` coefficients of `s^alpha`.
pub(crate) fn series_pow_truncated<T: Field>(s: &EvenSeries<T>, alpha: &T, len: usize) -> Result<EvenSeries<T>> {
    let a = &s.coeffs;
    let Some(a0) = a.first() else {
        return Ok(EvenSeries { coeffs: Vec::new() });
    };
    if !a0.is_positive() {
        return Err(Error::NonPositiveOrigin(-a0.magnitude()));
    }
    let b0 = a0.leading_pow(alpha).ok_or(Error::SeriesPower)?;
    let a_at = |j: usize| a.get(j).cloned().unwrap_or_else(T::zero);
    let mut b = Vec::with_capacity(len);
    b.push(b0);
    let alpha1 = alpha.clone() + T::one();
    for k in 1..len {
        let kk = T::from_usize(k).expect("small integer");
        let mut acc = T::zero();
        for j in 1..=k {
            let jj = T::from_usize(j).expect("small integer");
            let w = alpha1.clone() * jj - kk.clone();
            acc = acc + w * a_at(j) * b[k - j].clone();
        }
        b.push(acc / (kk * a0.clone()));
    }
    Ok(EvenSeries { coeffs: b })
}

/// Series of `u` and of `Δu` at the origin for a given problem and data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginSeries<T> {
    pub n: usize,
    pub alpha: T,
    /// Coefficients of `u`, orders `0..=K`.
    pub u: EvenSeries<T>,
    /// Coefficients of `Δu`, orders `0..=K`.
    pub lap: EvenSeries<T>,
}

/// Taylor coefficients of the smooth radial solution through order `K`
/// (powers up to `r^{2K}`) for both `u` and `Δu`.
pub fn taylor_coeffs<T: Field>(
    problem: &Problem<T>,
    origin: &OriginData<T>,
    order: usize,
) -> Result<OriginSeries<T>> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(Error::SeriesOrder { order, max: MAX_ORDER });
    }
    if !origin.u0.is_positive() {
        return Err(Error::NonPositiveOrigin(-origin.u0.magnitude()));
    }
    let n = problem.n;
    let mut c = vec![origin.u0.clone()];
    let mut d = vec![origin.lap0.clone()];
    // c_{j+1} = d_j / f_j, d_{j+1} = p_j / f_j with p = series of u^alpha;
    // p_j only needs c_0..c_j, so one new power coefficient per round.
    for j in 0..order {
        c.push(d[j].clone() / lift_factor::<T>(j, n));
        let p = series_pow_truncated(&EvenSeries::new(c[..=j].to_vec()), &problem.alpha, j + 1)?;
        d.push(p.coeffs[j].clone() / lift_factor::<T>(j, n));
    }
    Ok(OriginSeries { n, alpha: problem.alpha.clone(), u: EvenSeries::new(c), lap: EvenSeries::new(d) })
}

/// Sampled state of a radial solution: `(r, u, u', Δu, (Δu)')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateVector<T> {
    pub r: T,
    pub u: T,
    pub du: T,
    pub v: T,
    pub dv: T,
}

impl<T: Real> StateVector<T> {
    pub fn from_array(r: T, y: [T; 4]) -> Self {
        Self { r, u: y[0], du: y[1], v: y[2], dv: y[3] }
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.u, self.du, self.v, self.dv]
    }

    /// `u''` recovered from the Laplacian; at the origin `u''(0) = Δu(0)/n`.
    pub fn d2u(&self, n: usize) -> T {
        let nf = T::from_usize_lossy(n);
        if self.r == T::zero() {
            self.v / nf
        } else {
            self.v - (nf - T::one()) * self.du / self.r
        }
    }
}

/// Value and first derivative of `sum_j c_j r^{2j}`.
fn eval_even<T: Real>(coeffs: &[T], r: T) -> (T, T) {
    let x = r * r;
    let mut value = T::zero();
    let mut slope = T::zero();
    for (j, &c) in coeffs.iter().enumerate().rev() {
        value = value * x + c;
        if j > 0 {
            slope = slope * x + T::from_usize_lossy(2 * j) * c;
        }
    }
    // slope accumulated sum_{j>=1} 2j c_j x^{j-1}; multiply by r
    (value, slope * r)
}

impl<T: Real> OriginSeries<T> {
    /// Radius where the last retained term of either series drops below
    /// [`HANDOFF_TOLERANCE`] relative to the leading scale, capped at
    /// [`HANDOFF_CAP`].
    pub fn handoff_radius(&self) -> T {
        let tol = T::lit(HANDOFF_TOLERANCE);
        let mut radius = T::lit(HANDOFF_CAP);
        for series in [&self.u, &self.lap] {
            let scale = series
                .coeffs
                .iter()
                .take(2)
                .fold(T::zero(), |m, c| m.max(c.abs()))
                .max(self.u.coeffs[0].abs());
            let k = series.order();
            for (j, c) in series.coeffs.iter().enumerate().skip(1) {
                // bound every term of order >= K-1 so a vanishing last coefficient
                // does not hide the size of its neighbour
                if j + 1 < k || c.abs() == T::zero() {
                    continue;
                }
                let r = (tol * scale / c.abs()).powf(T::one() / T::from_usize_lossy(2 * j));
                radius = radius.min(r);
            }
        }
        radius
    }

    /// Termwise evaluation of `(r, u, u', Δu, (Δu)')`.
    pub fn eval_state(&self, r: T) -> Result<StateVector<T>> {
        let radius = self.handoff_radius();
        if !(r >= T::zero()) || r > radius * T::lit(1.000_000_1) {
            return Err(Error::BeyondSeriesRadius { r: r.as_f64(), radius: radius.as_f64() });
        }
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: T) -> StateVector<T> {
        let (u, du) = eval_even(&self.u.coeffs, r);
        let (v, dv) = eval_even(&self.lap.coeffs, r);
        StateVector { r, u, du, v, dv }
    }

    /// `∫_0^r t^w u(t)^p dt` from the series of `u^p`, for `w` in `{0, 1}`.
    pub fn integral_of_power(&self, p: T, w: usize, r: T) -> Result<T> {
        let powered = series_pow(&self.u, &p)?;
        let mut acc = T::zero();
        for (j, &c) in powered.coeffs.iter().enumerate() {
            let e = 2 * j + w + 1;
            acc = acc + c * r.powi(e as i32) / T::from_usize_lossy(e);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i128>;

    fn q(a: i128, b: i128) -> Q {
        Ratio::new(a, b)
    }

    #[test]
    fn quartic_for_constant_forcing() {
        let s = taylor_coeffs(&Problem { n: 3, alpha: q(0, 1) }, &OriginData { u0: q(1, 1), lap0: q(0, 1) }, 3)
            .unwrap();
        assert_eq!(s.u.coeffs, vec![q(1, 1), q(0, 1), q(1, 120), q(0, 1)]);
    }

    #[test]
    fn linear_case_matches_exponential_mode_series() {
        for n in 1..=6i128 {
            let s = taylor_coeffs(
                &Problem { n: n as usize, alpha: q(1, 1) },
                &OriginData { u0: q(1, 1), lap0: q(1, 1) },
                2,
            )
            .unwrap();
            assert_eq!(s.u.coeffs, vec![q(1, 1), q(1, 2 * n), q(1, 8 * n * (n + 2))]);
        }
    }

    #[test]
    fn one_dimensional_linear_case_is_cosh() {
        let s = taylor_coeffs(&Problem { n: 1, alpha: q(1, 1) }, &OriginData { u0: q(1, 1), lap0: q(1, 1) }, 4)
            .unwrap();
        assert_eq!(s.u.coeffs, vec![q(1, 1), q(1, 2), q(1, 24), q(1, 720), q(1, 40320)]);
    }

    #[test]
    fn power_examples() {
        let sq = series_pow(&EvenSeries::new(vec![q(1, 1), q(1, 1)]), &q(2, 1)).unwrap();
        assert_eq!(sq.coeffs, vec![q(1, 1), q(2, 1), q(1, 1)]);
        let zero = series_pow(&EvenSeries::new(vec![q(1, 1), q(0, 1), q(0, 1)]), &q(0, 1)).unwrap();
        assert_eq!(zero.coeffs, vec![q(1, 1), q(0, 1), q(0, 1)]);
        let inv = series_pow(&EvenSeries::new(vec![q(1, 1), q(1, 1), q(0, 1)]), &q(-1, 1)).unwrap();
        assert_eq!(inv.coeffs, vec![q(1, 1), q(-1, 1), q(1, 1)]);
        // square root needs irrational leading powers in general, but not for a perfect square
        let half = series_pow(&EvenSeries::new(vec![4.0f64, 4.0, 1.0, 0.0]), &0.5).unwrap();
        assert!(half.coeffs.iter().zip([2.0, 1.0, 0.0, 0.0]).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn recursion_is_exact_in_rational_arithmetic() {
        // Applying the Laplacian twice reproduces the series of u^alpha up to
        // order K-2, with no rounding at all.
        for (n, alpha) in [(1usize, q(-2, 1)), (2, q(3, 1)), (3, q(-1, 1)), (5, q(1, 1)), (4, q(0, 1))] {
            let s = taylor_coeffs(&Problem { n, alpha }, &OriginData { u0: q(3, 2), lap0: q(-1, 3) }, 7).unwrap();
            let lap = s.u.laplacian(n);
            assert_eq!(lap.coeffs[..], s.lap.coeffs[..lap.coeffs.len()]);
            let bilap = lap.laplacian(n);
            let power = series_pow_truncated(&s.u, &alpha, 8).unwrap();
            assert_eq!(bilap.coeffs[..], power.coeffs[..bilap.coeffs.len()]);
            assert_eq!(bilap.order(), 5);
        }
    }

    #[test]
    fn rejects_bad_orders_and_data() {
        let p = Problem { n: 3, alpha: 0.5 };
        let o = OriginData { u0: 1.0, lap0: 0.0 };
        assert!(matches!(taylor_coeffs(&p, &o, 1), Err(Error::SeriesOrder { .. })));
        assert!(matches!(taylor_coeffs(&p, &o, MAX_ORDER + 1), Err(Error::SeriesOrder { .. })));
        assert!(matches!(taylor_coeffs(&p, &OriginData { u0: -1.0, lap0: 0.0 }, 8), Err(Error::NonPositiveOrigin(_))));
        // rational with a fractional exponent cannot form the leading power
        let pq = Problem { n: 3, alpha: q(1, 2) };
        let oq = OriginData { u0: q(2, 1), lap0: q(0, 1) };
        assert_eq!(taylor_coeffs(&pq, &oq, 4), Err(Error::SeriesPower));
    }

    #[test]
    fn state_evaluation_examples() {
        let s = taylor_coeffs(&Problem { n: 3, alpha: 0.0f64 }, &OriginData { u0: 1.0, lap0: 0.0 }, 8).unwrap();
        let st = s.eval_unchecked(1.0);
        assert!((st.u - (1.0 + 1.0 / 120.0)).abs() < 1e-15);
        assert!((st.du - 4.0 / 120.0).abs() < 1e-15);
        assert!((st.v - 1.0 / 6.0).abs() < 1e-15);
        assert!((st.dv - 1.0 / 3.0).abs() < 1e-15);

        let st0 = s.eval_state(0.0).unwrap();
        assert_eq!((st0.r, st0.u, st0.du, st0.dv), (0.0, 1.0, 0.0, 0.0));
        assert_eq!(st0.v, 2.0 * 3.0 * s.u.coeffs[1]);

        let lin = taylor_coeffs(&Problem { n: 3, alpha: 1.0 }, &OriginData { u0: 1.0, lap0: 1.0 }, 8).unwrap();
        let st = lin.eval_unchecked(0.5);
        assert!((st.u - 0.5f64.sinh() / 0.5).abs() < 1e-12);
    }

    #[test]
    fn evaluation_outside_radius_is_refused() {
        let s = taylor_coeffs(&Problem { n: 2, alpha: -1.0 }, &OriginData { u0: 1.0, lap0: 0.3 }, 8).unwrap();
        let rh = s.handoff_radius();
        assert!(matches!(s.eval_state(2.0 * rh), Err(Error::BeyondSeriesRadius { .. })));
        assert!(s.eval_state(rh).is_ok());
    }

    #[test]
    fn handoff_radius_is_converged() {
        for (n, alpha, u0, lap0) in [(1, -2.0f64, 1.0, 0.0), (2, 0.5, 0.2, 3.0), (3, -1.0, 1.0, -0.5), (5, 1.0, 2.0, 2.0)] {
            let p = Problem { n, alpha };
            let o = OriginData { u0, lap0 };
            let s = taylor_coeffs(&p, &o, 8).unwrap();
            let longer = taylor_coeffs(&p, &o, 10).unwrap();
            let rh = s.handoff_radius();
            let a = s.eval_unchecked(rh);
            let b = longer.eval_unchecked(rh);
            assert!((a.u - b.u).abs() <= 1e-12 * b.u.abs(), "n={n} alpha={alpha}");
            assert!((a.v - b.v).abs() <= 1e-12 * b.v.abs().max(b.u.abs()), "n={n} alpha={alpha}");
        }
    }

    #[test]
    fn integral_of_power_against_closed_form() {
        // u = 1 + r^4/120 (n = 3, alpha = 0): ∫_0^r t u dt = r^2/2 + r^6/720
        let s = taylor_coeffs(&Problem { n: 3, alpha: 0.0 }, &OriginData { u0: 1.0, lap0: 0.0 }, 8).unwrap();
        let got = s.integral_of_power(1.0, 1, 0.01).unwrap();
        let want = 0.01f64.powi(2) / 2.0 + 0.01f64.powi(6) / 720.0;
        assert!((got - want).abs() < 1e-20);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pow_then_inverse_pow_round_trips(
                c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, c3 in -2.0f64..2.0, alpha in -3.0f64..3.0
            ) {
                let s = EvenSeries::new(vec![1.0, c1, c2, c3]);
                let p = series_pow(&s, &alpha).unwrap();
                let back = series_pow(&p, &(1.0 / alpha)).unwrap();
                for (a, b) in s.coeffs.iter().zip(&back.coeffs) {
                    prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
                }
            }

            #[test]
            fn pow_is_multiplicative_in_exponent(
                c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, a in -2.0f64..2.0, b in -2.0f64..2.0
            ) {
                let s = EvenSeries::new(vec![2.0, c1, c2, 0.5]);
                let lhs = series_pow(&series_pow(&s, &a).unwrap(), &b).unwrap();
                let rhs = series_pow(&s, &(a * b)).unwrap();
                for (x, y) in lhs.coeffs.iter().zip(&rhs.coeffs) {
                    prop_assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()));
                }
            }
        }
    }
}
