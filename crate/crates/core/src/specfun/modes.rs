//! Spherical averages of `e^{x_1}` and `cos(x_1)`: the two origin-smooth
//! radial solutions of `Δ²u = u` normalized by `(u(0), Δu(0)) = (1, ±1)`.

use super::bessel::{alternating_sum, bessel_i_asymptotic, crossover_radius, positive_series_ln, ALTERNATING_SERIES_MAX_R};
use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::EvenSeries;

fn half_dim<T: Real>(n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::Dimension(n));
    }
    Ok(T::from_usize_lossy(n) / T::lit(2.0))
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::Domain { what: "mode radius", value: r.as_f64() });
    }
    Ok(())
}

/// `ln u_1(r)`, finite for every `r >= 0`.
pub fn exp_mode_u1_ln<T: Real>(n: usize, r: T) -> Result<T> {
    let h = half_dim::<T>(n)?;
    check_radius(r)?;
    if r == T::zero() {
        return Ok(T::zero());
    }
    let nu = h - T::one();
    // The positive series has no cancellation; running it past the Bessel
    // crossover keeps the mode smooth to rounding on the usual test ranges.
    if r < T::lit(2.0) * crossover_radius(nu) {
        let q = r * r / T::lit(4.0);
        let (ln_sum, _) = positive_series_ln(|l| {
            let l1 = T::from_usize_lossy(l + 1);
            q / (l1 * (l1 + nu))
        });
        return Ok(ln_sum);
    }
    // Γ(n/2) (r/2)^{1-n/2} I_{n/2-1}(r)
    let scaled_i = bessel_i_asymptotic(nu, r, true)?.value;
    Ok(ln_gamma(h)? - nu * (r / T::lit(2.0)).ln() + scaled_i.ln() + r)
}

/// `u_1(r) = Γ(n/2) (r/2)^{1-n/2} I_{n/2-1}(r)`; with `scaled` the value
/// `e^{-r} u_1(r)` is returned instead.
pub fn exp_mode_u1<T: Real>(n: usize, r: T, scaled: bool) -> Result<T> {
    let ln_u = exp_mode_u1_ln(n, r)?;
    if scaled {
        return Ok((ln_u - r).exp());
    }
    if r > T::exp_arg_limit() {
        return Err(Error::Overflow { what: "exp_mode_u1", r: r.as_f64() });
    }
    Ok(ln_u.exp())
}

/// `u_2(r) = sum_l (-1)^l Γ(n/2) / (l! Γ(l+n/2)) (r/2)^{2l}`.
pub fn osc_mode_u2<T: Real>(n: usize, r: T) -> Result<T> {
    let h = half_dim::<T>(n)?;
    check_radius(r)?;
    if r > T::lit(ALTERNATING_SERIES_MAX_R) {
        return Err(Error::Precision { what: "osc_mode_u2", r: r.as_f64() });
    }
    let q = r * r / T::lit(4.0);
    Ok(alternating_sum(|l| {
        let l1 = T::from_usize_lossy(l + 1);
        q / (l1 * (l1 + h - T::one()))
    }))
}

fn mode_coeffs<T: Real>(n: usize, order: usize, sign: T) -> Result<EvenSeries<T>> {
    let h = half_dim::<T>(n)?;
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut c = T::one();
    for l in 0..=order {
        coeffs.push(c);
        let l1 = T::from_usize_lossy(l + 1);
        c = c * sign / (T::lit(4.0) * l1 * (l1 + h - T::one()));
    }
    Ok(EvenSeries::new(coeffs))
}

/// Taylor coefficients of `u_1` in powers of `r^2`.
pub fn exp_mode_coeffs<T: Real>(n: usize, order: usize) -> Result<EvenSeries<T>> {
    mode_coeffs(n, order, T::one())
}

/// Taylor coefficients of `u_2` in powers of `r^2`.
pub fn osc_mode_coeffs<T: Real>(n: usize, order: usize) -> Result<EvenSeries<T>> {
    mode_coeffs(n, order, -T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn worked_examples() {
        assert!(rel(exp_mode_u1(3, 2.0, false).unwrap(), 2f64.sinh() / 2.0) < 1e-12);
        for n in 1..=8 {
            assert_eq!(exp_mode_u1(n, 0.0, false).unwrap(), 1.0);
            assert_eq!(osc_mode_u2(n, 0.0).unwrap(), 1.0);
        }
        assert!(rel(exp_mode_u1(1, 3.0, false).unwrap(), 3f64.cosh()) < 1e-12);
        assert!(osc_mode_u2(3, PI).unwrap().abs() < 1e-14);
        for &r in &[0.3f64, 1.0, 5.0, 12.0, 30.0] {
            assert!((osc_mode_u2(1, r).unwrap() - r.cos()).abs() < 1e-12 * r.cosh().max(1.0), "r = {r}");
            assert!((osc_mode_u2(3, r).unwrap() - r.sin() / r).abs() < 1e-12 * r.cosh().max(1.0), "r = {r}");
        }
    }

    #[test]
    fn three_dimensional_mode_on_contract_range() {
        let mut r = 0.01f64;
        while r <= 50.0 {
            let exact = r.sinh() / r;
            assert!(rel(exp_mode_u1(3, r, false).unwrap(), exact) <= 1e-10, "r = {r}");
            r *= 1.07;
        }
        // scaled form far past overflow: e^{-r} sinh(r)/r -> 1/(2r)
        let r = 5000.0f64;
        assert!(rel(exp_mode_u1(3, r, true).unwrap(), 0.5 / r) < 1e-12);
        assert!(matches!(exp_mode_u1(3, 800.0, false), Err(Error::Overflow { .. })));
    }

    #[test]
    fn one_dimensional_branches_agree() {
        for &r in &[19.0f64, 20.5, 40.0, 200.0] {
            let want = r - 2f64.ln() + (-2.0 * r).exp().ln_1p();
            assert!((exp_mode_u1_ln(1, r).unwrap() - want).abs() < 1e-12 * want, "r = {r}");
        }
    }

    #[test]
    fn second_order_coefficients_encode_origin_data() {
        for n in 1..=10usize {
            let e = exp_mode_coeffs::<f64>(n, 4).unwrap();
            let o = osc_mode_coeffs::<f64>(n, 4).unwrap();
            assert_eq!(e.coeffs[0], 1.0);
            assert_eq!(o.coeffs[0], 1.0);
            assert!((e.coeffs[1] - 1.0 / (2.0 * n as f64)).abs() < 1e-16);
            assert!((o.coeffs[1] + 1.0 / (2.0 * n as f64)).abs() < 1e-16);
            // Δu(0) = 2n c_1
            assert!((2.0 * n as f64 * e.coeffs[1] - 1.0).abs() < 1e-15);
            assert!((2.0 * n as f64 * o.coeffs[1] + 1.0).abs() < 1e-15);
        }
    }

    // Radial Laplacian by central differences: f'' + (n-1)/r f'.
    fn fd_laplacian(f: &dyn Fn(f64) -> f64, n: usize, r: f64, h: f64) -> f64 {
        let d1 = (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h);
        let d2 = (-f(r - 2.0 * h) + 16.0 * f(r - h) - 30.0 * f(r) + 16.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h * h);
        d2 + (n as f64 - 1.0) * d1 / r
    }

    #[test]
    fn exponential_mode_satisfies_the_equation() {
        for n in [2usize, 3, 5] {
            let u = |r: f64| exp_mode_u1(n, r, false).unwrap();
            let lap = |r: f64| fd_laplacian(&u, n, r, 0.05);
            let mut r = 1.0;
            while r <= 20.0 {
                let bilap = fd_laplacian(&lap, n, r, 0.05);
                let ur = u(r);
                assert!((bilap - ur).abs() <= 1e-6 * ur, "n = {n} r = {r}: {bilap} vs {ur}");
                r += 0.5;
            }
        }
    }

    #[test]
    fn oscillating_mode_limits() {
        assert!(matches!(osc_mode_u2(3, 61.0), Err(Error::Precision { .. })));
        assert!(osc_mode_u2(2, -1.0).is_err());
        assert!(exp_mode_u1::<f64>(0, 1.0, false).is_err());
    }
}
