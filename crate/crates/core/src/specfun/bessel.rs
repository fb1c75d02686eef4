use serde::Serialize;

use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of correction terms kept in the large-argument expansion.
pub const ASYMPTOTIC_TERMS: usize = 8;

/// Largest argument accepted by the alternating (J-type) series.
pub const ALTERNATING_SERIES_MAX_R: f64 = 60.0;

const MAX_SERIES_TERMS: usize = 20_000;

/// Result of a modified Bessel evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BesselEval<T> {
    pub value: T,
    /// `value` holds `e^{-r} I_nu(r)` rather than `I_nu(r)`.
    pub log_scaled: bool,
    /// Series terms, or asymptotic terms, that were summed.
    pub series_terms_used: usize,
}

/// Radius where evaluation switches from the power series to the
/// large-argument expansion.
pub fn crossover_radius<T: Real>(nu: T) -> T {
    T::lit(20.0).max(T::lit(2.0) * nu * nu)
}

/// Sums `1 + t_1 + t_2 + ...` with `t_{l+1} = t_l * step(l)`, all terms
/// positive, returning `(ln(sum), terms)`. The running sum is rescaled so
/// it cannot overflow for any argument.
pub(crate) fn positive_series_ln<T: Real>(mut step: impl FnMut(usize) -> T) -> (T, usize) {
    let big = T::max_value().powf(T::lit(0.25));
    let mut sum = T::one();
    let mut term = T::one();
    let mut ln_shift = T::zero();
    let mut used = 1;
    for l in 0..MAX_SERIES_TERMS {
        term = term * step(l);
        sum = sum + term;
        used += 1;
        if sum > big {
            sum = sum / big;
            term = term / big;
            ln_shift = ln_shift + big.ln();
        }
        if term <= T::epsilon() * T::lit(0.25) * sum {
            break;
        }
    }
    (sum.ln() + ln_shift, used)
}

fn check_args<T: Real>(nu: T, r: T) -> Result<()> {
    if !(nu > -T::one()) || !nu.is_finite() {
        return Err(Error::Domain { what: "bessel order", value: nu.as_f64() });
    }
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::Domain { what: "bessel argument", value: r.as_f64() });
    }
    Ok(())
}

/// Power series `sum_l (r/2)^{2l+nu} / (l! Γ(l+nu+1))`, valid for all `r`
/// but used below the crossover radius.
pub fn bessel_i_series<T: Real>(nu: T, r: T, scaled: bool) -> Result<BesselEval<T>> {
    check_args(nu, r)?;
    if r == T::zero() {
        let value = if nu == T::zero() {
            T::one()
        } else if nu > T::zero() {
            T::zero()
        } else {
            return Err(Error::Domain { what: "bessel order at r = 0", value: nu.as_f64() });
        };
        return Ok(BesselEval { value, log_scaled: scaled, series_terms_used: 1 });
    }
    let q = r * r / T::lit(4.0);
    let (ln_sum, used) = positive_series_ln(|l| {
        let l1 = T::from_usize_lossy(l + 1);
        q / (l1 * (l1 + nu))
    });
    let mut ln_value = nu * (r / T::lit(2.0)).ln() - ln_gamma(nu + T::one())? + ln_sum;
    if scaled {
        ln_value = ln_value - r;
    } else if ln_value > T::exp_arg_limit() {
        return Err(Error::Overflow { what: "bessel_i", r: r.as_f64() });
    }
    Ok(BesselEval { value: ln_value.exp(), log_scaled: scaled, series_terms_used: used })
}

/// Large-argument expansion `e^r / sqrt(2 pi r) (1 + sum_k c_k(nu) / r^k)`,
/// truncated at [`ASYMPTOTIC_TERMS`] corrections or where terms start to grow.
pub fn bessel_i_asymptotic<T: Real>(nu: T, r: T, scaled: bool) -> Result<BesselEval<T>> {
    check_args(nu, r)?;
    if r <= T::zero() {
        return Err(Error::Domain { what: "bessel asymptotic argument", value: r.as_f64() });
    }
    let mu = T::lit(4.0) * nu * nu;
    let mut sum = T::one();
    let mut term = T::one();
    let mut used = 1;
    for k in 1..=ASYMPTOTIC_TERMS {
        let odd = T::from_usize_lossy(2 * k - 1);
        let next = -term * (mu - odd * odd) / (T::from_usize_lossy(k) * T::lit(8.0) * r);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        used += 1;
        if term == T::zero() {
            break;
        }
    }
    let prefactor = (T::lit(2.0) * T::PI() * r).sqrt().recip();
    let value = if scaled {
        prefactor * sum
    } else {
        if r > T::exp_arg_limit() {
            return Err(Error::Overflow { what: "bessel_i", r: r.as_f64() });
        }
        prefactor * sum * r.exp()
    };
    Ok(BesselEval { value, log_scaled: scaled, series_terms_used: used })
}

/// Modified Bessel function of the first kind, `I_nu(r)`, or `e^{-r} I_nu(r)`
/// when `scaled` is set. Orders `nu > -1` are accepted so that the `n = 1`
/// mode (`nu = -1/2`) can share this routine.
pub fn bessel_i<T: Real>(nu: T, r: T, scaled: bool) -> Result<BesselEval<T>> {
    check_args(nu, r)?;
    if !scaled && r > T::exp_arg_limit() {
        return Err(Error::Overflow { what: "bessel_i", r: r.as_f64() });
    }
    if r < crossover_radius(nu) {
        bessel_i_series(nu, r, scaled)
    } else {
        bessel_i_asymptotic(nu, r, scaled)
    }
}

/// Bessel function of the first kind by its alternating power series.
/// Accurate while `eps * I_nu(r)` stays small next to `|J_nu(r)|`; refused
/// beyond [`ALTERNATING_SERIES_MAX_R`].
pub fn bessel_j_series<T: Real>(nu: T, r: T) -> Result<T> {
    check_args(nu, r)?;
    if r > T::lit(ALTERNATING_SERIES_MAX_R) {
        return Err(Error::Precision { what: "bessel_j series", r: r.as_f64() });
    }
    if r == T::zero() {
        return Ok(if nu == T::zero() { T::one() } else { T::zero() });
    }
    let q = r * r / T::lit(4.0);
    let lead = (nu * (r / T::lit(2.0)).ln() - ln_gamma(nu + T::one())?).exp();
    Ok(lead * alternating_sum(|l| {
        let l1 = T::from_usize_lossy(l + 1);
        q / (l1 * (l1 + nu))
    }))
}

/// `1 - t_1 + t_2 - ...` with `t_{l+1} = t_l * step(l)`.
pub(crate) fn alternating_sum<T: Real>(mut step: impl FnMut(usize) -> T) -> T {
    let mut sum = T::one();
    let mut term = T::one();
    let mut abs_sum = T::one();
    for l in 0..MAX_SERIES_TERMS {
        term = -term * step(l);
        sum = sum + term;
        abs_sum = abs_sum + term.abs();
        if term.abs() <= T::epsilon() * T::lit(0.25) * abs_sum.min(T::one().max(sum.abs())) && l > 2 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Closed forms: I_{1/2}(r) = sqrt(2/(pi r)) sinh r, I_{-1/2}(r) = sqrt(2/(pi r)) cosh r,
    // I_{3/2}(r) = sqrt(2/(pi r)) (cosh r - sinh r / r).
    fn i_half(r: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * r)).sqrt() * r.sinh()
    }
    fn i_three_halves(r: f64) -> f64 {
        (2.0 / (std::f64::consts::PI * r)).sqrt() * (r.cosh() - r.sinh() / r)
    }

    #[test]
    fn worked_examples() {
        let v = bessel_i(0.5, 1.0, false).unwrap();
        assert!(!v.log_scaled);
        assert!(rel(v.value, (2.0 / std::f64::consts::PI).sqrt() * 1f64.sinh()) < 1e-14);
        assert!((v.value - 0.93768).abs() < 1e-5);

        assert_eq!(bessel_i(0.0, 0.0, false).unwrap().value, 1.0);

        let s = bessel_i(0.5, 40.0, true).unwrap();
        assert!(s.log_scaled);
        // e^{-40} sinh(40) = (1 - e^{-80}) / 2
        let want = (2.0 / (40.0 * std::f64::consts::PI)).sqrt() * 0.5 * (1.0 - (-80f64).exp());
        assert!(rel(s.value, want) < 1e-13);
        assert!((s.value - 0.063078).abs() < 1e-6);
    }

    #[test]
    fn half_integer_orders_on_contract_range() {
        let mut r = 0.05;
        while r <= 50.0 {
            let a = bessel_i(0.5, r, false).unwrap().value;
            assert!(rel(a, i_half(r)) < 1e-10, "nu=1/2 r={r}");
            let b = bessel_i(1.5, r, false).unwrap().value;
            assert!(rel(b, i_three_halves(r)) < 1e-10, "nu=3/2 r={r}");
            let c = bessel_i(-0.5, r, false).unwrap().value;
            let want = (2.0 / (std::f64::consts::PI * r)).sqrt() * r.cosh();
            assert!(rel(c, want) < 1e-10, "nu=-1/2 r={r}");
            r *= 1.17;
        }
    }

    #[test]
    fn integer_order_against_reference_values() {
        // I_0(1), I_1(1), I_0(10), I_0(30) (e^{-30}-scaled) from standard tables.
        assert!(rel(bessel_i(0.0, 1.0, false).unwrap().value, 1.266_065_877_752_008_4) < 1e-13);
        assert!(rel(bessel_i(1.0, 1.0, false).unwrap().value, 0.565_159_103_992_485) < 1e-13);
        assert!(rel(bessel_i(0.0, 10.0, false).unwrap().value, 2_815.716_628_466_254) < 1e-12);
        assert!(rel(bessel_i(0.0, 30.0, true).unwrap().value, 0.073_145_946_482_237_27) < 1e-10);
    }

    #[test]
    fn branches_agree_around_crossover() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0, 3.5] {
            let rc: f64 = crossover_radius(nu);
            for &r in &[0.9 * rc, rc, 1.1 * rc, 1.5 * rc] {
                let a = bessel_i_series(nu, r, true).unwrap().value;
                let b = bessel_i_asymptotic(nu, r, true).unwrap().value;
                assert!(rel(a, b) < 1e-9, "nu={nu} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scaled_is_mandatory_past_700() {
        assert!(matches!(bessel_i(0.0, 701.0, false), Err(Error::Overflow { .. })));
        let v = bessel_i(0.0, 5000.0, true).unwrap();
        assert!(v.value > 0.0 && v.value <= 1.0);
    }

    #[test]
    fn large_order_series_does_not_overflow_when_scaled() {
        // crossover 2 nu^2 = 1250 lies past the unscaled limit
        let v = bessel_i(25.0f64, 900.0, true).unwrap();
        let w = bessel_i_asymptotic(25.0f64, 900.0, true).unwrap();
        assert!(v.value.is_finite() && rel(v.value, w.value) < 1e-9);
    }

    #[test]
    fn j_series_small_arguments() {
        // J_{1/2}(r) = sqrt(2/(pi r)) sin r
        for &r in &[0.1, 1.0, 3.0, 10.0] {
            let want = (2.0 / (std::f64::consts::PI * r)).sqrt() * r.sin();
            let got = bessel_j_series(0.5, r).unwrap();
            assert!((got - want).abs() < 1e-12, "r={r}");
        }
        assert!(matches!(bessel_j_series(0.0, 61.0), Err(Error::Precision { .. })));
    }

    #[test]
    fn scaled_values_lie_in_unit_interval() {
        for &nu in &[0.0, 0.5, 2.0, 7.0] {
            for &r in &[0.0, 0.3, 5.0, 40.0, 900.0] {
                let v: f64 = bessel_i(nu, r, true).unwrap().value;
                assert!(v.is_finite() && v >= 0.0 && v <= 1.0, "nu={nu} r={r} v={v}");
            }
        }
    }
}
