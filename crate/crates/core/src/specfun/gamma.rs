use crate::error::{Error, Result};
use crate::scalar::Real;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(z: T) -> T {
    // z is the argument shifted down by one.
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (z + T::from_usize_lossy(k));
    }
    acc
}

/// Gamma function for `x > 0`.
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain { what: "gamma", value: x.as_f64() });
    }
    if x < T::lit(0.5) {
        // reflection keeps the Lanczos sum in its accurate range
        let pi = T::PI();
        let g1mx = gamma_fn(T::one() - x)?;
        return Ok(pi / ((pi * x).sin() * g1mx));
    }
    let z = x - T::one();
    let t = z + T::lit(LANCZOS_G + 0.5);
    let sqrt_2pi = (T::lit(2.0) * T::PI()).sqrt();
    Ok(sqrt_2pi * t.powf(z + T::lit(0.5)) * (-t).exp() * lanczos_sum(z))
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain { what: "ln_gamma", value: x.as_f64() });
    }
    if x < T::lit(0.5) {
        let pi = T::PI();
        return Ok(pi.ln() - (pi * x).sin().ln() - ln_gamma(T::one() - x)?);
    }
    let z = x - T::one();
    let t = z + T::lit(LANCZOS_G + 0.5);
    let half_ln_2pi = T::lit(0.5) * (T::lit(2.0) * T::PI()).ln();
    Ok(half_ln_2pi + (z + T::lit(0.5)) * t.ln() - t + lanczos_sum(z).ln())
}
