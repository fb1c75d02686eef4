use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair `(n, alpha)` of `Δ²u = u^alpha` in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem<T> {
    pub n: usize,
    pub alpha: T,
}

impl<T: Copy> Problem<T> {
    pub fn new(n: usize, alpha: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension(n));
        }
        Ok(Self { n, alpha })
    }
}

/// Data at the origin selecting a smooth radial solution: `u(0)` and `Δu(0)`.
/// `u'(0) = (Δu)'(0) = 0` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginData<T> {
    pub u0: T,
    pub lap0: T,
}

impl<T: crate::Field + Copy> OriginData<T> {
    pub fn new(u0: T, lap0: T) -> Result<Self> {
        if !u0.is_positive() {
            return Err(Error::NonPositiveOrigin(u0.magnitude() * if u0 == T::zero() { 0.0 } else { -1.0 }));
        }
        Ok(Self { u0, lap0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Problem::new(0, 1.0), Err(Error::Dimension(0)));
        assert!(matches!(OriginData::new(0.0, 1.0), Err(Error::NonPositiveOrigin(_))));
        assert!(matches!(OriginData::new(-2.0, 1.0), Err(Error::NonPositiveOrigin(v)) if v == -2.0));
        assert!(OriginData::new(1e-300, -5.0).is_ok());
    }
}
