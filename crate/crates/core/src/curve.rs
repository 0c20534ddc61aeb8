//! The curve families s = |y|^p and s = y|y|^{p−1}.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// A curve s = ψ(y) together with the power of |y| carried by the amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveFamily {
    p: f64,
    parity: Parity,
    weight_exponent: f64,
}

impl CurveFamily {
    /// Curve with the natural amplitude weight |y|^{(p−2)/6}.
    pub fn new(p: f64, parity: Parity) -> Result<Self> {
        Self::with_weight(p, parity, (p - 2.0) / 6.0)
    }

    pub fn even(p: f64) -> Result<Self> {
        Self::new(p, Parity::Even)
    }

    pub fn odd(p: f64) -> Result<Self> {
        Self::new(p, Parity::Odd)
    }

    pub fn with_weight(p: f64, parity: Parity, weight_exponent: f64) -> Result<Self> {
        check_exponent(p)?;
        if !weight_exponent.is_finite() {
            return domain(format!("weight exponent must be finite, got {weight_exponent}"));
        }
        Ok(Self { p, parity, weight_exponent })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Power of |y| carried by the curve measure; natural trials carry the
    /// same power again, so triple convolutions of them see twice this.
    pub fn weight_exponent(&self) -> f64 {
        self.weight_exponent
    }

    pub fn psi(&self, y: f64) -> f64 {
        let m = y.abs().powf(self.p);
        match self.parity {
            Parity::Even => m,
            Parity::Odd => m.copysign(y),
        }
    }

    pub fn dpsi(&self, y: f64) -> f64 {
        let m = self.p * y.abs().powf(self.p - 1.0);
        match self.parity {
            Parity::Even => m.copysign(y),
            Parity::Odd => m,
        }
    }

    /// Inverse of ψ on y ≥ 0.
    pub fn psi_inverse_positive(&self, s: f64) -> f64 {
        s.max(0.0).powf(1.0 / self.p)
    }

    pub fn threshold(&self) -> f64 {
        threshold(self.p, self.parity)
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return domain(format!("curve exponent must satisfy p > 1, got {p}"));
    }
    Ok(())
}

/// Concentration threshold: 2π/(√3 p(p−1)) for even curves and
/// 5π/(√3 p(p−1)) for odd ones.
pub fn threshold(p: f64, parity: Parity) -> f64 {
    let base = PI / (3f64.sqrt() * p * (p - 1.0));
    match parity {
        Parity::Even => 2.0 * base,
        Parity::Odd => 5.0 * base,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert!((threshold(2.0, Parity::Even) - PI / 3f64.sqrt()).abs() < 1e-15);
        assert!((threshold(3.0, Parity::Even) - 0.604_599_788_078_072_6).abs() < 1e-15);
        assert!((threshold(3.0, Parity::Odd) - 5.0 * PI / (6.0 * 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn rejects_flat_curve() {
        assert!(CurveFamily::even(1.0).is_err());
        assert!(CurveFamily::even(0.5).is_err());
        assert!(CurveFamily::even(f64::NAN).is_err());
    }

    #[test]
    fn odd_curve_is_odd() {
        let c = CurveFamily::odd(2.5).unwrap();
        assert_eq!(c.psi(-1.3), -c.psi(1.3));
        assert_eq!(c.dpsi(-1.3), c.dpsi(1.3));
        let e = CurveFamily::even(2.5).unwrap();
        assert_eq!(e.psi(-1.3), e.psi(1.3));
        assert_eq!(e.dpsi(-1.3), -e.dpsi(1.3));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for parity in [Parity::Even, Parity::Odd] {
            let c = CurveFamily::new(3.7, parity).unwrap();
            for y in [-2.0, -0.4, 0.3, 1.7] {
                let h = 1e-6;
                let fd = (c.psi(y + h) - c.psi(y - h)) / (2.0 * h);
                assert!((fd - c.dpsi(y)).abs() < 1e-6 * c.dpsi(y).abs().max(1.0));
            }
        }
    }
}
