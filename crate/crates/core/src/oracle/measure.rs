use serde::{Deserialize, Serialize};

use crate::curve::{CurveFamily, Parity};
use crate::error::{domain, Result};
use crate::trial::{Support, TrialFunction};

/// The measure f(y)·|y|^q·δ(s − ψ(y)) dy ds on a curve, with f an optional
/// exponential trial.
///
/// Densities are reported up to the trial's constant factor e^{λ·shift}
/// (see [`TrialFunction::shifted_value`]), which cancels in every ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveMeasure {
    curve: CurveFamily,
    density_weight: f64,
    trial: Option<TrialFunction>,
    half_line: bool,
}

impl CurveMeasure {
    /// |y|^q δ(s − ψ(y)) with no trial factor.
    pub fn weighted(curve: CurveFamily, q: f64) -> Result<Self> {
        if !(q > -1.0) || !q.is_finite() {
            return domain(format!("|y|^{q} is not locally integrable at the origin"));
        }
        Ok(Self {
            curve,
            density_weight: q,
            trial: None,
            half_line: false,
        })
    }

    /// The natural measure σ, weighted by the curve's own power.
    pub fn sigma(curve: CurveFamily) -> Result<Self> {
        Self::weighted(curve, curve.weight_exponent())
    }

    /// The projection measure ν with no weight.
    pub fn projection(curve: CurveFamily) -> Result<Self> {
        Self::weighted(curve, 0.0)
    }

    /// Multiplies by a trial; a half-line trial restricts the measure.
    pub fn with_trial(mut self, trial: TrialFunction) -> Result<Self> {
        if trial.p != self.curve.p() {
            return domain(format!(
                "trial exponent {} does not match curve exponent {}",
                trial.p,
                self.curve.p()
            ));
        }
        if trial.support == Support::HalfLinePositive {
            self.half_line = true;
        }
        self.trial = Some(trial);
        Ok(self)
    }

    pub fn restricted_to_half_line(mut self) -> Self {
        self.half_line = true;
        self
    }

    pub fn curve(&self) -> CurveFamily {
        self.curve
    }

    pub fn p(&self) -> f64 {
        self.curve.p()
    }

    pub fn density_weight(&self) -> f64 {
        self.density_weight
    }

    pub fn trial(&self) -> Option<&TrialFunction> {
        self.trial.as_ref()
    }

    pub fn is_half_line(&self) -> bool {
        self.half_line
    }

    /// Power of |y| in f(y)|y|^q near the origin.
    pub fn total_power(&self) -> f64 {
        self.density_weight + self.trial.map_or(0.0, |t| t.weight_power)
    }

    /// The same measure with the trial's exponential factor dropped.
    pub(crate) fn power_part(&self) -> Self {
        Self {
            curve: self.curve,
            density_weight: self.total_power(),
            trial: None,
            half_line: self.half_line,
        }
    }

    /// Both parities agree on y ≥ 0, so half-line measures are computed on
    /// the even curve.
    pub(crate) fn effective_parity(&self) -> Parity {
        if self.half_line {
            Parity::Even
        } else {
            self.curve.parity()
        }
    }

    pub fn in_support(&self, y: f64) -> bool {
        !self.half_line || y >= 0.0
    }

    /// Density against dy of the projected measure.
    pub fn density(&self, y: f64) -> f64 {
        if !self.in_support(y) {
            return 0.0;
        }
        let w = if self.density_weight == 0.0 {
            1.0
        } else {
            y.abs().powf(self.density_weight)
        };
        match &self.trial {
            Some(t) => w * t.shifted_value(y),
            None => w,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_combine() {
        let curve = CurveFamily::even(3.0).unwrap();
        let m = CurveMeasure::sigma(curve)
            .unwrap()
            .with_trial(TrialFunction::natural(3.0).unwrap())
            .unwrap();
        assert!((m.total_power() - 1.0 / 3.0).abs() < 1e-15);
        assert!(!m.is_half_line());
        let y: f64 = 0.7;
        let want = y.powf(1.0 / 3.0) * (-y.powi(3)).exp();
        assert!((m.density(-y) - want).abs() < 1e-15);
    }

    #[test]
    fn half_line_trial_restricts() {
        let curve = CurveFamily::odd(1.5).unwrap();
        let m = CurveMeasure::sigma(curve)
            .unwrap()
            .with_trial(TrialFunction::concentrating(1.5, 10.0).unwrap())
            .unwrap();
        assert!(m.is_half_line());
        assert_eq!(m.density(-0.5), 0.0);
        assert!(m.density(1.0) > 0.0);
        assert_eq!(m.effective_parity(), Parity::Even);
    }

    #[test]
    fn rejects_mismatched_or_singular() {
        let curve = CurveFamily::even(3.0).unwrap();
        assert!(CurveMeasure::weighted(curve, -1.0).is_err());
        let m = CurveMeasure::projection(curve).unwrap();
        assert!(m.with_trial(TrialFunction::natural(2.5).unwrap()).is_err());
    }
}
