//! Exponential trial functions and the lower bounds they certify.
//!
//! For f(y) = e^{−λ(ψ(y)+b·y)}|y|^q the triple convolution of fσ carries the
//! factor e^{−λ(τ+bξ)} times a convolution of positive weights, so one
//! application of Cauchy–Schwarz against e^{−λ(τ+bξ)} on the support E gives
//!
//!   Φ(f) ≥ N₁⁶ / (N₂³ · ∫_E e^{−2λ(τ+bξ)} dξ dτ),
//!
//! with N₁ = ∫ e^{−2λ(ψ+by)}|y|^{q+(p−2)/6} and N₂ = ‖f‖₂². For the natural
//! weight q = (p−2)/6 the two integrals coincide.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::check_exponent;
use crate::error::{domain, Error, Result};
use crate::quad::{Estimate, Integrator};

/// Relative accuracy requested from every trial integral.
const TRIAL_REL_TOL: f64 = 1e-12;

/// Integrands are truncated once the exponent exceeds its minimum by this
/// much (e^{−45} ≈ 3e−20, below the 1e−18 tail budget).
const TAIL_EXPONENT: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    FullLine,
    HalfLinePositive,
}

/// f(y) = e^{−λ(|y|^p + drift·y)}·|y|^{weight_power}, restricted to `support`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialFunction {
    pub p: f64,
    pub lambda: f64,
    pub drift: f64,
    pub weight_power: f64,
    pub support: Support,
}

impl TrialFunction {
    pub fn new(p: f64, lambda: f64, drift: f64, weight_power: f64, support: Support) -> Result<Self> {
        check_exponent(p)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("trial scale must be positive, got {lambda}"));
        }
        if !drift.is_finite() {
            return domain(format!("trial drift must be finite, got {drift}"));
        }
        if !(weight_power > -0.5) || !weight_power.is_finite() {
            return domain(format!(
                "|y|^{weight_power} is not square integrable at the origin"
            ));
        }
        Ok(Self { p, lambda, drift, weight_power, support })
    }

    /// e^{−|y|^p}|y|^{(p−2)/6} on the whole line.
    pub fn natural(p: f64) -> Result<Self> {
        Self::new(p, 1.0, 0.0, (p - 2.0) / 6.0, Support::FullLine)
    }

    /// e^{−|y|^p}|y|^{(p−2)/6+a} on the whole line.
    pub fn weighted(p: f64, a: f64) -> Result<Self> {
        Self::new(p, 1.0, 0.0, (p - 2.0) / 6.0 + a, Support::FullLine)
    }

    /// e^{−λ(y^p − p·y)}|y|^{(p−2)/6} on y ≥ 0, concentrating at y = 1 as
    /// λ grows.
    pub fn concentrating(p: f64, lambda: f64) -> Result<Self> {
        Self::new(p, lambda, -p, (p - 2.0) / 6.0, Support::HalfLinePositive)
    }

    /// The trial y ↦ f(s·y), up to the constant factor s^q.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return domain(format!("dilation factor must be positive, got {s}"));
        }
        Self::new(
            self.p,
            self.lambda * s.powf(self.p),
            self.drift * s.powf(1.0 - self.p),
            self.weight_power,
            self.support,
        )
    }

    /// min over the support of |y|^p + drift·y; subtracting it from the
    /// exponent keeps every integrand at most O(1).
    pub fn log_shift(&self) -> f64 {
        let y = self.peak_location();
        y.abs().powf(self.p) + self.drift * y
    }

    /// Where |y|^p + drift·y attains its minimum on the support.
    pub fn peak_location(&self) -> f64 {
        if self.drift == 0.0 {
            return 0.0;
        }
        let r = (self.drift.abs() / self.p).powf(1.0 / (self.p - 1.0));
        match self.support {
            Support::FullLine => -r * self.drift.signum(),
            Support::HalfLinePositive if self.drift < 0.0 => r,
            Support::HalfLinePositive => 0.0,
        }
    }

    pub fn in_support(&self, y: f64) -> bool {
        match self.support {
            Support::FullLine => true,
            Support::HalfLinePositive => y >= 0.0,
        }
    }

    /// f(y)·e^{λ·log_shift}.
    pub fn shifted_value(&self, y: f64) -> f64 {
        if !self.in_support(y) {
            return 0.0;
        }
        let e = -self.lambda * (y.abs().powf(self.p) + self.drift * y - self.log_shift());
        e.exp() * y.abs().powf(self.weight_power)
    }

    /// ∫ e^{−2λ(|y|^p + drift·y − shift)}|y|^e dy over the support.
    pub fn shifted_moment(&self, e: f64) -> Result<Estimate> {
        let m = self.log_shift();
        let right = PowerExp::new(2.0 * self.lambda, self.p, self.drift, m).integrate(e)?;
        match self.support {
            Support::HalfLinePositive => Ok(right),
            Support::FullLine => {
                let left = PowerExp::new(2.0 * self.lambda, self.p, -self.drift, m).integrate(e)?;
                Ok(add_estimates(right, left))
            }
        }
    }

    /// ‖f‖₂² · e^{2λ·log_shift}.
    pub fn shifted_norm_squared(&self) -> Result<Estimate> {
        self.shifted_moment(2.0 * self.weight_power)
    }
}

pub(crate) fn add_estimates(a: Estimate, b: Estimate) -> Estimate {
    Estimate {
        value: a.value + b.value,
        abs_error: a.abs_error + b.abs_error,
        evaluations: a.evaluations + b.evaluations,
        converged: a.converged && b.converged,
    }
}

/// The one-sided Laplace-type integral ∫_0^∞ y^e·exp(−scale·(y^p + c·y − shift)) dy.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerExp {
    scale: f64,
    p: f64,
    c: f64,
    shift: f64,
}

impl PowerExp {
    pub(crate) fn new(scale: f64, p: f64, c: f64, shift: f64) -> Self {
        Self { scale, p, c, shift }
    }

    fn exponent(&self, y: f64) -> f64 {
        self.scale * (y.powf(self.p) + self.c * y - self.shift)
    }

    fn peak(&self) -> f64 {
        if self.c >= 0.0 {
            0.0
        } else {
            (-self.c / self.p).powf(1.0 / (self.p - 1.0))
        }
    }

    /// Distance over which the exponent grows by about one unit.
    fn width(&self, peak: f64) -> f64 {
        let base = self.exponent(peak);
        let mut w = if peak > 0.0 {
            let curvature = self.scale * self.p * (self.p - 1.0) * peak.powf(self.p - 2.0);
            1.0 / curvature.sqrt()
        } else {
            self.scale.powf(-1.0 / self.p)
        };
        for _ in 0..200 {
            let rise = self.exponent(peak + w) - base;
            if rise < 0.5 {
                w *= 2.0;
            } else if rise > 2.0 {
                w *= 0.5;
            } else {
                break;
            }
        }
        w
    }

    pub(crate) fn integrate(&self, e: f64) -> Result<Estimate> {
        if !(e > -1.0) {
            return Err(Error::Divergence(format!("y^{e} is not integrable at the origin")));
        }
        let peak = self.peak();
        let width = self.width(peak);
        let floor = self.exponent(peak);
        let reference = peak.max(width);
        let mut end = peak + width;
        for _ in 0..400 {
            let growth = (e * (end / reference).ln()).max(0.0);
            if self.exponent(end) - floor >= TAIL_EXPONENT + growth {
                break;
            }
            end += width.max(0.25 * end);
        }
        let mut breaks = vec![0.0, end];
        for m in [1.0, 3.0, 6.0, 10.0, 16.0] {
            for y in [peak - m * width, peak, peak + m * width] {
                if y > 0.0 && y < end {
                    breaks.push(y);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        // y = u^{1/k} turns y^e dy into du/k.
        let k = 1.0 + e;
        let ubreaks: Vec<f64> = breaks.iter().map(|y| y.powf(k)).collect();
        let integrator = Integrator::new(TRIAL_REL_TOL).with_max_segments(4000);
        let mut est = integrator.integrate_with_breaks(
            |u: f64| (-self.exponent(u.powf(1.0 / k))).exp(),
            &ubreaks,
        )?;
        est.value /= k;
        est.abs_error /= k;
        Ok(est)
    }
}

/// ∫_E e^{−2λ(τ + drift·ξ − 3·shift)} dξ dτ over the support E of the triple
/// convolution of the trial's support, with the τ-integral done in closed form.
fn shifted_denominator(trial: &TrialFunction) -> Result<Estimate> {
    let p = trial.p;
    let m = trial.log_shift();
    let lower_scale = 2.0 * trial.lambda * 3f64.powf(1.0 - p);
    let lower_c = trial.drift * 3f64.powf(p - 1.0);
    let lower_shift = 3.0 * m * 3f64.powf(p - 1.0);
    let right = PowerExp::new(lower_scale, p, lower_c, lower_shift).integrate(0.0)?;
    let total = match trial.support {
        Support::FullLine => {
            let left = PowerExp::new(lower_scale, p, -lower_c, lower_shift).integrate(0.0)?;
            add_estimates(right, left)
        }
        Support::HalfLinePositive => {
            // Three points of [0, ∞) sum to ξ with Σψ between 3ψ(ξ/3) and ψ(ξ).
            let upper = PowerExp::new(2.0 * trial.lambda, p, trial.drift, 3.0 * m).integrate(0.0)?;
            Estimate {
                value: right.value - upper.value,
                abs_error: right.abs_error + upper.abs_error,
                evaluations: right.evaluations + upper.evaluations,
                converged: right.converged && upper.converged,
            }
        }
    };
    let scale = 1.0 / (2.0 * trial.lambda);
    Ok(Estimate {
        value: total.value * scale,
        abs_error: total.abs_error * scale,
        ..total
    })
}

fn certified(est: Estimate, what: &str) -> Result<f64> {
    let est = est.require(1e-9)?;
    if !(est.value > 0.0) || !est.value.is_finite() {
        return Err(Error::Divergence(format!("{what} evaluated to {}", est.value)));
    }
    Ok(est.value)
}

/// Cauchy–Schwarz lower bound N₁⁶/(N₂³·Den) for Φ_p(f) at an exponential trial.
pub fn exp_trial_bound(trial: &TrialFunction) -> Result<f64> {
    let q = trial.weight_power;
    let natural = (trial.p - 2.0) / 6.0;
    let n2 = certified(trial.shifted_norm_squared()?, "trial norm")?;
    let n1 = if (q - natural).abs() < 1e-15 {
        n2
    } else {
        certified(trial.shifted_moment(q + natural)?, "weighted trial mass")?
    };
    let den = certified(shifted_denominator(trial)?, "support integral")?;
    // The e^{−2λ·shift} factors cancel between numerator and denominator.
    let r = n1 / n2;
    Ok(r * r * r * n1 * n1 * n1 / den)
}

/// φ_p(λ) and its small-1/λ asymptotics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeReport {
    pub p: f64,
    pub lambda: f64,
    pub phi_value: f64,
    /// φ_p(2λ), the second abscissa of the slope estimate.
    pub phi_double: f64,
    pub limit_value: f64,
    /// (φ(λ) − φ(2λ)) / (1/λ − 1/(2λ)).
    pub slope_estimate: f64,
    pub predicted_slope: f64,
}

/// π(2−p)(2p−1) / (9√3 p²(p−1)²).
pub fn predicted_slope(p: f64) -> f64 {
    PI * (2.0 - p) * (2.0 * p - 1.0) / (9.0 * 3f64.sqrt() * p * p * (p - 1.0) * (p - 1.0))
}

/// λ·(∫ e^{−λ(|y|^p−py)}|y|^{−(2−p)/3} dy)³ / ∫ e^{−λ(3^{1−p}|ξ|^p−pξ)} dξ.
///
/// Both exponents are shifted by their minima (−λ(p−1) and −3λ(p−1)), which
/// cancel in the ratio; at large λ this is the same as integrating in the
/// variable centered at the peaks y = 1 and ξ = 3.
pub fn phi_value(p: f64, lambda: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return domain(format!("the perturbative regime needs 1 < p < 2, got {p}"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be positive, got {lambda}"));
    }
    let shift = 1.0 - p;
    let weight = -(2.0 - p) / 3.0;
    let right = PowerExp::new(lambda, p, -p, shift).integrate(weight)?;
    let left = PowerExp::new(lambda, p, p, shift).integrate(weight)?;
    let num = certified(add_estimates(right, left), "numerator")?;
    let c = 3f64.powf(1.0 - p);
    let d_right = PowerExp::new(lambda * c, p, -p / c, 3.0 * shift / c).integrate(0.0)?;
    let d_left = PowerExp::new(lambda * c, p, p / c, 3.0 * shift / c).integrate(0.0)?;
    let den = certified(add_estimates(d_right, d_left), "denominator")?;
    Ok(lambda * num * num * num / den)
}

/// φ_p at λ and 2λ, packaged with the limit 2π/(√3p(p−1)) and the slope
/// predicted for φ_p as a function of 1/λ.
pub fn phi_lambda(p: f64, lambda: f64) -> Result<PerturbativeReport> {
    let phi = phi_value(p, lambda)?;
    let phi_double = phi_value(p, 2.0 * lambda)?;
    let slope_estimate = (phi - phi_double) / (1.0 / lambda - 0.5 / lambda);
    Ok(PerturbativeReport {
        p,
        lambda,
        phi_value: phi,
        phi_double,
        limit_value: 2.0 * PI / (3f64.sqrt() * p * (p - 1.0)),
        slope_estimate,
        predicted_slope: predicted_slope(p),
    })
}
