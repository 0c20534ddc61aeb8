//! Hausdorff–Young majorant for products of extensions from two dyadic caps.

use crate::curve::check_exponent;
use crate::error::{domain, Result};
use crate::quad::Integrator;

/// (∫∫ w(y)^{3/4}w(y′)^{3/4}|J(y,y′)|^{1/2} dy dy′)^{2/3} / (‖f‖₂‖g‖₂) for
/// f, g the indicators of ±[2^k, 2^{k+1}) and ±[2^{k′}, 2^{k′+1}), with
/// w = |y|^{(p−2)/3} and J = 1/|ψ′(y′) − ψ′(y)|.
///
/// Scaling predicts decay like 2^{−|k−k′|(p−1)/6}.
pub fn bilinear_decay(p: f64, k: i32, k_prime: i32) -> Result<f64> {
    check_exponent(p)?;
    if (k - k_prime).abs() < 2 {
        return domain(format!("caps must be separated by at least two scales, got {k} and {k_prime}"));
    }
    let w = (p - 2.0) / 3.0;
    let (a, b) = (2f64.powi(k), 2f64.powi(k + 1));
    let (c, d) = (2f64.powi(k_prime), 2f64.powi(k_prime + 1));
    let integrator = Integrator::new(1e-10);
    // For y, y′ > 0 the derivative gap is p|y^{p−1} − y′^{p−1}|; with
    // opposite signs it is p(y^{p−1} + y′^{p−1}). Each case occurs twice.
    let mut total = 0.0;
    for same_side in [true, false] {
        let mut inner_error = None;
        let outer = integrator.integrate(
            |y: f64| {
                let wy = y.powf(0.75 * w);
                let gy = y.powf(p - 1.0);
                let inner = integrator.integrate(
                    |z: f64| {
                        let gz = z.powf(p - 1.0);
                        let gap = if same_side { (gy - gz).abs() } else { gy + gz };
                        z.powf(0.75 * w) / (p * gap).sqrt()
                    },
                    c,
                    d,
                );
                match inner {
                    Ok(est) => wy * est.value,
                    Err(e) => {
                        inner_error = Some(e);
                        0.0
                    }
                }
            },
            a,
            b,
        )?;
        if let Some(e) = inner_error {
            return Err(e);
        }
        total += 2.0 * outer.value;
    }
    let norms = (2.0 * (b - a)).sqrt() * (2.0 * (d - c)).sqrt();
    Ok(total.powf(2.0 / 3.0) / norms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decays_at_the_predicted_rate() {
        let p: f64 = 3.0;
        let v2 = bilinear_decay(p, 0, -2).unwrap();
        let v4 = bilinear_decay(p, 0, -4).unwrap();
        let v6 = bilinear_decay(p, 0, -6).unwrap();
        let step = 2f64.powf((p - 1.0) / 6.0);
        assert!(v2 / v4 >= step * step * 0.9);
        assert!(v6 <= 1.5 * v2 * step.powi(-4));
    }

    #[test]
    fn symmetric_in_the_two_caps() {
        let a = bilinear_decay(2.5, 1, -2).unwrap();
        let b = bilinear_decay(2.5, -2, 1).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn parabola_value_is_finite() {
        let v = bilinear_decay(2.0, 0, -2).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!(bilinear_decay(2.0, 0, -1).is_err());
    }

    #[test]
    fn depends_only_on_separation() {
        let a = bilinear_decay(3.0, 0, -3).unwrap();
        let b = bilinear_decay(3.0, 5, 2).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
    }
}
