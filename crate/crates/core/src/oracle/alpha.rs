//! Inversion of the pair map (y, y′) ↦ (y + y′, ψ(y) + ψ(y′)).

use serde::{Deserialize, Serialize};

use crate::curve::{CurveFamily, Parity};
use crate::error::{Error, Result};
use crate::roots::newton_bisect;

/// Relative offset from the fold below which a point counts as boundary.
pub const FOLD_TOLERANCE: f64 = 1e-14;

/// The preimage {u/2 − α, u/2 + α} of an interior point (u, v).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSolve {
    pub u: f64,
    pub v: f64,
    pub alpha: f64,
    /// 1/|ψ′(u/2+α) − ψ′(u/2−α)|.
    pub jacobian: f64,
    /// |ψ(u/2−α) + ψ(u/2+α) − v|.
    pub residual: f64,
}

impl AlphaSolve {
    pub fn points(&self) -> (f64, f64) {
        (0.5 * self.u - self.alpha, 0.5 * self.u + self.alpha)
    }
}

/// Solves ψ(u/2−α) + ψ(u/2+α) = v for α > 0.
///
/// ```
/// use sharpext_core::{oracle::solve_alpha, Parity};
/// let s = solve_alpha(2.0, Parity::Even, 0.0, 2.0).unwrap();
/// assert!((s.alpha - 1.0).abs() < 1e-14);
/// assert!((s.jacobian - 0.25).abs() < 1e-14);
/// ```
pub fn solve_alpha(p: f64, parity: Parity, u: f64, v: f64) -> Result<AlphaSolve> {
    solve_on(&CurveFamily::new(p, parity)?, u, v)
}

/// (1+x)^e − (1−x)^e for 0 ≤ x ≤ 1 and e > 0, without cancellation.
fn power_difference(x: f64, e: f64) -> f64 {
    if x >= 1.0 {
        return 2f64.powf(e);
    }
    let l1 = x.ln_1p();
    let l2 = (-x).ln_1p();
    2.0 * (0.5 * e * (l1 + l2)).exp() * (0.5 * e * (l1 - l2)).sinh()
}

/// ψ(c−α) + ψ(c+α) and ψ′(c+α) − ψ′(c−α) for c ≥ 0, α > 0, written so
/// that neither side cancels.
fn pair_sum(p: f64, odd: bool, c: f64, a: f64) -> (f64, f64) {
    if a <= c {
        let x = a / c;
        let value = (c + a).powf(p) + (c - a).powf(p);
        (value, p * c.powf(p - 1.0) * power_difference(x, p - 1.0))
    } else if odd {
        let x = c / a;
        let value = a.powf(p) * power_difference(x, p);
        (value, p * a.powf(p - 1.0) * power_difference(x, p - 1.0))
    } else {
        let value = (a + c).powf(p) + (a - c).powf(p);
        (value, p * ((a + c).powf(p - 1.0) + (a - c).powf(p - 1.0)))
    }
}

/// ψ(c−α) + ψ(c+α) − 2ψ(c) for the even curve, c ≥ 0, α > 0, keeping
/// full relative accuracy as α → 0.
fn even_excess(p: f64, c: f64, a: f64) -> f64 {
    if a > c {
        return (a + c).powf(p) + (a - c).powf(p) - 2.0 * c.powf(p);
    }
    let x = a / c;
    if x > 0.7 {
        return c.powf(p) * ((1.0 + x).powf(p) + (1.0 - x).powf(p) - 2.0);
    }
    // 2·Σ_{k≥1} binom(p, 2k)·x^{2k}.
    let x2 = x * x;
    let mut coef = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let j = 2.0 * k as f64;
        coef *= (p - j + 2.0) * (p - j + 1.0) / ((j - 1.0) * j);
        power *= x2;
        let term = coef * power;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 * c.powf(p) * sum
}

/// Even-curve solve when the height above the fold, v − 2ψ(u/2), is
/// known more accurately than v itself.
pub(crate) fn solve_even_from_gap(p: f64, u: f64, gap: f64) -> Result<AlphaSolve> {
    let c = 0.5 * u.abs();
    let v = gap + 2.0 * c.powf(p);
    if !(gap > 0.0) {
        return Err(Error::Boundary { u, v });
    }
    let f = |a: f64| (even_excess(p, c, a) - gap, pair_sum(p, false, c, a).1);
    // Quadratic growth near the fold, p-th power growth far from it.
    let quadratic = if c > 0.0 {
        (gap / (p * (p - 1.0) * c.powf(p - 2.0))).sqrt()
    } else {
        f64::INFINITY
    };
    let far = (0.5 * gap).powf(1.0 / p);
    let start = if quadratic <= c { quadratic } else { far.max(quadratic.min(c)) };
    let alpha = safeguarded_newton(f, start.max(f64::MIN_POSITIVE))?;
    let (r, slope) = f(alpha);
    Ok(AlphaSolve {
        u,
        v,
        alpha,
        jacobian: 1.0 / slope.abs(),
        residual: r.abs(),
    })
}

/// Root of an increasing f on (0, ∞) with f(0) < 0, from a starting guess.
/// Newton steps are kept inside the running bracket; while no upper end
/// is known a step out of range doubles the iterate instead.
fn safeguarded_newton<F: FnMut(f64) -> (f64, f64)>(mut f: F, start: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    let mut x = start;
    for _ in 0..400 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - fx / dfx;
        let next = if newton > lo && newton < hi {
            newton
        } else if hi.is_finite() {
            0.5 * (lo + hi)
        } else {
            2.0 * x
        };
        if !next.is_finite() {
            break;
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * x || hi - lo <= 2.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence(400))
}

pub(crate) fn solve_on(curve: &CurveFamily, u: f64, v: f64) -> Result<AlphaSolve> {
    solve_with_margin(curve, u, v, FOLD_TOLERANCE)
}

/// As [`solve_on`] with a caller-chosen relative margin from the fold.
/// Quadratures that approach the fold on purpose pass 0.
pub(crate) fn solve_with_margin(curve: &CurveFamily, u: f64, v: f64, margin: f64) -> Result<AlphaSolve> {
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::Domain(format!("non-finite point ({u}, {v})")));
    }
    // For the odd curve the map commutes with (y, y′) ↦ (−y, −y′).
    let (uu, vv) = if curve.parity() == Parity::Odd && u < 0.0 {
        (-u, -v)
    } else {
        (u, v)
    };
    let c = 0.5 * uu.abs();
    let p = curve.p();
    let odd = curve.parity() == Parity::Odd;
    let fold = 2.0 * c.powf(p);
    let gap = vv - fold;
    if gap <= margin * vv.abs().max(1.0) || (odd && c == 0.0) {
        return Err(Error::Boundary { u, v });
    }
    let h = |a: f64| {
        let (value, slope) = pair_sum(p, odd, c, a);
        (value - vv, slope)
    };
    let mut hi = if odd {
        c.max(1.0)
    } else {
        // ψ(|u|/2 + α) ≤ v on the solution.
        (vv.powf(1.0 / p) - c).max(f64::MIN_POSITIVE)
    };
    let mut grown = 0;
    while h(hi).0 <= 0.0 {
        hi *= 2.0;
        grown += 1;
        if grown > 2100 || !hi.is_finite() {
            return Err(Error::NoConvergence(grown));
        }
    }
    let alpha = newton_bisect(h, 0.0, hi, 1e-16, 400)?;
    let (r, slope) = h(alpha);
    Ok(AlphaSolve {
        u,
        v,
        alpha,
        jacobian: 1.0 / slope.abs(),
        residual: r.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parabola_examples() {
        let s = solve_alpha(2.0, Parity::Even, 2.0, 4.0).unwrap();
        assert!((s.alpha - 1.0).abs() < 1e-14);
        assert_eq!(s.points(), (0.0, 2.0));
    }

    #[test]
    fn cubic_example_residual() {
        let s = solve_alpha(3.0, Parity::Even, 2.0, 3.0).unwrap();
        assert!(s.residual <= 1e-12 * 3.0);
        // |1−α|³ + (1+α)³ = 2 + 6α² for α < 1.
        assert!((s.alpha - (1.0f64 / 6.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fold_is_a_boundary() {
        assert!(matches!(
            solve_alpha(3.0, Parity::Even, 2.0, 2.0),
            Err(Error::Boundary { .. })
        ));
        assert!(solve_alpha(3.0, Parity::Even, 2.0, 1.0).is_err());
        assert!(solve_alpha(3.0, Parity::Odd, 0.0, 1.0).is_err());
        assert!(solve_alpha(3.0, Parity::Odd, -2.0, -1.0).is_err());
    }

    #[test]
    fn odd_curve_on_both_sides() {
        let s = solve_alpha(3.0, Parity::Odd, -2.0, -3.0).unwrap();
        let (a, b) = s.points();
        let curve = CurveFamily::odd(3.0).unwrap();
        assert!((curve.psi(a) + curve.psi(b) + 3.0).abs() < 1e-13);
        assert!((a + b + 2.0).abs() < 1e-14);
        // Mixed signs: a small positive sum can reach large v.
        let s = solve_alpha(1.5, Parity::Odd, 0.1, 5.0).unwrap();
        assert!(s.residual <= 1e-12 * 5.0);
    }

    #[test]
    fn gap_form_agrees_and_resolves_tiny_gaps() {
        for (p, u, v) in [(3.0, 2.0, 3.0), (1.5, -0.7, 2.0), (2.5, 0.0, 1.0), (4.0, 3.0, 12.0)] {
            let plain = solve_alpha(p, Parity::Even, u, v).unwrap();
            let gap = v - 2.0 * (0.5 * f64::abs(u)).powf(p);
            let viagap = solve_even_from_gap(p, u, gap).unwrap();
            assert!((plain.alpha - viagap.alpha).abs() <= 1e-13 * plain.alpha);
        }
        // At p = 2 the excess is exactly 2α², so α = √(gap/2) to the last bit.
        for gap in [1e-30, 1e-20, 1e-12] {
            let s = solve_even_from_gap(2.0, 3.0, gap).unwrap();
            assert!((s.alpha - (gap / 2.0).sqrt()).abs() <= 1e-14 * s.alpha);
            assert!((s.jacobian * 4.0 * s.alpha - 1.0).abs() < 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn residual_and_jacobian(
            p in 1.05f64..8.0,
            odd in any::<bool>(),
            u in -5.0f64..5.0,
            lift in 1e-6f64..50.0,
        ) {
            let parity = if odd { Parity::Odd } else { Parity::Even };
            let curve = CurveFamily::new(p, parity).unwrap();
            let fold = 2.0 * curve.psi(u / 2.0);
            let v = if odd && u < 0.0 { fold - lift } else { fold + lift };
            prop_assume!(!(odd && u == 0.0));
            let s = solve_alpha(p, parity, u, v).unwrap();
            prop_assert!(s.alpha > 0.0);
            prop_assert!(s.residual <= 1e-12 * v.abs().max(1.0), "residual {}", s.residual);
            prop_assert!(s.jacobian > 0.0 && s.jacobian.is_finite());
        }
    }
}
