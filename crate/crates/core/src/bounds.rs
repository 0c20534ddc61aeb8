//! Legendre-series lower bounds for the even-curve constant.
//!
//! The trial f(y) = e^{−|y|^p}|y|^{(p−2)/6+a} makes the triple convolution
//! slice at τ = 1 a function g(t) on [−1, 1] whose even moments I_{2k}(p,a)
//! are finite sums of Gamma ratios. Expanding g in Legendre polynomials and
//! applying Parseval turns ‖f σ ∗ f σ ∗ f σ‖² into a series of squares, so
//! every partial sum is a lower bound.

use serde::{Deserialize, Serialize};

use crate::curve::{check_exponent, threshold, Parity};
use crate::error::{domain, Error, Result};
use crate::grid::{DensityGrid, Slice};
use crate::roots::bisect;
use crate::specfun::{gamma, legendre_eval};
use crate::sum::{sum_descending, CompensatedSum, DoubleDouble};

/// Largest truncation order accepted; the terms stay far from overflow
/// below it for every p ≤ 12.
pub const MAX_ORDER: usize = 20;

/// Truncation order used by default.
pub const DEFAULT_ORDER: usize = 15;

/// Bisection tolerance on p for [`critical_exponent`].
pub const CRITICAL_TOLERANCE: f64 = 1e-6;

/// I_0(p,a), …, I_{2N}(p,a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub p: f64,
    pub a: f64,
    pub entries: Vec<f64>,
}

impl MomentVector {
    pub fn new(p: f64, a: f64, order: usize) -> Result<Self> {
        check_parameters(p, a)?;
        let ratios = gamma_ratios(p, a, order)?;
        let entries = (0..=order)
            .map(|n| moment_from_ratios(n, p, a, &ratios))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p, a, entries })
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }
}

/// Partial sum of the series together with its terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: f64,
    pub a: f64,
    #[serde(rename = "N")]
    pub order: usize,
    pub partial_sum: f64,
    pub per_term: Vec<f64>,
    pub threshold: f64,
    pub margin: f64,
}

/// Crossing of the series bound with the even threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub a: f64,
    #[serde(rename = "N")]
    pub order: usize,
    pub p_star: f64,
    pub iterations: usize,
    /// (p, margin) at every bisection midpoint.
    pub margin_trace: Vec<(f64, f64)>,
}

fn check_parameters(p: f64, a: f64) -> Result<()> {
    check_exponent(p)?;
    if !a.is_finite() || a <= -(p + 1.0) / 6.0 {
        return domain(format!(
            "weight tweak must satisfy a > -(p+1)/6 = {}, got {a}",
            -(p + 1.0) / 6.0
        ));
    }
    Ok(())
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return domain(format!("truncation order must be at most {MAX_ORDER}, got {order}"));
    }
    Ok(())
}

fn finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Overflow(what))
    }
}

/// r_j = Γ((p+1+6j+3a)/(3p)) / (2j)! for j = 0..=order.
fn gamma_ratios(p: f64, a: f64, order: usize) -> Result<Vec<f64>> {
    (0..=order)
        .map(|j| {
            let g = gamma((p + 1.0 + 6.0 * j as f64 + 3.0 * a) / (3.0 * p))?;
            let f = gamma(2.0 * j as f64 + 1.0)?;
            finite(g / f, "moment Gamma ratio")
        })
        .collect()
}

fn moment_from_ratios(n: usize, p: f64, a: f64, r: &[f64]) -> Result<f64> {
    let mut terms = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for k in 0..=n {
        for m in 0..=n - k {
            terms.push(r[k] * r[m] * r[n - k - m]);
        }
    }
    let inner = sum_descending(terms);
    let nf = n as f64;
    // (2n+1+3a)Γ((2n+1+3a)/p) written as pΓ(1+(2n+1+3a)/p).
    let denominator = p * p * p * gamma(1.0 + (2.0 * nf + 1.0 + 3.0 * a) / p)?;
    let scale = 3f64.powf(-(1.0 - 1.0 / p) * (2.0 * nf + 1.0)) * 8.0 * gamma(2.0 * nf + 1.0)?;
    finite(scale / denominator * inner, "moment")
}

/// I_{2n}(p,a), the 2n-th moment of the triple convolution slice.
///
/// Every Γ is evaluated directly rather than through its logarithm: the
/// series below cancels heavily and needs the moments to full precision.
pub fn moment(n: usize, p: f64, a: f64) -> Result<f64> {
    check_parameters(p, a)?;
    let ratios = gamma_ratios(p, a, n)?;
    moment_from_ratios(n, p, a, &ratios)
}

/// binom(2n,2k)·binom(n+k−½,2n), correctly rounded.
///
/// The second factor is Π_j (2(n+k−j)−1) / (2^{2n}(2n)!), a ratio of
/// integers that double-double arithmetic carries without loss. A plain
/// iterated product would lose about 2n ulps, and the alternating sums in
/// [`legendre_coefficients`] cancel by up to nine orders of magnitude.
fn binomial_pair(n: usize, k: usize) -> DoubleDouble {
    let mut outer = 1.0;
    for j in 0..2 * k {
        // Stays an exact integer below 2^53 for n ≤ 20.
        outer = outer * (2 * n - j) as f64 / (j + 1) as f64;
    }
    let mut num = DoubleDouble::new(outer);
    let mut den = DoubleDouble::new(4f64.powi(n as i32));
    for j in 0..2 * n {
        num = num.mul_f64((2 * (n + k) as i64 - 2 * j as i64 - 1) as f64);
        den = den.mul_f64((j + 1) as f64);
    }
    num.div(den)
}

/// Coefficients c_n = Σ_k binom(2n,2k)·binom(n+k−½,2n)·I_{2k}(p,a).
pub fn legendre_coefficients(moments: &MomentVector) -> Result<Vec<f64>> {
    let order = moments.order();
    (0..=order)
        .map(|n| {
            let mut acc = CompensatedSum::new();
            for k in 0..=n {
                let term = binomial_pair(n, k).mul_f64(moments.entries[k]);
                acc.add(term.hi);
                acc.add(term.lo);
            }
            finite(acc.value(), "Legendre coefficient")
        })
        .collect()
}

/// 3^{1−1/p}p²·(1+6a)Γ((1+6a)/p) / (8Γ((p+1+6a)/(3p))³).
fn prefactor(p: f64, a: f64) -> Result<f64> {
    let top = 3f64.powf(1.0 - 1.0 / p) * p * p * p * gamma(1.0 + (1.0 + 6.0 * a) / p)?;
    let g = gamma((p + 1.0 + 6.0 * a) / (3.0 * p))?;
    finite(top / (8.0 * g * g * g), "series prefactor")
}

/// Even-curve concentration threshold 2π/(√3 p(p−1)).
pub fn even_threshold(p: f64) -> f64 {
    threshold(p, Parity::Even)
}

/// Partial sum of order N of the Legendre series for Φ_p(f_a).
pub fn series_bound(p: f64, a: f64, order: usize) -> Result<BoundReport> {
    check_order(order)?;
    let moments = MomentVector::new(p, a, order)?;
    let c = legendre_coefficients(&moments)?;
    let pre = prefactor(p, a)?;
    let per_term = c
        .iter()
        .enumerate()
        .map(|(n, &cn)| {
            let weight = (4 * n + 1) as f64 * 2f64.powi(4 * n as i32 - 1);
            finite(pre * weight * cn * cn, "series term")
        })
        .collect::<Result<Vec<_>>>()?;
    let partial_sum: CompensatedSum = per_term.iter().copied().collect();
    let partial_sum = finite(partial_sum.value(), "series partial sum")?;
    let threshold = even_threshold(p);
    Ok(BoundReport {
        p,
        a,
        order,
        partial_sum,
        per_term,
        threshold,
        margin: partial_sum - threshold,
    })
}

/// The Γ-ratio bound 4Γ((p+1)/(3p))³ / (3^{1−1/p}p²Γ(1/p)) of the natural
/// trial, equal to the first term of the series.
pub fn gamma_ratio_bound(p: f64) -> Result<f64> {
    check_exponent(p)?;
    let g = gamma((p + 1.0) / (3.0 * p))?;
    Ok(4.0 * g * g * g / (3f64.powf(1.0 - 1.0 / p) * p * p * gamma(1.0 / p)?))
}

/// Normalized profile g_{p,N}(t) / (2π/(√3p(p−1))) at the given points.
///
/// The slice is τ = 1 with ξ = 3^{1−1/p}·t; the normalization makes the
/// profile tend to 1 at t = ±1.
pub fn profile(p: f64, a: f64, order: usize, points: &[f64]) -> Result<DensityGrid> {
    check_order(order)?;
    let moments = MomentVector::new(p, a, order)?;
    let c = legendre_coefficients(&moments)?;
    let norm = even_threshold(p);
    let mut grid = DensityGrid::new(
        3,
        Slice::Segment {
            tau: 1.0,
            xi_scale: 3f64.powf(1.0 - 1.0 / p),
        },
        &["t"],
    );
    for &t in points {
        let mut acc = CompensatedSum::new();
        for (n, &cn) in c.iter().enumerate() {
            let weight = (4 * n + 1) as f64 * 2f64.powi(2 * n as i32 - 1);
            acc.add(weight * cn * legendre_eval(2 * n, t)?);
        }
        grid.push(vec![t], acc.value() / norm);
    }
    Ok(grid)
}

/// Exponent p in `[lo, hi]` where the series bound of order N crosses the
/// even threshold, located by bisection to within 1e−6.
pub fn critical_exponent(a: f64, order: usize, lo: f64, hi: f64) -> Result<CriticalReport> {
    check_order(order)?;
    let found = bisect(|p| Ok(series_bound(p, a, order)?.margin), lo, hi, CRITICAL_TOLERANCE)?;
    Ok(CriticalReport {
        a,
        order,
        p_star: found.root,
        iterations: found.iterations,
        margin_trace: found.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const PI_OVER_SQRT3: f64 = 1.813_799_364_234_217_850_6;

    #[test]
    fn parabola_moments_are_flat_density_moments() {
        for k in 0..=15 {
            let want = 2.0 * PI / 3f64.sqrt() / (2 * k + 1) as f64;
            let got = moment(k, 2.0, 0.0).unwrap();
            assert!(((got - want) / want).abs() <= 1e-10, "k = {k}");
        }
    }

    #[test]
    fn zeroth_moment_at_cubic() {
        // 8Γ(4/9)³ / (3^{2/3}·9·Γ(1/3)), from 30-digit arithmetic.
        let want = 8.0 * gamma(4.0 / 9.0).unwrap().powi(3)
            / (3f64.powf(2.0 / 3.0) * 9.0 * gamma(1.0 / 3.0).unwrap());
        let got = moment(0, 3.0, 0.0).unwrap();
        assert!(((got - want) / want).abs() < 1e-14);
    }

    #[test]
    fn parabola_series_is_exact_for_every_order() {
        for n in 0..=15 {
            let r = series_bound(2.0, 0.0, n).unwrap();
            assert!((r.partial_sum - PI_OVER_SQRT3).abs() <= 1e-10, "N = {n}");
            assert!(r.margin.abs() <= 1e-10);
        }
        let c = legendre_coefficients(&MomentVector::new(2.0, 0.0, 10).unwrap()).unwrap();
        for cn in &c[1..] {
            assert!(cn.abs() <= 1e-9 * c[0]);
        }
    }

    #[test]
    fn first_term_is_gamma_ratio() {
        for p in [2.5, 3.0, 4.0, 5.0] {
            let s = series_bound(p, 0.0, 0).unwrap().partial_sum;
            let g = gamma_ratio_bound(p).unwrap();
            assert!(((s - g) / g).abs() <= 1e-11, "p = {p}");
        }
    }

    #[test]
    fn window_of_positive_margin() {
        // Margins from 50-digit arithmetic. The f64 moments carry a few ulps
        // of error that the coefficient sums amplify to about 1e-8 here.
        let cases = [
            (2.5, 0.063_883_722_520_618_57),
            (3.0, 0.046_144_340_918_149_146),
            (4.0, 0.011_891_156_986_617_317),
            (4.5, 0.003_321_117_872_341_868_6),
            (5.5, -0.004_230_225_907_462_268),
        ];
        for (p, want) in cases {
            let got = series_bound(p, 0.0, 15).unwrap().margin;
            assert!((got - want).abs() < 1e-7, "p = {p}: {got} vs {want}");
        }
    }

    #[test]
    fn weighted_trial_extends_window() {
        let weighted = series_bound(5.2, 7.0 / 15.0, 15).unwrap();
        let plain = series_bound(5.2, 0.0, 15).unwrap();
        assert!(weighted.margin > 0.0);
        assert!(plain.margin < 0.0);
    }

    #[test]
    fn critical_exponents() {
        let p0 = critical_exponent(0.0, 15, 4.0, 5.5).unwrap();
        assert!((p0.p_star - 4.803_522_624_262_134).abs() < 2e-6);
        let p1 = critical_exponent(7.0 / 15.0, 15, 4.0, 6.0).unwrap();
        assert!((p1.p_star - 5.485_634_170_506_748).abs() < 2e-6);
        let first = critical_exponent(0.0, 0, 2.05, 5.5).unwrap();
        assert!((first.p_star - 3.599_302_158_801_006_5).abs() < 2e-6);
        assert!(first.p_star < p0.p_star);
    }

    #[test]
    fn critical_exponent_needs_a_sign_change() {
        let e = critical_exponent(0.0, 15, 2.5, 4.0).unwrap_err();
        assert!(matches!(e, Error::NoSignChange { .. }));
    }

    #[test]
    fn binomial_pair_matches_plain_product() {
        use crate::specfun::generalized_binomial_value;
        for n in 0..=12 {
            for k in 0..=n {
                let plain = generalized_binomial_value((2 * n) as f64, 2 * k).unwrap()
                    * generalized_binomial_value(n as f64 + k as f64 - 0.5, 2 * n).unwrap();
                let exact = binomial_pair(n, k).to_f64();
                assert!((plain - exact).abs() <= 1e-13 * exact.abs(), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn parameter_guards() {
        assert!(moment(0, 1.0, 0.0).is_err());
        assert!(moment(0, 3.0, -4.0 / 6.0).is_err());
        assert!(moment(0, 3.0, -4.0 / 6.0 + 1e-9).is_ok());
        assert!(series_bound(3.0, 0.0, 21).is_err());
        // The a-range edge where (1+6a)Γ((1+6a)/p) is a removable 0·∞.
        assert!(series_bound(3.0, -1.0 / 6.0, 5).unwrap().partial_sum.is_finite());
    }

    #[test]
    fn no_overflow_up_to_order_twenty() {
        for p in [1.05, 1.5, 3.0, 8.0, 12.0] {
            for a in [-0.3, 0.0, 0.5, 2.0] {
                if a <= -(p + 1.0) / 6.0 {
                    continue;
                }
                let r = series_bound(p, a, MAX_ORDER).unwrap();
                assert!(r.partial_sum.is_finite());
            }
        }
    }

    #[test]
    fn parabola_profile_is_flat() {
        let grid = profile(2.0, 0.0, 12, &[-0.9, -0.5, 0.0, 0.5, 0.9]).unwrap();
        for v in grid.values() {
            assert!((v - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn profile_is_even() {
        let grid = profile(3.0, 0.0, 10, &[-1.0, 1.0, -0.3, 0.3]).unwrap();
        let v: Vec<f64> = grid.values().collect();
        assert!((v[0] - v[1]).abs() < 1e-13);
        assert!((v[2] - v[3]).abs() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn moments_are_positive(p in 1.05f64..12.0, a_frac in 0.01f64..3.0, n in 0usize..=20) {
            let a = -(p + 1.0) / 6.0 + a_frac;
            prop_assert!(moment(n, p, a).unwrap() > 0.0);
        }

        #[test]
        fn partial_sums_are_monotone(p in 1.2f64..10.0, a in -0.2f64..1.0) {
            let r = series_bound(p, a, 15).unwrap();
            prop_assert!(r.per_term.iter().all(|&t| t >= 0.0));
            let mut running = 0.0;
            let mut prev = 0.0;
            for t in &r.per_term {
                running += t;
                prop_assert!(running >= prev);
                prev = running;
            }
            prop_assert!((running - r.partial_sum).abs() <= 1e-12 * r.partial_sum);
        }
    }
}
