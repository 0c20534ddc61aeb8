//! Lower bounds for the odd curve s = y|y|^{p−1}.
//!
//! An even trial f = g + g(−·) built from a half-line g gives
//! ‖(fμ)^{∗3}‖²/‖f‖⁶ = (5/2)A + (15/4)B with A and B from
//! [`odd_expansion_terms`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{threshold, Parity};
use crate::error::{domain, Result};
use crate::oracle::{odd_expansion_terms, OddTerms, DEFAULT_GRID_SIZE};
use crate::trial::{Support, TrialFunction};

/// λ values used when none are given.
pub const DEFAULT_LAMBDAS: [f64; 4] = [50.0, 200.0, 500.0, 2000.0];

/// Extra weight exponents a scanned by default.
pub const DEFAULT_A_GRID: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];

/// λ is a pure dilation for the drift-free scan trials, so one value is
/// enough unless a numerical check across scales is wanted.
pub const DEFAULT_SCAN_LAMBDAS: [f64; 1] = [1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddBoundReport {
    pub p: f64,
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// ln B; B itself underflows once the trial concentrates.
    pub ln_b: f64,
    /// Change in B when the 4-fold grid is halved.
    pub b_grid_error: f64,
    pub q_lower_bound: f64,
    pub threshold: f64,
    /// q_lower_bound/(π/√3), comparable with 5/(p(p−1)).
    pub invariant_ratio: f64,
    pub margin: f64,
}

impl OddBoundReport {
    fn assemble(p: f64, lambda: f64, terms: OddTerms) -> Self {
        let q = 2.5 * terms.a + 3.75 * terms.b;
        let threshold = threshold(p, Parity::Odd);
        Self {
            p,
            lambda,
            a: terms.a,
            b: terms.b,
            ln_b: terms.ln_b,
            b_grid_error: terms.b_grid_error,
            q_lower_bound: q,
            threshold,
            invariant_ratio: q / (PI / 3f64.sqrt()),
            margin: q - threshold,
        }
    }
}

/// The bound from the concentrating trial e^{−λ(y^p − p·y)}|y|^{(p−2)/6}.
pub fn odd_bound(p: f64, lambda: f64) -> Result<OddBoundReport> {
    odd_bound_on_grid(p, lambda, DEFAULT_GRID_SIZE)
}

pub fn odd_bound_on_grid(p: f64, lambda: f64, grid_size: usize) -> Result<OddBoundReport> {
    let g = TrialFunction::concentrating(p, lambda)?;
    Ok(OddBoundReport::assemble(p, lambda, odd_expansion_terms(&g, grid_size)?))
}

/// One row of a scan; columns in CSV order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: f64,
    pub lambda: f64,
    pub a: f64,
    #[serde(rename = "A")]
    pub big_a: f64,
    #[serde(rename = "B")]
    pub big_b: f64,
    pub bound: f64,
    pub threshold: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestMargin {
    pub p: f64,
    pub lambda: f64,
    pub a: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    /// Largest margin for each p, in the order of the p grid.
    pub best: Vec<BestMargin>,
}

/// Odd bounds for g = e^{−λ|y|^p}|y|^{(p−2)/6+a} on y ≥ 0 over the product
/// of the three grids. Rows come out in grid order (p slowest, a fastest).
pub fn conjecture_scan(p_grid: &[f64], lambda_grid: &[f64], a_grid: &[f64]) -> Result<ScanTable> {
    if p_grid.is_empty() || lambda_grid.is_empty() || a_grid.is_empty() {
        return domain("scan grids must be nonempty");
    }
    if let Some(p) = p_grid.iter().find(|p| !(**p >= 2.0)) {
        return domain(format!("the scan covers p ≥ 2, got {p}"));
    }
    let mut points = Vec::new();
    for &p in p_grid {
        for &lambda in lambda_grid {
            for &a in a_grid {
                points.push((p, lambda, a));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(p, lambda, a)| {
            let g = TrialFunction::new(p, lambda, 0.0, (p - 2.0) / 6.0 + a, Support::HalfLinePositive)?;
            let r = OddBoundReport::assemble(p, lambda, odd_expansion_terms(&g, DEFAULT_GRID_SIZE)?);
            Ok(ScanRow {
                p,
                lambda,
                a,
                big_a: r.a,
                big_b: r.b,
                bound: r.q_lower_bound,
                threshold: r.threshold,
                margin: r.margin,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = p_grid
        .iter()
        .map(|&p| {
            let top = rows
                .iter()
                .filter(|r| r.p == p)
                .max_by(|x, y| x.margin.total_cmp(&y.margin))
                .expect("every p has rows");
            BestMargin {
                p,
                lambda: top.lambda,
                a: top.a,
                margin: top.margin,
            }
        })
        .collect();
    Ok(ScanTable { rows, best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_assembles_from_the_terms() {
        let r = odd_bound(3.0, 50.0).unwrap();
        assert!(r.b >= 0.0);
        assert!(r.q_lower_bound > 2.5 * r.a - 1e-15);
        assert_eq!(r.invariant_ratio, r.q_lower_bound / (PI / 3f64.sqrt()));
        assert_eq!(r.threshold, 5.0 * PI / (3f64.sqrt() * 6.0));
        assert!(r.margin < 0.0);
        assert!(r.invariant_ratio < 5.0 / 6.0);
    }

    #[test]
    fn concentration_limit_below_two() {
        let p = 1.5;
        let limit = 2.0 * PI / (3f64.sqrt() * p * (p - 1.0));
        let far = odd_bound(p, 2000.0).unwrap();
        assert!(((far.a - limit) / limit).abs() < 0.02, "{} vs {limit}", far.a);
        assert!(far.a > limit);
    }

    #[test]
    fn scan_rejects_empty_and_small_exponents() {
        assert!(conjecture_scan(&[], &[1.0], &[0.0]).is_err());
        assert!(conjecture_scan(&[2.0], &[], &[0.0]).is_err());
        assert!(conjecture_scan(&[2.0], &[1.0], &[]).is_err());
        assert!(conjecture_scan(&[1.5], &[1.0], &[0.0]).is_err());
    }

    #[test]
    fn scan_keeps_grid_order() {
        let t = conjecture_scan(&[3.0], &[1.0], &[0.5, 0.0]).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].a, 0.5);
        assert_eq!(t.rows[1].a, 0.0);
        assert!(t.rows.iter().all(|r| r.margin < 0.0));
        let best = t.rows.iter().map(|r| r.margin).fold(f64::MIN, f64::max);
        assert_eq!(t.best[0].margin, best);
    }
}
