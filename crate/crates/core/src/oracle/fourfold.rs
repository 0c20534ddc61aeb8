//! The 4-fold convolution on the row v = 1, and the odd-curve expansion
//! terms built from it.
//!
//! The 4-fold density of |y|^β·ν at height 1 only sees points with |y| ≤ 1,
//! so it is computed from the finite measure |y|^β·1_{|y|≤1}·ν. That measure
//! is replaced by M equal-mass atoms, all ordered pairs of atoms are
//! deposited on a (u, v) grid by cloud-in-cell weights to give the 2-fold
//! density, and the row v = 1 of its self-convolution is a discrete sum.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::curve::CurveFamily;
use crate::error::{domain, Error, Result};
use crate::grid::{DensityGrid, Slice};
use crate::oracle::density::{cusp, integrate_piece, triple_density, twofold_density};
use crate::oracle::measure::CurveMeasure;
use crate::oracle::norm::{graded_breaks, triple_norm_ratio, RadialFactor};
use crate::quad::Integrator;
use crate::trial::{Support, TrialFunction};

/// Default number of grid cells per unit of v over [0, 2].
pub const DEFAULT_GRID_SIZE: usize = 256;

/// Largest grid accepted.
pub const MAX_GRID_SIZE: usize = 4096;

/// Atoms per grid cell along one axis.
const ATOMS_PER_CELL: usize = 8;

/// H₄(u, 1) sampled at u = u₀ + k·h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourfoldRow {
    pub p: f64,
    pub beta: f64,
    pub half_line: bool,
    pub grid_size: usize,
    pub u0: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl FourfoldRow {
    /// Linear interpolation; zero off the sampled range.
    pub fn at(&self, u: f64) -> f64 {
        let x = (u - self.u0) / self.step;
        if !(x >= 0.0) || x > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let k = (x.floor() as usize).min(self.values.len() - 2);
        let f = x - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    pub fn to_grid(&self) -> DensityGrid {
        let mut grid = DensityGrid::new(4, Slice::Row { v: 1.0 }, &["u"]);
        for (k, &v) in self.values.iter().enumerate() {
            grid.push(vec![self.u0 + k as f64 * self.step], v);
        }
        grid
    }
}

fn check_grid(grid_size: usize) -> Result<()> {
    if !(4..=MAX_GRID_SIZE).contains(&grid_size) || grid_size % 2 != 0 {
        return domain(format!(
            "grid size must be even and between 4 and {MAX_GRID_SIZE}, got {grid_size}"
        ));
    }
    Ok(())
}

/// The row v = 1 of (|y|^β·ν)^{∗4}, on y ≥ 0 or on the whole line.
///
/// Accuracy is best in the interior of the support; close to the lower
/// edge u = 1 of the half-line row the values converge only slowly in the
/// grid size.
pub fn fourfold_row(p: f64, beta: f64, half_line: bool, grid_size: usize) -> Result<FourfoldRow> {
    CurveFamily::even(p)?;
    check_grid(grid_size)?;
    if !(beta > -1.0) {
        return domain(format!("|y|^{beta} is not locally integrable"));
    }
    let g = grid_size;
    let h = 2.0 / g as f64;
    let u0 = if half_line { 0.0 } else { -2.0 };
    let offset = if half_line { 0 } else { g };
    let nu = offset + g + 1;
    let nv = g + 1;

    // Equal-mass atoms: y = t^{1/(1+β)} turns |y|^β dy on [0, 1] into dt/(1+β).
    let m = ATOMS_PER_CELL * g;
    let mass = 1.0 / ((1.0 + beta) * m as f64);
    let mut atoms: Vec<(f64, f64, f64)> = (0..m)
        .map(|j| {
            let y = ((j as f64 + 0.5) / m as f64).powf(1.0 / (1.0 + beta));
            (y, y.powf(p), mass)
        })
        .collect();
    if !half_line {
        let mirrored: Vec<_> = atoms.iter().map(|&(y, s, w)| (-y, s, w)).collect();
        atoms.extend(mirrored);
    }

    let mut two = vec![0.0; nu * nv];
    let cell = 1.0 / (h * h);
    for (i, &(yi, si, wi)) in atoms.iter().enumerate() {
        for (j, &(yj, sj, wj)) in atoms.iter().enumerate().skip(i) {
            // Ordered pairs: each unordered pair of distinct atoms twice.
            let w = if i == j { wi * wj } else { 2.0 * wi * wj } * cell;
            let fu = (yi + yj - u0) / h;
            let fv = (si + sj) / h;
            let a = (fu.floor() as usize).min(nu - 2);
            let b = (fv.floor() as usize).min(nv - 2);
            let (du, dv) = (fu - a as f64, fv - b as f64);
            two[a * nv + b] += w * (1.0 - du) * (1.0 - dv);
            two[(a + 1) * nv + b] += w * du * (1.0 - dv);
            two[a * nv + b + 1] += w * (1.0 - du) * dv;
            two[(a + 1) * nv + b + 1] += w * du * dv;
        }
    }

    let row = g / 2;
    let values = (0..nu)
        .map(|k| {
            let mut acc = 0.0;
            for a in 0..nu {
                // u-index of the partner: u_k − u_a = u0 + c·h.
                let c = k as isize - a as isize + offset as isize;
                if c < 0 || c as usize >= nu {
                    continue;
                }
                let (ra, rc) = (a * nv, c as usize * nv);
                for b in 0..=row {
                    acc += two[ra + b] * two[rc + row - b];
                }
            }
            acc * h * h
        })
        .collect();
    Ok(FourfoldRow {
        p,
        beta,
        half_line,
        grid_size,
        u0,
        step: h,
        values,
    })
}

/// H₄(u, 1) on the half line by one quadrature over the 3-fold density,
/// ∫ y^β·H₃(u − y, 1 − y^p) dy. Slow; an independent check on the grid.
pub fn fourfold_by_quadrature(p: f64, beta: f64, u: f64) -> Result<f64> {
    let m = CurveMeasure::weighted(CurveFamily::even(p)?, beta)?.restricted_to_half_line();
    let top = u.min(1.0);
    if !(top > 0.0) {
        return Ok(0.0);
    }
    let inside = |y: f64| {
        let (xi, tau) = (u - y, 1.0 - y.powf(p));
        tau > 3f64.powf(1.0 - p) * xi.abs().powf(p) && xi > 0.0 && tau < xi.powf(p)
    };
    // Support edges of the fibre, located on a scan and refined by bisection.
    let n = 400;
    let mut breaks = vec![0.0, top];
    let mut prev = inside(0.0);
    for i in 1..=n {
        let y = top * i as f64 / n as f64;
        let now = inside(y);
        if now != prev {
            let (mut lo, mut hi) = (top * (i - 1) as f64 / n as f64, y);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
        prev = now;
    }
    breaks.sort_by(f64::total_cmp);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let f = |y: f64| {
        if !inside(y) {
            return 0.0;
        }
        match triple_density(&m, u - y, 1.0 - y.powf(p)) {
            Ok(pt) => m.density(y) * pt.value,
            Err(Error::Boundary { .. }) => 0.0,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let integrator = Integrator::new(1e-7).with_max_segments(400);
    let singular = cusp(beta);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let e_lo = if w[0] == 0.0 { singular } else { None };
        total += integrate_piece(&integrator, f, w[0], w[1], e_lo, None)?.0;
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(total)
}

/// The two terms of the odd-curve ratio for a half-line trial g:
/// A = ‖gσ∗gσ∗gσ‖²/‖g‖⁶ and B = ⟨(gσ)^{∗4}, (gσ)^{∗2}⟩/‖g‖⁶.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddTerms {
    pub a: f64,
    pub a_error: f64,
    pub b: f64,
    /// ln B, finite even when B underflows.
    pub ln_b: f64,
    /// |B at the given grid − B at half the grid|.
    pub b_grid_error: f64,
}

/// ∫_1^{2^{1−1/p}} H₄(s,1)·H₂(s,1)·K(s) ds with K's floor factored out, as
/// (integral, floor).
fn cross_integral(
    trial: &TrialFunction,
    power: &CurveMeasure,
    row: &FourfoldRow,
) -> Result<(f64, f64)> {
    let p = trial.p;
    let beta = power.density_weight();
    let d2 = 2.0 * beta + 1.0 - p;
    let d4 = 4.0 * beta + 3.0 - p;
    let radial = RadialFactor::new(trial, 3.0, p + d2 + d4)?;
    let top = 2f64.powf(1.0 - 1.0 / p);
    let floor = radial.floor(1.0).min(radial.floor(top));
    let failure: Cell<Option<Error>> = Cell::new(None);
    // s = top − t² absorbs the fold singularity of H₂ at s = top.
    let f = |t: f64| {
        let s = top - t * t;
        let h2 = match twofold_density(power, power, s, 1.0) {
            Ok(v) => v,
            Err(Error::Boundary { .. }) => return 0.0,
            Err(e) => {
                failure.set(Some(e));
                return 0.0;
            }
        };
        let k = match radial.value(s, floor) {
            Ok(k) => k,
            Err(e) => {
                failure.set(Some(e));
                return 0.0;
            }
        };
        row.at(s) * h2 * k * 2.0 * t
    };
    let end = (top - 1.0).sqrt();
    let integrator = Integrator::new(1e-8).with_max_segments(2000);
    let scale = 2.0 * trial.lambda * (1.0 + trial.drift.abs());
    let breaks = graded_breaks(0.0, 0.5 * end, &[], scale.sqrt());
    let near = integrator.integrate_with_breaks(f, &breaks)?;
    let singular = cusp(beta);
    let (far, _) = integrate_piece(&integrator, f, 0.5 * end, end, None, singular)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((near.value + far, floor))
}

/// A and B for a trial supported on [0, ∞).
pub fn odd_expansion_terms(g: &TrialFunction, grid_size: usize) -> Result<OddTerms> {
    if g.support != Support::HalfLinePositive {
        return domain("odd expansion terms need a half-line trial");
    }
    check_grid(grid_size)?;
    let curve = CurveFamily::odd(g.p)?;
    let m = CurveMeasure::sigma(curve)?.with_trial(*g)?;
    let a = triple_norm_ratio(&m)?;
    let power = m.power_part();
    let beta = power.density_weight();
    let norm = g.shifted_norm_squared()?.value;

    let b_at = |size: usize| -> Result<(f64, f64)> {
        let row = fourfold_row(g.p, beta, true, size)?;
        let (integral, floor) = cross_integral(g, &power, &row)?;
        let ln_b = integral.ln() - 2.0 * g.lambda * floor - 3.0 * norm.ln();
        Ok((ln_b.exp(), ln_b))
    };
    let (b, ln_b) = b_at(grid_size)?;
    let half = (grid_size / 2).max(4) & !1;
    let (b_coarse, _) = b_at(half)?;
    Ok(OddTerms {
        a: a.value,
        a_error: a.abs_error,
        b,
        ln_b,
        b_grid_error: (b - b_coarse).abs(),
    })
}
