//! Closed-form 2-fold densities and the 3-fold density by one quadrature.
//!
//! The 3-fold density at (ξ, τ) is ∫ F(y)·(F∗F)(ξ−y, τ−ψ(y)) dy, taken
//! over the y-interval [a, b] on which τ − ψ(y) stays above the fold
//! 2ψ((ξ−y)/2). The 2-fold density blows up like the inverse square root
//! of the distance to the fold, and the substitution y = m + r·sin θ with
//! m ± r = b, a turns that into a bounded integrand.

use std::cell::Cell;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::curve::{CurveFamily, Parity};
use crate::error::{domain, Error, Result};
use crate::grid::{DensityGrid, Slice};
use crate::oracle::alpha::{solve_even_from_gap, solve_on, FOLD_TOLERANCE};
use crate::oracle::measure::CurveMeasure;
use crate::quad::Integrator;
use crate::roots::newton_bisect;

/// Relative accuracy requested from the inner quadrature.
pub const DENSITY_REL_TOL: f64 = 1e-11;

/// One evaluation of the 3-fold density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub xi: f64,
    pub tau: f64,
    pub value: f64,
    pub abs_error: f64,
    /// False where the density is evaluated but not known to be continuous
    /// (between 2^{1−p}|ξ|^p and τ for 1 < p < 2 on the whole line).
    pub continuity_guaranteed: bool,
}

fn same_curve(f: &CurveMeasure, g: &CurveMeasure) -> Result<()> {
    if f.curve() != g.curve() {
        return domain("both measures must live on the same curve");
    }
    Ok(())
}

/// (fσ ∗ gσ)(u, v) from the explicit inverse of the pair map.
///
/// Both assignments of the preimage to (f, g) are summed, which gives the
/// familiar 2F(y)F(y′)J when f = g.
pub fn twofold_density(f: &CurveMeasure, g: &CurveMeasure, u: f64, v: f64) -> Result<f64> {
    same_curve(f, g)?;
    let curve = CurveFamily::new(f.p(), f.effective_parity())?;
    if f.is_half_line() && g.is_half_line() && !(v < curve.psi(u)) {
        return Err(Error::Boundary { u, v });
    }
    let s = solve_on(&curve, u, v)?;
    let (y1, y2) = s.points();
    Ok((f.density(y1) * g.density(y2) + f.density(y2) * g.density(y1)) * s.jacobian)
}

/// Whether (ξ, τ) lies strictly inside the support of the 3-fold
/// convolution of `m`, with the same relative margin as the fold test.
pub fn in_triple_support(m: &CurveMeasure, xi: f64, tau: f64) -> bool {
    let p = m.p();
    let lower = 3f64.powf(1.0 - p) * xi.abs().powf(p);
    let margin = FOLD_TOLERANCE * tau.abs().max(1.0);
    if !(tau - lower > margin) {
        return false;
    }
    !m.is_half_line() || (xi > 0.0 && xi.powf(p) - tau > margin)
}

/// Local exponent worth mapping away: any non-integer power.
pub(crate) fn cusp(e: f64) -> Option<f64> {
    if e.fract() != 0.0 {
        Some(e)
    } else {
        None
    }
}

/// Power of t used for x − end = t^n near a |x − end|^e cusp, chosen so
/// the mapped integrand behaves like t^{n(1+e)−1} with exponent at least 3.
fn cusp_power(e: f64) -> i32 {
    (4.0 / (1.0 + e)).ceil().clamp(2.0, 24.0) as i32
}

/// ∫ h over [lo, hi] where h may carry a |x − end|^e factor at either end;
/// each such half is mapped by x − end = t^n.
pub(crate) fn integrate_piece<F: FnMut(f64) -> f64>(
    integrator: &Integrator,
    mut h: F,
    lo: f64,
    hi: f64,
    e_lo: Option<f64>,
    e_hi: Option<f64>,
) -> Result<(f64, f64)> {
    if !(hi > lo) {
        return Ok((0.0, 0.0));
    }
    let mid = 0.5 * (lo + hi);
    let mut total = 0.0;
    let mut err = 0.0;
    for (end, toward, e) in [(lo, 1.0, e_lo), (hi, -1.0, e_hi)] {
        let est = match e {
            Some(e) => {
                let n = cusp_power(e);
                let nf = n as f64;
                integrator.integrate(
                    |t: f64| {
                        let step = t.powi(n);
                        let scale = end.abs().max(1.0);
                        // Within rounding of the cut the mapped weight has
                        // already vanished, while the cusp factor itself may
                        // be evaluated at exactly zero.
                        if step <= 64.0 * f64::EPSILON * scale {
                            return 0.0;
                        }
                        let v = h(end + toward * step);
                        if !v.is_finite() && step <= 1e-9 * scale {
                            0.0
                        } else {
                            v * nf * t.powi(n - 1)
                        }
                    },
                    0.0,
                    (0.5 * (hi - lo)).powf(1.0 / nf),
                )?
            }
            None => integrator.integrate(&mut h, end.min(mid), end.max(mid))?,
        };
        total += est.value;
        err += est.abs_error;
    }
    Ok((total, err))
}

/// |x+d|^p − |x|^p, accurate when d is small against x.
fn psi_step(p: f64, x: f64, d: f64) -> f64 {
    let t = d / x;
    if x != 0.0 && t > -1.0 {
        x.abs().powf(p) * (p * t.ln_1p()).exp_m1()
    } else {
        (x + d).abs().powf(p) - x.abs().powf(p)
    }
}

/// Root of a monotone function on [lo, hi] given with its derivative.
fn monotone_root<F: FnMut(f64) -> (f64, f64)>(f: F, lo: f64, hi: f64) -> Result<f64> {
    newton_bisect(f, lo, hi, 1e-16, 400)
}

/// (wν∗wν∗wν)(ξ, τ) for w the density of `m`.
///
/// The odd curve is supported only through half-line measures, on which
/// it coincides with the even one.
pub fn triple_density(m: &CurveMeasure, xi: f64, tau: f64) -> Result<DensityPoint> {
    if !xi.is_finite() || !tau.is_finite() {
        return domain(format!("non-finite point ({xi}, {tau})"));
    }
    if m.curve().parity() == Parity::Odd && !m.is_half_line() {
        return domain("3-fold densities on the odd curve need a half-line measure");
    }
    if !in_triple_support(m, xi, tau) {
        return Err(Error::Boundary { u: xi, v: tau });
    }
    let p = m.p();
    let curve = CurveFamily::even(p)?;
    let psi = |y: f64| y.abs().powf(p);
    let dpsi = |y: f64| curve.dpsi(y);

    // G(y) = τ − ψ(y) − 2ψ((ξ−y)/2) is concave with its top at ξ/3.
    let top = xi / 3.0;
    let reach = tau.powf(1.0 / p) + xi.abs() + 1.0;
    let g = |y: f64| {
        (
            tau - psi(y) - 2.0 * psi(0.5 * (xi - y)),
            -dpsi(y) + dpsi(0.5 * (xi - y)),
        )
    };
    let a = monotone_root(g, top - reach, top)?;
    let b = monotone_root(g, top, top + reach)?;
    let centre = 0.5 * (a + b);
    let radius = 0.5 * (b - a);

    // D(y) = ψ(y) + ψ(ξ−y) − τ vanishes where a partner point hits 0.
    let d = |y: f64| (psi(y) + psi(xi - y) - tau, dpsi(y) - dpsi(xi - y));
    let half = 0.5 * xi;
    let mut zero_partner = Vec::new();
    if d(half).0 < 0.0 {
        let span = reach + xi.abs();
        zero_partner.push(monotone_root(d, half - span, half)?);
        zero_partner.push(monotone_root(d, half, half + span)?);
    }

    // Sub-intervals of [a, b] in y, each with its singular ends.
    let beta = m.total_power();
    let singular = cusp(beta);
    let mut cuts: Vec<(f64, bool)> = vec![(a, false), (b, false)];
    let mut push = |y: f64| {
        if y > a && y < b {
            cuts.push((y, true));
        }
    };
    push(0.0);
    for &z in &zero_partner {
        push(z);
    }
    if m.is_half_line() {
        push(xi);
    }
    cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
    cuts.dedup_by(|x, y| x.0 == y.0);

    let valid = |y: f64| {
        if !m.is_half_line() {
            return true;
        }
        // y, y₂, y₃ ≥ 0 means y ∈ [0, ξ] and D(y) ≥ 0.
        y >= 0.0 && y <= xi && psi(y) + psi(xi - y) >= tau
    };

    let failure: Cell<Option<Error>> = Cell::new(None);
    // The height above the fold is measured from the nearer end, where it
    // vanishes; the differences of ψ are taken without cancellation.
    let (lo_end, hi_end) = (centre - radius, centre + radius);
    let point = |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let (end, d) = if theta >= 0.0 {
            (hi_end, -radius * cos * cos / (1.0 + sin))
        } else {
            (lo_end, radius * cos * cos / (1.0 - sin))
        };
        let y = end + d;
        let gap = -psi_step(p, end, d) - 2.0 * psi_step(p, 0.5 * (xi - end), -0.5 * d);
        solve_even_from_gap(p, xi - y, gap).map(|s| {
            let (y2, y3) = s.points();
            2.0 * m.density(y) * m.density(y2) * m.density(y3) * s.jacobian * radius * cos
        })
    };
    let integrand = |theta: f64| {
        let mut t = theta;
        // Nodes within rounding of θ = ±π/2 can land past the fold; the
        // integrand is smooth there, so step inward until it is defined.
        for k in 0..60 {
            match point(t) {
                Ok(v) => return v,
                Err(Error::Boundary { .. }) => t = theta - theta.signum() * 1e-9 * 2f64.powi(k),
                Err(e) => {
                    failure.set(Some(e));
                    return 0.0;
                }
            }
        }
        0.0
    };

    let to_theta = |y: f64| ((y - centre) / radius).clamp(-1.0, 1.0).asin();
    let integrator = Integrator::new(DENSITY_REL_TOL).with_max_segments(2000);
    let mut value = 0.0;
    let mut abs_error = 0.0;
    for w in cuts.windows(2) {
        let (lo, lo_cut) = w[0];
        let (hi, hi_cut) = w[1];
        if !valid(0.5 * (lo + hi)) {
            continue;
        }
        let (t_lo, t_hi) = if lo == a && hi == b {
            (-FRAC_PI_2, FRAC_PI_2)
        } else {
            (
                if lo == a { -FRAC_PI_2 } else { to_theta(lo) },
                if hi == b { FRAC_PI_2 } else { to_theta(hi) },
            )
        };
        let (v, e) = integrate_piece(
            &integrator,
            integrand,
            t_lo,
            t_hi,
            if lo_cut { singular } else { None },
            if hi_cut { singular } else { None },
        )?;
        value += v;
        abs_error += e;
    }
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let continuity_guaranteed =
        m.is_half_line() || p >= 2.0 || tau < 2f64.powf(1.0 - p) * xi.abs().powf(p);
    Ok(DensityPoint {
        xi,
        tau,
        value,
        abs_error,
        continuity_guaranteed,
    })
}

/// The natural 3-fold weight |y|^{(p−2)/3} on the even curve.
pub fn natural_measure(p: f64) -> Result<CurveMeasure> {
    CurveMeasure::weighted(CurveFamily::even(p)?, (p - 2.0) / 3.0)
}

/// Natural 3-fold density at (ξ, 3^{1−p}|ξ|^p·(1+ε)), just inside the
/// lower boundary of the support.
pub fn boundary_value(p: f64, xi: f64, eps: f64) -> Result<f64> {
    if xi == 0.0 || !(eps > 0.0) {
        return domain(format!("need ξ ≠ 0 and ε > 0, got ξ = {xi}, ε = {eps}"));
    }
    let m = natural_measure(p)?;
    let tau = 3f64.powf(1.0 - p) * xi.abs().powf(p) * (1.0 + eps);
    Ok(triple_density(&m, xi, tau)?.value)
}

/// Boundary values at two offsets and their linear extrapolation to ε = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLimit {
    pub p: f64,
    pub xi: f64,
    pub eps: [f64; 2],
    pub values: [f64; 2],
    pub extrapolated: f64,
    /// 2π/(√3p(p−1)).
    pub expected: f64,
}

impl BoundaryLimit {
    pub fn rel_error(&self) -> f64 {
        ((self.extrapolated - self.expected) / self.expected).abs()
    }
}

/// Richardson extrapolation of [`boundary_value`] from two offsets.
pub fn boundary_limit(p: f64, xi: f64, eps: [f64; 2]) -> Result<BoundaryLimit> {
    if eps[0] == eps[1] {
        return domain("extrapolation needs two distinct offsets");
    }
    let values = [boundary_value(p, xi, eps[0])?, boundary_value(p, xi, eps[1])?];
    let extrapolated = (eps[0] * values[1] - eps[1] * values[0]) / (eps[0] - eps[1]);
    Ok(BoundaryLimit {
        p,
        xi,
        eps,
        values,
        extrapolated,
        expected: crate::curve::threshold(p, Parity::Even),
    })
}

/// The natural 3-fold density on the slice τ = 1, ξ = 3^{1−1/p}·t.
pub fn triple_slice(p: f64, points: &[f64]) -> Result<DensityGrid> {
    let m = natural_measure(p)?;
    let scale = 3f64.powf(1.0 - 1.0 / p);
    let mut grid = DensityGrid::new(3, Slice::Segment { tau: 1.0, xi_scale: scale }, &["t"]);
    for &t in points {
        grid.push(vec![t], triple_density(&m, scale * t, 1.0)?.value);
    }
    Ok(grid)
}
