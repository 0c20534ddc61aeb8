//! Adaptive Gauss–Kronrod quadrature.
//!
//! Global adaptive bisection driven by the 21-point Kronrod rule, with the
//! QUADPACK error heuristic. Callers handle endpoint singularities by
//! substitution before integrating; the helpers at the bottom of this module
//! cover the two patterns that recur in this crate (power-law weights at the
//! origin and Laplace-type peaks on a half-line).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Estimate {
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_error
        } else {
            self.abs_error / self.value.abs()
        }
    }

    /// Turns a non-converged estimate into an error unless its relative
    /// error is still below `rel_limit`.
    pub fn require(self, rel_limit: f64) -> Result<Self> {
        if self.converged || self.rel_error() <= rel_limit {
            Ok(self)
        } else {
            Err(Error::Quadrature {
                value: self.value,
                error_estimate: self.abs_error,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite(x))
        }
    };

    let fc = eval(center)?;
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = eval(center - x)?;
        let f2 = eval(center + x)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let h = half.abs();
    Ok((res_k * half, rescale_error(err, res_abs * h, res_asc * h)))
}

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_segments: 500,
        }
    }
}

impl Integrator {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_segments(mut self, n: usize) -> Self {
        self.max_segments = n;
        self
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, starting from the
    /// partition given by `points`. The points must be sorted; degenerate
    /// pieces are dropped.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        points: &[f64],
    ) -> Result<Estimate> {
        if points.len() < 2 {
            return Ok(Estimate {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 0,
                converged: true,
            });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain(format!(
                "integration limits must be finite, got {points:?}"
            )));
        }

        let mut heap = BinaryHeap::new();
        let mut evaluations = 0;
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let (value, error) = kronrod21(&mut f, a, b)?;
            evaluations += 21;
            heap.push(Segment { a, b, value, error });
        }

        loop {
            let total: CompensatedSum = heap.iter().map(|s| s.value).collect();
            let total = total.value();
            let err: f64 = heap.iter().map(|s| s.error).sum();
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= tol {
                return Ok(Estimate {
                    value: total,
                    abs_error: err,
                    evaluations,
                    converged: true,
                });
            }
            if heap.len() >= self.max_segments {
                return Ok(Estimate {
                    value: total,
                    abs_error: err,
                    evaluations,
                    converged: false,
                });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => unreachable!("heap holds at least one segment"),
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval exhausted at machine resolution.
                heap.push(Segment { error: 0.0, ..worst });
                let total: CompensatedSum = heap.iter().map(|s| s.value).collect();
                let err: f64 = heap.iter().map(|s| s.error).sum::<f64>() + worst.error;
                return Ok(Estimate {
                    value: total.value(),
                    abs_error: err,
                    evaluations,
                    converged: false,
                });
            }
            let (v1, e1) = kronrod21(&mut f, worst.a, mid)?;
            let (v2, e2) = kronrod21(&mut f, mid, worst.b)?;
            evaluations += 42;
            heap.push(Segment {
                a: worst.a,
                b: mid,
                value: v1,
                error: e1,
            });
            heap.push(Segment {
                a: mid,
                b: worst.b,
                value: v2,
                error: e2,
            });
        }
    }

    /// `∫_a^∞ f`, for integrands that decay at least exponentially.
    ///
    /// Panels of doubling width starting at `step` are added until the
    /// integrand has dropped below `1e-18` of the largest value seen and the
    /// last panel contributes nothing at that relative level.
    pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        step: f64,
    ) -> Result<Estimate> {
        if !(step > 0.0) {
            return Err(Error::Domain(format!("panel step must be positive, got {step}")));
        }
        let mut total = CompensatedSum::new();
        let mut abs_error = 0.0;
        let mut evaluations = 0;
        let mut converged = true;
        let mut peak = f(a).abs();
        let mut lo = a;
        let mut width = step;
        for _ in 0..200 {
            let hi = lo + width;
            let piece = self.integrate(&mut f, lo, hi)?;
            total.add(piece.value);
            abs_error += piece.abs_error;
            evaluations += piece.evaluations;
            converged &= piece.converged;
            let end = f(hi).abs();
            peak = peak.max(end).max(piece.value.abs() / width);
            let running = total.value().abs();
            if end <= 1e-18 * peak && piece.value.abs() <= 1e-18 * running.max(f64::MIN_POSITIVE) {
                return Ok(Estimate {
                    value: total.value(),
                    abs_error,
                    evaluations,
                    converged,
                });
            }
            if end == 0.0 && piece.value == 0.0 && running > 0.0 {
                return Ok(Estimate {
                    value: total.value(),
                    abs_error,
                    evaluations,
                    converged,
                });
            }
            lo = hi;
            width *= 2.0;
        }
        Err(Error::Divergence(format!(
            "tail of integrand starting at {a} did not decay"
        )))
    }
}

/// `∫_0^b y^e g(y) dy` for `e > -1`, with the power singularity at the
/// origin removed by `y = u^{1/(1+e)}`, which turns `y^e dy` into
/// `du / (1+e)`.
pub fn integrate_power_weight<F: FnMut(f64) -> f64>(
    integrator: &Integrator,
    mut g: F,
    exponent: f64,
    b: f64,
) -> Result<Estimate> {
    if !(exponent > -1.0) {
        return Err(Error::Divergence(format!(
            "y^{exponent} is not integrable at the origin"
        )));
    }
    if b <= 0.0 {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let k = 1.0 + exponent;
    let mut est = integrator.integrate(|u: f64| g(u.powf(1.0 / k)), 0.0, b.powf(k))?;
    est.value /= k;
    est.abs_error /= k;
    Ok(est)
}

/// Breakpoints `center ± m·width` for a peaked integrand, clipped to
/// `[lo, hi]` and returned sorted with the endpoints included.
pub fn peak_breaks(lo: f64, hi: f64, center: f64, width: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    if width > 0.0 && width.is_finite() {
        for m in [0.0, 1.0, 3.0, 8.0, 20.0] {
            for c in [center - m * width, center + m * width] {
                if c > lo && c < hi {
                    pts.push(c);
                }
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
