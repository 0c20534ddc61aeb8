//! One function per subcommand; each returns the text to emit.

use std::f64::consts::PI;

use serde::Serialize;
use sharpext_core::bounds::{MomentVector, MAX_ORDER};
use sharpext_core::odd::{odd_bound_on_grid, DEFAULT_A_GRID, DEFAULT_SCAN_LAMBDAS};
use sharpext_core::oracle::MAX_GRID_SIZE;
use sharpext_core::{
    bilinear_decay, boundary_limit, conjecture_scan, critical_exponent, gamma_ratio_bound,
    legendre_coefficients, natural_measure, profile, series_bound, threshold, triple_density,
    triple_norm_ratio, CurveFamily, CurveMeasure, Parity, TrialFunction,
};

use crate::error::{invalid, CliError, CliResult};
use crate::output::{csv, json, Format, Provenance, Tagged};

pub fn check_p(p: f64) -> CliResult<()> {
    if !(p > 1.0) || !p.is_finite() {
        return invalid(format!("--p must be a finite number > 1, got {p}"));
    }
    Ok(())
}

pub fn check_a(p: f64, a: f64) -> CliResult<()> {
    let floor = -(p + 1.0) / 6.0;
    if !(a > floor) || !a.is_finite() {
        return invalid(format!("--a must exceed -(p+1)/6 = {floor}, got {a}"));
    }
    Ok(())
}

pub fn check_order(n: usize) -> CliResult<()> {
    if n > MAX_ORDER {
        return invalid(format!("--N must be at most {MAX_ORDER}, got {n}"));
    }
    Ok(())
}

pub fn check_grid(g: usize) -> CliResult<()> {
    if g > MAX_GRID_SIZE {
        return invalid(format!("--grid-size must be at most {MAX_GRID_SIZE}, got {g}"));
    }
    Ok(())
}

fn only_json(format: Format, command: &str) -> CliResult<()> {
    if format != Format::Json {
        return invalid(format!("{command} only emits JSON"));
    }
    Ok(())
}

pub fn bound(p: f64, a: f64, order: usize, format: Format) -> CliResult<String> {
    check_p(p)?;
    check_a(p, a)?;
    check_order(order)?;
    only_json(format, "bound")?;
    let report = series_bound(p, a, order)?;
    json(&Tagged { provenance: Provenance::Derived, body: report })
}

pub fn critical(a: f64, order: usize, lo: f64, hi: f64, format: Format) -> CliResult<String> {
    check_order(order)?;
    if !(lo > 1.0) || !(hi > lo) || !hi.is_finite() {
        return invalid(format!("need 1 < --lo < --hi, got [{lo}, {hi}]"));
    }
    check_a(lo, a)?;
    only_json(format, "critical")?;
    let report = critical_exponent(a, order, lo, hi)?;
    json(&Tagged { provenance: Provenance::Derived, body: report })
}

pub fn profile_table(p: f64, a: f64, order: usize, points: usize, format: Format) -> CliResult<String> {
    check_p(p)?;
    check_a(p, a)?;
    check_order(order)?;
    if points == 0 {
        return invalid("--points must be positive");
    }
    let ts: Vec<f64> = if points == 1 {
        vec![0.0]
    } else {
        (0..points).map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64).collect()
    };
    let grid = profile(p, a, order, &ts)?;
    match format {
        Format::Csv => Ok(grid.to_csv_string()),
        Format::Json => json(&Tagged { provenance: Provenance::Derived, body: grid }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleCheck {
    Homogeneity,
    Boundary,
    Series,
    Bilinear,
}

#[derive(Serialize)]
struct CheckResult {
    check: &'static str,
    achieved: f64,
    tolerance: f64,
    pass: bool,
    provenance: Provenance,
    note: String,
}

#[derive(Serialize)]
struct OracleReport {
    p: f64,
    checks: Vec<CheckResult>,
    all_pass: bool,
}

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

fn run_check(p: f64, check: OracleCheck) -> CliResult<CheckResult> {
    Ok(match check {
        OracleCheck::Homogeneity => {
            let m = natural_measure(p)?;
            let mut worst = 0.0f64;
            for (xi, tau) in [(0.4, 1.0), (-1.1, 1.3)] {
                let base = triple_density(&m, xi, tau)?.value;
                for lambda in [0.5, 2.0, 10.0] {
                    let scaled = triple_density(&m, lambda * xi, lambda.powf(p) * tau)?.value;
                    worst = worst.max(rel(scaled, base));
                }
            }
            CheckResult {
                check: "homogeneity",
                achieved: worst,
                tolerance: 1e-6,
                pass: worst <= 1e-6,
                provenance: Provenance::Published,
                note: "max relative change of the 3-fold density under (ξ,τ) ↦ (λξ, λ^pτ)".into(),
            }
        }
        OracleCheck::Boundary => {
            let lim = boundary_limit(p, 1.0, [1e-2, 1e-3])?;
            CheckResult {
                check: "boundary",
                achieved: lim.rel_error(),
                tolerance: 0.01,
                pass: lim.rel_error() < 0.01,
                provenance: Provenance::Published,
                note: format!("extrapolated {} vs 2π/(√3p(p−1)) = {}", lim.extrapolated, lim.expected),
            }
        }
        OracleCheck::Series => {
            let m = CurveMeasure::sigma(CurveFamily::even(p)?)?.with_trial(TrialFunction::natural(p)?)?;
            let got = triple_norm_ratio(&m)?.value;
            let want = series_bound(p, 0.0, 15)?.partial_sum;
            CheckResult {
                check: "series",
                achieved: rel(got, want),
                tolerance: 5e-3,
                pass: rel(got, want) <= 5e-3,
                provenance: Provenance::Derived,
                note: format!("quadrature {got} vs series of order 15 {want}"),
            }
        }
        OracleCheck::Bilinear => {
            let values = [2, 4, 6]
                .iter()
                .map(|&k| bilinear_decay(p, 0, -k))
                .collect::<Result<Vec<_>, _>>()?;
            let worst = values
                .windows(2)
                .map(|w| (w[1] / w[0]).sqrt())
                .fold(0.0f64, f64::max);
            let cap = 2f64.powf(-(p - 1.0) / 6.0) * 1.15;
            CheckResult {
                check: "bilinear",
                achieved: worst,
                tolerance: cap,
                pass: worst <= cap,
                provenance: Provenance::Published,
                note: "largest per-scale decay factor over separations 2, 4, 6".into(),
            }
        }
    })
}

/// Runs the requested checks (all of them when none is given). The
/// report is returned together with whether every check passed.
pub fn oracle(p: f64, checks: &[OracleCheck], format: Format) -> CliResult<(String, bool)> {
    check_p(p)?;
    only_json(format, "oracle")?;
    let all = [
        OracleCheck::Homogeneity,
        OracleCheck::Boundary,
        OracleCheck::Series,
        OracleCheck::Bilinear,
    ];
    let chosen = if checks.is_empty() { &all[..] } else { checks };
    let results = chosen
        .iter()
        .map(|&c| run_check(p, c))
        .collect::<CliResult<Vec<_>>>()?;
    let all_pass = results.iter().all(|r| r.pass);
    let text = json(&OracleReport { p, checks: results, all_pass })?;
    Ok((text, all_pass))
}

pub fn odd(
    p: f64,
    lambda: Option<f64>,
    scan: bool,
    a_values: &[f64],
    grid_size: usize,
    format: Format,
) -> CliResult<String> {
    check_p(p)?;
    check_grid(grid_size)?;
    if let Some(l) = lambda {
        if !(l > 0.0) || !l.is_finite() {
            return invalid(format!("--lambda must be positive, got {l}"));
        }
    }
    if scan {
        let lambdas: Vec<f64> = lambda.map_or_else(|| DEFAULT_SCAN_LAMBDAS.to_vec(), |l| vec![l]);
        let a_grid: &[f64] = if a_values.is_empty() { &DEFAULT_A_GRID } else { a_values };
        for &a in a_grid {
            check_a(p, a)?;
        }
        let table = conjecture_scan(&[p], &lambdas, a_grid)?;
        return match format {
            Format::Csv => Ok(csv(
                &["p", "lambda", "a", "A", "B", "bound", "threshold", "margin"],
                table.rows.iter().map(|r| {
                    vec![r.p, r.lambda, r.a, r.big_a, r.big_b, r.bound, r.threshold, r.margin]
                }),
            )),
            Format::Json => json(&Tagged { provenance: Provenance::Derived, body: table }),
        };
    }
    let Some(lambda) = lambda else {
        return invalid("odd needs --lambda unless --scan is given");
    };
    only_json(format, "odd without --scan")?;
    let report = odd_bound_on_grid(p, lambda, grid_size)?;
    json(&Tagged { provenance: Provenance::Derived, body: report })
}

#[derive(Serialize)]
struct Headline {
    name: &'static str,
    value: f64,
    expected: f64,
    tolerance: f64,
    pass: bool,
    provenance: Provenance,
}

#[derive(Serialize)]
struct Report {
    numbers: Vec<Headline>,
    all_pass: bool,
}

fn headline(
    name: &'static str,
    value: f64,
    expected: f64,
    tolerance: f64,
    provenance: Provenance,
) -> Headline {
    Headline {
        name,
        value,
        expected,
        tolerance,
        pass: (value - expected).abs() <= tolerance,
        provenance,
    }
}

/// The headline numbers with pass flags; the flag says whether all passed.
pub fn report(format: Format) -> CliResult<(String, bool)> {
    only_json(format, "report")?;
    let pi_sqrt3 = PI / 3f64.sqrt();
    let p0 = critical_exponent(0.0, 15, 4.0, 5.5)?.p_star;
    let p1 = critical_exponent(7.0 / 15.0, 15, 4.0, 6.0)?.p_star;
    let parabola = series_bound(2.0, 0.0, 15)?;
    let c = legendre_coefficients(&MomentVector::new(2.0, 0.0, 10)?)?;
    let c_ratio = c[1..].iter().map(|x| x.abs()).fold(0.0, f64::max) / c[0];
    let first = series_bound(3.0, 0.0, 0)?.partial_sum;
    let gamma_ratio = gamma_ratio_bound(3.0)?;
    let numbers = vec![
        headline("p0", p0, 4.803, 1e-3, Provenance::Published),
        headline("p1", p1, 5.485, 1e-3, Provenance::Published),
        headline("parabola_series_bound", parabola.partial_sum, pi_sqrt3, 1e-10, Provenance::Published),
        headline("parabola_margin", parabola.margin, 0.0, 1e-10, Provenance::Published),
        headline("parabola_legendre_ratio", c_ratio, 0.0, 1e-9, Provenance::Derived),
        headline("first_term_gamma_ratio_p3", first, gamma_ratio, 1e-11 * gamma_ratio, Provenance::Derived),
        headline("even_threshold_p2", threshold(2.0, Parity::Even), pi_sqrt3, 1e-15, Provenance::Trivial),
        headline(
            "odd_threshold_p3",
            threshold(3.0, Parity::Odd),
            5.0 * PI / (3f64.sqrt() * 6.0),
            1e-15,
            Provenance::Trivial,
        ),
    ];
    let all_pass = numbers.iter().all(|n| n.pass);
    Ok((json(&Report { numbers, all_pass })?, all_pass))
}

pub fn tolerance_failure(what: &str) -> CliError {
    CliError::Tolerance(format!("{what}: at least one check missed its tolerance"))
}
