//! The odd-curve scan for p ≥ 2 with the a-weighted half-line trials.

use sharpext_core::odd::{DEFAULT_A_GRID, DEFAULT_SCAN_LAMBDAS};
use sharpext_core::{conjecture_scan, threshold, Parity};

#[test]
fn cubic_margins_are_negative() {
    let table = conjecture_scan(&[3.0], &DEFAULT_SCAN_LAMBDAS, &DEFAULT_A_GRID).unwrap();
    for row in &table.rows {
        println!("p = 3, a = {}: margin {:+.6e}", row.a, row.margin);
        assert!(row.margin < 0.0, "{row:?}");
    }
}

#[test]
fn parabola_best_margin_is_just_below_threshold() {
    let table = conjecture_scan(&[2.0], &DEFAULT_SCAN_LAMBDAS, &DEFAULT_A_GRID).unwrap();
    for row in &table.rows {
        println!("p = 2, a = {}: A = {:.9}, B = {:.7}, margin {:+.6e}", row.a, row.big_a, row.big_b, row.margin);
    }
    let best = &table.best[0];
    let t = threshold(2.0, Parity::Odd);
    assert!(best.margin > -0.15 * t, "{best:?}");
    assert!(best.margin < 0.0, "best margin is positive: {best:?}");
}
