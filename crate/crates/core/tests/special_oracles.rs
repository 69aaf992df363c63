use std::f64::consts::PI;

use proptest::prelude::*;
use sgflow::special::{cross_b, cross_b1, g_function, y0, y1, GFunctionArgs};
use sgflow::transform::invert_stehfest;
use sgflow::SeriesControls;

const EULER: f64 = 0.577_215_664_901_532_9;

/// Ascending series of J0, J1, Y0, Y1; accurate to ~1e-15 for x <= 5.
fn series(x: f64) -> [f64; 4] {
    let z = x * x / 4.0;
    let (mut j0, mut j1, mut s0, mut s1) = (0.0, 0.0, 0.0, 0.0);
    let mut a = 1.0; // z^k / (k!)^2
    let mut h = 0.0; // harmonic number H_k
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            a *= z / (kf * kf);
            h += 1.0 / kf;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let h1 = h + 1.0 / (kf + 1.0);
        j0 += sign * a;
        j1 += sign * a * (x / 2.0) / (kf + 1.0);
        s0 -= sign * h * a;
        // psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma.
        s1 += sign * (h + h1 - 2.0 * EULER) * a * (x / 2.0) / (kf + 1.0);
    }
    let log = (x / 2.0).ln() + EULER;
    let y0 = 2.0 / PI * (log * j0 + s0);
    let y1 = -2.0 / (PI * x) + 2.0 / PI * ((x / 2.0).ln() * j1) - s1 / PI;
    [j0, j1, y0, y1]
}

#[test]
fn series_oracle_reproduces_tabulated_values() {
    let [j0, j1, y0_, y1_] = series(1.0);
    assert!((j0 - 0.765_197_686_557_966_6).abs() < 1e-15);
    assert!((j1 - 0.440_050_585_744_933_5).abs() < 1e-15);
    assert!((y0_ - 0.088_256_964_215_676_96).abs() < 1e-14);
    assert!((y1_ + 0.781_212_821_300_288_7).abs() < 1e-14);
    assert!((y0(1.0) - y0_).abs() < 1e-14 && (y1(1.0) - y1_).abs() < 1e-14);
}

#[test]
fn cross_products_match_the_series_oracle() {
    let (a, b) = (series(2.5), series(4.0));
    let b1 = a[1] * b[3] - b[1] * a[3];
    assert!((cross_b1(2.5, 1.0, 4.0).unwrap() - b1).abs() < 1e-10);
    let (a, b) = (series(1.0), series(4.0));
    let b0 = a[0] * b[3] - b[1] * a[2];
    assert!((cross_b(1.0, 1.0, 4.0).unwrap() - b0).abs() < 1e-10);
}

#[test]
fn g_function_matches_stehfest_inversion() {
    let args = GFunctionArgs { a: 0.5, b: -1.5, c: 1.0, d: -1.0, t: 1.0 };
    let g = g_function(args, &SeriesControls::default()).unwrap();
    let oracle = invert_stehfest(|q| q.powf(-1.5) / (q.sqrt() + 1.0), 1.0, 16).unwrap();
    assert!(((g - oracle) / oracle).abs() < 1e-6, "{g} vs {oracle}");
}

proptest! {
    #[test]
    fn cross_b1_vanishes_at_the_outer_wall(rn in 0.05f64..200.0, r2 in 1.5f64..10.0) {
        let scale = (sgflow::special::j1(r2 * rn) * y1(r2 * rn)).abs().max(f64::MIN_POSITIVE);
        prop_assert!(cross_b1(r2, rn, r2).unwrap().abs() <= 1e-14 * scale);
    }
}
