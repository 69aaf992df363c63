//! Positive roots r_n of B1(R1 r) = J1(R1 r) Y1(R2 r) - J1(R2 r) Y1(R1 r).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{j0, j1, y0, y1};

/// Oversampling of the asymptotic root spacing used by the sign-change scan.
pub const SCAN_OVERSAMPLE: f64 = 40.0;

/// Roots of B1(R1 r) for one annulus, in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSet {
    pub r1: f64,
    pub r2: f64,
    pub roots: Vec<f64>,
    /// |B1(R1 r_n)| per root; `None` for the n pi / (R2 - R1) approximation.
    pub residuals: Option<Vec<f64>>,
}

impl EigenvalueSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.residuals.is_some()
    }

    pub fn spacing(&self) -> f64 {
        PI / (self.r2 - self.r1)
    }

    /// The first `n` roots (or all, if fewer are stored).
    pub fn truncated(&self, n: usize) -> EigenvalueSet {
        let n = n.min(self.roots.len());
        EigenvalueSet {
            r1: self.r1,
            r2: self.r2,
            roots: self.roots[..n].to_vec(),
            residuals: self.residuals.as_ref().map(|r| r[..n].to_vec()),
        }
    }
}

/// B1(R1 r) as a function of r, with both Bessel arguments moving.
pub fn characteristic(r1: f64, r2: f64, r: f64) -> f64 {
    let (a, b) = (r1 * r, r2 * r);
    j1(a) * y1(b) - j1(b) * y1(a)
}

fn characteristic_derivative(r1: f64, r2: f64, r: f64) -> f64 {
    let (a, b) = (r1 * r, r2 * r);
    let (ja, jb, ya, yb) = (j1(a), j1(b), y1(a), y1(b));
    let dja = j0(a) - ja / a;
    let djb = j0(b) - jb / b;
    let dya = y0(a) - ya / a;
    let dyb = y0(b) - yb / b;
    r1 * dja * yb + r2 * ja * dyb - r2 * djb * ya - r1 * jb * dya
}

fn check_radii(r1: f64, r2: f64) -> Result<()> {
    if !(r1 > 0.0 && r1.is_finite() && r2.is_finite()) || r1 >= r2 {
        return Err(Error::Geometry(format!(
            "require 0 < R1 < R2, got R1 = {r1}, R2 = {r2}"
        )));
    }
    Ok(())
}

/// Locates the first `n_max` roots by a sign-change scan followed by
/// bisection and a bracketed Newton polish.
pub fn find_roots(r1: f64, r2: f64, n_max: usize) -> Result<EigenvalueSet> {
    check_radii(r1, r2)?;
    if n_max == 0 {
        return Err(Error::domain("find_roots", "n_max must be at least 1"));
    }
    let spacing = PI / (r2 - r1);
    let step = spacing / SCAN_OVERSAMPLE;
    let f = |r: f64| characteristic(r1, r2, r);

    let mut roots = Vec::with_capacity(n_max);
    let mut residuals = Vec::with_capacity(n_max);
    let mut lo = step;
    let mut f_lo = f(lo);
    let mut i = 1usize;
    while roots.len() < n_max {
        let n = roots.len() + 1;
        let guard_hi = 1.4 * n as f64 * spacing + spacing;
        if lo > guard_hi {
            return Err(Error::RootScan {
                n,
                detail: format!("no sign change of B1(R1 r) found below r = {guard_hi:.6}"),
            });
        }
        i += 1;
        let hi = i as f64 * step;
        let f_hi = f(hi);
        if f_lo == 0.0 {
            roots.push(lo);
            residuals.push(0.0);
        } else if f_lo * f_hi < 0.0 {
            let root = refine(r1, r2, lo, hi, f_lo);
            let approx = n as f64 * spacing;
            if (root - approx).abs() > 0.4 * approx {
                return Err(Error::RootScan {
                    n,
                    detail: format!(
                        "root {root:.6} is not within 40% of n pi / (R2 - R1) = {approx:.6}"
                    ),
                });
            }
            roots.push(root);
            residuals.push(f(root).abs());
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(EigenvalueSet {
        r1,
        r2,
        roots,
        residuals: Some(residuals),
    })
}

fn refine(r1: f64, r2: f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    let f = |r: f64| characteristic(r1, r2, r);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let dfx = characteristic_derivative(r1, r2, x);
        let mut next = x - fx / dfx;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 2.0 * f64::EPSILON * x {
            x = next;
            break;
        }
        x = next;
    }
    x
}

/// r_n = n pi / (R2 - R1), the large-n approximation to the roots.
pub fn approximate_roots(r1: f64, r2: f64, n_max: usize) -> Result<EigenvalueSet> {
    check_radii(r1, r2)?;
    let spacing = PI / (r2 - r1);
    Ok(EigenvalueSet {
        r1,
        r2,
        roots: (1..=n_max).map(|n| n as f64 * spacing).collect(),
        residuals: None,
    })
}

/// Sign changes of B1(R1 r) over (0, r_max] found by a scan of the given
/// step that do not bracket any root in `set`. Used as a completeness check.
pub fn unmatched_sign_changes(set: &EigenvalueSet, step: f64, r_max: f64) -> Vec<(f64, f64)> {
    let f = |r: f64| characteristic(set.r1, set.r2, r);
    let mut missing = Vec::new();
    let mut lo = step;
    let mut f_lo = f(lo);
    let mut i = 1usize;
    while lo < r_max {
        i += 1;
        let hi = i as f64 * step;
        let f_hi = f(hi);
        if f_lo * f_hi < 0.0 && !set.roots.iter().any(|&r| r >= lo && r <= hi) {
            missing.push((lo, hi));
        }
        lo = hi;
        f_lo = f_hi;
    }
    missing
}
