use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
}

/// Bessel function of the first or second kind, order 0 or 1.
///
/// Backed by the `libm` port of the FreeBSD msun routines, which are accurate
/// to a few ulp away from zeros and to ~1e-16 absolute everywhere.
pub fn bessel(kind: BesselKind, order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("bessel", format!("non-finite argument {x}")));
    }
    match kind {
        BesselKind::J if x < 0.0 => {
            return Err(Error::domain("bessel", format!("J requires x >= 0, got {x}")))
        }
        BesselKind::Y if x <= 0.0 => {
            return Err(Error::domain("bessel", format!("Y requires x > 0, got {x}")))
        }
        _ => {}
    }
    match (kind, order) {
        (BesselKind::J, 0) => Ok(j0(x)),
        (BesselKind::J, 1) => Ok(j1(x)),
        (BesselKind::Y, 0) => Ok(y0(x)),
        (BesselKind::Y, 1) => Ok(y1(x)),
        _ => Err(Error::domain(
            "bessel",
            format!("only orders 0 and 1 are supported, got {order}"),
        )),
    }
}

#[inline]
pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}

#[inline]
pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}

#[inline]
pub fn y0(x: f64) -> f64 {
    libm::y0(x)
}

#[inline]
pub fn y1(x: f64) -> f64 {
    libm::y1(x)
}

fn check_cross_args(function: &'static str, r: f64, rn: f64, r2: f64) -> Result<()> {
    if r > 0.0 && rn > 0.0 && r2 > 0.0 && (r * rn).is_finite() && (r2 * rn).is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            format!("require r, r_n, R2 > 0; got r = {r}, r_n = {rn}, R2 = {r2}"),
        ))
    }
}

/// B1(r r_n) = J1(r r_n) Y1(R2 r_n) - J1(R2 r_n) Y1(r r_n).
pub fn cross_b1(r: f64, rn: f64, r2: f64) -> Result<f64> {
    check_cross_args("cross_b1", r, rn, r2)?;
    let (x, z) = (r * rn, r2 * rn);
    Ok(j1(x) * y1(z) - j1(z) * y1(x))
}

/// B(r r_n) = J0(r r_n) Y1(R2 r_n) - J1(R2 r_n) Y0(r r_n).
pub fn cross_b(r: f64, rn: f64, r2: f64) -> Result<f64> {
    check_cross_args("cross_b", r, rn, r2)?;
    let (x, z) = (r * rn, r2 * rn);
    Ok(j0(x) * y1(z) - j1(z) * y0(x))
}

/// -2 / (pi z), the value of J0(z) Y1(z) - J1(z) Y0(z).
pub(crate) fn wronskian(z: f64) -> f64 {
    -2.0 / (PI * z)
}
