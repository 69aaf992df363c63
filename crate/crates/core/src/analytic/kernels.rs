//! Time kernels of a single mode.
//!
//! The velocity kernel is K_n = L^{-1}{F} and the shear kernel (divided by
//! rho) is H_n = L^{-1}{(nu + alpha q^beta) F}, with
//! F(q) = 1 / (q [q + A q^beta + B]), A = alpha r_n^2, B = nu r_n^2.

use crate::error::{Error, Result};
use crate::special::{
    g_series, ln_gamma_unchecked, sum_series, GFunctionArgs, LogSum, SeriesLimits, SeriesOutcome,
    SignedLogValue,
};
use crate::transform::ModeTransform;

fn alternating(s: usize) -> i8 {
    if s % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sums Γ(j+k+1)/(j! k!) (-B)^k (-A)^j x(p), p = (1-β) j + k, where
/// `time_part` returns ln x(p) for a positive x. Terms are grouped
/// along the diagonals j + k = s so that each group has a single sign.
fn double_series(
    what: &'static str,
    mt: &ModeTransform,
    limits: SeriesLimits,
    time_part: impl Fn(f64) -> f64,
) -> Result<SeriesOutcome> {
    let ln_a = (mt.alpha * mt.rn2).ln();
    let ln_b = (mt.nu * mt.rn2).ln();
    let one_minus_beta = 1.0 - mt.beta;
    let has_memory = mt.alpha > 0.0;
    sum_series(what, limits, |s, acc| {
        let sign = alternating(s);
        let ln_s = ln_gamma_unchecked(s as f64 + 1.0);
        let j_max = if has_memory { s } else { 0 };
        let mut max_log = f64::NEG_INFINITY;
        for j in 0..=j_max {
            let k = s - j;
            let mut coef = ln_s - ln_gamma_unchecked(j as f64 + 1.0)
                - ln_gamma_unchecked(k as f64 + 1.0)
                + k as f64 * ln_b;
            if j > 0 {
                coef += j as f64 * ln_a;
            }
            let p = one_minus_beta * j as f64 + k as f64;
            let log = coef + time_part(p);
            max_log = max_log.max(log);
            acc.add(SignedLogValue::new(log, sign));
        }
        Some(max_log)
    })
}

/// K_n from the (j, k) double series. |K_n| <= t bounds the sum.
pub(crate) fn velocity_double_series(mt: &ModeTransform, t: f64, limits: SeriesLimits) -> Result<SeriesOutcome> {
    let ln_t = t.ln();
    double_series("velocity double series", mt, limits.with_bound(t), |p| {
        (p + 1.0) * ln_t - ln_gamma_unchecked(p + 2.0)
    })
}

/// H_n / rho from the (j, k) double series. 0 <= H_n / rho <= 1 / r_n^2.
pub(crate) fn shear_double_series(mt: &ModeTransform, t: f64, limits: SeriesLimits) -> Result<SeriesOutcome> {
    let ln_t = t.ln();
    let ln_nu = mt.nu.ln();
    let ln_alpha = mt.alpha.ln();
    let beta = mt.beta;
    let has_memory = mt.alpha > 0.0;
    double_series("shear double series", mt, limits.with_bound(1.0 / mt.rn2), |p| {
        let viscous = ln_nu + (p + 1.0) * ln_t - ln_gamma_unchecked(p + 2.0);
        if !has_memory {
            return viscous;
        }
        let elastic = ln_alpha + (p + 1.0 - beta) * ln_t - ln_gamma_unchecked(p + 2.0 - beta);
        let (hi, lo) = if viscous > elastic { (viscous, elastic) } else { (elastic, viscous) };
        hi + (lo - hi).exp().ln_1p()
    })
}

/// Sums (-B)^k sum_i w_i G_{1-β, b_i(k), k+1}(-A, t) over k.
fn g_form(
    what: &'static str,
    mt: &ModeTransform,
    t: f64,
    limits: SeriesLimits,
    parts: &[(f64, f64, f64)],
) -> Result<SeriesOutcome> {
    let ln_b = (mt.nu * mt.rn2).ln();
    let a = 1.0 - mt.beta;
    let d = -mt.alpha * mt.rn2;
    // Inner cancellation only matters relative to the outer sum, so it is
    // tracked as an absolute mass and checked once at the end.
    let inner_limits = SeriesLimits {
        max_condition: f64::INFINITY,
        bound: None,
        ..limits
    };
    let outer_limits = SeriesLimits {
        max_condition: f64::INFINITY,
        ..limits
    };
    let mut mass = LogSum::new();
    let mut failure = None;
    let out = sum_series(what, outer_limits, |k, acc| {
        if failure.is_some() {
            return None;
        }
        let kf = k as f64;
        let mut inner = 0.0;
        for &(weight, b0, b1) in parts {
            let args = GFunctionArgs {
                a,
                b: b0 + b1 * kf,
                c: kf + 1.0,
                d,
                t,
            };
            match g_series(args, inner_limits) {
                Ok(o) => {
                    inner += weight * o.value;
                    let abs = SignedLogValue::from_f64((weight * o.value * o.condition).abs());
                    mass.add(abs.scale(kf * ln_b, 1));
                }
                Err(e) => {
                    failure = Some(e);
                    return None;
                }
            }
        }
        let term = SignedLogValue::from_f64(inner).scale(kf * ln_b, alternating(k));
        acc.add(term);
        Some(term.log_magnitude)
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let out = out?;
    let condition = (mass.log_abs() - out.value.abs().ln()).exp().max(out.condition);
    if condition > limits.max_condition {
        return Err(Error::LossOfSignificance {
            what,
            condition,
            limit: limits.max_condition,
        });
    }
    Ok(SeriesOutcome { condition, ..out })
}

/// K_n as sum_k (-B)^k G_{1-β, -1-β-kβ, k+1}(-A, t).
pub(crate) fn velocity_g_series(mt: &ModeTransform, t: f64, limits: SeriesLimits) -> Result<SeriesOutcome> {
    let beta = mt.beta;
    g_form("velocity G-series", mt, t, limits, &[(1.0, -1.0 - beta, -beta)])
}

/// H_n / rho as sum_k (-B)^k [nu G_{1-β, -1-β-kβ, k+1} + alpha G_{1-β, -1-kβ, k+1}].
pub(crate) fn shear_g_series(mt: &ModeTransform, t: f64, limits: SeriesLimits) -> Result<SeriesOutcome> {
    let beta = mt.beta;
    if mt.alpha == 0.0 {
        return g_form("shear G-series", mt, t, limits, &[(mt.nu, -1.0 - beta, -beta)]);
    }
    g_form(
        "shear G-series",
        mt,
        t,
        limits,
        &[(mt.nu, -1.0 - beta, -beta), (mt.alpha, -1.0, -beta)],
    )
}

/// Decay rate c = B / (1 + A) of the beta = 1 kernels.
fn sg_rate(mt: &ModeTransform) -> f64 {
    mt.nu * mt.rn2 / (1.0 + mt.alpha * mt.rn2)
}

/// Closed-form K_n at beta = 1.
pub(crate) fn velocity_closed(mt: &ModeTransform, t: f64) -> f64 {
    -(-sg_rate(mt) * t).exp_m1() / (mt.nu * mt.rn2)
}

/// e^x - 1 - x without cancellation.
fn exp_m1_minus_x(x: f64) -> f64 {
    if x.abs() > 0.5 {
        return x.exp_m1() - x;
    }
    let (mut term, mut sum) = (0.5 * x * x, 0.0f64);
    let mut k = 2.0;
    while term.abs() > 1e-17 * sum.abs() {
        sum += term;
        k += 1.0;
        term *= x / k;
    }
    sum
}

/// Closed-form K_n less its large-r_n terms at beta = 1, matching
/// [`ModeImage::VelocityTail`](crate::transform::ModeImage).
pub(crate) fn velocity_closed_remainder(mt: &ModeTransform, t: f64) -> f64 {
    let b = mt.nu * mt.rn2;
    if mt.alpha == 0.0 {
        return -(-sg_rate(mt) * t).exp() / b;
    }
    let a = mt.alpha * mt.rn2;
    let eps = mt.nu * t / (mt.alpha * (1.0 + a));
    let decay = (-mt.nu * t / mt.alpha).exp();
    decay * (t / (mt.alpha * mt.rn2 * a * (1.0 + a)) - exp_m1_minus_x(eps) / b)
}

/// Closed-form H_n / rho at beta = 1.
pub(crate) fn shear_closed(mt: &ModeTransform, t: f64) -> f64 {
    (1.0 - (-sg_rate(mt) * t).exp() / (1.0 + mt.alpha * mt.rn2)) / mt.rn2
}

/// Closed-form H_n / rho less its large-r_n terms at beta = 1.
pub(crate) fn shear_closed_remainder(mt: &ModeTransform, t: f64) -> f64 {
    let a = mt.alpha * mt.rn2;
    if mt.alpha == 0.0 {
        return -(-sg_rate(mt) * t).exp() / mt.rn2;
    }
    let eps = mt.nu * t / (mt.alpha * (1.0 + a));
    let decay = (-mt.nu * t / mt.alpha).exp();
    decay * (1.0 - a * eps.exp_m1()) / (mt.rn2 * a * (1.0 + a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{FluidParams, Inversion, SeriesControls};
    use crate::transform::{invert, second_tail_kernels, tail_kernel, ModeImage};

    const TALBOT: Inversion = Inversion::Talbot { nodes: 32 };

    fn limits() -> SeriesLimits {
        SeriesLimits::from_controls(&SeriesControls::default())
    }

    fn mode(beta: f64, rn: f64) -> ModeTransform {
        ModeTransform::new(&FluidParams::reference(beta), rn)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn double_series_matches_inversion() {
        for &beta in &[0.3, 0.5, 0.8] {
            for &rn in &[1.0, 3.0, 6.0] {
                let mt = mode(beta, rn);
                for &t in &[0.5, 2.0, 10.0] {
                    let k = velocity_double_series(&mt, t, limits()).unwrap().value;
                    let inv = invert(&mt.image(ModeImage::Velocity), t, TALBOT).unwrap();
                    assert!(rel(k, inv) < 1e-8, "beta {beta} rn {rn} t {t}: {k} vs {inv}");
                    let h = shear_double_series(&mt, t, limits()).unwrap().value;
                    let inv = invert(&mt.image(ModeImage::Shear), t, TALBOT).unwrap();
                    assert!(rel(h, inv) < 1e-8, "beta {beta} rn {rn} t {t}: {h} vs {inv}");
                }
            }
        }
    }

    #[test]
    fn g_series_matches_double_series() {
        for &beta in &[0.3, 0.5, 0.8] {
            let mt = mode(beta, 2.0);
            for &t in &[0.5, 2.0, 8.0] {
                let d = velocity_double_series(&mt, t, limits()).unwrap().value;
                let g = velocity_g_series(&mt, t, limits()).unwrap().value;
                assert!(rel(g, d) < 1e-9, "{g} vs {d}");
                let d = shear_double_series(&mt, t, limits()).unwrap().value;
                let g = shear_g_series(&mt, t, limits()).unwrap().value;
                assert!(rel(g, d) < 1e-9, "{g} vs {d}");
            }
        }
    }

    #[test]
    fn first_mode_at_half_order() {
        let mt = mode(0.5, find_first_root());
        let d = velocity_double_series(&mt, 2.0, limits()).unwrap().value;
        let inv = invert(&mt.image(ModeImage::Velocity), 2.0, TALBOT).unwrap();
        assert!(rel(d, inv) < 1e-6);
    }

    fn find_first_root() -> f64 {
        crate::eigen::find_roots(1.0, 4.0, 1).unwrap().roots[0]
    }

    #[test]
    fn closed_forms_at_beta_one() {
        for &rn in &[1.0, 2.5, 5.0, 20.0] {
            let mt = mode(1.0, rn);
            let kappa = tail_kernel(mt.nu, mt.alpha, 1.0, 3.0, TALBOT).unwrap();
            let (k2, l) = second_tail_kernels(mt.nu, mt.alpha, 1.0, 3.0, TALBOT).unwrap();
            let rn4 = mt.rn2 * mt.rn2;
            let k = velocity_closed(&mt, 3.0);
            let rem = velocity_closed_remainder(&mt, 3.0);
            assert!((k - kappa / mt.rn2 + k2 / rn4 - rem).abs() < 1e-12 * (k2 / rn4).max(k), "rn {rn}: {} vs {rem}", k - kappa / mt.rn2 + k2 / rn4);
            let inv = invert(&mt.image(ModeImage::Shear), 3.0, TALBOT).unwrap();
            let h = shear_closed(&mt, 3.0);
            assert!(rel(h, inv) < 1e-10);
            assert!((h - 1.0 / mt.rn2 + l / rn4 - shear_closed_remainder(&mt, 3.0)).abs() < 1e-12 * (l / rn4).max(h));
        }
        let newtonian = ModeTransform::new(&FluidParams::newtonian(1.48, 1260.0), 2.0);
        let k = velocity_closed(&newtonian, 4.0);
        let rem = velocity_closed_remainder(&newtonian, 4.0);
        assert!((k - 1.0 / (newtonian.nu * newtonian.rn2) - rem).abs() < 1e-12 * k);
    }

    #[test]
    fn closed_remainders_match_inverted_tail_images() {
        for &rn in &[1.0, 30.0, 400.0] {
            let mt = mode(1.0, rn);
            for &t in &[0.01, 1.0, 10.0] {
                let v = invert(&mt.image(ModeImage::VelocityTail), t, TALBOT).unwrap();
                let s = invert(&mt.image(ModeImage::ShearTail), t, TALBOT).unwrap();
                let (cv, cs) = (velocity_closed_remainder(&mt, t), shear_closed_remainder(&mt, t));
                assert!(rel(cv, v) < 1e-8, "rn {rn}, t {t}: {cv} vs {v}");
                assert!(rel(cs, s) < 1e-8, "rn {rn}, t {t}: {cs} vs {s}");
            }
        }
        assert!((exp_m1_minus_x(1e-3) - 5.00166708341668056e-7).abs() < 1e-21);
    }

    #[test]
    fn double_series_at_beta_one_below_unit_memory() {
        // The inner j-sum is geometric in A and converges only for A < 1.
        let mt = mode(1.0, 8.0 * std::f64::consts::PI / 3.0);
        assert!(mt.alpha * mt.rn2 < 1.0);
        for &t in &[0.5, 5.0, 10.0] {
            let k = velocity_double_series(&mt, t, limits()).unwrap().value;
            assert!(rel(k, velocity_closed(&mt, t)) < 1e-10);
            let h = shear_double_series(&mt, t, limits()).unwrap().value;
            assert!(rel(h, shear_closed(&mt, t)) < 1e-10);
        }
        let hopeless = mode(1.0, 15.0);
        assert!(velocity_double_series(&hopeless, 5.0, limits()).unwrap_err().is_numerical());
    }

    #[test]
    fn high_modes_refuse_instead_of_cancelling() {
        let mt = mode(0.5, 40.0);
        let err = velocity_double_series(&mt, 5.0, limits()).unwrap_err();
        assert!(err.is_numerical());
    }
}
