use super::gamma::ln_gamma_unchecked;
use super::logspace::{LogSum, SignedLogValue};
use crate::error::{Error, Result};
use crate::params::SeriesControls;

/// Below this order parameter `a` the G-series is refused: its terms decay
/// too slowly to be summed reliably and callers should invert numerically.
pub const MIN_G_ORDER: f64 = 0.05;

/// Parameters of G_{a,b,c}(d, t), the inverse Laplace transform of
/// q^b / (q^a - d)^c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunctionArgs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOutcome {
    pub value: f64,
    pub terms: usize,
    /// sum |term| / |sum|.
    pub condition: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesLimits {
    pub tol_rel: f64,
    pub max_terms: usize,
    pub max_condition: f64,
    /// A known bound on |sum|; lets hopeless cancellation be detected early.
    pub bound: Option<f64>,
}

impl SeriesLimits {
    pub fn from_controls(c: &SeriesControls) -> Self {
        SeriesLimits {
            tol_rel: c.tol_rel,
            max_terms: c.max_terms,
            max_condition: c.max_condition,
            bound: None,
        }
    }

    pub fn with_bound(self, bound: f64) -> Self {
        SeriesLimits {
            bound: Some(bound),
            ..self
        }
    }
}

/// Sums a series delivered in groups. `group(i, acc)` adds the i-th group of
/// terms to `acc` and returns the largest log-magnitude among them, or `None`
/// when the series has no further terms.
///
/// Stops once the three most recent groups are all below `tol_rel * |sum|`.
pub(crate) fn sum_series<F>(what: &'static str, limits: SeriesLimits, mut group: F) -> Result<SeriesOutcome>
where
    F: FnMut(usize, &mut LogSum) -> Option<f64>,
{
    let mut acc = LogSum::new();
    let log_tol = limits.tol_rel.ln();
    let log_limit = limits.bound.map(|b| b.ln() + limits.max_condition.ln());
    let mut quiet = 0usize;
    let mut index = 0usize;
    loop {
        let Some(max_log) = group(index, &mut acc) else {
            break;
        };
        index += 1;
        if let Some(limit) = log_limit {
            if acc.max_log_term() > limit {
                return Err(Error::LossOfSignificance {
                    what,
                    condition: (acc.max_log_term() - limits.bound.unwrap().ln()).exp(),
                    limit: limits.max_condition,
                });
            }
        }
        if max_log < acc.log_abs() + log_tol {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if acc.terms() >= limits.max_terms {
            return Err(Error::NonConvergence {
                what,
                terms: acc.terms(),
                partial_sum: acc.to_f64(),
            });
        }
    }
    let condition = acc.condition();
    if condition > limits.max_condition {
        return Err(Error::LossOfSignificance {
            what,
            condition,
            limit: limits.max_condition,
        });
    }
    Ok(SeriesOutcome {
        value: acc.to_f64(),
        terms: acc.terms(),
        condition,
    })
}

/// Generalized G-function
///
/// G_{a,b,c}(d, t) = sum_j Γ(c+j) d^j / (Γ(c) Γ(j+1)) t^{(c+j)a-b-1} / Γ((c+j)a-b),
///
/// summed term by term in log space.
pub fn g_function(args: GFunctionArgs, controls: &SeriesControls) -> Result<f64> {
    g_series(args, SeriesLimits::from_controls(controls)).map(|o| o.value)
}

pub(crate) fn g_series(args: GFunctionArgs, limits: SeriesLimits) -> Result<SeriesOutcome> {
    let GFunctionArgs { a, b, c, d, t } = args;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("g_function", format!("t must be positive, got {t}")));
    }
    if !(c > 0.0) || !(a >= 0.0) || !d.is_finite() || !b.is_finite() {
        return Err(Error::domain(
            "g_function",
            format!("require a >= 0, c > 0 and finite b, d; got a = {a}, c = {c}"),
        ));
    }
    if !(a * c - b > 0.0) {
        return Err(Error::domain(
            "g_function",
            format!("convergence precondition ac - b > 0 violated (a = {a}, b = {b}, c = {c})"),
        ));
    }
    if a < MIN_G_ORDER {
        return Err(Error::Refused {
            what: "g_function",
            reason: format!("order a = {a} is below {MIN_G_ORDER}; use numerical inversion"),
        });
    }
    let ln_t = t.ln();
    let ln_d = d.abs().ln();
    let d_sign: i8 = if d < 0.0 { -1 } else { 1 };
    let ln_gamma_c = ln_gamma_unchecked(c);
    sum_series("g_function", limits, |j, acc| {
        if d == 0.0 && j > 0 {
            return None;
        }
        let jf = j as f64;
        let power = (c + jf) * a - b;
        let mut log = ln_gamma_unchecked(c + jf) - ln_gamma_c - ln_gamma_unchecked(jf + 1.0)
            + (power - 1.0) * ln_t
            - ln_gamma_unchecked(power);
        if j > 0 {
            log += jf * ln_d;
        }
        let sign = if j % 2 == 1 { d_sign } else { 1 };
        acc.add(SignedLogValue::new(log, sign));
        Some(log)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;
    use proptest::prelude::*;

    fn controls() -> SeriesControls {
        SeriesControls::default()
    }

    #[test]
    fn zero_pole_is_single_term() {
        let args = GFunctionArgs {
            a: 0.5,
            b: -1.5,
            c: 2.0,
            d: 0.0,
            t: 1.7,
        };
        let expected = 1.7f64.powf(0.5 * 2.0 + 1.5 - 1.0) / ln_gamma(2.5).unwrap().exp();
        let g = g_function(args, &controls()).unwrap();
        assert!((g - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn exponential_reduction() {
        for &(d, t) in &[(0.3, 2.0), (-1.0, 1.0), (2.0, 3.0), (-0.5, 4.0)] {
            let args = GFunctionArgs { a: 1.0, b: 0.0, c: 1.0, d, t };
            let g = g_function(args, &controls()).unwrap();
            let e = (d * t).exp();
            assert!((g - e).abs() <= 1e-12 * e, "d = {d}, t = {t}: {g} vs {e}");
        }
    }

    #[test]
    fn refuses_degenerate_order() {
        let args = GFunctionArgs {
            a: 0.04,
            b: -1.0,
            c: 1.0,
            d: -1.0,
            t: 1.0,
        };
        assert!(matches!(
            g_function(args, &controls()),
            Err(Error::Refused { .. })
        ));
    }

    #[test]
    fn precondition_and_domain() {
        let bad = GFunctionArgs {
            a: 0.5,
            b: 1.0,
            c: 1.0,
            d: -1.0,
            t: 1.0,
        };
        assert!(matches!(g_function(bad, &controls()), Err(Error::Domain { .. })));
        let bad_t = GFunctionArgs { t: 0.0, b: 0.0, ..bad };
        assert!(g_function(bad_t, &controls()).is_err());
    }

    #[test]
    fn reports_cancellation_instead_of_garbage() {
        // E_{1/2}(-30): terms reach ~e^900 while the sum is ~0.02.
        let args = GFunctionArgs {
            a: 0.5,
            b: -0.5,
            c: 1.0,
            d: -30.0,
            t: 1.0,
        };
        let err = g_function(args, &controls()).unwrap_err();
        assert!(matches!(
            err,
            Error::LossOfSignificance { .. } | Error::NonConvergence { .. }
        ));
    }

    proptest! {
        #[test]
        fn single_term_closed_form(a in 0.05f64..1.0, c in 1.0f64..6.0, margin in 0.1f64..5.0, t in 0.01f64..20.0) {
            let b = a * c - margin;
            let args = GFunctionArgs { a, b, c, d: 0.0, t };
            let expected = t.powf(margin - 1.0) / ln_gamma(margin).unwrap().exp();
            let g = g_function(args, &controls()).unwrap();
            prop_assert!((g - expected).abs() <= 1e-12 * expected);
        }

        #[test]
        fn exponential_for_moderate_arguments(dt in -20.0f64..20.0, t in 0.1f64..5.0) {
            let d = dt / t;
            let strict = SeriesControls { max_condition: 1e5, ..controls() };
            let args = GFunctionArgs { a: 1.0, b: 0.0, c: 1.0, d, t };
            match g_function(args, &strict) {
                Ok(g) => prop_assert!((g - dt.exp()).abs() <= 1e-10 * dt.exp()),
                Err(Error::LossOfSignificance { .. }) => prop_assert!(dt < 0.0),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
