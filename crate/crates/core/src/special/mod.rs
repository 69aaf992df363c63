//! Scalar special functions: Bessel functions of orders 0 and 1, the
//! annular cross products, log-gamma, the generalized G-function and an
//! overflow-safe signed log-space accumulator.

mod bessel;
mod gamma;
mod gfunction;
mod logspace;

pub use bessel::{bessel, cross_b, cross_b1, j0, j1, y0, y1, BesselKind};
pub use gamma::{gamma, ln_gamma, ln_gamma_unchecked};
pub use gfunction::{g_function, GFunctionArgs, SeriesOutcome, MIN_G_ORDER};
pub use logspace::{LogSum, SignedLogValue};
pub(crate) use bessel::wronskian;
pub(crate) use gfunction::{g_series, sum_series, SeriesLimits};
