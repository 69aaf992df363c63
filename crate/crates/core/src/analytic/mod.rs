//! Eigenfunction-series solution for the velocity and shear stress.
//!
//! With S(r) the steady profile and C_n the Hankel coefficients of S,
//!
//! ω(r, t) = t S(r) - π Σ_n C_n B1(r r_n) K_n(t),
//! τ(r, t) = -(2b/r²)(μ t + α1 t^{1-β}/Γ(2-β)) + π Σ_n C_n [2B1(r r_n)/r - r_n B(r r_n)] ρ H_n(t).
//!
//! For large n the kernels expand in powers of 1/r_n². With s = αq^β + ν,
//! K_n = κ/r_n² − κ₂/r_n⁴ + …, H_n/ρ = 1/r_n² − λ/r_n⁴ + …, where κ, κ₂ and λ
//! invert 1/(qs), 1/s² and 1/s. With the `tail_correction` control the
//! series keeps only what is left of each kernel, the first-order sums and
//! the stress sums come in closed form, and the r_n⁻⁴ velocity sum runs
//! directly over a longer list of modes (κ₂ ~ 1/α² would amplify the
//! rounding of its closed form). For α = 0 only the first order exists.
//! Results are assembled from the two unit boundary programs so that they
//! are exactly linear in (Ω1, Ω2).

mod kernels;
mod modes;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::EigenvalueSet;
use crate::error::{Error, Result};
use crate::params::{AnnulusGeometry, FluidParams, SeriesControls, Strategy};
use crate::special::{gamma, SeriesLimits, SeriesOutcome};
use crate::transform::{invert, second_tail_kernels, tail_kernel, ModeImage, ModeTransform};

use modes::ModeTable;

type SeriesKernel = fn(&ModeTransform, f64, SeriesLimits) -> Result<SeriesOutcome>;

/// Above this order `Auto` inverts every mode numerically.
pub const AUTO_SERIES_MAX_BETA: f64 = 0.9;

/// `Auto` keeps a series only while its terms exceed the sum by at most
/// this factor; numerical inversion is more accurate beyond it.
pub const AUTO_MAX_CONDITION: f64 = 1e4;

/// One evaluated point of the flow field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub r: f64,
    pub t: f64,
    pub omega: f64,
    pub tau: Option<f64>,
    /// `Auto` only when modes were split between series and inversion.
    pub strategy_used: Strategy,
    pub modes_used: usize,
    /// Modes whose kernel came from a power series.
    pub series_modes: usize,
}

/// Coefficients of the closed-form tails at one instant; all zero when the
/// tail correction is disabled.
#[derive(Debug, Clone, Copy, Default)]
struct Tail {
    kappa: f64,
    kappa2: f64,
    lambda: f64,
    /// Coefficient of 1/r_n² in H_n / ρ.
    unit: f64,
    /// Modes below this index keep their full kernels, the expansion not
    /// yet being asymptotic there; the closed-form sums exclude them.
    split: usize,
}

/// A mode joins the tail once the r_n^-4 term is below this fraction of the
/// r_n^-2 term.
const TAIL_SPLIT_RATIO: f64 = 0.1;

/// The r_n^-4 sum over modes beyond the series runs over this many times as
/// many further modes; its own remainder falls like N^-5.
const SECOND_TAIL_EXTRA: usize = 3;

/// Kernels of every mode at one instant.
#[derive(Debug, Clone)]
struct Kernels {
    t: f64,
    tail: Tail,
    /// K_n less its tail terms.
    velocity: Vec<f64>,
    /// H_n / rho less its tail terms.
    shear: Option<Vec<f64>>,
    strategy_used: Strategy,
    series_modes: usize,
}

/// Solution evaluator for one fluid, annulus and set of controls.
#[derive(Debug, Clone)]
pub struct Flow {
    params: FluidParams,
    geometry: AnnulusGeometry,
    controls: SeriesControls,
    table: ModeTable,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum KernelSource {
    Configured,
    Closed,
}

impl Flow {
    pub fn new(
        params: FluidParams,
        geometry: AnnulusGeometry,
        eigenvalues: &EigenvalueSet,
        controls: SeriesControls,
    ) -> Result<Self> {
        params.validate()?;
        geometry.validate()?;
        controls.validate()?;
        if eigenvalues.r1 != geometry.r1 || eigenvalues.r2 != geometry.r2 {
            return Err(Error::EigenMismatch {
                eig_r1: eigenvalues.r1,
                eig_r2: eigenvalues.r2,
                r1: geometry.r1,
                r2: geometry.r2,
            });
        }
        if eigenvalues.is_empty() {
            return Err(Error::Contract("eigenvalue set is empty".into()));
        }
        let n_extra = if controls.tail_correction && params.alpha() != 0.0 {
            SECOND_TAIL_EXTRA * controls.n_modes.min(eigenvalues.len())
        } else {
            0
        };
        let table = ModeTable::new(&geometry, eigenvalues, controls.n_modes, n_extra)?;
        Ok(Flow {
            params,
            geometry,
            controls,
            table,
        })
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn geometry(&self) -> &AnnulusGeometry {
        &self.geometry
    }

    pub fn controls(&self) -> &SeriesControls {
        &self.controls
    }

    pub fn modes_used(&self) -> usize {
        self.table.modes.len()
    }

    fn omegas(&self) -> [f64; 2] {
        [self.geometry.omega1, self.geometry.omega2]
    }

    /// The t-linear first term t S(r).
    pub fn steady_part(&self, r: f64, t: f64) -> Result<f64> {
        self.check_point("steady_part", r, t)?;
        let [o1, o2] = self.omegas();
        let [u1, u2] = self.table.units;
        Ok(t * (o1 * u1.steady(r) + o2 * u2.steady(r)))
    }

    fn check_point(&self, function: &'static str, r: f64, t: f64) -> Result<()> {
        self.geometry.check_radius(function, r)?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain(function, format!("t must be >= 0, got {t}")));
        }
        Ok(())
    }

    fn check_stress_time(&self, t: f64) -> Result<()> {
        if t == 0.0 && self.params.beta < 1.0 {
            return Err(Error::Contract(
                "shear stress with beta < 1 is evaluated only for t > 0".into(),
            ));
        }
        Ok(())
    }

    fn require_second_grade(&self, function: &str) -> Result<()> {
        if self.params.beta != 1.0 {
            return Err(Error::Contract(format!(
                "{function} requires beta = 1, got {}",
                self.params.beta
            )));
        }
        Ok(())
    }

    /// Velocity at one point with the configured strategy.
    pub fn velocity(&self, r: f64, t: f64) -> Result<FieldSample> {
        Ok(self.velocity_profile(&[r], t)?[0])
    }

    /// Velocity and shear stress at one point.
    pub fn shear_stress(&self, r: f64, t: f64) -> Result<FieldSample> {
        Ok(self.stress_profile(&[r], t)?[0])
    }

    /// Velocity at several radii sharing one time; kernels are evaluated once.
    pub fn velocity_profile(&self, rs: &[f64], t: f64) -> Result<Vec<FieldSample>> {
        self.samples(rs, t, false, KernelSource::Configured)
    }

    /// Velocity and shear stress at several radii sharing one time.
    pub fn stress_profile(&self, rs: &[f64], t: f64) -> Result<Vec<FieldSample>> {
        self.samples(rs, t, true, KernelSource::Configured)
    }

    /// Velocity from the exponential beta = 1 kernels.
    pub fn velocity_sg_closed(&self, r: f64, t: f64) -> Result<f64> {
        self.require_second_grade("velocity_sg_closed")?;
        Ok(self.samples(&[r], t, false, KernelSource::Closed)?[0].omega)
    }

    /// Shear stress from the exponential beta = 1 kernels.
    pub fn shear_sg_closed(&self, r: f64, t: f64) -> Result<f64> {
        self.require_second_grade("shear_sg_closed")?;
        let s = self.samples(&[r], t, true, KernelSource::Closed)?[0];
        Ok(s.tau.expect("stress requested"))
    }

    fn samples(
        &self,
        rs: &[f64],
        t: f64,
        with_shear: bool,
        source: KernelSource,
    ) -> Result<Vec<FieldSample>> {
        for &r in rs {
            self.check_point("flow evaluation", r, t)?;
        }
        if with_shear {
            self.check_stress_time(t)?;
        }
        let kernels = if t == 0.0 && !with_shear {
            None
        } else if t == 0.0 || source == KernelSource::Closed {
            Some(self.closed_kernels(t, with_shear))
        } else {
            Some(self.kernels(t, with_shear)?)
        };
        let strategy_used = match (&kernels, source) {
            (Some(k), _) => k.strategy_used,
            (None, KernelSource::Closed) => Strategy::Auto,
            (None, KernelSource::Configured) => self.controls.strategy,
        };
        let series_modes = kernels.as_ref().map_or(0, |k| k.series_modes);
        Ok(rs
            .iter()
            .map(|&r| {
                let (omega, tau) = match &kernels {
                    None => (0.0, None),
                    Some(k) => (self.assemble_velocity(k, r), self.assemble_stress(k, r)),
                };
                FieldSample {
                    r,
                    t,
                    omega,
                    tau,
                    strategy_used,
                    modes_used: self.modes_used(),
                    series_modes,
                }
            })
            .collect())
    }

    fn assemble_velocity(&self, k: &Kernels, r: f64) -> f64 {
        let mut series = [0.0f64; 2];
        // Low-mode part of U, and the r_n^-4 sum over the remaining modes.
        let mut low = [0.0f64; 2];
        let mut high = [0.0f64; 2];
        let higher = if k.tail.kappa2 == 0.0 { &[][..] } else { &self.table.extra[..] };
        for (i, m) in self.table.modes.iter().chain(higher).enumerate() {
            let (b1, _) = m.eigenfunctions(r);
            let kn = k.velocity.get(i).copied().unwrap_or(0.0);
            for (u, c) in m.coef.into_iter().enumerate() {
                series[u] += c * b1 * kn;
                if i < k.tail.split {
                    low[u] += c * b1 / m.rn2;
                } else {
                    high[u] += c * b1 / (m.rn2 * m.rn2);
                }
            }
        }
        let tail = k.tail;
        let mut omega = 0.0;
        for (i, (u, o)) in self.table.units.iter().zip(self.omegas()).enumerate() {
            let unit = k.t * u.steady(r) - tail.kappa * (u.tail(r) - PI * low[i])
                + PI * tail.kappa2 * high[i]
                - PI * series[i];
            omega += o * unit;
        }
        omega
    }

    fn assemble_stress(&self, k: &Kernels, r: f64) -> Option<f64> {
        let shear = k.shear.as_ref()?;
        let p = &self.params;
        let rho = p.rho;
        let memory = if p.beta == 1.0 {
            p.alpha1
        } else {
            p.alpha1 * k.t.powf(1.0 - p.beta) / gamma(2.0 - p.beta).expect("2 - beta > 0")
        };
        let bracket = p.mu * k.t + memory;
        let mut series = [0.0f64; 2];
        let mut low = [[0.0f64; 2]; 2];
        for (i, (m, &hn)) in self.table.modes.iter().zip(shear).enumerate() {
            let (b1, b) = m.eigenfunctions(r);
            let w = 2.0 * b1 / r - m.rn * b;
            for (u, c) in m.coef.into_iter().enumerate() {
                series[u] += c * w * hn;
                if i < k.tail.split {
                    low[u][0] += c * w / m.rn2;
                    low[u][1] += c * w / (m.rn2 * m.rn2);
                }
            }
        }
        // pi sum C_n w / r_n^2 = -(d/dr - 1/r) U, and likewise for V.
        let tail = k.tail;
        let mut tau = 0.0;
        for (i, (u, o)) in self.table.units.iter().zip(self.omegas()).enumerate() {
            let unit = -2.0 * u.b / (r * r) * bracket
                + rho * tail.lambda * (u.tail2_strain(r) + PI * low[i][1])
                - rho * tail.unit * (u.tail_strain(r) + PI * low[i][0])
                + PI * rho * series[i];
            tau += o * unit;
        }
        Some(tau)
    }

    fn transform(&self, rn: f64) -> ModeTransform {
        ModeTransform::new(&self.params, rn)
    }

    fn tail_coefficients(&self, t: f64) -> Result<Tail> {
        if !self.controls.tail_correction {
            return Ok(Tail::default());
        }
        let p = &self.params;
        let method = self.controls.inversion;
        let (kappa2, lambda) = second_tail_kernels(p.nu(), p.alpha(), p.beta, t, method)?;
        Ok(self.with_split(Tail {
            kappa: tail_kernel(p.nu(), p.alpha(), p.beta, t, method)?,
            kappa2,
            lambda,
            unit: 1.0,
            split: 0,
        }))
    }

    fn with_split(&self, tail: Tail) -> Tail {
        let n = self.table.modes.len();
        let split = if tail.unit == 0.0 {
            n
        } else if tail.kappa2 == 0.0 && tail.lambda == 0.0 {
            0
        } else if tail.kappa == 0.0 {
            n
        } else {
            let rn2_min = (tail.kappa2 / tail.kappa).abs().max(tail.lambda.abs()) / TAIL_SPLIT_RATIO;
            self.table.modes.partition_point(|m| m.rn2 < rn2_min)
        };
        Tail { split, ..tail }
    }

    fn closed_kernels(&self, t: f64, with_shear: bool) -> Kernels {
        let p = &self.params;
        let tail = self.controls.tail_correction;
        // Exponential forms of the beta = 1 coefficients, also valid at t = 0.
        let coefficients = match (tail, p.alpha() == 0.0) {
            (false, _) => Tail::default(),
            (true, true) => Tail {
                kappa: 1.0 / p.nu(),
                unit: 1.0,
                ..Tail::default()
            },
            (true, false) => {
                let e = (-p.nu() * t / p.alpha()).exp() / p.alpha();
                Tail {
                    kappa: -(-p.nu() * t / p.alpha()).exp_m1() / p.nu(),
                    kappa2: t * e / p.alpha(),
                    lambda: e,
                    unit: 1.0,
                    split: 0,
                }
            }
        };
        let coefficients = self.with_split(coefficients);
        let mts: Vec<_> = self.table.modes.iter().map(|m| self.transform(m.rn)).collect();
        let reduced = |i: usize| tail && i >= coefficients.split;
        let velocity = mts
            .iter()
            .enumerate()
            .map(|(i, mt)| {
                if t == 0.0 {
                    0.0
                } else if reduced(i) {
                    kernels::velocity_closed_remainder(mt, t)
                } else {
                    kernels::velocity_closed(mt, t)
                }
            })
            .collect();
        let shear = with_shear.then(|| {
            mts.iter()
                .enumerate()
                .map(|(i, mt)| {
                    if reduced(i) {
                        kernels::shear_closed_remainder(mt, t)
                    } else {
                        kernels::shear_closed(mt, t)
                    }
                })
                .collect()
        });
        Kernels {
            t,
            tail: coefficients,
            velocity,
            shear,
            strategy_used: Strategy::Auto,
            series_modes: 0,
        }
    }

    fn kernels(&self, t: f64, with_shear: bool) -> Result<Kernels> {
        let coef = self.tail_coefficients(t)?;
        let strategy = self.controls.strategy;
        let n = self.table.modes.len();
        let (values, strategy_used, series_modes) = match strategy {
            Strategy::ModeLaplaceInversion => {
                let v = self.mode_range(0..n, t, coef, with_shear, Strategy::ModeLaplaceInversion)?;
                (v, strategy, 0)
            }
            Strategy::DoubleSeries | Strategy::GSeries => {
                (self.mode_range(0..n, t, coef, with_shear, strategy)?, strategy, n)
            }
            Strategy::Auto if self.params.beta > AUTO_SERIES_MAX_BETA => {
                let v = self.mode_range(0..n, t, coef, with_shear, Strategy::ModeLaplaceInversion)?;
                (v, Strategy::ModeLaplaceInversion, 0)
            }
            Strategy::Auto => {
                // Series cancellation grows with r_n, so once a mode is refused
                // every later mode is inverted numerically.
                let mut limits = SeriesLimits::from_controls(&self.controls);
                limits.max_condition = limits.max_condition.min(AUTO_MAX_CONDITION);
                let mut values = Vec::with_capacity(n);
                for i in 0..n {
                    match self.mode_kernels(i, t, coef, with_shear, Strategy::DoubleSeries, limits) {
                        Ok(v) => values.push(v),
                        Err(e) if e.is_numerical() => break,
                        Err(e) => return Err(e),
                    }
                }
                let series_modes = values.len();
                values.extend(self.mode_range(
                    series_modes..n,
                    t,
                    coef,
                    with_shear,
                    Strategy::ModeLaplaceInversion,
                )?);
                let used = match series_modes {
                    0 => Strategy::ModeLaplaceInversion,
                    s if s == n => Strategy::DoubleSeries,
                    _ => Strategy::Auto,
                };
                (values, used, series_modes)
            }
        };
        let (velocity, shear): (Vec<f64>, Vec<Option<f64>>) = values.into_iter().unzip();
        let shear = with_shear.then(|| shear.into_iter().map(|h| h.expect("shear requested")).collect());
        Ok(Kernels {
            t,
            tail: coef,
            velocity,
            shear,
            strategy_used,
            series_modes,
        })
    }

    fn mode_range(
        &self,
        range: std::ops::Range<usize>,
        t: f64,
        coef: Tail,
        with_shear: bool,
        strategy: Strategy,
    ) -> Result<Vec<(f64, Option<f64>)>> {
        let limits = SeriesLimits::from_controls(&self.controls);
        range
            .into_par_iter()
            .map(|i| self.mode_kernels(i, t, coef, with_shear, strategy, limits))
            .collect()
    }

    /// Reduced velocity and shear kernels of mode `i` (0-based).
    fn mode_kernels(
        &self,
        i: usize,
        t: f64,
        coef: Tail,
        with_shear: bool,
        strategy: Strategy,
        limits: SeriesLimits,
    ) -> Result<(f64, Option<f64>)> {
        let mt = self.transform(self.table.modes[i].rn);
        let reduced = self.controls.tail_correction && i >= coef.split;
        let method = self.controls.inversion;
        let rn4 = mt.rn2 * mt.rn2;
        let run = || -> Result<(f64, Option<f64>)> {
            match strategy {
                Strategy::ModeLaplaceInversion => {
                    let (vi, si) = if reduced {
                        (ModeImage::VelocityTail, ModeImage::ShearTail)
                    } else {
                        (ModeImage::Velocity, ModeImage::Shear)
                    };
                    let v = invert(&mt.image(vi), t, method)?;
                    let s = with_shear.then(|| invert(&mt.image(si), t, method)).transpose()?;
                    Ok((v, s))
                }
                Strategy::DoubleSeries | Strategy::GSeries | Strategy::Auto => {
                    let (vel, sh): (SeriesKernel, SeriesKernel) = if strategy == Strategy::GSeries {
                        (kernels::velocity_g_series, kernels::shear_g_series)
                    } else {
                        (kernels::velocity_double_series, kernels::shear_double_series)
                    };
                    let (dv, ds) = if reduced {
                        (coef.kappa2 / rn4 - coef.kappa / mt.rn2, coef.lambda / rn4 - coef.unit / mt.rn2)
                    } else {
                        (0.0, 0.0)
                    };
                    let v = vel(&mt, t, limits)?.value + dv;
                    let s = with_shear.then(|| sh(&mt, t, limits).map(|h| h.value + ds)).transpose()?;
                    Ok((v, s))
                }
            }
        };
        run().map_err(|e| Error::Mode {
            mode: i + 1,
            strategy,
            source: Box::new(e),
        })
    }
}

/// Evaluates t S(r) for the geometry's boundary program.
pub fn steady_part(geometry: &AnnulusGeometry, r: f64, t: f64) -> Result<f64> {
    geometry.validate()?;
    geometry.check_radius("steady_part", r)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain("steady_part", format!("t must be >= 0, got {t}")));
    }
    let (r1, r2) = (geometry.r1, geometry.r2);
    let num = geometry.omega1 * r1 * r1 * (r2 * r2 - r * r) + geometry.omega2 * r2 * r2 * (r * r - r1 * r1);
    Ok(t * num / ((r2 * r2 - r1 * r1) * r))
}

pub fn velocity(
    params: &FluidParams,
    geometry: &AnnulusGeometry,
    eigenvalues: &EigenvalueSet,
    r: f64,
    t: f64,
    controls: &SeriesControls,
) -> Result<FieldSample> {
    Flow::new(*params, *geometry, eigenvalues, *controls)?.velocity(r, t)
}

pub fn velocity_sg_closed(
    params: &FluidParams,
    geometry: &AnnulusGeometry,
    eigenvalues: &EigenvalueSet,
    r: f64,
    t: f64,
    controls: &SeriesControls,
) -> Result<f64> {
    Flow::new(*params, *geometry, eigenvalues, *controls)?.velocity_sg_closed(r, t)
}

pub fn shear_stress(
    params: &FluidParams,
    geometry: &AnnulusGeometry,
    eigenvalues: &EigenvalueSet,
    r: f64,
    t: f64,
    controls: &SeriesControls,
) -> Result<FieldSample> {
    Flow::new(*params, *geometry, eigenvalues, *controls)?.shear_stress(r, t)
}

pub fn shear_sg_closed(
    params: &FluidParams,
    geometry: &AnnulusGeometry,
    eigenvalues: &EigenvalueSet,
    r: f64,
    t: f64,
    controls: &SeriesControls,
) -> Result<f64> {
    Flow::new(*params, *geometry, eigenvalues, *controls)?.shear_sg_closed(r, t)
}

/// Velocity when only the outer cylinder moves.
pub fn velocity_inner_rest(
    params: &FluidParams,
    geometry: &AnnulusGeometry,
    eigenvalues: &EigenvalueSet,
    r: f64,
    t: f64,
    controls: &SeriesControls,
) -> Result<FieldSample> {
    if geometry.omega1 != 0.0 {
        return Err(Error::Contract(format!(
            "velocity_inner_rest needs Omega1 = 0, got {}",
            geometry.omega1
        )));
    }
    velocity(params, geometry, eigenvalues, r, t, controls)
}
