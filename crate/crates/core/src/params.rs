//! Physical and numerical inputs shared by every evaluator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Material constants of the fluid.
///
/// Kinematic quantities are derived on demand so they cannot drift away from
/// the dynamic ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    /// Dynamic viscosity in Pa s.
    pub mu: f64,
    /// Modulus multiplying the fractional derivative term.
    pub alpha1: f64,
    /// Density in kg/m^3.
    pub rho: f64,
    /// Fractional order, 0 < beta <= 1.
    pub beta: f64,
}

impl FluidParams {
    pub fn new(mu: f64, alpha1: f64, rho: f64, beta: f64) -> Result<Self> {
        let p = FluidParams {
            mu,
            alpha1,
            rho,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Material constants used for all figures of the reference study
    /// (mu = 1.48, alpha1 = 11.34, rho = 1260).
    pub fn reference(beta: f64) -> Self {
        FluidParams {
            mu: 1.48,
            alpha1: 11.34,
            rho: 1260.0,
            beta,
        }
    }

    /// Newtonian fluid: no elastic term and first-order time derivative.
    pub fn newtonian(mu: f64, rho: f64) -> Self {
        FluidParams {
            mu,
            alpha1: 0.0,
            rho,
            beta: 1.0,
        }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        FluidParams { beta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Params(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Params(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.alpha1 >= 0.0 && self.alpha1.is_finite()) {
            return Err(Error::Params(format!(
                "alpha1 must be non-negative, got {}",
                self.alpha1
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Params(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Kinematic viscosity mu / rho.
    pub fn nu(&self) -> f64 {
        self.mu / self.rho
    }

    /// Kinematic modulus alpha1 / rho.
    pub fn alpha(&self) -> f64 {
        self.alpha1 / self.rho
    }
}

/// Annular domain R1 < r < R2 and the wall angular accelerations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusGeometry {
    pub r1: f64,
    pub r2: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl AnnulusGeometry {
    pub fn new(r1: f64, r2: f64, omega1: f64, omega2: f64) -> Result<Self> {
        let g = AnnulusGeometry {
            r1,
            r2,
            omega1,
            omega2,
        };
        g.validate()?;
        Ok(g)
    }

    /// R1 = 1, R2 = 4, Omega1 = 3, Omega2 = 1.5.
    pub fn reference() -> Self {
        AnnulusGeometry {
            r1: 1.0,
            r2: 4.0,
            omega1: 3.0,
            omega2: 1.5,
        }
    }

    pub fn with_omegas(self, omega1: f64, omega2: f64) -> Self {
        AnnulusGeometry {
            omega1,
            omega2,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r1 > 0.0 && self.r1.is_finite() && self.r2.is_finite()) {
            return Err(Error::Geometry(format!(
                "radii must be positive and finite, got R1 = {}, R2 = {}",
                self.r1, self.r2
            )));
        }
        if self.r1 >= self.r2 {
            return Err(Error::Geometry(format!(
                "require 0 < R1 < R2, got R1 = {}, R2 = {}",
                self.r1, self.r2
            )));
        }
        if !(self.omega1.is_finite() && self.omega2.is_finite()) {
            return Err(Error::Geometry("angular accelerations must be finite".into()));
        }
        Ok(())
    }

    pub fn gap(&self) -> f64 {
        self.r2 - self.r1
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.r1 && r <= self.r2
    }

    pub(crate) fn check_radius(&self, function: &'static str, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::domain(
                function,
                format!("r = {r} outside [{}, {}]", self.r1, self.r2),
            ))
        }
    }
}

/// How the per-mode time kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// The (j, k) double power series.
    DoubleSeries,
    /// A sum over k of generalized G-functions.
    GSeries,
    /// Numerical inversion of the per-mode Laplace transform.
    ModeLaplaceInversion,
    /// Double series for beta <= 0.9 with per-mode fallback to inversion.
    Auto,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::DoubleSeries => "series",
            Strategy::GSeries => "gseries",
            Strategy::ModeLaplaceInversion => "laplace",
            Strategy::Auto => "auto",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "series" | "double" | "doubleseries" => Ok(Strategy::DoubleSeries),
            "gseries" | "g" => Ok(Strategy::GSeries),
            "laplace" | "inversion" => Ok(Strategy::ModeLaplaceInversion),
            "auto" => Ok(Strategy::Auto),
            other => Err(Error::Controls(format!("unknown strategy '{other}'"))),
        }
    }
}

/// Numerical Laplace inversion method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inversion {
    /// Gaver-Stehfest with an even number of terms in [8, 20].
    Stehfest { n_terms: usize },
    /// Trapezoidal rule on an optimized Talbot contour.
    Talbot { nodes: usize },
}

impl Default for Inversion {
    fn default() -> Self {
        Inversion::Talbot { nodes: 32 }
    }
}

/// Truncation and tolerance knobs for the infinite sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControls {
    /// Number of eigenvalues r_n retained.
    pub n_modes: usize,
    /// Relative stopping tolerance for power series.
    pub tol_rel: f64,
    /// Hard cap on power-series terms per kernel.
    pub max_terms: usize,
    /// Largest accepted ratio sum|term| / |sum| before a series is refused.
    pub max_condition: f64,
    pub strategy: Strategy,
    pub inversion: Inversion,
    /// Sum the r_n^-2 and r_n^-4 parts of the mode kernels outside the series.
    pub tail_correction: bool,
}

impl Default for SeriesControls {
    fn default() -> Self {
        SeriesControls {
            n_modes: 400,
            tol_rel: 1e-12,
            max_terms: 10_000,
            max_condition: 1e8,
            strategy: Strategy::Auto,
            inversion: Inversion::default(),
            tail_correction: true,
        }
    }
}

impl SeriesControls {
    pub fn with_strategy(self, strategy: Strategy) -> Self {
        SeriesControls { strategy, ..self }
    }

    pub fn with_modes(self, n_modes: usize) -> Self {
        SeriesControls { n_modes, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::Controls("n_modes must be at least 1".into()));
        }
        if !(self.tol_rel > 0.0 && self.tol_rel < 1.0) {
            return Err(Error::Controls(format!(
                "tol_rel must lie in (0, 1), got {}",
                self.tol_rel
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::Controls("max_terms must be at least 1".into()));
        }
        if !(self.max_condition >= 1.0) {
            return Err(Error::Controls("max_condition must be >= 1".into()));
        }
        match self.inversion {
            Inversion::Stehfest { n_terms } if n_terms % 2 != 0 || !(8..=20).contains(&n_terms) => {
                Err(Error::Controls(format!(
                    "Stehfest n_terms must be even and in [8, 20], got {n_terms}"
                )))
            }
            Inversion::Talbot { nodes } if !(8..=128).contains(&nodes) => Err(Error::Controls(
                format!("Talbot nodes must lie in [8, 128], got {nodes}"),
            )),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = FluidParams::reference(0.5);
        assert_eq!(p.nu(), 1.48 / 1260.0);
        assert_eq!(p.alpha(), 11.34 / 1260.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(FluidParams::new(1.0, 1.0, 1.0, 1.5).is_err());
        assert!(FluidParams::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(FluidParams::new(-1.0, 1.0, 1.0, 0.5).is_err());
        assert!(FluidParams::new(1.0, -1.0, 1.0, 0.5).is_err());
        assert!(AnnulusGeometry::new(4.0, 1.0, 0.0, 0.0).is_err());
        assert!(AnnulusGeometry::new(1.0, 1.0, 0.0, 0.0).is_err());
        let c = SeriesControls {
            inversion: Inversion::Stehfest { n_terms: 7 },
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [
            Strategy::DoubleSeries,
            Strategy::GSeries,
            Strategy::ModeLaplaceInversion,
            Strategy::Auto,
        ] {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
    }
}
