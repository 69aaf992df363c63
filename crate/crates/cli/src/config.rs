//! Flat `key = value` run configuration.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sgflow::fd::GridSpec;
use sgflow::validation::FD_GRID;
use sgflow::{AnnulusGeometry, FluidParams, SeriesControls, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<sgflow::Error> for ConfigError {
    fn from(e: sgflow::Error) -> Self {
        ConfigError(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub params: FluidParams,
    pub geometry: AnnulusGeometry,
    pub controls: SeriesControls,
    pub grid: GridSpec,
    pub approx_roots: bool,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: FluidParams::reference(0.5),
            geometry: AnnulusGeometry::reference(),
            controls: SeriesControls::default(),
            grid: FD_GRID,
            approx_roots: false,
            format: Format::Csv,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("'{key}': cannot parse '{value}'")))
}

fn boolean(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(ConfigError(format!("'{key}': expected a boolean, got '{value}'"))),
    }
}

impl RunConfig {
    /// Applies one setting. Keys are case-insensitive.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        let key = key.trim().to_ascii_lowercase();
        let k = key.as_str();
        match k {
            "mu" => self.params.mu = number(k, value)?,
            "alpha1" => self.params.alpha1 = number(k, value)?,
            "rho" => self.params.rho = number(k, value)?,
            "beta" => self.params.beta = number(k, value)?,
            "r1" => self.geometry.r1 = number(k, value)?,
            "r2" => self.geometry.r2 = number(k, value)?,
            "omega1" => self.geometry.omega1 = number(k, value)?,
            "omega2" => self.geometry.omega2 = number(k, value)?,
            "modes" | "n_modes" => self.controls.n_modes = number(k, value)?,
            "tol" | "tol_rel" => self.controls.tol_rel = number(k, value)?,
            "max_terms" => self.controls.max_terms = number(k, value)?,
            "max_condition" => self.controls.max_condition = number(k, value)?,
            "strategy" => self.controls.strategy = value.parse::<Strategy>()?,
            "tail_correction" => self.controls.tail_correction = boolean(k, value)?,
            "approx_roots" => self.approx_roots = boolean(k, value)?,
            "nr" => self.grid.nr = number(k, value)?,
            "dt" => self.grid.dt = number(k, value)?,
            "t_end" => self.grid.t_end = number(k, value)?,
            "format" => {
                self.format = match value.to_ascii_lowercase().as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(ConfigError(format!("'format': expected csv or json, got '{value}'"))),
                }
            }
            _ => return Err(ConfigError(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("{origin}:{}: expected 'key = value'", i + 1)))?;
            self.set(key, value)
                .map_err(|e| ConfigError(format!("{origin}:{}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        let mut c = RunConfig::default();
        c.apply_text(&text, &path.display().to_string())?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate()?;
        self.geometry.validate()?;
        self.controls.validate()?;
        self.grid.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# fluid\nbeta = 0.7  # fractional order\n\nR2=5\nstrategy = laplace\n", "t").unwrap();
        assert_eq!(c.params.beta, 0.7);
        assert_eq!(c.geometry.r2, 5.0);
        assert_eq!(c.controls.strategy, Strategy::ModeLaplaceInversion);
        c.set("beta", "0.2").unwrap();
        assert_eq!(c.params.beta, 0.2);
    }

    #[test]
    fn rejects_bad_lines() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("beta 0.5", "t").is_err());
        assert!(c.apply_text("colour = red", "t").is_err());
        assert!(c.apply_text("modes = many", "t").is_err());
        let mut c = RunConfig::default();
        c.set("beta", "1.5").unwrap();
        assert!(c.validate().is_err());
    }
}
