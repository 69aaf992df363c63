use thiserror::Error;

use crate::params::Strategy;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid fluid parameters: {0}")]
    Params(String),

    #[error("invalid series controls: {0}")]
    Controls(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("root scan failed for root n = {n}: {detail}")]
    RootScan { n: usize, detail: String },

    #[error("eigenvalues were computed for R1 = {eig_r1}, R2 = {eig_r2} but geometry has R1 = {r1}, R2 = {r2}")]
    EigenMismatch {
        eig_r1: f64,
        eig_r2: f64,
        r1: f64,
        r2: f64,
    },

    #[error("{what} did not converge after {terms} terms (partial sum {partial_sum:e})")]
    NonConvergence {
        what: &'static str,
        terms: usize,
        partial_sum: f64,
    },

    #[error("{what} lost significance: term magnitudes exceed the result by a factor {condition:e} (limit {limit:e})")]
    LossOfSignificance {
        what: &'static str,
        condition: f64,
        limit: f64,
    },

    #[error("{what} refused: {reason}")]
    Refused { what: &'static str, reason: String },

    #[error("mode n = {mode} failed under strategy {strategy}: {source}")]
    Mode {
        mode: usize,
        strategy: Strategy,
        #[source]
        source: Box<Error>,
    },

    #[error("finite-difference solver broke down at step {step}: {detail}")]
    Solver { step: usize, detail: String },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical method on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonConvergence { .. }
            | Error::LossOfSignificance { .. }
            | Error::Refused { .. }
            | Error::Solver { .. }
            | Error::RootScan { .. } => true,
            Error::Mode { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
