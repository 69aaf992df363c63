//! Implicit finite-difference solver for
//!
//! ∂ω/∂t = (ν + α D_t^β) L ω,  L = ∂²/∂r² + (1/r) ∂/∂r − 1/r²,
//!
//! with ω(r, 0) = 0 and ω(R_i, t) = R_i Ω_i t. The fractional derivative is
//! discretized by the Grünwald–Letnikov convolution over the full history;
//! since ω starts from rest this coincides with the Riemann–Liouville
//! derivative.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{AnnulusGeometry, FluidParams};

/// Uniform space-time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Interior radial nodes; Δr = (R2 - R1) / (nr + 1).
    pub nr: usize,
    pub dt: f64,
    pub t_end: f64,
}

impl GridSpec {
    pub fn new(nr: usize, dt: f64, t_end: f64) -> Result<Self> {
        let g = GridSpec { nr, dt, t_end };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nr < 8 {
            return Err(Error::domain("GridSpec", format!("nr must be >= 8, got {}", self.nr)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain("GridSpec", format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(Error::domain(
                "GridSpec",
                format!("t_end = {} must be at least dt = {}", self.t_end, self.dt),
            ));
        }
        Ok(())
    }

    /// Number of time steps; t_end is rounded to a whole number of steps.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

/// Grünwald–Letnikov weights w_0..w_M of D^β.
#[derive(Debug, Clone, PartialEq)]
pub struct GLWeights {
    pub beta: f64,
    pub weights: Vec<f64>,
}

pub fn gl_weights(beta: f64, m: usize) -> Result<GLWeights> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain("gl_weights", format!("beta must lie in (0, 1], got {beta}")));
    }
    let mut weights = Vec::with_capacity(m + 1);
    weights.push(1.0);
    for k in 1..=m {
        let prev = weights[k - 1];
        weights.push(prev * (1.0 - (beta + 1.0) / k as f64));
    }
    Ok(GLWeights { beta, weights })
}

/// ω at every node (walls included) and every time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub r1: f64,
    pub dr: f64,
    pub dt: f64,
    /// Nodes per level, nr + 2.
    pub nodes: usize,
    /// Levels 0..=steps, row-major.
    values: Vec<f64>,
}

impl FieldGrid {
    pub fn levels(&self) -> usize {
        self.values.len() / self.nodes
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.r1 + i as f64 * self.dr
    }

    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.dt
    }

    pub fn level(&self, m: usize) -> &[f64] {
        &self.values[m * self.nodes..(m + 1) * self.nodes]
    }

    /// Index of the level at time t, which must lie on the grid.
    pub fn level_at(&self, t: f64) -> Result<usize> {
        let m = (t / self.dt).round();
        if !(m >= 0.0 && (m as usize) < self.levels() && (m * self.dt - t).abs() <= 1e-9 * self.dt.max(t)) {
            return Err(Error::domain("FieldGrid", format!("t = {t} is not a time level")));
        }
        Ok(m as usize)
    }

    /// ω(r, t) by four-point Lagrange interpolation in r at a grid time.
    pub fn sample(&self, r: f64, t: f64) -> Result<f64> {
        let m = self.level_at(t)?;
        let r2 = self.radius(self.nodes - 1);
        if !(r >= self.r1 - 1e-12 && r <= r2 + 1e-12) {
            return Err(Error::domain("FieldGrid", format!("r = {r} is outside [{}, {r2}]", self.r1)));
        }
        let x = (r - self.r1) / self.dr;
        let nearest = x.round();
        let row = self.level(m);
        if (x - nearest).abs() < 1e-9 {
            return Ok(row[nearest as usize]);
        }
        let start = (x.floor() as isize - 1).clamp(0, self.nodes as isize - 4) as usize;
        let mut v = 0.0;
        for a in 0..4 {
            let mut l = 1.0;
            for b in 0..4 {
                if a != b {
                    l *= (x - (start + b) as f64) / (a as f64 - b as f64);
                }
            }
            v += l * row[start + a];
        }
        Ok(v)
    }

    /// Writes `r,t,omega` rows for every node and level.
    pub fn write_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "r,t,omega")?;
        for m in 0..self.levels() {
            let t = self.time(m);
            for (i, v) in self.level(m).iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", self.radius(i), t, v)?;
            }
        }
        Ok(())
    }
}

/// Tridiagonal coefficients of the discrete L at interior node r.
fn stencil(r: f64, dr: f64) -> (f64, f64, f64) {
    let h2 = 1.0 / (dr * dr);
    let h1 = 1.0 / (2.0 * r * dr);
    (h2 - h1, -2.0 * h2 - 1.0 / (r * r), h2 + h1)
}

/// Solves (I - g L) x = rhs on the interior with the Thomas algorithm.
fn thomas(stencils: &[(f64, f64, f64)], g: f64, rhs: &mut [f64], scratch: &mut [f64], step: usize) -> Result<()> {
    let n = rhs.len();
    let mut pivot = 1.0 - g * stencils[0].1;
    for i in 0..n {
        if i > 0 {
            let (lo, diag, _) = stencils[i];
            let a = -g * lo;
            pivot = 1.0 - g * diag - a * scratch[i - 1];
            rhs[i] -= a * rhs[i - 1];
        }
        if !(pivot.abs() > f64::MIN_POSITIVE) || !pivot.is_finite() {
            return Err(Error::Solver {
                step,
                detail: format!("zero pivot at interior node {i}"),
            });
        }
        scratch[i] = -g * stencils[i].2 / pivot;
        rhs[i] /= pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver {
            step,
            detail: "non-finite solution".into(),
        });
    }
    Ok(())
}

/// Applies the discrete L to a full row (walls included), interior only.
fn apply_l(stencils: &[(f64, f64, f64)], row: &[f64], out: &mut [f64]) {
    for (i, &(lo, diag, up)) in stencils.iter().enumerate() {
        out[i] = lo * row[i] + diag * row[i + 1] + up * row[i + 2];
    }
}

const HISTORY_CHUNK: usize = 64;

pub fn solve(params: &FluidParams, geometry: &AnnulusGeometry, grid: &GridSpec) -> Result<FieldGrid> {
    params.validate()?;
    geometry.validate()?;
    grid.validate()?;
    let steps = grid.steps();
    let dt = grid.dt;
    let nodes = grid.nr + 2;
    let dr = geometry.gap() / (grid.nr + 1) as f64;
    let nu = params.nu();
    let alpha = params.alpha();
    let beta = params.beta;
    let stencils: Vec<_> = (1..=grid.nr)
        .map(|i| stencil(geometry.r1 + i as f64 * dr, dr))
        .collect();
    let memory = alpha > 0.0;
    // First difference at beta = 1; its weights vanish beyond k = 1.
    let history_len = if beta == 1.0 { 1 } else { steps };
    let weights = gl_weights(beta, history_len)?.weights;
    let c = dt * alpha * dt.powf(-beta);
    let g = dt * nu + if memory { c * weights[0] } else { 0.0 };

    let mut values = vec![0.0; nodes * (steps + 1)];
    let mut history = vec![0.0; nodes];
    let mut l_history = vec![0.0; grid.nr];
    let mut scratch = vec![0.0; grid.nr];
    let mut rhs = vec![0.0; grid.nr];
    for m in 0..steps {
        let t_next = (m + 1) as f64 * dt;
        let wall_in = geometry.r1 * geometry.omega1 * t_next;
        let wall_out = geometry.r2 * geometry.omega2 * t_next;
        let (past, rest) = values.split_at_mut((m + 1) * nodes);
        let current = &past[m * nodes..];
        rhs.copy_from_slice(&current[1..nodes - 1]);
        if memory {
            // history = sum_{k>=1} w_k ω^{m+1-k}
            let depth = (m + 1).min(history_len);
            history
                .par_chunks_mut(HISTORY_CHUNK)
                .enumerate()
                .for_each(|(chunk, h)| {
                    let offset = chunk * HISTORY_CHUNK;
                    h.fill(0.0);
                    for (k, w) in weights.iter().enumerate().take(depth + 1).skip(1) {
                        let row = &past[(m + 1 - k) * nodes + offset..][..h.len()];
                        for (acc, v) in h.iter_mut().zip(row) {
                            *acc += w * v;
                        }
                    }
                });
            apply_l(&stencils, &history, &mut l_history);
            for (r, l) in rhs.iter_mut().zip(&l_history) {
                *r += c * l;
            }
        }
        rhs[0] += g * stencils[0].0 * wall_in;
        rhs[grid.nr - 1] += g * stencils[grid.nr - 1].2 * wall_out;
        thomas(&stencils, g, &mut rhs, &mut scratch, m + 1)?;
        let next = &mut rest[..nodes];
        next[0] = wall_in;
        next[1..nodes - 1].copy_from_slice(&rhs);
        next[nodes - 1] = wall_out;
    }
    Ok(FieldGrid {
        r1: geometry.r1,
        dr,
        dt,
        nodes,
        values,
    })
}

/// Successive grids of a convergence ladder and ω at the probe point on each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub rungs: Vec<(GridSpec, f64)>,
    /// Relative change between the last two rungs.
    pub last_change: f64,
    pub converged: bool,
}

impl Ladder {
    pub fn value(&self) -> f64 {
        self.rungs.last().expect("ladder has rungs").1
    }
}

/// Halves dt and doubles the radial resolution (nested nodes) until ω(r, t)
/// changes by less than `tol_rel` between rungs, or `max_rungs` are used.
pub fn ladder(
    params: &FluidParams,
    geometry: &AnnulusGeometry,
    base: GridSpec,
    r: f64,
    t: f64,
    tol_rel: f64,
    max_rungs: usize,
) -> Result<Ladder> {
    let mut grid = GridSpec { t_end: t, ..base };
    let mut rungs: Vec<(GridSpec, f64)> = Vec::new();
    let mut last_change = f64::INFINITY;
    for _ in 0..max_rungs.max(2) {
        let v = solve(params, geometry, &grid)?.sample(r, t)?;
        if let Some(&(_, prev)) = rungs.last() {
            last_change = ((v - prev) / v).abs();
        }
        rungs.push((grid, v));
        if last_change < tol_rel {
            break;
        }
        grid = GridSpec {
            nr: 2 * grid.nr + 1,
            dt: grid.dt / 2.0,
            t_end: t,
        };
    }
    Ok(Ladder {
        rungs,
        last_change,
        converged: last_change < tol_rel,
    })
}
