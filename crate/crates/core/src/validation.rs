//! Cross-oracle checks of the solver, grouped into nine numbered criteria.
//!
//! Every check records the measured discrepancy next to its threshold so a
//! failing run still reports how far off it was.

use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;

use crate::analytic::Flow;
use crate::eigen::{find_roots, unmatched_sign_changes, EigenvalueSet};
use crate::error::{Error, Result};
use crate::fd::{self, GridSpec};
use crate::params::{AnnulusGeometry, FluidParams, SeriesControls, Strategy};
use crate::special::wronskian;
use crate::special::{g_function, gamma, j0, j1, ln_gamma, y0, y1, GFunctionArgs};

/// Probe radii and times shared by the oracle comparisons.
pub const PROBE_RADII: [f64; 3] = [1.3, 2.5, 3.8];
pub const PROBE_TIMES: [f64; 3] = [1.0, 5.0, 10.0];
/// Times of the velocity-ordering claims.
pub const ORDERING_TIMES: [f64; 3] = [3.0, 6.0, 9.0];
/// Modes at which every double series of the reference fluid still converges
/// at beta = 1 (alpha r_n^2 < 1).
pub const SERIES_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check could not be evaluated.
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// True when an error came from a numerical method failing.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub numerical: bool,
}

impl Check {
    /// Passes when `measured < threshold`.
    pub fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let status = if measured < threshold { Status::Pass } else { Status::Fail };
        Check {
            name: name.into(),
            measured,
            threshold,
            status,
            detail: None,
            numerical: false,
        }
    }

    /// Passes when no violations were counted.
    pub fn count(name: impl Into<String>, violations: usize) -> Self {
        Check {
            name: name.into(),
            measured: violations as f64,
            threshold: 0.0,
            status: if violations == 0 { Status::Pass } else { Status::Fail },
            detail: None,
            numerical: false,
        }
    }

    pub fn error(name: impl Into<String>, threshold: f64, err: &Error) -> Self {
        Check {
            name: name.into(),
            measured: f64::NAN,
            threshold,
            status: Status::Error,
            detail: Some(err.to_string()),
            numerical: err.is_numerical(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    fn from_result(name: &str, threshold: f64, r: Result<Check>) -> Check {
        r.unwrap_or_else(|e| Check::error(name, threshold, &e))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        let failed: Vec<_> = self
            .checks
            .iter()
            .filter(|c| c.status != Status::Pass)
            .map(|c| match c.status {
                Status::Error => format!("{} (error)", c.name),
                _ => format!("{} ({:.3e} vs {:.1e})", c.name, c.measured, c.threshold),
            })
            .collect();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "criterion {} [{}] {}: {}/{} checks, {:.1} s",
            self.id,
            verdict,
            self.title,
            self.checks.len() - failed.len(),
            self.checks.len(),
            self.seconds
        );
        if !failed.is_empty() {
            line.push_str("; failing: ");
            line.push_str(&failed.join(", "));
        }
        line
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub level: Level,
    pub criteria: Vec<CriterionReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(CriterionReport::passed)
    }

    /// 0 when everything passes, 2 if a numerical method failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let checks = || self.criteria.iter().flat_map(|c| &c.checks);
        if checks().any(|c| c.status == Status::Error && c.numerical) {
            2
        } else if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Inputs shared by the criteria: the fluid and annulus under test plus the
/// controls of the "configured strategy" check.
#[derive(Debug, Clone)]
pub struct Context {
    pub params: FluidParams,
    pub geometry: AnnulusGeometry,
    pub controls: SeriesControls,
    eigen: EigenvalueSet,
}

impl Context {
    pub fn new(params: FluidParams, geometry: AnnulusGeometry, controls: SeriesControls) -> Result<Self> {
        params.validate()?;
        geometry.validate()?;
        controls.validate()?;
        let eigen = find_roots(geometry.r1, geometry.r2, controls.n_modes.max(SERIES_MODES))?;
        Ok(Context {
            params,
            geometry,
            controls,
            eigen,
        })
    }

    pub fn reference() -> Self {
        Context::new(FluidParams::reference(1.0), AnnulusGeometry::reference(), SeriesControls::default())
            .expect("reference inputs are valid")
    }

    fn flow(&self, params: FluidParams, controls: SeriesControls) -> Result<Flow> {
        Flow::new(params, self.geometry, &self.eigen, controls)
    }

    fn auto_flow(&self, beta: f64) -> Result<Flow> {
        self.flow(
            self.params.with_beta(beta),
            self.controls.with_strategy(Strategy::Auto),
        )
    }

    fn newtonian(&self) -> FluidParams {
        FluidParams {
            alpha1: 0.0,
            beta: 1.0,
            ..self.params
        }
    }

    /// `n` equal cells across the gap, sampled at their centres.
    fn radii(&self, n: usize) -> Vec<f64> {
        let g = &self.geometry;
        (0..n).map(|i| g.r1 + g.gap() * (i as f64 + 0.5) / n as f64).collect()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> Vec<Check>) -> CriterionReport {
    let start = Instant::now();
    let checks = f();
    CriterionReport {
        id,
        title,
        checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Maximum of `f` over `points`, or the first error.
fn worst<T>(points: impl IntoIterator<Item = T>, mut f: impl FnMut(T) -> Result<f64>) -> Result<(f64, usize)> {
    let mut max = 0.0f64;
    let mut n = 0;
    for p in points {
        let v = f(p)?;
        max = if v.is_nan() { f64::INFINITY } else { max.max(v) };
        n += 1;
    }
    Ok((max, n))
}

pub fn criterion_1_identities() -> CriterionReport {
    timed(1, "special-function identities", || {
        let mut checks = Vec::new();
        let wronskian = (0..200)
            .map(|i| {
                let z = 0.1 * 1000f64.powf(i as f64 / 199.0);
                (j0(z) * y1(z) - j1(z) * y0(z) - wronskian(z)).abs()
            })
            .fold(0.0, f64::max);
        checks.push(Check::below("wronskian residual, 200 points in [0.1, 100]", wronskian, 1e-11));

        let controls = SeriesControls::default();
        let mut cases = Vec::new();
        for &a in &[0.1, 0.35, 0.6, 0.85, 1.0] {
            for &(b, c) in &[(-1.5, 1.0), (-0.5, 2.0), (0.0, 3.5), (-2.0, 0.5), (0.2, 1.5)] {
                for &t in &[0.3, 4.0] {
                    cases.push(GFunctionArgs { a, b, c, d: 0.0, t });
                }
            }
        }
        // With d = 0 only the first term t^(ca-b-1) / Gamma(ca-b) survives.
        let d0 = worst(cases.iter().filter(|g| g.c * g.a - g.b > 0.0), |g| {
            let p = g.c * g.a - g.b;
            let exact = ((p - 1.0) * g.t.ln() - ln_gamma(p)?).exp();
            Ok(rel(g_function(*g, &controls)?, exact))
        });
        checks.push(match d0 {
            Ok((m, n)) => Check::below("G-function at d = 0 vs single term", m, 1e-10)
                .with_detail(format!("{n} parameter sets")),
            Err(e) => Check::error("G-function at d = 0 vs single term", 1e-10, &e),
        });

        let exp_cases: Vec<(f64, f64)> = (-20..=20)
            .map(|i| (i as f64 / 4.0, 4.0))
            .collect();
        let mut failures = Vec::new();
        let mut max = 0.0f64;
        for &(d, t) in &exp_cases {
            let args = GFunctionArgs { a: 1.0, b: 0.0, c: 1.0, d, t };
            match g_function(args, &controls) {
                Ok(g) => {
                    let e = rel(g, (d * t).exp());
                    max = max.max(e);
                    if e >= 1e-10 {
                        failures.push(format!("dt = {}", d * t));
                    }
                }
                Err(err) => {
                    max = f64::INFINITY;
                    failures.push(format!("dt = {}: {err}", d * t));
                }
            }
        }
        let mut c = Check::below("G-function at a = c = 1, b = 0 vs exp(dt), |dt| <= 20", max, 1e-10);
        if !failures.is_empty() {
            c = c.with_detail(failures.join("; "));
        }
        checks.push(c);

        checks.push(Check::from_result("GL weights at beta = 1", 0.0, (|| {
            let w = fd::gl_weights(1.0, 16)?.weights;
            let bad = w
                .iter()
                .enumerate()
                .filter(|&(k, &v)| v != [1.0, -1.0].get(k).copied().unwrap_or(0.0))
                .count();
            Ok(Check::count("GL weights at beta = 1 are {1, -1, 0, ...}", bad))
        })()));
        checks
    })
}

pub fn criterion_2_eigenvalues(ctx: &Context) -> CriterionReport {
    timed(2, "eigenvalues", || {
        let g = &ctx.geometry;
        let set = match find_roots(g.r1, g.r2, 50) {
            Ok(s) => s,
            Err(e) => return vec![Check::error("find 50 roots", 0.0, &e)],
        };
        let residual = set
            .residuals
            .as_ref()
            .map_or(f64::INFINITY, |r| r.iter().copied().fold(0.0, f64::max));
        let spacing = set.spacing();
        let spread = set
            .roots
            .windows(2)
            .enumerate()
            .filter(|(i, _)| i + 1 > 20)
            .map(|(_, w)| ((w[1] - w[0]) - spacing).abs() / spacing)
            .fold(0.0, f64::max);
        let step = PI / (100.0 * g.gap());
        // Half a spacing past r_50 keeps r_51 out of the scan.
        let r_max = set.roots[set.len() - 1] + 0.5 * spacing;
        let missing = unmatched_sign_changes(&set, step, r_max);
        let mut increasing = set.roots.windows(2).filter(|w| w[1] <= w[0]).count();
        increasing += usize::from(set.len() != 50);
        vec![
            Check::below("max residual |B1(R1 r_n)| over 50 roots", residual, 1e-10),
            Check::below("spacing deviation from pi/(R2-R1), n > 20", spread, 0.01),
            Check::count("50 strictly increasing roots", increasing),
            Check::count("sign changes missed by a dense scan", missing.len()),
        ]
    })
}

pub fn criterion_3_boundary(ctx: &Context) -> CriterionReport {
    timed(3, "boundary and initial conditions", || {
        let g = ctx.geometry;
        let mut checks = Vec::new();
        for &beta in &[0.3, 0.5, 0.8, 1.0] {
            let name = format!("wall velocity error / steady part, beta = {beta}");
            let r = (|| {
                let flow = ctx.auto_flow(beta)?;
                let (m, _) = worst(PROBE_TIMES, |t| {
                    let s = flow.velocity_profile(&[g.r1, g.r2], t)?;
                    let e1 = (s[0].omega - g.r1 * g.omega1 * t).abs() / flow.steady_part(g.r1, t)?.abs();
                    let e2 = (s[1].omega - g.r2 * g.omega2 * t).abs() / flow.steady_part(g.r2, t)?.abs();
                    Ok(e1.max(e2))
                })?;
                let nonzero = flow
                    .velocity_profile(&ctx.radii(7), 0.0)?
                    .iter()
                    .filter(|s| s.omega != 0.0)
                    .count();
                Ok((m, nonzero))
            })();
            match r {
                Ok((m, nonzero)) => {
                    checks.push(Check::below(name, m, 1e-9));
                    checks.push(Check::count(format!("omega(r, 0) != 0, beta = {beta}"), nonzero));
                }
                Err(e) => checks.push(Check::error(name, 1e-9, &e)),
            }
        }
        checks
    })
}

fn series_controls(ctx: &Context, strategy: Strategy) -> SeriesControls {
    SeriesControls {
        n_modes: SERIES_MODES,
        ..ctx.controls
    }
    .with_strategy(strategy)
}

pub fn criterion_4_second_grade(ctx: &Context) -> CriterionReport {
    timed(4, "beta = 1 double series vs exponential closed form", || {
        let radii = ctx.radii(10);
        let times: Vec<f64> = (1..=10).map(f64::from).collect();
        let r = (|| {
            let flow = ctx.flow(ctx.params.with_beta(1.0), series_controls(ctx, Strategy::DoubleSeries))?;
            let mut v = 0.0f64;
            let mut s = 0.0f64;
            for &t in &times {
                for sample in flow.stress_profile(&radii, t)? {
                    v = v.max(rel(sample.omega, flow.velocity_sg_closed(sample.r, t)?));
                    s = s.max(rel(sample.tau.expect("stress"), flow.shear_sg_closed(sample.r, t)?));
                }
            }
            Ok((v, s))
        })();
        let detail = format!("{} modes, 10 x 10 grid r in [1.15, 3.85], t in [1, 10]", SERIES_MODES);
        match r {
            Ok((v, s)) => vec![
                Check::below("velocity relative difference", v, 1e-8).with_detail(detail.clone()),
                Check::below("shear stress relative difference", s, 1e-8).with_detail(detail),
            ],
            Err(e) => vec![Check::error("beta = 1 series evaluation", 1e-8, &e)],
        }
    })
}

pub fn criterion_5_strategies(ctx: &Context) -> CriterionReport {
    timed(5, "strategy cross-agreement", || {
        let radii = ctx.radii(5);
        let times = [2.0, 4.0, 6.0, 8.0, 10.0];
        let mut checks = Vec::new();
        for &beta in &[0.3, 0.5, 0.8] {
            let name = format!("max pairwise relative difference, beta = {beta}");
            let r = (|| {
                let flows = [Strategy::DoubleSeries, Strategy::GSeries, Strategy::ModeLaplaceInversion]
                    .map(|s| ctx.flow(ctx.params.with_beta(beta), series_controls(ctx, s)));
                let flows: Vec<Flow> = flows.into_iter().collect::<Result<_>>()?;
                let mut m = 0.0f64;
                for &t in &times {
                    let v: Vec<Vec<_>> = flows
                        .iter()
                        .map(|f| f.velocity_profile(&radii, t))
                        .collect::<Result<_>>()?;
                    for i in 0..radii.len() {
                        for a in 0..3 {
                            for b in a + 1..3 {
                                m = m.max(rel(v[a][i].omega, v[b][i].omega));
                            }
                        }
                    }
                }
                Ok(m)
            })();
            checks.push(Check::from_result(&name, 1e-6, r.map(|m| {
                Check::below(&name, m, 1e-6).with_detail(format!("{SERIES_MODES} modes, 5 x 5 grid"))
            })));
        }
        checks
    })
}

/// Grid of the finite-difference comparisons.
pub const FD_GRID: GridSpec = GridSpec {
    nr: 400,
    dt: 1e-3,
    t_end: 10.0,
};

pub fn criterion_6_pde_oracle(ctx: &Context) -> CriterionReport {
    timed(6, "finite-difference oracle", || {
        let g = ctx.geometry;
        let mut checks = Vec::new();
        let mut compare = |label: String, threshold: f64, params: FluidParams, closed: bool| {
            let r = (|| {
                let grid = fd::solve(&params, &g, &FD_GRID)?;
                let flow = ctx.flow(params, ctx.controls.with_strategy(Strategy::Auto))?;
                let mut out = Vec::new();
                for &t in &PROBE_TIMES {
                    for &r in &PROBE_RADII {
                        let a = if closed {
                            flow.velocity_sg_closed(r, t)?
                        } else {
                            flow.velocity(r, t)?.omega
                        };
                        let n = grid.sample(r, t)?;
                        out.push(
                            Check::below(probe_name(&label, r, t), rel(n, a), threshold)
                                .with_detail(format!("fd {n:.6e}, analytic {a:.6e}")),
                        );
                    }
                }
                Ok(out)
            })();
            match r {
                Ok(c) => checks.extend(c),
                Err(e) => checks.push(Check::error(label, threshold, &e)),
            }
        };
        for &beta in &[0.5, 0.8, 1.0] {
            compare(format!("velocity vs FD, beta = {beta}"), 0.02, ctx.params.with_beta(beta), false);
        }
        compare("Newtonian velocity vs FD".into(), 0.005, ctx.newtonian(), true);
        checks
    })
}

fn probe_name(label: &str, r: f64, t: f64) -> String {
    format!("{label} at (r, t) = ({r}, {t})")
}

/// (μ + α1 D_t^β)(∂_r − 1/r) ω evaluated from velocity samples: central
/// differences of step `dr` in r and the L1 scheme of step `dt` in t.
/// Returns one row per radius with one entry per requested time.
pub fn operator_stress(flow: &Flow, radii: &[f64], times: &[f64], dr: f64, dt: f64) -> Result<Vec<Vec<f64>>> {
    let p = *flow.params();
    let steps: Vec<usize> = times.iter().map(|t| (t / dt).round() as usize).collect();
    let n_max = steps.iter().copied().max().unwrap_or(0);
    let mut points = Vec::with_capacity(3 * radii.len());
    for &r in radii {
        points.extend_from_slice(&[r - dr, r, r + dr]);
    }
    // strain[i][l] = (∂_r − 1/r) ω at radius i and time l dt.
    let mut strain = vec![vec![0.0; n_max + 1]; radii.len()];
    for l in 1..=n_max {
        let s = flow.velocity_profile(&points, l as f64 * dt)?;
        for (i, &r) in radii.iter().enumerate() {
            let (lo, mid, hi) = (s[3 * i].omega, s[3 * i + 1].omega, s[3 * i + 2].omega);
            strain[i][l] = (hi - lo) / (2.0 * dr) - mid / r;
        }
    }
    let beta = p.beta;
    let b: Vec<f64> = (0..n_max)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                let k = k as f64;
                (k + 1.0).powf(1.0 - beta) - k.powf(1.0 - beta)
            }
        })
        .collect();
    let scale = dt.powf(-beta) / gamma(2.0 - beta)?;
    Ok(strain
        .iter()
        .map(|g| {
            steps
                .iter()
                .map(|&n| {
                    let frac: f64 = (0..n).map(|k| b[k] * (g[n - k] - g[n - k - 1])).sum();
                    p.mu * g[n] + p.alpha1 * scale * frac
                })
                .collect()
        })
        .collect())
}

pub fn criterion_7_shear_operator(ctx: &Context) -> CriterionReport {
    timed(7, "shear stress vs operator applied to the velocity", || {
        let label = "shear stress vs operator, beta = 0.5";
        let r = (|| {
            let flow = ctx.auto_flow(0.5)?;
            let oracle = operator_stress(&flow, &PROBE_RADII, &PROBE_TIMES, 1e-3, 1e-3)?;
            let mut out = Vec::new();
            for (i, &r) in PROBE_RADII.iter().enumerate() {
                for (j, &t) in PROBE_TIMES.iter().enumerate() {
                    let tau = flow.shear_stress(r, t)?.tau.expect("stress");
                    let o = oracle[i][j];
                    out.push(
                        Check::below(probe_name(label, r, t), rel(o, tau), 0.01)
                            .with_detail(format!("operator {o:.6e}, series {tau:.6e}")),
                    );
                }
            }
            Ok(out)
        })();
        r.unwrap_or_else(|e| vec![Check::error(label, 0.01, &e)])
    })
}

/// Betas of the ordering claim, largest velocity first; the second grade
/// (beta = 1) and Newtonian fluids follow.
pub const ORDERING_BETAS: [f64; 3] = [0.3, 0.6, 0.9];

pub fn criterion_8_figure_claims(ctx: &Context) -> CriterionReport {
    timed(8, "velocity ordering in beta", || {
        let r = (|| {
            let mut flows = Vec::new();
            for &beta in ORDERING_BETAS.iter().chain(&[1.0]) {
                flows.push(ctx.auto_flow(beta)?);
            }
            flows.push(ctx.flow(ctx.newtonian(), ctx.controls.with_strategy(Strategy::Auto))?);
            let mut out = Vec::new();
            for &t in &ORDERING_TIMES {
                let v: Vec<Vec<f64>> = flows
                    .iter()
                    .map(|f| Ok(f.velocity_profile(&PROBE_RADII, t)?.iter().map(|s| s.omega).collect()))
                    .collect::<Result<_>>()?;
                for (i, &r) in PROBE_RADII.iter().enumerate() {
                    let col: Vec<f64> = v.iter().map(|row| row[i]).collect();
                    let broken = col.windows(2).filter(|w| !(w[0] > w[1])).count();
                    let values: Vec<String> = col.iter().map(|x| format!("{x:.4e}")).collect();
                    out.push(
                        Check::count(probe_name("strict ordering 0.3 > 0.6 > 0.9 > 1 > Newtonian", r, t), broken)
                            .with_detail(values.join(" / ")),
                    );
                }
                let spread = |i: usize| v[0][i] - v[2][i];
                for i in [0, 2] {
                    out.push(
                        Check::count(
                            format!("spread(0.3, 0.9) at r = {} exceeds r = 2.5, t = {t}", PROBE_RADII[i]),
                            usize::from(!(spread(i) > spread(1))),
                        )
                        .with_detail(format!("{:.4e} vs {:.4e}", spread(i), spread(1))),
                    );
                }
            }
            Ok(out)
        })();
        r.unwrap_or_else(|e| vec![Check::error("velocity ordering", 0.0, &e)])
    })
}

pub fn criterion_9_linearity(ctx: &Context) -> CriterionReport {
    timed(9, "linearity in the wall accelerations", || {
        let name = "relative deviation from lambda scaling";
        let r = (|| {
            let mut m = 0.0f64;
            for &beta in &[0.5, 1.0] {
                let params = ctx.params.with_beta(beta);
                let base = ctx.flow(params, ctx.controls)?;
                for &lambda in &[-1.0, 0.5, 3.0] {
                    let g = ctx.geometry.with_omegas(lambda * ctx.geometry.omega1, lambda * ctx.geometry.omega2);
                    let scaled = Flow::new(params, g, &ctx.eigen, ctx.controls)?;
                    for &t in &PROBE_TIMES {
                        let a = base.stress_profile(&PROBE_RADII, t)?;
                        let b = scaled.stress_profile(&PROBE_RADII, t)?;
                        for (x, y) in a.iter().zip(&b) {
                            m = m.max(rel(y.omega, lambda * x.omega));
                            m = m.max(rel(y.tau.expect("stress"), lambda * x.tau.expect("stress")));
                        }
                    }
                }
            }
            Ok(m)
        })();
        vec![Check::from_result(name, 1e-12, r.map(|m| Check::below(name, m, 1e-12)))]
    })
}

/// Evaluates the context's own fluid with its configured strategy and
/// compares it against numerical inversion at the probe points.
pub fn configured_strategy_check(ctx: &Context) -> CriterionReport {
    timed(0, "configured strategy vs numerical inversion", || {
        let name = format!(
            "strategy {} at beta = {} vs inversion",
            ctx.controls.strategy, ctx.params.beta
        );
        let r = (|| {
            let flow = ctx.flow(ctx.params, ctx.controls)?;
            let reference = ctx.flow(ctx.params, ctx.controls.with_strategy(Strategy::ModeLaplaceInversion))?;
            let (m, _) = worst(PROBE_TIMES, |t| {
                let a = flow.velocity_profile(&[PROBE_RADII[0], PROBE_RADII[2]], t)?;
                let b = reference.velocity_profile(&[PROBE_RADII[0], PROBE_RADII[2]], t)?;
                Ok(a.iter().zip(&b).map(|(x, y)| rel(x.omega, y.omega)).fold(0.0, f64::max))
            })?;
            Ok(Check::below(&name, m, 1e-6))
        })();
        vec![Check::from_result(&name, 1e-6, r)]
    })
}

/// Runs the criteria of the given level.
pub fn run(ctx: &Context, level: Level) -> Report {
    let mut criteria = vec![
        configured_strategy_check(ctx),
        criterion_1_identities(),
        criterion_2_eigenvalues(ctx),
        criterion_3_boundary(ctx),
        criterion_4_second_grade(ctx),
        criterion_5_strategies(ctx),
    ];
    if level == Level::Full {
        criteria.push(criterion_6_pde_oracle(ctx));
        criteria.push(criterion_7_shear_operator(ctx));
    }
    criteria.push(criterion_8_figure_claims(ctx));
    criteria.push(criterion_9_linearity(ctx));
    Report { level, criteria }
}
