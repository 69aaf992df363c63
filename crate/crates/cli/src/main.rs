mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sgflow::validation::{self, Context, Level};
use sgflow::{approximate_roots, fd, find_roots, EigenvalueSet, Flow, FluidParams, Strategy};

use config::{ConfigError, Format, RunConfig};
use table::{Cell, Table};

/// Start-up flow of a fractional second grade fluid between coaxial cylinders.
#[derive(Parser, Debug)]
#[command(name = "sgflow", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// `key = value` file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Number of eigenvalues retained.
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Relative tolerance of the power series.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// auto, series, gseries or laplace.
    #[arg(long, global = true)]
    strategy: Option<String>,
    /// Use r_n = n pi / (R2 - R1) instead of the true roots.
    #[arg(long, global = true)]
    approx_roots: bool,
    /// Omit the `generated` timestamp line.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Any configuration key, e.g. `--set beta=0.7`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug, Clone)]
struct ProfileArgs {
    #[arg(long, default_value_t = 5.0)]
    t: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.6, 0.9])]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 31)]
    r_steps: usize,
}

#[derive(Args, Debug, Clone)]
struct HistoryArgs {
    #[arg(long = "r", value_delimiter = ',', default_values_t = [1.3, 2.5, 3.8])]
    radii: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.6, 0.9])]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    t_steps: usize,
    /// Start the time column at t = 0.
    #[arg(long)]
    include_t0: bool,
}

#[derive(Args, Debug, Clone)]
struct StressArgs {
    /// Profile sweep at this time (the default sweep).
    #[arg(long, conflicts_with = "radii")]
    t: Option<f64>,
    /// History sweep at these radii.
    #[arg(long = "r", value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.6, 0.9])]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 31)]
    r_steps: usize,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 100)]
    t_steps: usize,
    #[arg(long)]
    include_t0: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues r_n as `n,r_n,residual`.
    Roots {
        #[arg(long, default_value_t = 50)]
        n_max: usize,
    },
    /// Velocity profiles `r,beta,omega`.
    Profile(ProfileArgs),
    /// Velocity histories `t,r,beta,omega`.
    History(HistoryArgs),
    /// Shear stress `r,t,beta,tau` over a profile or history sweep.
    Stress(StressArgs),
    /// Runs the acceptance checks and writes a JSON report.
    Validate {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        /// Also write the finite-difference field `r,t,omega` of the configured fluid.
        #[arg(long)]
        fd_dump: Option<PathBuf>,
    },
    /// Profile preset: reference fluid and annulus, beta 0.3, 0.6, 0.9.
    Fig1 {
        #[arg(long, default_value_t = 5.0)]
        t: f64,
        #[arg(long, default_value_t = 101)]
        r_steps: usize,
    },
    /// History preset: reference fluid and annulus at r = 1.3, 2.5, 3.8 over [0, 10].
    Fig2 {
        #[arg(long, default_value_t = 200)]
        t_steps: usize,
        #[arg(long)]
        include_t0: bool,
    },
}

/// Rows carry this beta for the Newtonian fluid.
const NEWTONIAN_BETA: f64 = 0.0;

enum Failure {
    /// Exit 3.
    Invalid(String),
    /// Exit 2.
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Invalid(e.0)
    }
}

impl From<sgflow::Error> for Failure {
    fn from(e: sgflow::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(format!("i/o error: {e}"))
    }
}

fn resolve(common: &Common) -> Result<RunConfig, Failure> {
    let mut c = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Invalid(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        c.set(k, v)?;
    }
    if let Some(f) = common.format {
        c.format = f;
    }
    if let Some(n) = common.modes {
        c.controls.n_modes = n;
    }
    if let Some(t) = common.tol {
        c.controls.tol_rel = t;
    }
    if let Some(s) = &common.strategy {
        c.controls.strategy = s.parse::<Strategy>()?;
    }
    if common.approx_roots {
        c.approx_roots = true;
    }
    c.validate()?;
    Ok(c)
}

fn eigenvalues(c: &RunConfig, n: usize) -> Result<EigenvalueSet, Failure> {
    let g = &c.geometry;
    Ok(if c.approx_roots {
        approximate_roots(g.r1, g.r2, n)?
    } else {
        find_roots(g.r1, g.r2, n)?
    })
}

/// Fluids of a sweep: each requested beta, then second grade and Newtonian.
fn fluids(c: &RunConfig, betas: &[f64]) -> Result<Vec<(f64, FluidParams)>, Failure> {
    let mut out = Vec::new();
    for &b in betas.iter().chain(&[1.0]) {
        if out.iter().any(|&(x, _)| x == b) {
            continue;
        }
        let p = c.params.with_beta(b);
        p.validate()?;
        out.push((b, p));
    }
    out.push((NEWTONIAN_BETA, FluidParams::newtonian(c.params.mu, c.params.rho)));
    Ok(out)
}

fn flows(c: &RunConfig, betas: &[f64]) -> Result<Vec<(f64, Flow)>, Failure> {
    let e = eigenvalues(c, c.controls.n_modes)?;
    fluids(c, betas)?
        .into_iter()
        .map(|(b, p)| Ok((b, Flow::new(p, c.geometry, &e, c.controls)?)))
        .collect()
}

fn radii(c: &RunConfig, steps: usize) -> Result<Vec<f64>, Failure> {
    if steps < 2 {
        return Err(Failure::Invalid(format!("r_steps must be at least 2, got {steps}")));
    }
    let (r1, r2) = (c.geometry.r1, c.geometry.r2);
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                r2
            } else {
                r1 + (r2 - r1) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

fn times(t_max: f64, steps: usize, include_t0: bool) -> Result<Vec<f64>, Failure> {
    if !(t_max > 0.0 && t_max.is_finite()) || steps == 0 {
        return Err(Failure::Invalid(format!(
            "need t_max > 0 and t_steps >= 1, got {t_max} and {steps}"
        )));
    }
    let first = if include_t0 { 0 } else { 1 };
    Ok((first..=steps).map(|i| t_max * i as f64 / steps as f64).collect())
}

fn check_radii(c: &RunConfig, rs: &[f64]) -> Result<(), Failure> {
    match rs.iter().find(|&&r| !c.geometry.contains(r)) {
        Some(r) => Err(Failure::Invalid(format!(
            "r = {r} lies outside the annulus [{}, {}]",
            c.geometry.r1, c.geometry.r2
        ))),
        None => Ok(()),
    }
}

fn check_time(t: f64) -> Result<(), Failure> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("t must be finite and >= 0, got {t}")))
    }
}

fn roots(c: &RunConfig, n_max: usize) -> Result<Table, Failure> {
    if n_max == 0 {
        return Err(Failure::Invalid("n_max must be at least 1".into()));
    }
    let e = eigenvalues(c, n_max)?;
    let mut t = Table::new(&["n", "r_n", "residual"]);
    for (i, &r) in e.roots.iter().enumerate() {
        let res = e.residuals.as_ref().map_or(Cell::Empty, |v| Cell::Num(v[i]));
        t.push(vec![Cell::Int(i + 1), Cell::Num(r), res]);
    }
    Ok(t)
}

fn profile(c: &RunConfig, a: &ProfileArgs) -> Result<Table, Failure> {
    check_time(a.t)?;
    let rs = radii(c, a.r_steps)?;
    let columns: Vec<(f64, Vec<f64>)> = flows(c, &a.betas)?
        .iter()
        .map(|(b, f)| Ok((*b, f.velocity_profile(&rs, a.t)?.iter().map(|s| s.omega).collect())))
        .collect::<Result<_, Failure>>()?;
    let mut t = Table::new(&["r", "beta", "omega"]);
    for (i, &r) in rs.iter().enumerate() {
        for (b, w) in &columns {
            t.push(vec![Cell::Num(r), Cell::Num(*b), Cell::Num(w[i])]);
        }
    }
    Ok(t)
}

fn history(c: &RunConfig, a: &HistoryArgs) -> Result<Table, Failure> {
    check_radii(c, &a.radii)?;
    let ts = times(a.t_max, a.t_steps, a.include_t0)?;
    let fs = flows(c, &a.betas)?;
    let mut t = Table::new(&["t", "r", "beta", "omega"]);
    for &time in &ts {
        let rows: Vec<(f64, Vec<f64>)> = fs
            .iter()
            .map(|(b, f)| Ok((*b, f.velocity_profile(&a.radii, time)?.iter().map(|s| s.omega).collect())))
            .collect::<Result<_, Failure>>()?;
        for (i, &r) in a.radii.iter().enumerate() {
            for (b, w) in &rows {
                t.push(vec![Cell::Num(time), Cell::Num(r), Cell::Num(*b), Cell::Num(w[i])]);
            }
        }
    }
    Ok(t)
}

fn stress(c: &RunConfig, a: &StressArgs) -> Result<Table, Failure> {
    let (rs, ts) = match &a.radii {
        Some(rs) => {
            check_radii(c, rs)?;
            (rs.clone(), times(a.t_max, a.t_steps, a.include_t0)?)
        }
        None => {
            let t = a.t.unwrap_or(5.0);
            check_time(t)?;
            (radii(c, a.r_steps)?, vec![t])
        }
    };
    let fs = flows(c, &a.betas)?;
    let mut t = Table::new(&["r", "t", "beta", "tau"]);
    for &time in &ts {
        let rows: Vec<(f64, Vec<f64>)> = fs
            .iter()
            .map(|(b, f)| {
                let taus = f.stress_profile(&rs, time)?.iter().map(|s| s.tau.unwrap_or(f64::NAN)).collect();
                Ok((*b, taus))
            })
            .collect::<Result<_, Failure>>()?;
        for (i, &r) in rs.iter().enumerate() {
            for (b, w) in &rows {
                t.push(vec![Cell::Num(r), Cell::Num(time), Cell::Num(*b), Cell::Num(w[i])]);
            }
        }
    }
    Ok(t)
}

/// The reference fluid and annulus with the caller's numerical controls.
fn reference(c: &RunConfig) -> RunConfig {
    RunConfig {
        params: FluidParams::reference(c.params.beta),
        geometry: sgflow::AnnulusGeometry::reference(),
        ..c.clone()
    }
}

fn stamp(common: &Common) -> Option<String> {
    (!common.no_timestamp).then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn open_out(common: &Common) -> Result<Box<dyn Write>, Failure> {
    Ok(match &common.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Invalid(format!("cannot write {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn validate(
    c: &RunConfig,
    common: &Common,
    level: LevelArg,
    fd_dump: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let mut dump = match fd_dump {
        Some(p) => Some(BufWriter::new(
            File::create(p).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => None,
    };
    let ctx = Context::new(c.params, c.geometry, c.controls)?;
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let report = validation::run(&ctx, level);
    for criterion in &report.criteria {
        eprintln!("{}", criterion.summary());
    }
    let mut doc = json!({ "config": c, "report": report, "passed": report.passed() });
    if let Some(s) = stamp(common) {
        doc["generated"] = json!(s);
    }
    serde_json::to_writer_pretty(&mut *out, &doc).map_err(io::Error::from)?;
    writeln!(out)?;
    if let Some(w) = dump.as_mut() {
        fd::solve(&c.params, &c.geometry, &c.grid)?.write_csv(w)?;
        w.flush()?;
    }
    Ok(report.exit_code() as u8)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let common = &cli.common;
    let c = resolve(common)?;
    let mut out = open_out(common)?;
    let table = match &cli.command {
        Command::Roots { n_max } => roots(&c, *n_max)?,
        Command::Profile(a) => profile(&c, a)?,
        Command::History(a) => history(&c, a)?,
        Command::Stress(a) => stress(&c, a)?,
        Command::Fig1 { t, r_steps } => {
            let a = ProfileArgs { t: *t, betas: vec![0.3, 0.6, 0.9], r_steps: *r_steps };
            profile(&reference(&c), &a)?
        }
        Command::Fig2 { t_steps, include_t0 } => {
            let a = HistoryArgs {
                radii: vec![1.3, 2.5, 3.8],
                t_max: 10.0,
                betas: vec![0.3, 0.6, 0.9],
                t_steps: *t_steps,
                include_t0: *include_t0,
            };
            history(&reference(&c), &a)?
        }
        Command::Validate { level, fd_dump } => {
            let code = validate(&c, common, *level, fd_dump.as_ref(), &mut out)?;
            out.flush()?;
            return Ok(code);
        }
    };
    table.write(&mut out, c.format, stamp(common).as_deref())?;
    out.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}
