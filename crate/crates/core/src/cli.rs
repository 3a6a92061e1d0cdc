//! Command-line front end: `simulate`, `sweep`, `audit`, `gen-ic` and
//! `export-plot`.
//!
//! Exit codes: 0 success, 1 an audit failed, 2 invalid configuration or
//! input, 3 blow-up.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::auditor::{
    existence_from_ledger, run_audits, uniform_bound_constant, viscosity_absorption_report, AuditContext, AuditReport,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::integrator::{simulate, EnergyLedger, LedgerRow, TimeStep, Trajectory};
use crate::rhs::State;
use crate::spectral::snapshot::{write_atomic, write_snapshot};
use crate::spectral::{SpectralField, VectorField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mps", version, about = "Pseudo-spectral micropolar simulator and auditor")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "MPS_THREADS")]
    pub threads: Option<usize>,
    /// Seed used by every random initial-data recipe.
    #[arg(long, global = true)]
    pub seed_override: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and audit it.
    Simulate,
    /// Run the configuration for several values of one parameter.
    Sweep {
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
    },
    /// Re-run the configured audits on a saved ledger.
    Audit {
        #[arg(long)]
        ledger: PathBuf,
    },
    /// Write the initial fields as snapshots.
    GenIc,
    /// Write a whitespace-separated copy of a ledger for plotting.
    ExportPlot {
        #[arg(long)]
        ledger: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepAxis {
    /// Mollification width.
    Eps,
    /// Modes per axis.
    Grid,
    /// Product `μν`, realised as `μ = ν = √value`.
    Muv,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        _ => EXIT_CONFIG,
    }
}

/// Parse-free entry point used by the binary.
pub fn run(cli: Cli) -> i32 {
    let work = || match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    match cli.threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => {
                eprintln!("error: cannot start {n} threads: {e}");
                EXIT_CONFIG
            }
        },
        _ => work(),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed_override {
        cfg.override_seed(seed);
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: Option<&RunConfig>) -> PathBuf {
    match (&cli.out, cfg) {
        (Some(p), _) => p.clone(),
        (None, Some(c)) if c.output_dir.is_relative() => c.base_dir.join(&c.output_dir),
        (None, Some(c)) => c.output_dir.clone(),
        (None, None) => PathBuf::from("."),
    }
}

fn ensure_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Simulate => {
            let cfg = load_config(cli)?;
            let out = out_dir(cli, Some(&cfg));
            let outcome = run_one(&cfg, &out)?;
            println!("{}", outcome.summary);
            Ok(outcome.code)
        }
        Command::Sweep { axis, values } => {
            let cfg = load_config(cli)?;
            cmd_sweep(&cfg, &out_dir(cli, Some(&cfg)), *axis, values)
        }
        Command::Audit { ledger } => {
            let cfg = load_config(cli)?;
            cmd_audit(&cfg, ledger, &out_dir(cli, Some(&cfg)))
        }
        Command::GenIc => {
            let cfg = load_config(cli)?;
            cmd_gen_ic(&cfg, &out_dir(cli, Some(&cfg)))?;
            Ok(EXIT_OK)
        }
        Command::ExportPlot { ledger } => {
            let out = match &cli.out {
                Some(p) => p.clone(),
                None => ledger.parent().map(Path::to_path_buf).unwrap_or_default(),
            };
            cmd_export_plot(ledger, &out)?;
            Ok(EXIT_OK)
        }
    }
}

fn initial_state(cfg: &RunConfig) -> Result<State> {
    let (u0, w0) = cfg.initial_fields()?;
    State::initial(&u0, &w0, cfg.params.eps)
}

fn state_fields(s: &State) -> Vec<&SpectralField> {
    s.u.comps().iter().chain(s.w.comps()).collect()
}

fn write_outputs(traj: &Trajectory, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    traj.ledger.save(&out.join("ledger.csv"))?;
    let mut index = String::from("index,t,file\n");
    for (i, (t, s)) in traj.snapshots.iter().enumerate() {
        let name = format!("snapshot_{i:05}.mpsf");
        write_snapshot(&out.join(&name), &state_fields(s))?;
        let _ = writeln!(index, "{i},{t:?},{name}");
    }
    write_atomic(&out.join("snapshots.csv"), index.as_bytes())
}

fn audit_context(cfg: &RunConfig) -> AuditContext {
    AuditContext {
        calibration: cfg.calibration(),
        t_end: cfg.step.t_end,
    }
}

fn report_lines(report: &AuditReport) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let v = c.value.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "  {:<28} {:<12} {v:<14} {}", c.name, c.status.as_str(), c.detail);
    }
    s
}

/// Result of one run inside `simulate` or `sweep`.
struct RunOutcome {
    code: i32,
    summary: String,
    trajectory: Option<Trajectory>,
}

fn run_one(cfg: &RunConfig, out: &Path) -> Result<RunOutcome> {
    for w in cfg.params.window_warnings() {
        log::warn!("{w}");
    }
    let s0 = initial_state(cfg)?;
    let traj = match simulate(s0, &cfg.params, &cfg.step) {
        Ok(t) => t,
        Err(Error::BlowUp { t, partial }) => {
            if let Some(p) = &partial {
                write_outputs(p, out)?;
            }
            return Ok(RunOutcome {
                code: EXIT_BLOW_UP,
                summary: format!("blow-up at t = {t}; partial results in {}", out.display()),
                trajectory: partial.map(|b| *b),
            });
        }
        Err(e) => return Err(e),
    };
    write_outputs(&traj, out)?;
    let report = run_audits(&traj.ledger, &cfg.params, &cfg.audits, &audit_context(cfg))?;
    write_atomic(&out.join("audit.json"), report.to_json().as_bytes())?;

    let mut summary = String::new();
    let last = traj.ledger.last()?;
    let _ = writeln!(
        summary,
        "t = {}  |u| = {:.6e}  |w| = {:.6e}  steps = {}",
        last.t, last.u_l2, last.w_l2, last.step
    );
    if let Some(e) = report.get("existence_time") {
        match e.value {
            Some(te) => {
                let _ = writeln!(
                    summary,
                    "T_E = {te:.6e}; t_end {} T_E",
                    if cfg.step.t_end <= te { "<=" } else { ">" }
                );
            }
            None => {
                let _ = writeln!(summary, "T_E unavailable: {}", e.detail);
            }
        }
    }
    summary.push_str(&report_lines(&report));
    let code = if report.passed() { EXIT_OK } else { EXIT_AUDIT_FAILED };
    Ok(RunOutcome {
        code,
        summary: summary.trim_end().to_string(),
        trajectory: Some(traj),
    })
}

fn sweep_variant(base: &RunConfig, axis: SweepAxis, v: f64) -> Result<RunConfig> {
    let mut cfg = base.clone();
    match axis {
        SweepAxis::Eps => cfg.params.eps = v,
        SweepAxis::Grid => {
            if !(v >= 4.0 && v.fract() == 0.0) {
                return Err(Error::Config(format!("grid sweep values must be integers, got {v}")));
            }
            cfg.grid.n = v as usize;
        }
        SweepAxis::Muv => {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::Config(format!("mu nu must be positive, got {v}")));
            }
            cfg.params.mu = v.sqrt();
            cfg.params.nu = v.sqrt();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// `(∫_0^{T0} ‖a − b‖² dt)^{1/2}` over the common snapshot times, trapezoidal.
pub fn space_time_difference(a: &Trajectory, b: &Trajectory, t0: f64) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = a
        .snapshots
        .iter()
        .zip(&b.snapshots)
        .take_while(|((ta, _), _)| *ta <= t0 * (1.0 + 1e-12))
        .map(|((ta, sa), (tb, sb))| {
            if (ta - tb).abs() > 1e-12 * ta.abs().max(1.0) {
                return Err(Error::Rejected(format!("snapshot times differ: {ta} vs {tb}")));
            }
            let mut du: VectorField = sa.u.clone();
            du -= &sb.u;
            let mut dw: VectorField = sa.w.clone();
            dw -= &sb.w;
            Ok((*ta, du.norm_sq() + dw.norm_sq()))
        })
        .collect::<Result<_>>()?;
    let total: f64 = pairs
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    Ok(total.sqrt())
}

fn cmd_sweep(base: &RunConfig, out: &Path, axis: SweepAxis, values: &[f64]) -> Result<i32> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let mut base = base.clone();
    if axis == SweepAxis::Eps {
        let TimeStep::Fixed(dt) = base.step.dt else {
            return Err(Error::Config(
                "an eps sweep needs a fixed dt so snapshot times align".into(),
            ));
        };
        if base.step.snapshot_stride == 0 {
            let steps = (base.step.t_end / dt).ceil() as usize;
            base.step.snapshot_stride = (steps / 20).max(1);
        }
    }
    let configs: Vec<RunConfig> = values
        .iter()
        .map(|&v| sweep_variant(&base, axis, v))
        .collect::<Result<_>>()?;
    ensure_dir(out)?;
    let outcomes: Vec<Result<RunOutcome>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| run_one(c, &out.join(format!("run_{i:03}"))))
        .collect();

    let mut table =
        String::from("index,axis,value,exit_code,t_final,u_l2,w_l2,uniform_bound,absorption_ratio,eps_difference\n");
    let mut worst = EXIT_OK;
    let mut prev: Option<&Trajectory> = None;
    for (i, (c, o)) in configs.iter().zip(&outcomes).enumerate() {
        let axis_name = match axis {
            SweepAxis::Eps => "eps",
            SweepAxis::Grid => "grid",
            SweepAxis::Muv => "muv",
        };
        let mut cells = vec![i.to_string(), axis_name.into(), format!("{:?}", values[i])];
        match o {
            Ok(o) => {
                worst = worst.max(o.code);
                println!("[{axis_name} = {}]\n{}", values[i], o.summary);
                let traj = o.trajectory.as_ref();
                let last: Option<&LedgerRow> = traj.and_then(|t| t.ledger.rows.last());
                cells.push(o.code.to_string());
                cells.push(last.map(|r| format!("{:?}", r.t)).unwrap_or_default());
                cells.push(last.map(|r| format!("{:?}", r.u_l2)).unwrap_or_default());
                cells.push(last.map(|r| format!("{:?}", r.w_l2)).unwrap_or_default());
                let t0 = te_horizon(c, traj);
                let ub = traj
                    .and_then(|t| uniform_bound_constant(&t.ledger, t0).ok())
                    .and_then(|b| b.constant);
                cells.push(ub.map(|v| format!("{v:?}")).unwrap_or_default());
                let ab = traj.and_then(|t| viscosity_absorption_report(&t.ledger, &c.params).ok());
                cells.push(ab.map(|v| format!("{v:?}")).unwrap_or_default());
                let diff = match (axis, prev, traj) {
                    (SweepAxis::Eps, Some(p), Some(t)) if o.code != EXIT_BLOW_UP => {
                        space_time_difference(p, t, t0).ok()
                    }
                    _ => None,
                };
                cells.push(diff.map(|v| format!("{v:?}")).unwrap_or_default());
                prev = traj;
            }
            Err(e) => {
                eprintln!("run {i} ({} = {}): {e}", axis_name, values[i]);
                worst = worst.max(exit_code(e));
                cells.push(exit_code(e).to_string());
                cells.extend(std::iter::repeat_n(String::new(), 6));
                prev = None;
            }
        }
        table.push_str(&cells.join(","));
        table.push('\n');
    }
    write_atomic(&out.join("sweep.csv"), table.as_bytes())?;
    Ok(worst)
}

/// `min(t_end, T_E)` for a finished run.
fn te_horizon(cfg: &RunConfig, traj: Option<&Trajectory>) -> f64 {
    let te = traj
        .and_then(|t| existence_from_ledger(&t.ledger, &cfg.params, &cfg.calibration()).ok())
        .and_then(|e| e.t_e);
    te.map_or(cfg.step.t_end, |te| te.min(cfg.step.t_end))
}

fn cmd_audit(cfg: &RunConfig, ledger: &Path, out: &Path) -> Result<i32> {
    let l = EnergyLedger::load(ledger)?;
    let report = run_audits(&l, &cfg.params, &cfg.audits, &audit_context(cfg))?;
    ensure_dir(out)?;
    write_atomic(&out.join("audit.json"), report.to_json().as_bytes())?;
    print!("{}", report_lines(&report));
    Ok(if report.passed() { EXIT_OK } else { EXIT_AUDIT_FAILED })
}

fn cmd_gen_ic(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (u0, w0) = cfg.initial_fields()?;
    ensure_dir(out)?;
    write_snapshot(&out.join("ic_u.mpsf"), &u0.comps().iter().collect::<Vec<_>>())?;
    write_snapshot(&out.join("ic_w.mpsf"), &w0.comps().iter().collect::<Vec<_>>())?;
    println!(
        "wrote {} and {}",
        out.join("ic_u.mpsf").display(),
        out.join("ic_w.mpsf").display()
    );
    Ok(())
}

/// Columnar text: a `#`-prefixed header and one whitespace-separated line
/// per ledger row, every ledger column included.
pub fn plot_table(ledger: &EnergyLedger) -> Result<String> {
    let bytes = ledger.to_csv_bytes()?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes.as_slice());
    let mut s = String::from("#");
    for h in r.headers().map_err(|e| Error::Schema(e.to_string()))? {
        s.push(' ');
        s.push_str(h);
    }
    s.push('\n');
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        s.push_str(&rec.iter().collect::<Vec<_>>().join(" "));
        s.push('\n');
    }
    Ok(s)
}

fn cmd_export_plot(ledger: &Path, out: &Path) -> Result<()> {
    let l = EnergyLedger::load(ledger)?;
    ensure_dir(out)?;
    let path = out.join("ledger.dat");
    write_atomic(&path, plot_table(&l)?.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}
