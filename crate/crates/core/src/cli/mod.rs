//! Batch driver behind the `esdg` binary: `run`, `sweep` and `verify`.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::cases::{convergence_sweep, CaseSpec, RunOptions};
use crate::dgsolver::{integrals, reconnection_flux, total_entropy, Quantity, SlopeKind, SolutionField};
use crate::error::{Error, Result};
use crate::state::COMPONENT_NAMES;
use crate::timeint::CflRule;
use config::RunConfig;
use output::{snapshot, SeriesWriter, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "esdg", version, about = "Entropy-stable DG solver for two-fluid relativistic plasma")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one case and write a manifest, a time series and snapshots.
    Run(RunArgs),
    /// Convergence study against a case's exact solution.
    Sweep(SweepArgs),
    /// Randomized checks of the discrete identities.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// key = value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Case name: accuracy_forced, cp_waves, brio_wu, current_sheet,
    /// orszag_tang, blast_weak, blast_strong, gem.
    #[arg(long)]
    case: Option<String>,
    /// Courant number (default 0.15).
    #[arg(long)]
    cfl: Option<f64>,
    /// harmonic or summed combination of the 2D directional limits.
    #[arg(long)]
    cfl_rule: Option<String>,
    /// Bound on omega*dt for the Lorentz coupling (0 disables).
    #[arg(long)]
    source_cfl: Option<f64>,
    /// Final time; defaults to the case's.
    #[arg(long)]
    t_final: Option<f64>,
    /// TVB constant M of the slope limiter.
    #[arg(long)]
    tvb: Option<f64>,
    /// Turn the slope limiter on or off (true/false).
    #[arg(long)]
    slope_limiter: Option<bool>,
    /// scaled (one factor per block) or componentwise minmod.
    #[arg(long)]
    slope_kind: Option<String>,
    /// Runge-Kutta order; overrides the k + 1 pairing.
    #[arg(long)]
    rk_order: Option<usize>,
    /// Abort with a runtime failure after this many steps.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Single-threaded, bitwise reproducible execution.
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Polynomial degree k (1, 2 or 3); the scheme is of order k + 1.
    #[arg(long)]
    order: Option<usize>,
    /// Cells in x; defaults to the case's mesh.
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    cells_y: Option<usize>,
    /// Number of evenly spaced snapshots besides the final state.
    #[arg(long)]
    snapshots: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Polynomial degrees to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    order: Vec<usize>,
    /// Mesh sizes, each double the previous.
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    cells: Vec<usize>,
    /// Quantities to measure; defaults to the case's own list.
    #[arg(long, value_delimiter = ',')]
    quantity: Vec<String>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Random samples per suite.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run(a) => match run_config(&a.common, Some(&a)) {
            Ok(cfg) => run_command(cfg),
            Err(e) => usage_error(e),
        },
        Command::Sweep(a) => match run_config(&a.common, None) {
            Ok(cfg) => sweep_command(cfg, &a),
            Err(e) => usage_error(e),
        },
        Command::Verify(a) => verify_command(&a),
    }
}

fn usage_error(e: Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_USAGE
}

fn report_chain(e: &Error) {
    eprintln!("error: {e}");
    let mut src = std::error::Error::source(e);
    while let Some(s) = src {
        eprintln!("  caused by: {s}");
        src = s.source();
    }
}

fn run_config(c: &CommonArgs, run: Option<&RunArgs>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &c.config {
        cfg.apply(&RunConfig::load(path, c.case.as_deref())?)?;
    }
    if let Some(v) = &c.case {
        cfg.case = v.clone();
    }
    if let Some(v) = c.cfl {
        cfg.cfl = v;
    }
    if let Some(v) = &c.cfl_rule {
        cfg.cfl_rule = CflRule::parse(v)?;
    }
    if let Some(v) = c.source_cfl {
        cfg.source_cfl = v;
    }
    if c.t_final.is_some() {
        cfg.t_final = c.t_final;
    }
    if c.tvb.is_some() {
        cfg.tvb = c.tvb;
    }
    if c.slope_limiter.is_some() {
        cfg.slope_limiter = c.slope_limiter;
    }
    if let Some(v) = &c.slope_kind {
        cfg.slope_kind = Some(SlopeKind::parse(v)?);
    }
    if c.rk_order.is_some() {
        cfg.rk_order = c.rk_order;
    }
    if let Some(v) = c.max_steps {
        cfg.max_steps = v;
    }
    if let Some(v) = &c.out {
        cfg.out = v.clone();
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    cfg.serial |= c.serial;
    if let Some(r) = run {
        if r.order.is_some() {
            cfg.order = r.order;
        }
        if r.cells.is_some() {
            cfg.cells = r.cells;
        }
        if r.cells_y.is_some() {
            cfg.cells_y = r.cells_y;
        }
        if let Some(v) = r.snapshots {
            cfg.snapshots = v;
        }
    }
    if cfg.case.is_empty() {
        return Err(Error::config("no case given (use --case or a config file)"));
    }
    Ok(cfg)
}

/// Copy the resolved choices back so the manifest pins every setting.
fn pin(cfg: &RunConfig, case: &CaseSpec, opts: &RunOptions) -> RunConfig {
    RunConfig {
        order: Some(opts.k),
        rk_order: Some(opts.scheme.order()),
        cells: Some(opts.cells),
        cells_y: opts.cells_y,
        t_final: Some(opts.control.t_final),
        tvb: Some(opts.limiter.tvb_m),
        slope_limiter: Some(opts.limiter.slope),
        slope_kind: Some(opts.limiter.kind),
        case: case.name.to_string(),
        ..cfg.clone()
    }
}

fn manifest_text(command: &str, cfg: &RunConfig, case: &CaseSpec, opts: &RunOptions, trailer: &[(String, String)]) -> String {
    let p = &case.params;
    let mut s = format!("# esdg-plasma {VERSION}\n# command = {command}\n");
    s.push_str(&cfg.to_config_text());
    let info = [
        ("threads", opts.threads.to_string()),
        ("t0", format!("{:e}", case.t0)),
        ("gamma_i", format!("{:e}", p.gamma_i)),
        ("gamma_e", format!("{:e}", p.gamma_e)),
        ("r_i", format!("{:e}", p.r_i)),
        ("r_e", format!("{:e}", p.r_e)),
        ("kappa", format!("{:e}", p.kappa)),
        ("chi", format!("{:e}", p.chi)),
        ("eta", format!("{:e}", p.eta)),
        ("source_scale", format!("{:e}", p.source_scale)),
        ("bound_preserving", opts.limiter.bound_preserving.to_string()),
        ("bp_eps", format!("{:e}", opts.limiter.eps)),
    ];
    for (k, v) in info.iter().map(|(k, v)| (k.to_string(), v.clone())).chain(trailer.iter().cloned()) {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

fn table_meta(case: &CaseSpec, opts: &RunOptions) -> Vec<(String, String)> {
    vec![
        ("case".into(), case.name.into()),
        ("version".into(), VERSION.into()),
        ("k".into(), opts.k.to_string()),
        ("rk_order".into(), opts.scheme.order().to_string()),
        ("cells".into(), opts.cells.to_string()),
        ("cells_y".into(), opts.cells_y.map_or("-".into(), |n| n.to_string())),
        ("cfl".into(), format!("{:e}", opts.control.cfl)),
    ]
}

/// Names of the time-series columns for a case.
pub fn series_columns(case: &CaseSpec) -> Vec<String> {
    let mut c: Vec<String> = ["t", "dt", "total_fluid_entropy", "total_em_entropy"].iter().map(|s| s.to_string()).collect();
    c.extend(COMPONENT_NAMES.iter().map(|n| format!("int_{n}")));
    if case.reconnection_b0.is_some() {
        c.push("reconnection_flux".into());
    }
    if case.exact.is_some() {
        c.extend(case.error_quantities.iter().map(|q| format!("l1_{}", q.name())));
    }
    c
}

fn run_command(cfg: RunConfig) -> i32 {
    let (case, opts) = match cfg.resolve() {
        Ok(x) => x,
        Err(e) => return usage_error(e),
    };
    let cfg = pin(&cfg, &case, &opts);
    match execute_run(&cfg, &case, &opts) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report_chain(&e);
            EXIT_RUNTIME
        }
    }
}

fn write_manifest(dir: &Path, cfg: &RunConfig, case: &CaseSpec, opts: &RunOptions, trailer: &[(String, String)]) -> Result<()> {
    std::fs::write(dir.join("manifest.txt"), manifest_text("run", cfg, case, opts, trailer))?;
    Ok(())
}

/// Run a resolved configuration, writing every output file into `cfg.out`.
pub fn execute_run(cfg: &RunConfig, case: &CaseSpec, opts: &RunOptions) -> Result<()> {
    let dir = &cfg.out;
    let solver = case.solver(opts.k, opts.cells, opts.cells_y)?.with_threads(opts.threads);
    let u0 = case.initial_field(&solver)?;
    std::fs::create_dir_all(dir)?;
    write_manifest(dir, cfg, case, opts, &[("status".into(), "running".into())])?;
    let meta = table_meta(case, opts);
    let mut series = SeriesWriter::create(&dir.join("timeseries.csv"), &meta, &series_columns(case))?;

    let t0 = case.t0;
    let span = opts.control.t_final - t0;
    let targets: Vec<f64> = (0..cfg.snapshots).map(|i| t0 + span * i as f64 / cfg.snapshots as f64).collect();
    let mut next_snap = 0;
    let mut last_good: Option<(usize, f64, SolutionField)> = None;
    let started = Instant::now();
    let mut last_log = Instant::now();

    let result = crate::timeint::integrate(&solver, u0, t0, opts.scheme, &opts.control, &opts.limiter, |info, u| {
        let (fl, emt) = total_entropy(&solver, u)?;
        let mut row = vec![info.t, info.dt, fl, emt];
        row.extend(integrals(&solver, u));
        if let Some(b0) = case.reconnection_b0 {
            row.push(reconnection_flux(&solver, u, b0)?);
        }
        if case.exact.is_some() {
            for &q in &case.error_quantities {
                row.push(case.error(&solver, u, q, info.t)?);
            }
        }
        series.push(&row)?;
        while next_snap < targets.len() && info.t >= targets[next_snap] && !info.done {
            snapshot(&solver, u, meta.clone(), info.t, info.step)?
                .write(&dir.join(format!("snapshot_{next_snap:04}.csv")))?;
            next_snap += 1;
        }
        if info.done {
            snapshot(&solver, u, meta.clone(), info.t, info.step)?.write(&dir.join("final.csv"))?;
        }
        if last_log.elapsed().as_secs_f64() > 5.0 {
            log::info!("{}: step {} t={:.6} dt={:.3e}", case.name, info.step, info.t, info.dt);
            last_log = Instant::now();
        }
        last_good = Some((info.step, info.t, u.clone()));
        Ok(())
    });
    let wall = started.elapsed().as_secs_f64();
    match result {
        Ok(sum) => {
            if sum.steps == 0 {
                snapshot(&solver, &sum.field, meta.clone(), sum.t, 0)?.write(&dir.join("final.csv"))?;
            }
            log::info!("{}: finished {} steps in {wall:.2} s", case.name, sum.steps);
            write_manifest(
                dir,
                cfg,
                case,
                opts,
                &[
                    ("status".into(), "ok".into()),
                    ("steps".into(), sum.steps.to_string()),
                    ("t_reached".into(), format!("{:e}", sum.t)),
                    ("wall_time_s".into(), format!("{wall:.3}")),
                ],
            )
        }
        Err(e) => {
            let mut trailer = vec![("status".into(), format!("failed: {e}")), ("wall_time_s".into(), format!("{wall:.3}"))];
            if let Some((step, t, u)) = &last_good {
                let path = dir.join("failure_state.csv");
                if snapshot(&solver, u, meta.clone(), *t, *step).and_then(|s| s.write(&path)).is_ok() {
                    trailer.push(("last_good_state".into(), path.display().to_string()));
                    eprintln!("last accepted state (step {step}, t={t:e}) written to {}", path.display());
                }
            }
            write_manifest(dir, cfg, case, opts, &trailer)?;
            Err(e)
        }
    }
}

fn sweep_command(cfg: RunConfig, a: &SweepArgs) -> i32 {
    let (case, opts) = match cfg.resolve() {
        Ok(x) => x,
        Err(e) => return usage_error(e),
    };
    if case.exact.is_none() {
        return usage_error(Error::config(format!("case {} has no exact solution to sweep against", case.name)));
    }
    let quantities: Vec<Quantity> = if a.quantity.is_empty() {
        case.error_quantities.clone()
    } else {
        match a.quantity.iter().map(|q| Quantity::parse(q)).collect::<Result<_>>() {
            Ok(q) => q,
            Err(e) => return usage_error(e),
        }
    };
    if a.order.iter().any(|k| !(1..=3).contains(k)) || a.cells.iter().any(|&n| n == 0) {
        return usage_error(Error::config("degrees must be 1..=3 and cell counts positive"));
    }
    let case = CaseSpec { t_final: opts.control.t_final, ..case };
    let orders: Vec<usize> = a.order.iter().map(|k| k + 1).collect();
    let started = Instant::now();
    let reports = match convergence_sweep(&case, &orders, &a.cells, &quantities, &opts) {
        Ok(r) => r,
        Err(e) => {
            report_chain(&e);
            return EXIT_RUNTIME;
        }
    };
    let mut columns = vec!["k".to_string(), "order".into(), "cells".into()];
    for q in &quantities {
        columns.push(format!("l1_{}", q.name()));
        columns.push(format!("rate_{}", q.name()));
        columns.push(format!("nodesum_{}", q.name()));
    }
    let rows = (0..reports[0].rows.len())
        .map(|i| {
            let r0 = &reports[0].rows[i];
            let mut row = vec![(r0.order - 1) as f64, r0.order as f64, r0.cells as f64];
            for rep in &reports {
                row.push(rep.rows[i].error);
                row.push(rep.rows[i].rate.unwrap_or(f64::NAN));
                row.push(rep.rows[i].node_sum);
            }
            row
        })
        .collect();
    let mut meta = table_meta(&case, &opts);
    meta.retain(|(k, _)| !matches!(k.as_str(), "k" | "rk_order" | "cells" | "cells_y"));
    meta.push(("t_final".into(), format!("{:e}", case.t_final)));
    let table = Table { meta, columns, rows };
    println!("{}", table.to_text());
    let out = || -> Result<()> {
        std::fs::create_dir_all(&cfg.out)?;
        table.write(&cfg.out.join("convergence.csv"))?;
        let trailer = [("wall_time_s".to_string(), format!("{:.3}", started.elapsed().as_secs_f64()))];
        std::fs::write(cfg.out.join("manifest.txt"), manifest_text("sweep", &cfg, &case, &opts, &trailer))?;
        Ok(())
    };
    match out() {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report_chain(&e);
            EXIT_RUNTIME
        }
    }
}

fn verify_command(a: &VerifyArgs) -> i32 {
    let reports = crate::verify::run_all(a.seed, a.samples);
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.passed()) {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}
