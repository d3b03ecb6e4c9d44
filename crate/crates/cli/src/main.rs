//! `qlwave`: batch driver for the blow-up experiments of `qlwave-core`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qlwave_core::blowup::{epsilon_sweep, rate_study};
use qlwave_core::experiment::{Experiment, ExperimentConfig, Scenario, SCHEMA_VERSION};
use qlwave_core::norms::multiplier_embedding_check;
use qlwave_core::{exec, Error};

mod output;

use output::{write_csv, write_json, Report};

#[derive(Parser)]
#[command(name = "qlwave", version, about = "Geometric blow-up experiments for 2D quasi-linear waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the characteristic field and dump the recorded states.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Final time; defaults to `norm_time_fraction · t_ε`.
        #[arg(long)]
        t_end: Option<f64>,
        /// Keep every n-th step.
        #[arg(long, default_value_t = 100)]
        record_every: usize,
    },
    /// Detect the blow-up time and point with its audits.
    Blowup {
        #[command(flatten)]
        common: Common,
    },
    /// Windowed norm `I_ε(t)` at `t = norm_time_fraction · t_ε`.
    Norm {
        #[command(flatten)]
        common: Common,
    },
    /// `I_ε(t_k)` on `t_k = t_ε(1 − 2^{−k})`, rate fit and decomposition.
    Rate {
        #[command(flatten)]
        common: Common,
    },
    /// Blow-up detection over the configured ε ladder.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Every audit flag in one report.
    Audit {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// model | c_variant | source_term | perturbed_data
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seeds_x1: Option<usize>,
    #[arg(long)]
    seeds_x2: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

/// Failure classes with their exit codes.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Params(_) | Error::Input(_) => Failure::Validation(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(format!("{e:#}"))
    }
}

type Outcome = Result<(), Failure>;

fn resolve(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| Failure::Validation(format!("invalid config {}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = &common.scenario {
        cfg.scenario = s.parse::<Scenario>()?;
    }
    let p = &mut cfg.params;
    for (slot, value) in [
        (&mut p.eps, common.eps),
        (&mut p.alpha, common.alpha),
        (&mut p.beta, common.beta),
        (&mut p.delta, common.delta),
        (&mut p.c, common.c),
        (&mut p.lambda, common.lambda),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if common.dt.is_some() {
        cfg.resolution.dt = common.dt;
    }
    if let Some(n) = common.seeds_x1 {
        cfg.resolution.seeds_x1 = n;
    }
    if let Some(n) = common.seeds_x2 {
        cfg.resolution.seeds_x2 = n;
    }
    if cfg.scenario == Scenario::Model {
        cfg.params.c = 0.0;
    }
    cfg.validate()?;
    if cfg.resolution.dt.is_none() {
        cfg.resolution.dt = Some(Experiment::new(cfg.clone())?.dt());
    }
    Ok(cfg)
}

fn out_dir(common: &Common) -> Result<&Path, Failure> {
    fs::create_dir_all(&common.out)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", common.out.display())))?;
    Ok(&common.out)
}

#[derive(Serialize)]
struct StateRow {
    t: f64,
    x1: f64,
    x2: f64,
    phi: f64,
    v: f64,
    phi_x: f64,
    w: f64,
    phi_xx: f64,
    w_x: f64,
}

fn simulate(common: &Common, t_end: Option<f64>, record_every: usize) -> Outcome {
    let cfg = resolve(common)?;
    let e = Experiment::new(cfg.clone())?;
    let t_end = match t_end {
        Some(t) => t,
        None => cfg.norm_time_fraction * e.detect()?.report.t_eps,
    };
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Failure::Validation(format!("t_end must be positive, got {t_end}")));
    }
    if record_every == 0 {
        return Err(Failure::Validation("record_every must be at least 1".into()));
    }
    let field = e.simulate(t_end, record_every)?;
    let dir = out_dir(common)?;
    let rows = field.trajectories.iter().flat_map(|tr| {
        tr.samples.iter().map(|s| StateRow {
            t: s.t,
            x1: s.x1,
            x2: s.x2,
            phi: s.phi,
            v: s.v,
            phi_x: s.phi_x,
            w: s.w,
            phi_xx: s.phi_xx,
            w_x: s.w_x,
        })
    });
    write_csv(&dir.join("field.csv"), rows)?;

    #[derive(Serialize)]
    struct Summary {
        t_end: f64,
        record_every: usize,
        seeds_x1: usize,
        seeds_x2: usize,
        samples: usize,
        degenerate_seeds: usize,
        sign_ledger: qlwave_core::transport::SignLedger,
    }
    let summary = Summary {
        t_end,
        record_every,
        seeds_x1: field.x1_seeds.len(),
        seeds_x2: field.x2_seeds.len(),
        samples: field.times.len(),
        degenerate_seeds: field.trajectories.iter().filter(|t| t.degenerate_at.is_some()).count(),
        sign_ledger: field.sign_ledger(),
    };
    write_json(&dir.join("simulate.json"), &Report::new("simulate", &cfg, summary))?;
    Ok(())
}

fn blowup(common: &Common) -> Outcome {
    let cfg = resolve(common)?;
    let d = Experiment::new(cfg.clone())?.detect()?;
    let dir = out_dir(common)?;

    #[derive(Serialize)]
    struct HistoryRow {
        t: f64,
        min_phi_x: f64,
    }
    let history = d.report.min_phi_x_history.iter().map(|&(t, m)| HistoryRow { t, min_phi_x: m });
    write_csv(&dir.join("min_phi_x.csv"), history)?;
    write_json(&dir.join("blowup.json"), &Report::new("blowup", &cfg, &d))?;
    Ok(())
}

fn norm(common: &Common) -> Outcome {
    let cfg = resolve(common)?;
    let e = Experiment::new(cfg.clone())?;
    let d = e.detect()?;
    let t = cfg.norm_time_fraction * d.report.t_eps;
    let spec = e.window_spec(&d.report);
    let value = e.windowed_series(&d.report, &[t])?.remove(0);
    let embedding = multiplier_embedding_check(1.75, cfg.params.beta, cfg.params.lambda, (1.0, 1e12))?;

    #[derive(Serialize)]
    struct NormResult<'a> {
        t_eps: f64,
        t: f64,
        window: qlwave_core::norms::WindowSpec,
        windowed_i: qlwave_core::norms::WindowedI,
        outer_ratio: f64,
        embedding: &'a qlwave_core::norms::EmbeddingReport,
    }
    let result = NormResult {
        t_eps: d.report.t_eps,
        t,
        window: spec,
        outer_ratio: value.outer_ratio(),
        windowed_i: value,
        embedding: &embedding,
    };
    write_json(&out_dir(common)?.join("norm.json"), &Report::new("norm", &cfg, result))?;
    Ok(())
}

#[derive(Serialize)]
struct RateRow {
    k: u32,
    t: f64,
    gap: f64,
    i: f64,
    i1: f64,
    i2: f64,
    i3: f64,
    outer_ratio: f64,
    min_phi_x: f64,
    spacing_at_min: f64,
}

fn rate(common: &Common) -> Outcome {
    let cfg = resolve(common)?;
    let e = Experiment::new(cfg.clone())?;
    let study = rate_study(&e)?;
    let dir = out_dir(common)?;
    let rows = study.points.iter().map(|p| RateRow {
        k: p.k,
        t: p.t,
        gap: p.gap,
        i: p.value.total,
        i1: p.value.parts[0],
        i2: p.value.parts[1],
        i3: p.value.parts[2],
        outer_ratio: p.value.outer_ratio(),
        min_phi_x: p.value.min_phi_x,
        spacing_at_min: p.value.spacing_at_min,
    });
    write_csv(&dir.join("rate.csv"), rows)?;

    #[derive(Serialize)]
    struct RateResult<'a> {
        t_eps: f64,
        window: qlwave_core::norms::WindowSpec,
        strictly_increasing: bool,
        capped_at: Option<u32>,
        fit: Option<qlwave_core::blowup::RateFit>,
        fit_error: Option<&'a str>,
        reference_exponent: f64,
        decomposition: &'a qlwave_core::blowup::DecompositionAudit,
    }
    let result = RateResult {
        t_eps: study.detection.report.t_eps,
        window: e.window_spec(&study.detection.report),
        strictly_increasing: study.strictly_increasing,
        capped_at: study.capped_at,
        fit: study.fit,
        fit_error: study.fit_error.as_deref(),
        reference_exponent: 2.25 - 3.0 * cfg.params.lambda,
        decomposition: &study.decomposition,
    };
    write_json(&dir.join("rate.json"), &Report::new("rate", &cfg, result))?;
    Ok(())
}

fn sweep(common: &Common) -> Outcome {
    let cfg = resolve(common)?;
    let s = epsilon_sweep(&cfg)?;
    let dir = out_dir(common)?;
    write_csv(&dir.join("sweep.csv"), s.rows.iter())?;
    write_json(&dir.join("sweep.json"), &Report::new("sweep", &cfg, &s))?;
    Ok(())
}

fn audit(common: &Common) -> Outcome {
    let cfg = resolve(common)?;
    let e = Experiment::new(cfg.clone())?;
    let study = rate_study(&e)?;
    let d = &study.detection;

    #[derive(Serialize)]
    struct Flag {
        name: String,
        passed: bool,
    }
    let mut flags: Vec<Flag> = d.report.audits.iter().map(|a| Flag { name: a.name.clone(), passed: a.passed }).collect();
    flags.push(Flag { name: "t_eps_within_bound".into(), passed: d.t_bound_ok });
    flags.push(Flag { name: "sign_ledger_clean".into(), passed: d.ledger.violations() == 0 });
    flags.push(Flag { name: "norm_series_strictly_increasing".into(), passed: study.strictly_increasing });
    flags.push(Flag {
        name: "decomposition_ratio_decreasing_last4".into(),
        passed: study.decomposition.ratio_decreasing_last4,
    });

    #[derive(Serialize)]
    struct AuditResult<'a> {
        all_pass: bool,
        flags: Vec<Flag>,
        report: &'a qlwave_core::characteristics::BlowupReport,
        sign_ledger: &'a qlwave_core::transport::SignLedger,
        decomposition: &'a qlwave_core::blowup::DecompositionAudit,
    }
    let result = AuditResult {
        all_pass: flags.iter().all(|f| f.passed),
        flags,
        report: &d.report,
        sign_ledger: &d.ledger,
        decomposition: &study.decomposition,
    };
    write_json(&out_dir(common)?.join("audit.json"), &Report::new("audit", &cfg, result))?;
    Ok(())
}

fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Simulate { common, t_end, record_every } => simulate(common, *t_end, *record_every),
        Command::Blowup { common } => blowup(common),
        Command::Norm { common } => norm(common),
        Command::Rate { common } => rate(common),
        Command::Sweep { common } => sweep(common),
        Command::Audit { common } => audit(common),
    }
}

fn threads(command: &Command) -> usize {
    match command {
        Command::Simulate { common, .. }
        | Command::Blowup { common }
        | Command::Norm { common }
        | Command::Rate { common }
        | Command::Sweep { common }
        | Command::Audit { common } => common.threads,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match exec::with_threads(threads(&cli.command), || dispatch(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, message) = match &f {
                Failure::Validation(m) => ("validation", m),
                Failure::Runtime(m) => ("runtime", m),
            };
            let record = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "error": { "kind": kind, "message": message },
            });
            eprintln!("{record}");
            ExitCode::from(f.code())
        }
    }
}
