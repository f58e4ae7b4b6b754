//! Command-line surface: argument definitions, the error-to-exit-code
//! contract, and the per-subcommand drivers.
//!
//! Exit codes: 0 success, 2 validation failure (SLA shape or failed
//! cross-checks), 3 config/input error, 4 a solver cap or feasibility
//! bound was exceeded, 1 internal numerical failure.

mod config;
mod output;

pub use config::{CapsConfig, Scenario, ScenarioError, SliceConfig, SliceModel};
pub use output::{line_plot_svg, meta_path, read_trace_csv, write_trace_csv, RunMeta};

use crate::bench::bench_max_weight;
use crate::demand::{DemandError, DemandTrace};
use crate::oracle::{offline_optimal, static_epsilon, static_threshold, ExcessModel, OracleError};
use crate::provision::{
    full_plan, isolation_sweep_with_cap, provision_max_weight, required_counts, ProvisionError,
    ProvisionPlan,
};
use crate::scheduler::{evaluate_sla, run_max_weight, SchedulerError};
use crate::sla::SlaError;
use crate::stats::{isolation_floor, isolation_floors, EmpiricalCdf, ExcessTrace, StatsError};
use crate::validate::run_validation;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config `{path}`: {message}")]
    ConfigParse { path: PathBuf, message: String },
    #[error("invalid trace `{path}` line {line}: {message}")]
    TraceParse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Demand(#[from] DemandError),
    #[error(transparent)]
    Sla(#[from] SlaError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Provision(#[from] ProvisionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error("{failed} of {total} validation checks failed")]
    ValidationFailed { failed: usize, total: usize },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit code: 2 validation failure, 3 config/input error,
    /// 4 cap or feasibility bound exceeded, 1 internal failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed { .. }
            | CliError::Sla(_)
            | CliError::Scenario(ScenarioError::Sla(_))
            | CliError::Provision(ProvisionError::Sla(_)) => 2,
            CliError::Io { .. }
            | CliError::ConfigParse { .. }
            | CliError::TraceParse { .. }
            | CliError::Scenario(_)
            | CliError::Demand(_)
            | CliError::Stats(_)
            | CliError::Usage(_) => 3,
            CliError::Provision(err) => match err {
                ProvisionError::InfeasibleAtUpperBound { .. }
                | ProvisionError::GridTooLarge { .. } => 4,
                _ => 3,
            },
            CliError::Oracle(err) => match err {
                OracleError::InfeasibleAtUpperBound { .. }
                | OracleError::StateSpaceTooLarge { .. }
                | OracleError::ModelTooLarge { .. }
                | OracleError::SearchBudgetExceeded { .. } => 4,
                OracleError::Demand(_) => 3,
                _ => 1,
            },
            CliError::Scheduler(_) => 1,
        }
    }

    /// A recovery suggestion for errors the user can route around.
    pub fn advice(&self) -> Option<&'static str> {
        match self {
            CliError::Oracle(
                OracleError::StateSpaceTooLarge { .. }
                | OracleError::ModelTooLarge { .. }
                | OracleError::SearchBudgetExceeded { .. },
            ) => Some("reduce the slice count or per-slice states, or raise the limit with --caps"),
            CliError::Provision(ProvisionError::GridTooLarge { .. }) => {
                Some("coarsen --step or raise sweep_cells with --caps")
            }
            _ => None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "slicemux",
    version,
    about = "Bandwidth provisioning and scheduling for sliced radio access"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a demand trace from a scenario config.
    Trace(TraceArgs),
    /// Per-slice isolation floors and within-floor coverage.
    Stats(StatsArgs),
    /// Compute a provisioning plan and report achieved coverage.
    Provision(ProvisionArgs),
    /// Sweep isolation levels and emit the tradeoff surface.
    Sweep(SweepArgs),
    /// Stationary and offline baselines for the shared pool.
    Oracle(OracleArgs),
    /// Time the per-slot scheduler across slice counts.
    Bench(BenchArgs),
    /// Run the internal cross-check suite.
    Validate(ValidateArgs),
}

#[derive(Debug, clap::Args)]
pub struct TraceArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the scenario aggregation window (slots).
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct StatsArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Analyze this trace CSV instead of generating one.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, clap::Args)]
pub struct ProvisionArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Analyze this trace CSV instead of generating one.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Output JSON path.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance subtracted from each target fraction in the report.
    #[arg(long, default_value_t = 0.0)]
    pub slack: f64,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    /// Scenario config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Analyze this trace CSV instead of generating one.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Output CSV path; the plot lands next to it with an .svg extension.
    #[arg(long)]
    pub out: PathBuf,
    /// Isolation grid step in (0, 1].
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inline JSON overriding solver caps, e.g. '{"sweep_cells": 100000}'.
    #[arg(long)]
    pub caps: Option<String>,
}

#[derive(Debug, clap::Args)]
pub struct OracleArgs {
    /// Scenario config (JSON); every slice must be a Markov model.
    #[arg(long)]
    pub config: PathBuf,
    /// Analyze this trace CSV instead of generating one.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inline JSON overriding solver caps, e.g. '{"bb_nodes": 100000}'.
    #[arg(long)]
    pub caps: Option<String>,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for the random instance pool.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    /// Seed for the generated check instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Trace(args) => cmd_trace(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Provision(args) => cmd_provision(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn load_scenario(path: &Path) -> Result<(Scenario, String), CliError> {
    let bytes = output::read_file(path)?;
    let scenario: Scenario =
        serde_json::from_slice(&bytes).map_err(|err| CliError::ConfigParse {
            path: path.to_owned(),
            message: err.to_string(),
        })?;
    scenario.validate()?;
    Ok((scenario, output::sha256_hex(&bytes)))
}

/// The analysis trace: `--trace` when given (slice count checked against
/// the config), otherwise generated from the scenario. Returns the digest
/// of an external trace for the metadata record.
fn resolve_trace(
    scenario: &Scenario,
    trace_arg: Option<&Path>,
    seed: u64,
) -> Result<(DemandTrace, Option<String>), CliError> {
    match trace_arg {
        Some(path) => {
            let bytes = output::read_file(path)?;
            let trace = output::parse_trace_csv(path, &bytes)?;
            if trace.slice_count() != scenario.slice_count() {
                return Err(CliError::Usage(format!(
                    "trace has {} slices but the config declares {}",
                    trace.slice_count(),
                    scenario.slice_count()
                )));
            }
            Ok((trace, Some(output::sha256_hex(&bytes))))
        }
        None => Ok((scenario.generate_trace(seed)?, None)),
    }
}

/// Caps from the scenario with any `--caps` inline-JSON fields laid over.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CapsOverride {
    lp_columns: Option<usize>,
    ilp_vars: Option<usize>,
    bb_nodes: Option<usize>,
    sweep_cells: Option<usize>,
}

fn merged_caps(scenario: &Scenario, arg: Option<&str>) -> Result<CapsConfig, CliError> {
    let mut caps = scenario.caps;
    if let Some(text) = arg {
        let over: CapsOverride = serde_json::from_str(text)
            .map_err(|err| CliError::Usage(format!("invalid --caps JSON: {err}")))?;
        if let Some(v) = over.lp_columns {
            caps.lp_columns = v;
        }
        if let Some(v) = over.ilp_vars {
            caps.ilp_vars = v;
        }
        if let Some(v) = over.bb_nodes {
            caps.bb_nodes = v;
        }
        if let Some(v) = over.sweep_cells {
            caps.sweep_cells = v;
        }
        caps.validate()?;
    }
    Ok(caps)
}

fn cmd_trace(args: &TraceArgs) -> Result<(), CliError> {
    let (mut scenario, config_digest) = load_scenario(&args.config)?;
    if let Some(window) = args.window {
        scenario.window_slots = window;
        scenario.validate()?;
    }
    let seed = args.seed.unwrap_or(scenario.seed);
    let trace = scenario.generate_trace(seed)?;
    output::write_trace_csv(&args.out, &trace)?;

    let mut meta = RunMeta::new("trace");
    meta.seed = Some(seed);
    meta.config_sha256 = Some(config_digest);
    meta.window_slots = Some(scenario.window_slots);
    output::write_meta(&args.out, &meta)?;
    println!(
        "wrote {} slots x {} slices to {}",
        trace.horizon(),
        trace.slice_count(),
        args.out.display()
    );
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<(), CliError> {
    let (scenario, config_digest) = load_scenario(&args.config)?;
    let sla = scenario.sla()?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let (trace, trace_digest) = resolve_trace(&scenario, args.trace.as_deref(), seed)?;

    let floors = isolation_floors(&trace, &sla.p_l)?;
    output::write_stats_csv(&args.out, &floors)?;

    let mut meta = RunMeta::new("stats");
    meta.seed = Some(seed);
    meta.config_sha256 = Some(config_digest);
    meta.trace_sha256 = trace_digest;
    output::write_meta(&args.out, &meta)?;
    for (i, floor) in floors.iter().enumerate() {
        println!(
            "slice {i}: floor {} PRB, within-floor fraction {:.6}",
            floor.w_l, floor.p_m
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct ProvisionReport<'a> {
    availability: &'a [f64],
    isolation: &'a [f64],
    availability_counts: &'a [u64],
    isolation_counts: &'a [u64],
    pass: &'a [bool],
    slack: f64,
}

#[derive(Serialize)]
struct ProvisionOutput<'a> {
    plan: &'a ProvisionPlan,
    report: ProvisionReport<'a>,
}

fn cmd_provision(args: &ProvisionArgs) -> Result<(), CliError> {
    if !(args.slack.is_finite() && args.slack >= 0.0) {
        return Err(CliError::Usage(format!(
            "--slack must be finite and nonnegative, got {}",
            args.slack
        )));
    }
    let (scenario, config_digest) = load_scenario(&args.config)?;
    let sla = scenario.sla()?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let (trace, trace_digest) = resolve_trace(&scenario, args.trace.as_deref(), seed)?;

    let plan = full_plan(&trace, &sla)?;
    // Replay the planned system on the same trace to report what the plan
    // actually achieves, not just what it guarantees.
    let excess = ExcessTrace::new(&trace, &plan.w_l)?;
    let targets: Vec<f64> = sla
        .p_h
        .iter()
        .zip(&plan.p_m)
        .map(|(&p_h, &p_m)| p_h - p_m)
        .collect();
    let schedule = run_max_weight(&excess, plan.w_c, &targets);
    let report = evaluate_sla(&trace, &schedule.decisions, &plan.w_l, &sla, args.slack)?;

    let json = serde_json::to_string_pretty(&ProvisionOutput {
        plan: &plan,
        report: ProvisionReport {
            availability: &report.availability,
            isolation: &report.isolation,
            availability_counts: &report.availability_counts,
            isolation_counts: &report.isolation_counts,
            pass: &report.pass,
            slack: args.slack,
        },
    })
    .expect("plan serializes");
    output::write_file(&args.out, &format!("{json}\n"))?;

    let mut meta = RunMeta::new("provision");
    meta.seed = Some(seed);
    meta.config_sha256 = Some(config_digest);
    meta.trace_sha256 = trace_digest;
    meta.slack = Some(args.slack);
    output::write_meta(&args.out, &meta)?;
    println!(
        "floors {:?}, shared pool {}, total {} PRBs; targets {}; wrote {}",
        plan.w_l,
        plan.w_c,
        plan.total,
        if report.all_pass() { "met" } else { "MISSED" },
        args.out.display()
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let (scenario, config_digest) = load_scenario(&args.config)?;
    let sla = scenario.sla()?;
    let caps = merged_caps(&scenario, args.caps.as_deref())?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let (trace, trace_digest) = resolve_trace(&scenario, args.trace.as_deref(), seed)?;

    let surface = isolation_sweep_with_cap(&trace, &sla, args.step, caps.sweep_cells)?;
    output::write_sweep_csv(&args.out, &surface)?;

    // The headline curve: rows where every slice shares one isolation level.
    let diagonal: Vec<(f64, f64)> = surface
        .rows
        .iter()
        .filter(|row| row.p_l.windows(2).all(|pair| pair[0] == pair[1]))
        .map(|row| (row.p_l[0], row.plan.total as f64))
        .collect();
    let svg_path = args.out.with_extension("svg");
    let svg = line_plot_svg(
        "Total provisioned bandwidth vs isolation level",
        "isolation level (all slices)",
        "total PRBs",
        &diagonal,
    );
    output::write_file(&svg_path, &svg)?;

    let mut meta = RunMeta::new("sweep");
    meta.seed = Some(seed);
    meta.config_sha256 = Some(config_digest);
    meta.trace_sha256 = trace_digest;
    meta.step = Some(args.step);
    output::write_meta(&args.out, &meta)?;
    println!(
        "wrote {} grid rows to {} (plot: {})",
        surface.rows.len(),
        args.out.display(),
        svg_path.display()
    );
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let (scenario, config_digest) = load_scenario(&args.config)?;
    let model = scenario.markov_model()?.ok_or_else(|| {
        CliError::Usage(
            "oracle needs every slice to be a Markov model (the stationary law must be exact)"
                .into(),
        )
    })?;
    let sla = scenario.sla()?;
    let caps = merged_caps(&scenario, args.caps.as_deref())?.oracle();
    let seed = args.seed.unwrap_or(scenario.seed);

    // Floors come from the exact stationary law, not the sampled trace, so
    // the stationary program and the trace baselines share one geometry.
    let mut w_l = Vec::with_capacity(scenario.slice_count());
    let mut targets = Vec::with_capacity(scenario.slice_count());
    for (chain, (&p_h, &p_l)) in model.chains().iter().zip(sla.p_h.iter().zip(&sla.p_l)) {
        let cdf = EmpiricalCdf::from_pmf(chain.states(), chain.stationary())?;
        let floor = isolation_floor(&cdf, p_l)?;
        w_l.push(floor.w_l);
        targets.push(p_h - floor.p_m);
    }

    let excess_model = ExcessModel::new(&model, &w_l)?;
    let threshold = static_threshold(&excess_model, &targets, &caps)?;

    let (trace, trace_digest) = resolve_trace(&scenario, args.trace.as_deref(), seed)?;
    let excess = ExcessTrace::new(&trace, &w_l)?;
    let required = required_counts(&targets, trace.horizon());
    let offline = offline_optimal(&excess, &required, &caps)?;
    let causal = provision_max_weight(&excess, &targets, trace.horizon())?;

    let top = threshold.max(offline.w_c_offline).max(causal);
    let mut rows = Vec::with_capacity(top as usize + 1);
    for w_c in 0..=top {
        let stationary = static_epsilon(&excess_model, w_c, &targets, &caps)?;
        rows.push(output::OracleRow {
            w_c,
            epsilon_star: stationary.epsilon_star,
            is_static_threshold: w_c == threshold,
            is_offline_wc: w_c == offline.w_c_offline,
            is_mw_wc: w_c == causal,
        });
    }
    output::write_oracle_csv(&args.out, &rows)?;

    let mut meta = RunMeta::new("oracle");
    meta.seed = Some(seed);
    meta.config_sha256 = Some(config_digest);
    meta.trace_sha256 = trace_digest;
    output::write_meta(&args.out, &meta)?;
    println!(
        "static threshold {threshold}, offline pool {}, causal pool {causal}; wrote {}",
        offline.w_c_offline,
        args.out.display()
    );
    Ok(())
}

const BENCH_SIZES: [usize; 6] = [2, 4, 8, 16, 32, 64];
const BENCH_SOLVES: usize = 10_000;

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let points = bench_max_weight(&BENCH_SIZES, BENCH_SOLVES, args.seed);
    output::write_bench_csv(&args.out, &points)?;

    let mut meta = RunMeta::new("bench");
    meta.seed = Some(args.seed);
    meta.solves_per_point = Some(BENCH_SOLVES);
    output::write_meta(&args.out, &meta)?;
    for point in &points {
        println!(
            "n={:<3} median-of-means {:.3} us ({} solves)",
            point.n, point.median_of_means_us, point.solves
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let report = run_validation(args.seed);
    for check in &report.checks {
        if check.passed() {
            println!("ok   {} ({} cases)", check.name, check.cases);
        } else {
            println!(
                "FAIL {} ({}/{} failed): {}",
                check.name,
                check.failures,
                check.cases,
                check.detail.as_deref().unwrap_or("no detail")
            );
        }
    }
    let failed = report.checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {} failed", report.checks.len(), failed);
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed {
            failed,
            total: report.checks.len(),
        })
    }
}
