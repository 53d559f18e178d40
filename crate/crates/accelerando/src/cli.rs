//! Command-line front door.
//!
//! Three subcommands wrap the library: `fit` (growth-model fitting),
//! `macro` (coupled-system integration) and `sim` (stigmergy simulations
//! from JSON configs). Every command is reproducible: flags, config and
//! seed fully determine all output bytes, and outputs go only under the
//! directory named by `--out`.
//!
//! Exit codes are fixed for test harnesses: 0 success, 1 usage errors,
//! 2 input/data errors, 3 non-convergence (the report is still written).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::Value;

use crate::growthfit::{
    self, AlphaMode, FitOptions, FitResult, FitSpace, ModelKind,
};
use crate::macrodynamics::{
    integrate, integrate_with_transition, IntegratorConfig, MacroParams, MacroState, RegimeSwitch,
};
use crate::medium::Medium;
use crate::qualstig::{run_wiki_sim, EditPolicy, WikiConfig};
use crate::quantstig::{
    rank_nodes, ranking_csv, run_foraging, spread_activation, ActivationState, AntConfig,
};
use crate::timeseries::TimeSeries;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "accelerando",
    version,
    about = "Growth-curve fitting, coupled population-technology dynamics and stigmergy simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a growth model to a two-column CSV series.
    Fit(FitArgs),
    /// Integrate the coupled population-technology system.
    Macro(MacroArgs),
    /// Run a stigmergy simulation from a JSON config.
    Sim(SimArgs),
}

#[derive(Args)]
struct FitArgs {
    /// CSV file with header `t,value`.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long = "fit-space", value_enum)]
    fit_space: Option<FitSpaceArg>,
    /// Restrict to `t_min:t_max` before fitting.
    #[arg(long, allow_hyphen_values = true)]
    slice: Option<String>,
    /// Stage count for the escalation model.
    #[arg(long, default_value_t = 2)]
    stages: usize,
    /// Pin the hyperbolic exponent instead of fitting it.
    #[arg(long = "fix-alpha", allow_hyphen_values = true)]
    fix_alpha: Option<f64>,
    /// Also bootstrap the singularity date with this many resamples
    /// (hyperbolic model only); writes singularity.json.
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MacroArgs {
    /// Comma-separated `a,b,c`.
    #[arg(long, allow_hyphen_values = true)]
    params: String,
    /// Comma-separated `N0,T0,t0`.
    #[arg(long, allow_hyphen_values = true)]
    init: String,
    #[arg(long = "t-end", allow_hyphen_values = true)]
    t_end: f64,
    /// Demographic switch as `t_switch,K,r`.
    #[arg(long, allow_hyphen_values = true)]
    transition: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Adaptive)]
    method: MethodArg,
    /// Initial (fixed: nominal) step size.
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimArgs {
    #[arg(value_enum)]
    system: SimSystem,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Exponential,
    Logistic,
    Hyperbolic,
    CoupledOde,
    Escalation,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitSpaceArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Adaptive,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimSystem {
    Ants,
    Wiki,
    Rank,
    Activate,
}

/// Parses the argument vector and runs the selected command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{err}");
                    EXIT_USAGE
                }
            }
        }
    };
    match cli.command {
        Command::Fit(args) => cmd_fit(&args),
        Command::Macro(args) => cmd_macro(&args),
        Command::Sim(args) => cmd_sim(&args),
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), std::io::Error> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), content)
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), std::io::Error> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_file(dir, name, &text)
}

// ---------------------------------------------------------------------------
// fit

fn cmd_fit(args: &FitArgs) -> i32 {
    let kind = match args.model {
        ModelArg::Exponential => ModelKind::Exponential,
        ModelArg::Logistic => ModelKind::Logistic,
        ModelArg::Hyperbolic => ModelKind::Hyperbolic,
        ModelArg::CoupledOde => ModelKind::CoupledOde,
        ModelArg::Escalation => ModelKind::LogisticEscalation {
            n_stages: args.stages,
        },
    };
    if args.fix_alpha.is_some() && !matches!(kind, ModelKind::Hyperbolic) {
        return fail(EXIT_USAGE, "--fix-alpha applies to the hyperbolic model only");
    }
    if args.bootstrap.is_some() && !matches!(kind, ModelKind::Hyperbolic) {
        return fail(EXIT_USAGE, "--bootstrap applies to the hyperbolic model only");
    }

    let raw = match fs::read_to_string(&args.data) {
        Ok(raw) => raw,
        Err(err) => return fail(EXIT_DATA, format!("{}: {err}", args.data.display())),
    };
    let name = args
        .data
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());
    let series = match TimeSeries::from_csv(name, "", &raw) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_DATA, err),
    };
    let series = match &args.slice {
        None => series,
        Some(spec) => {
            let (t_min, t_max) = match parse_pair(spec, ':') {
                Some(w) => w,
                None => return fail(EXIT_USAGE, format!("bad --slice `{spec}`, expected a:b")),
            };
            match series.slice_fit_ready(t_min, t_max) {
                Ok(s) => s,
                Err(err) => return fail(EXIT_DATA, err),
            }
        }
    };

    let opts = FitOptions {
        fit_space: args.fit_space.map(|s| match s {
            FitSpaceArg::Linear => FitSpace::Linear,
            FitSpaceArg::Log => FitSpace::Log,
        }),
        seed: args.seed,
        alpha: match args.fix_alpha {
            Some(a) => AlphaMode::Fixed(a),
            None => AlphaMode::Free,
        },
        n_resamples: args.bootstrap.unwrap_or(200),
        ..FitOptions::default()
    };

    let result = match growthfit::fit(kind, &series, &opts) {
        Ok(r) => r,
        Err(err) => return fail(EXIT_DATA, err),
    };
    if let Err(err) = write_json(&args.out, "fit.json", &result.to_json()) {
        return fail(EXIT_DATA, err);
    }
    match residuals_csv(&series, &result) {
        Ok(csv) => {
            if let Err(err) = write_file(&args.out, "residuals.csv", &csv) {
                return fail(EXIT_DATA, err);
            }
        }
        Err(err) => return fail(EXIT_DATA, err),
    }

    if let Some(n_resamples) = args.bootstrap {
        let opts = FitOptions {
            n_resamples,
            ..opts
        };
        match growthfit::estimate_singularity(&series, opts.alpha, &opts) {
            Ok(est) => {
                if let Err(err) = write_json(&args.out, "singularity.json", &est.to_json()) {
                    return fail(EXIT_DATA, err);
                }
            }
            Err(err) => return fail(EXIT_NO_CONVERGENCE, err),
        }
    }

    if result.converged {
        EXIT_OK
    } else {
        eprintln!("warning: fit did not converge; best-so-far report written");
        EXIT_NO_CONVERGENCE
    }
}

fn residuals_csv(series: &TimeSeries, result: &FitResult) -> Result<String, growthfit::FitError> {
    let times: Vec<f64> = series.times().collect();
    let predicted = result.model.values_at(&times)?;
    let mut out = String::from("t,observed,fitted,residual\n");
    for (point, fitted) in series.points().iter().zip(predicted) {
        let residual = match result.fit_space {
            FitSpace::Linear => point.v - fitted,
            FitSpace::Log => point.v.ln() - fitted.ln(),
        };
        let _ = writeln!(out, "{},{},{},{}", point.t, point.v, fitted, residual);
    }
    Ok(out)
}

fn parse_pair(spec: &str, sep: char) -> Option<(f64, f64)> {
    let mut parts = spec.splitn(2, sep);
    let a = parts.next()?.trim().parse().ok()?;
    let b = parts.next()?.trim().parse().ok()?;
    Some((a, b))
}

// ---------------------------------------------------------------------------
// macro

fn parse_triple(spec: &str) -> Option<[f64; 3]> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return None;
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.trim().parse().ok()?;
    }
    Some(out)
}

fn cmd_macro(args: &MacroArgs) -> i32 {
    let [a, b, c] = match parse_triple(&args.params) {
        Some(v) => v,
        None => return fail(EXIT_USAGE, format!("bad --params `{}`, expected a,b,c", args.params)),
    };
    let [n0, t0_level, t_start] = match parse_triple(&args.init) {
        Some(v) => v,
        None => {
            return fail(
                EXIT_USAGE,
                format!("bad --init `{}`, expected N0,T0,t0", args.init),
            )
        }
    };
    let params = match MacroParams::new(a, b, c) {
        Ok(p) => p,
        Err(err) => return fail(EXIT_USAGE, err),
    };
    let init = match MacroState::new(t_start, n0, t0_level) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_USAGE, err),
    };
    let mut cfg = match args.method {
        MethodArg::Adaptive => IntegratorConfig::adaptive(args.t_end),
        MethodArg::Fixed => IntegratorConfig::fixed(
            args.h0.unwrap_or((args.t_end - t_start).abs() / 1000.0),
            args.t_end,
        ),
    };
    if let Some(h0) = args.h0 {
        cfg = cfg.with_h0(h0);
    }

    let result = match &args.transition {
        None => integrate(&init, &params, &cfg),
        Some(spec) => {
            let [t_switch, k_pop, r_pop] = match parse_triple(spec) {
                Some(v) => v,
                None => {
                    return fail(
                        EXIT_USAGE,
                        format!("bad --transition `{spec}`, expected t_switch,K,r"),
                    )
                }
            };
            match RegimeSwitch::new(t_switch, k_pop, r_pop) {
                Ok(switch) => integrate_with_transition(&init, &params, &switch, &cfg),
                Err(err) => return fail(EXIT_USAGE, err),
            }
        }
    };
    let trajectory = match result {
        Ok(t) => t,
        Err(err) => return fail(EXIT_USAGE, err),
    };
    if let Err(err) = write_file(&args.out, "trajectory.csv", &trajectory.to_csv()) {
        return fail(EXIT_DATA, err);
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// sim

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AntsConfigFile {
    medium: Value,
    nest: String,
    food: String,
    #[serde(default = "default_n_ants")]
    n_ants: usize,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_beta")]
    beta: f64,
    #[serde(default = "default_rho")]
    rho: f64,
    #[serde(default = "default_q")]
    q: f64,
    #[serde(default = "default_iterations")]
    n_iterations: usize,
}

fn default_n_ants() -> usize {
    20
}
fn default_alpha() -> f64 {
    1.0
}
fn default_beta() -> f64 {
    2.0
}
fn default_rho() -> f64 {
    0.1
}
fn default_q() -> f64 {
    1.0
}
fn default_iterations() -> usize {
    200
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WikiConfigFile {
    n_agents: usize,
    n_edits: usize,
    init_statements: usize,
    init_quality: f64,
    skill_range: (f64, f64),
    noise: f64,
    #[serde(default)]
    policy: PolicyArg,
}

#[derive(Deserialize, Clone, Copy, Default)]
#[serde(rename_all = "snake_case")]
enum PolicyArg {
    #[default]
    ImproveWorst,
    RandomReplace,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RankConfigFile {
    medium: Value,
    #[serde(default = "default_damping")]
    damping: f64,
    #[serde(default = "default_tol")]
    tol: f64,
}

fn default_damping() -> f64 {
    0.85
}
fn default_tol() -> f64 {
    1e-10
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ActivateConfigFile {
    medium: Value,
    init: BTreeMap<String, f64>,
    decay: f64,
    steps: usize,
    #[serde(default)]
    threshold: f64,
}

fn cmd_sim(args: &SimArgs) -> i32 {
    let raw = match fs::read_to_string(&args.config) {
        Ok(raw) => raw,
        Err(err) => return fail(EXIT_DATA, format!("{}: {err}", args.config.display())),
    };
    match args.system {
        SimSystem::Ants => sim_ants(&raw, args),
        SimSystem::Wiki => sim_wiki(&raw, args),
        SimSystem::Rank => sim_rank(&raw, args),
        SimSystem::Activate => sim_activate(&raw, args),
    }
}

fn parse_config<'a, T: Deserialize<'a>>(raw: &'a str) -> Result<T, String> {
    serde_json::from_str(raw).map_err(|e| format!("config schema violation: {e}"))
}

fn sim_ants(raw: &str, args: &SimArgs) -> i32 {
    let file: AntsConfigFile = match parse_config(raw) {
        Ok(f) => f,
        Err(msg) => return fail(EXIT_DATA, msg),
    };
    let mut medium = match Medium::from_snapshot_value(&file.medium) {
        Ok(m) => m,
        Err(err) => return fail(EXIT_DATA, err),
    };
    let cfg = AntConfig {
        n_ants: file.n_ants,
        alpha: file.alpha,
        beta: file.beta,
        rho: file.rho,
        q: file.q,
        n_iterations: file.n_iterations,
        nest: file.nest.as_str().into(),
        food: file.food.as_str().into(),
        seed: args.seed,
    };
    let report = match run_foraging(&mut medium, &cfg) {
        Ok(r) => r,
        Err(err) => return fail(EXIT_DATA, err),
    };
    match write_json(&args.out, "report.json", &report.to_json()) {
        Ok(()) => EXIT_OK,
        Err(err) => fail(EXIT_DATA, err),
    }
}

fn sim_wiki(raw: &str, args: &SimArgs) -> i32 {
    let file: WikiConfigFile = match parse_config(raw) {
        Ok(f) => f,
        Err(msg) => return fail(EXIT_DATA, msg),
    };
    let cfg = WikiConfig {
        n_agents: file.n_agents,
        n_edits: file.n_edits,
        init_statements: file.init_statements,
        init_quality: file.init_quality,
        skill_range: file.skill_range,
        noise: file.noise,
        policy: match file.policy {
            PolicyArg::ImproveWorst => EditPolicy::ImproveWorst,
            PolicyArg::RandomReplace => EditPolicy::RandomReplace,
        },
        seed: args.seed,
    };
    let report = match run_wiki_sim(&cfg) {
        Ok(r) => r,
        Err(err) => return fail(EXIT_DATA, err),
    };
    match write_json(&args.out, "report.json", &report.to_json()) {
        Ok(()) => EXIT_OK,
        Err(err) => fail(EXIT_DATA, err),
    }
}

fn sim_rank(raw: &str, args: &SimArgs) -> i32 {
    let file: RankConfigFile = match parse_config(raw) {
        Ok(f) => f,
        Err(msg) => return fail(EXIT_DATA, msg),
    };
    let medium = match Medium::from_snapshot_value(&file.medium) {
        Ok(m) => m,
        Err(err) => return fail(EXIT_DATA, err),
    };
    let scores = match rank_nodes(&medium, file.damping, file.tol) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_DATA, err),
    };
    match write_file(&args.out, "ranking.csv", &ranking_csv(&scores)) {
        Ok(()) => EXIT_OK,
        Err(err) => fail(EXIT_DATA, err),
    }
}

fn sim_activate(raw: &str, args: &SimArgs) -> i32 {
    let file: ActivateConfigFile = match parse_config(raw) {
        Ok(f) => f,
        Err(msg) => return fail(EXIT_DATA, msg),
    };
    let medium = match Medium::from_snapshot_value(&file.medium) {
        Ok(m) => m,
        Err(err) => return fail(EXIT_DATA, err),
    };
    let init = match ActivationState::new(
        file.init
            .into_iter()
            .map(|(k, v)| (k.as_str().into(), v))
            .collect(),
        file.decay,
        file.threshold,
    ) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_DATA, err),
    };
    let state = match spread_activation(&medium, &init, file.steps) {
        Ok(s) => s,
        Err(err) => return fail(EXIT_DATA, err),
    };
    let mut report = state.to_json();
    report["steps"] = Value::from(file.steps);
    match write_json(&args.out, "report.json", &report) {
        Ok(()) => EXIT_OK,
        Err(err) => fail(EXIT_DATA, err),
    }
}
