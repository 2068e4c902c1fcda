//! Command-line front end. The binary only forwards `argv` to [`main_with_args`].

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::art::{build_art_lp, default_horizon, iterative_round, pseudo_to_schedule, solve_art_lp};
use crate::error::{Error, Result};
use crate::gen::{random_instance, rtt_reduce, RttInstance};
use crate::model::{response_from_rounds, validate_rounds, CapacityLimit, Instance, IntegralSchedule};
use crate::mrt::{load_bound, mrt_lower_bound, solve_mrt, Overload};
use crate::online::{run_policy, Policy};
use crate::sim::{aggregate, poisson_workload, read_results_csv, run_experiment, write_csv, ExperimentConfig, WorkloadConfig};

#[derive(Debug, Parser)]
#[command(name = "switchsched", version, about = "Flow scheduling on capacitated switches")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance, or the switch instance for a timetable.
    Gen(GenArgs),
    /// Average-response pipeline with capacity augmentation.
    SolveArt(SolveArtArgs),
    /// Max-response pipeline with additive overload.
    SolveMrt(SolveMrtArgs),
    /// Run online policies on Poisson workloads.
    Simulate(SimulateArgs),
    /// LP lower bounds only.
    Bound(BoundArgs),
    /// Average simulator results per (policy, M, T).
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, required_unless_present = "rtt")]
    pub m: Option<usize>,
    /// Output ports; defaults to `m`.
    #[arg(long)]
    pub m_prime: Option<usize>,
    #[arg(long, required_unless_present = "rtt")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub d_max: u32,
    /// Releases are drawn from `[0, horizon)`; defaults to `n`.
    #[arg(long)]
    pub horizon: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timetable JSON (`{"T": [...], "g": [...]}`) to reduce instead.
    #[arg(long, conflicts_with_all = ["m", "n"])]
    pub rtt: Option<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArtArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub augment: u32,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// JSON lines, one per rounding iteration.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// The lower-bound LP in CPLEX LP format.
    #[arg(long)]
    pub lp_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveMrtArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 16)]
    pub m: usize,
    /// Mean arrivals per round; comma-separated for a sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rate: Vec<f64>,
    /// Rounds with arrivals; comma-separated for a sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub horizon: Vec<u32>,
    /// `all` or a comma-separated list of MaxCard, MinRTime, MaxWeight.
    #[arg(long, default_value = "all")]
    pub policy: String,
    /// Seeds `0..seeds` per (M, T).
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long)]
    pub lp_bounds: bool,
    /// Per-round decisions as CSV.
    #[arg(long)]
    pub decision_log: Option<PathBuf>,
    /// Record wall-clock runtimes (makes output nondeterministic).
    #[arg(long)]
    pub timing: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results CSVs from `simulate`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtSummary {
    pub lp_lower_bound: f64,
    pub lp0_objective: f64,
    pub pseudo_cost: f64,
    pub iterations: usize,
    pub augment: u32,
    pub window: u32,
    pub colors: usize,
    pub backlog: u64,
    pub total_response: u64,
    pub max_response: u64,
    pub schedule: IntegralSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrtSummary {
    pub rho_star: u32,
    pub probes: Vec<(u32, bool)>,
    /// Allowed overload per (port, round): `2 d_max - 1`.
    pub budget: u64,
    pub max_overload: u64,
    pub overloads: Vec<OverloadRow>,
    pub max_response: u64,
    pub schedule: IntegralSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverloadRow {
    pub port: String,
    pub round: u32,
    pub excess: u64,
}

impl From<&Overload> for OverloadRow {
    fn from(o: &Overload) -> Self {
        OverloadRow { port: o.port.to_string(), round: o.round, excess: o.excess }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub flows: usize,
    pub art_lower_bound: f64,
    pub art_horizon: u32,
    pub load_bound: u32,
    pub rho_star: u32,
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Debug, Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status. Failures print a JSON error object to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            print_error("usage", e.to_string().trim_end().to_string());
            return 2;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            print_error(e.kind(), e.to_string());
            1
        }
    }
}

fn print_error(kind: &str, message: String) {
    let report = ErrorReport { error: ErrorBody { kind, message } };
    eprintln!("{}", serde_json::to_string(&report).expect("error serialization is infallible"));
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::SolveArt(a) => cmd_solve_art(a),
        Command::SolveMrt(a) => cmd_solve_mrt(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn write_output(path: Option<&Path>, contents: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents)?,
        None => io::stdout().lock().write_all(contents)?,
    }
    Ok(())
}

fn to_json_line<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_vec_pretty(value)?;
    text.push(b'\n');
    Ok(text)
}

fn read_instance(path: &Path) -> Result<Instance> {
    Ok(Instance::from_json(&fs::read_to_string(path)?)?)
}

pub fn cmd_gen(a: &GenArgs) -> Result<()> {
    let inst = match &a.rtt {
        Some(path) => rtt_reduce(&RttInstance::from_json(&fs::read_to_string(path)?)?)?.0,
        None => {
            let (m, n) = (a.m.expect("required by clap"), a.n.expect("required by clap"));
            let horizon = a.horizon.unwrap_or(n.max(1) as u32);
            random_instance(m, a.m_prime.unwrap_or(m), n, a.d_max, horizon, a.seed)?
        }
    };
    let mut text = inst.to_json().into_bytes();
    text.push(b'\n');
    write_output(a.out.as_deref(), &text)
}

pub fn cmd_solve_art(a: &SolveArtArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let pseudo = iterative_round(&inst, default_horizon(&inst))?;
    let result = pseudo_to_schedule(&inst, &pseudo, a.augment)?;
    let verdict = validate_rounds(&inst, &result.rounds, CapacityLimit::scaled(a.augment as u64));
    if !verdict.is_valid() {
        return Err(Error::Validation(format!("{:?}", verdict.violations)));
    }
    let report = response_from_rounds(&inst, &result.rounds)?;
    if let Some(path) = &a.trace {
        let mut lines = Vec::new();
        for level in &pseudo.levels {
            serde_json::to_writer(&mut lines, level)?;
            lines.push(b'\n');
        }
        fs::write(path, lines)?;
    }
    if let Some(path) = &a.lp_dump {
        let bound = solve_art_lp(&inst, None)?;
        let lp = build_art_lp(&inst, bound.horizon)?;
        let mut text = Vec::new();
        lp.model.write_lp(&mut text)?;
        fs::write(path, text)?;
    }
    let summary = ArtSummary {
        lp_lower_bound: result.lp_lower_bound,
        lp0_objective: pseudo.lp0_objective,
        pseudo_cost: pseudo.cost + 0.0,
        iterations: pseudo.iterations(),
        augment: result.augment,
        window: result.window,
        colors: result.colors,
        backlog: result.backlog,
        total_response: report.total,
        max_response: report.maximum,
        schedule: result.schedule,
    };
    write_output(a.out.as_deref(), &to_json_line(&summary)?)
}

pub fn cmd_solve_mrt(a: &SolveMrtArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let result = solve_mrt(&inst, true)?;
    let budget = (2 * inst.max_demand() as u64).saturating_sub(1);
    let rounds = &result.assignment.rounds;
    let verdict = validate_rounds(&inst, rounds, CapacityLimit::bonus(budget));
    if !verdict.is_valid() {
        return Err(Error::Validation(format!("{:?}", verdict.violations)));
    }
    let report = response_from_rounds(&inst, rounds)?;
    let summary = MrtSummary {
        rho_star: result.rho_star,
        probes: result.probes,
        budget,
        max_overload: result.assignment.max_overload,
        overloads: result.assignment.overloads.iter().map(OverloadRow::from).collect(),
        max_response: report.maximum,
        schedule: IntegralSchedule::from_rounds(&inst, rounds),
    };
    write_output(a.out.as_deref(), &to_json_line(&summary)?)
}

fn parse_policies(spec: &str) -> Result<Vec<Policy>> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(Policy::ALL.to_vec());
    }
    let mut out: Vec<Policy> = spec.split(',').map(|p| p.trim().parse()).collect::<Result<_>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    if a.seeds == 0 {
        return Err(Error::Config("--seeds must be at least 1".into()));
    }
    let exp = ExperimentConfig {
        m: a.m,
        rates: a.rate.clone(),
        horizons: a.horizon.clone(),
        seeds: (0..a.seeds).collect(),
        policies: parse_policies(&a.policy)?,
        lp_bounds: a.lp_bounds,
        timing: a.timing,
    };
    let results = run_experiment(&exp)?;
    if let Some(path) = &a.decision_log {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["M", "T", "seed", "round", "policy", "flows"])?;
        for &rate in &exp.rates {
            for &rounds in &exp.horizons {
                for &seed in &exp.seeds {
                    let inst = poisson_workload(&WorkloadConfig { m: exp.m, rate, rounds, seed })?;
                    for &p in &exp.policies {
                        let mut log = Vec::new();
                        run_policy(&inst, p, Some(&mut log))?;
                        for d in log {
                            w.write_record([format!("{rate:?}"), rounds.to_string(), seed.to_string(), d.round.to_string(), d.policy.to_string(), d.flows.join(";")])?;
                        }
                    }
                }
            }
        }
        w.flush()?;
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &results)?;
    write_output(a.out.as_deref(), &buf)
}

pub fn cmd_bound(a: &BoundArgs) -> Result<()> {
    let inst = read_instance(&a.input)?;
    let summary = if inst.is_empty() {
        BoundSummary { flows: 0, art_lower_bound: 0.0, art_horizon: 0, load_bound: 0, rho_star: mrt_lower_bound(&inst, None)? }
    } else {
        let art = solve_art_lp(&inst, None)?;
        BoundSummary {
            flows: inst.len(),
            art_lower_bound: art.objective,
            art_horizon: art.horizon,
            load_bound: load_bound(&inst),
            rho_star: mrt_lower_bound(&inst, None)?,
        }
    };
    write_output(a.out.as_deref(), &to_json_line(&summary)?)
}

pub fn cmd_report(a: &ReportArgs) -> Result<()> {
    let mut results = Vec::new();
    for path in &a.inputs {
        results.extend(read_results_csv(fs::File::open(path)?)?);
    }
    if results.is_empty() {
        return Err(Error::Config("no results to aggregate".into()));
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &aggregate(&results))?;
    write_output(a.out.as_deref(), &buf)
}
