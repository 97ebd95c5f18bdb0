//! `rssmon` subcommands. [`run`] returns the process exit code: 0 on
//! success, 2 on validation errors, 3 on i/o errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::{
    batch_summary, classify, load_scenario, load_trace, prepare_scenario, replay, write_json, write_record, write_run,
    IoError,
};
use crate::harness::{library_scenario, run_batch, run_scenario, ValidScenario};
use crate::reliability::{reliability_table, ReliabilityInputs};
use crate::world::RssParameters;

#[derive(Debug, Parser)]
#[command(name = "rssmon", version, about = "Safety-envelope monitor, sensing simulator and reliability calculator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its traces and report.
    Simulate(SimulateArgs),
    /// Recompute compliance and relevance verdicts from recorded traces.
    Replay(ReplayArgs),
    /// Relevance verdicts only, from recorded traces.
    Classify(ReplayArgs),
    /// Print the reliability derivation table.
    Reliability(ReliabilityArgs),
    /// Run a Monte Carlo batch and report aggregate statistics.
    Montecarlo(MonteCarloArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    pub scenario: Option<PathBuf>,
    /// Name of a scenario shipped with the library instead of a file.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Override a scenario field by dotted path, e.g. rss.response_time_s=0.3.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Output directory for traces and report.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub run_index: u64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Ground-truth trace.
    #[arg(long)]
    pub truth: PathBuf,
    /// Perception trace(s): channel_a, channel_b or fused. Repeatable.
    #[arg(long, required = true)]
    pub perceived: Vec<PathBuf>,
    /// Parameter file (TOML) overriding the truth header's parameters.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Write records here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReliabilityArgs {
    #[arg(long = "p-human", alias = "p_human", default_value_t = 2e-5)]
    pub p_human: f64,
    #[arg(long = "p-channel-a", alias = "p_channel_a", default_value_t = 1e-4)]
    pub p_channel_a: f64,
    #[arg(long = "p-channel-b", alias = "p_channel_b", default_value_t = 1e-4)]
    pub p_channel_b: f64,
    #[arg(long = "mtbf-goal", alias = "mtbf_goal", default_value_t = 1e7)]
    pub mtbf_goal: f64,
    /// MTBF (hours) used for the fleet incident-rate row.
    #[arg(long = "fleet-mtbf", alias = "mtbf", default_value_t = 1e6)]
    pub fleet_mtbf: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub fleet: u64,
    #[arg(long = "speed-mph", alias = "speed_mph", default_value_t = 30.0)]
    pub speed_mph: f64,
    #[arg(long = "hours-per-day", alias = "hours_per_day", default_value_t = 2.0)]
    pub hours_per_day: f64,
    #[arg(long, default_value_t = 1.0)]
    pub multiplier: f64,
    /// Fleet size used to demonstrate a single channel's MTBF.
    #[arg(long = "validation-fleet", alias = "validation_fleet", default_value_t = 100)]
    pub validation_fleet: u64,
    /// Coincidence window in hours.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Number of runs; defaults to the scenario's `runs`.
    #[arg(long)]
    pub runs: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Write the aggregate report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl From<&ReliabilityArgs> for ReliabilityInputs {
    fn from(a: &ReliabilityArgs) -> Self {
        Self {
            p_human: a.p_human,
            p_channel_a: a.p_channel_a,
            p_channel_b: a.p_channel_b,
            mtbf_goal: a.mtbf_goal,
            fleet_mtbf: a.fleet_mtbf,
            fleet: a.fleet,
            speed_mph: a.speed_mph,
            hours_per_day: a.hours_per_day,
            multiplier: a.multiplier,
            validation_fleet: a.validation_fleet,
            window: a.window,
        }
    }
}

fn scenario(args: &ScenarioArgs) -> Result<ValidScenario, IoError> {
    match (&args.scenario, &args.builtin) {
        (_, Some(name)) => {
            let spec = library_scenario(name).ok_or_else(|| IoError::Invalid(format!("no shipped scenario named `{name}`")))?;
            prepare_scenario(spec, &args.set)
        }
        (Some(path), None) => load_scenario(path, &args.set),
        (None, None) => Err(IoError::Invalid("a scenario file or --builtin is required".into())),
    }
}

fn io_err(e: std::io::Error) -> IoError {
    IoError::Io(e.to_string())
}

fn emit(text: &str, out: &mut dyn Write) -> Result<(), IoError> {
    out.write_all(text.as_bytes()).map_err(io_err)
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), IoError> {
    let scn = scenario(&a.scenario)?;
    let run = run_scenario(&scn, a.run_index)?;
    let (files, report) = write_run(&a.out, &scn, &run)?;
    emit(&report.summary(), out)?;
    for f in files {
        emit(&format!("wrote {}\n", f.display()), out)?;
    }
    Ok(())
}

fn read_params(path: &Option<PathBuf>) -> Result<Option<RssParameters>, IoError> {
    path.as_ref()
        .map(|p| {
            let text = super::read_text(p)?;
            toml::from_str(&text).map_err(|e| IoError::Invalid(format!("{}: {}", p.display(), e.message())))
        })
        .transpose()
}

fn replay_cmd(a: &ReplayArgs, verdicts_only: bool, out: &mut dyn Write) -> Result<(), IoError> {
    let truth = load_trace(&a.truth)?;
    let perceived = a.perceived.iter().map(|p| load_trace(p)).collect::<Result<Vec<_>, _>>()?;
    let params = read_params(&a.params)?;
    let records =
        if verdicts_only { classify(&truth, &perceived, params)? } else { replay(&truth, &perceived, params)? };
    let mut buf = Vec::new();
    for r in &records {
        write_record(&mut buf, r)?;
    }
    match &a.out {
        Some(path) => std::fs::write(path, buf).map_err(|e| IoError::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(&buf).map_err(io_err),
    }
}

fn reliability(a: &ReliabilityArgs, out: &mut dyn Write) -> Result<(), IoError> {
    let report = reliability_table(&ReliabilityInputs::from(a)).map_err(|e| IoError::Invalid(e.to_string()))?;
    if a.json {
        let mut text = serde_json::to_string_pretty(&report).map_err(|e| IoError::Invalid(e.to_string()))?;
        text.push('\n');
        emit(&text, out)
    } else {
        emit(&report.to_string(), out)
    }
}

fn montecarlo(a: &MonteCarloArgs, out: &mut dyn Write) -> Result<(), IoError> {
    let scn = scenario(&a.scenario)?;
    let runs = a.runs.unwrap_or(scn.spec().runs);
    if runs == 0 {
        return Err(IoError::Invalid("--runs must be >= 1".into()));
    }
    let report = run_batch(&scn, runs, a.workers)?;
    emit(&batch_summary(&report), out)?;
    if let Some(path) = &a.out {
        write_json(path, &report)?;
        emit(&format!("wrote {}\n", path.display()), out)?;
    }
    Ok(())
}

/// Parse `args` (program name first) and execute, writing normal output to
/// `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::Replay(a) => replay_cmd(a, false, out),
        Command::Classify(a) => replay_cmd(a, true, out),
        Command::Reliability(a) => reliability(a, out),
        Command::Montecarlo(a) => montecarlo(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Run with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
