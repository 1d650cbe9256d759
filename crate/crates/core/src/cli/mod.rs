//! Command-line front end: scenario files in, JSON reports or CSV out.

mod commands;
mod report;
mod scenario_file;

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use commands::{
    analyze_mech, convert, run_expected, run_sample, sweep, sweep_csv, sweep_points, verify,
    ConvertReport, ExpectedRun, MechReport, SampleRun, SweepParam, SweepRow,
};
pub use report::{ErrorRecord, ErrorReport, ExitStatus, Meta, Report};
pub use scenario_file::{AgentSpec, AnalysisSpec, ErvcgSpec, ScenarioFile, SettingSpec};

use crate::error::{Error, Result};
use crate::scoring::RuleKind;
use crate::strongtruth::MechanismDescriptor;

#[derive(Debug, Parser)]
#[command(name = "strongmech", version, about = "Strongly truthful mechanisms and ER-VCG verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monotonicity, Myerson, envelope and modulus checks for one mechanism.
    AnalyzeMech(AnalyzeMechArgs),
    /// Turn a scoring rule into a mechanism and check the modulus transport.
    Convert(ConvertArgs),
    /// Run ER-VCG on the scenario's bids, exactly or by sampling.
    Run(RunArgs),
    /// Check the ER-VCG guarantee on all undominated candidate bids.
    Verify(VerifyArgs),
    /// Repeat `verify` over a parameter range and emit CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeMechArgs {
    /// Descriptor JSON, e.g. '{"kind":"linear","L":0,"H":1}', or @PATH.
    #[arg(long)]
    pub mech: String,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Quadratic,
    Spherical,
    Logarithmic,
}

impl From<RuleArg> for RuleKind {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Quadratic => RuleKind::Quadratic,
            RuleArg::Spherical => RuleKind::Spherical,
            RuleArg::Logarithmic => RuleKind::Logarithmic,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub rule: RuleArg,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0.01)]
    pub grid_step: f64,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Overrides the file's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Expected,
    Sample,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = Mode::Expected)]
    pub mode: Mode,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ParamArg {
    Delta,
    Gamma,
    Epsilon,
    N,
}

impl From<ParamArg> for SweepParam {
    fn from(p: ParamArg) -> Self {
        match p {
            ParamArg::Delta => SweepParam::Delta,
            ParamArg::Gamma => SweepParam::Gamma,
            ParamArg::Epsilon => SweepParam::Epsilon,
            ParamArg::N => SweepParam::N,
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    pub param: ParamArg,
    /// Inclusive range `a,b`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: (f64, f64),
    #[arg(long)]
    pub steps: usize,
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn read_text(path: &std::path::Path, field: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::validation(field, format!("{}: {e}", path.display())))
}

/// Loads the scenario and applies command-line overrides.
pub fn load_scenario(args: &ScenarioArgs) -> Result<ScenarioFile> {
    let mut file = ScenarioFile::parse(&read_text(&args.scenario, "scenario")?)?;
    if let Some(seed) = args.seed {
        file.seed = seed;
    }
    if let Some(step) = args.grid_step {
        file.analysis.grid_step = step;
    }
    if let Some(budget) = args.budget {
        file.analysis.budget = budget;
    }
    file.build()?;
    Ok(file)
}

fn parse_descriptor(arg: &str) -> Result<MechanismDescriptor> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_text(path.as_ref(), "mech")?,
        None => arg.to_string(),
    };
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "mech".to_string() } else { format!("mech.{path}") };
        Error::validation(path, e.into_inner().to_string())
    })
}

/// Text to emit and the exit status.
pub struct Output {
    pub text: String,
    pub status: ExitStatus,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn report<B: Serialize>(
    command: &'static str,
    start: Instant,
    scenario: Option<&ScenarioFile>,
    body: B,
) -> String {
    json(&Report {
        meta: Meta::new(command, scenario.map(ScenarioFile::hash), start.elapsed().as_millis()),
        scenario,
        body,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::AnalyzeMech(_) => "analyze-mech",
        Command::Convert(_) => "convert",
        Command::Run(_) => "run",
        Command::Verify(_) => "verify",
        Command::Sweep(_) => "sweep",
    }
}

fn dispatch(command: &Command, start: Instant) -> Result<Output> {
    let name = command_name(command);
    let ok = |text| Output { text, status: ExitStatus::Ok };
    match command {
        Command::AnalyzeMech(a) => {
            let d = parse_descriptor(&a.mech)?;
            d.build().map_err(|e| scenario_file::nest("mech", e))?;
            Ok(ok(report(name, start, None, analyze_mech(&d, a.grid_step)?)))
        }
        Command::Convert(a) => Ok(ok(report(name, start, None, convert(a.rule.into(), a.n, a.grid_step)?))),
        Command::Run(a) => {
            let file = load_scenario(&a.scenario)?;
            let text = match a.mode {
                Mode::Expected => report(name, start, Some(&file), run_expected(&file)?),
                Mode::Sample => {
                    let samples = a
                        .samples
                        .ok_or_else(|| Error::validation("samples", "sample mode needs --samples"))?;
                    report(name, start, Some(&file), run_sample(&file, samples)?)
                }
            };
            Ok(ok(text))
        }
        Command::Verify(a) => {
            let file = load_scenario(&a.scenario)?;
            let r = verify(&file)?;
            let status = ExitStatus::for_verdict(r.pass, r.hypothesis_holds);
            Ok(Output {
                text: report(name, start, Some(&file), r),
                status,
            })
        }
        Command::Sweep(a) => {
            let file = load_scenario(&a.scenario)?;
            let rows = sweep(&file, a.param.into(), a.range, a.steps)?;
            Ok(ok(sweep_csv(&rows)?))
        }
    }
}

/// Runs one command, writes its output, and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let start = Instant::now();
    let output = dispatch(&cli.command, start).unwrap_or_else(|e| {
        log::error!("{e}");
        Output {
            text: json(&ErrorReport {
                meta: Meta::new(command_name(&cli.command), None, start.elapsed().as_millis()),
                error: ErrorRecord::from(&e),
            }),
            status: ExitStatus::for_error(&e),
        }
    });
    let written = match &cli.out {
        Some(path) => fs::write(path, &output.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(output.text.as_bytes())
        }
    };
    if let Err(e) = written {
        log::error!("cannot write output: {e}");
        return ExitStatus::Validation.code();
    }
    output.status.code()
}
