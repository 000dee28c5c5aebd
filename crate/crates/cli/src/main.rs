mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use telegraph_core::demos::NonuniquenessSetup;

use commands::{ExactRequest, Outcome, Report};
use config::RunConfig;
use error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "telegraph",
    version,
    about = "Matching conditions, energy blow-up criteria, power-law solutions and leapfrog runs for u_tt - a^2 u_xx - f(t,x,u) = F(t,x)"
)]
struct Cli {
    /// INI run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output path prefix; reports go to stdout when omitted.
    #[arg(long, global = true, value_name = "PREFIX")]
    output: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Audit the corner matching conditions of the configured problem.
    CheckMatching,
    /// Evaluate the negative-energy nonexistence criterion.
    CheckEnergy,
    /// Tabulate the power-law solution beta (t - s)_+^gamma of u_tt = u^alpha.
    ExactEval(ExactArgs),
    /// Run the leapfrog solver on the configured problem.
    Simulate,
    /// Run the zero and the glued continuation of the Hölder problem.
    DemoNonuniqueness(DemoArgs),
    /// `simulate` with the negative-energy blow-up preset.
    DemoBlowup,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long = "s", allow_negative_numbers = true)]
    shift: Option<f64>,
    /// Single evaluation time; overrides the grid.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long = "s", default_value_t = 1.0, allow_negative_numbers = true)]
    shift: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, default_value_t = 2.5)]
    t_end: f64,
    /// Space cells.
    #[arg(long, default_value_t = 50)]
    nx: usize,
    /// Time steps across [t0, t_end].
    #[arg(long, default_value_t = 100)]
    nt: usize,
    /// Domain length L.
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Wave speed a.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn require_config(path: Option<&Path>, command: &str) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Err(CliError::usage(format!("{command} needs --config <path>"))),
    }
}

fn resolve_format(flag: Option<Format>, cfg: &RunConfig, default: Format) -> Result<Format> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match cfg.get("output", "format") {
        None => Ok(default),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(CliError::usage(format!(
            "[output] format = `{other}`; expected csv or json"
        ))),
    }
}

fn resolve_prefix(flag: Option<&str>, cfg: &RunConfig) -> Option<String> {
    flag.map(str::to_string)
        .or_else(|| cfg.get("output", "prefix").map(str::to_string))
}

fn emit(report: Report, format: Format, prefix: Option<&str>) -> Result<()> {
    let (text, ext) = match (report, format) {
        (Report::Json(doc), Format::Json) => (output::to_json(&doc), "json"),
        (Report::Json(doc), Format::Csv) => (output::to_key_value_csv(&doc)?, "csv"),
        (Report::Csv(text), _) => (text, "csv"),
    };
    match prefix {
        Some(p) => output::write_file(Path::new(&format!("{p}.{ext}")), &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn simulate(cfg: &RunConfig, prefix: Option<String>) -> Result<Outcome> {
    let prefix = prefix.unwrap_or_else(|| "simulation".to_string());
    let (files, outcome) = commands::simulate(cfg)?;
    let path = |suffix: &str| PathBuf::from(format!("{prefix}_{suffix}"));
    output::write_file(&path("snapshots.csv"), &files.snapshots)?;
    if let Some(energy) = &files.energy {
        output::write_file(&path("energy.csv"), energy)?;
    }
    output::write_file(&path("summary.json"), &output::to_json(&files.summary))?;
    Ok(outcome)
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    let config = cli.config.as_deref();
    let (outcome, format, prefix) = match cli.command {
        Command::CheckMatching => {
            let cfg = require_config(config, "check-matching")?;
            (
                commands::check_matching(&cfg)?,
                resolve_format(cli.format, &cfg, Format::Json)?,
                resolve_prefix(cli.output.as_deref(), &cfg),
            )
        }
        Command::CheckEnergy => {
            let cfg = require_config(config, "check-energy")?;
            (
                commands::check_energy(&cfg)?,
                resolve_format(cli.format, &cfg, Format::Json)?,
                resolve_prefix(cli.output.as_deref(), &cfg),
            )
        }
        Command::ExactEval(args) => {
            let cfg = load_config(config)?;
            let alpha = match args.alpha {
                Some(a) => a,
                None => cfg.f64("exact", "alpha")?.ok_or_else(|| {
                    CliError::usage("exact-eval needs --alpha (or [exact] alpha)")
                })?,
            };
            let req = ExactRequest {
                alpha,
                shift: args
                    .shift
                    .map_or_else(|| cfg.f64("exact", "s").map(|s| s.unwrap_or(0.0)), Ok)?,
                t: args.t,
                t_max: args
                    .t_max
                    .map_or_else(|| cfg.f64("exact", "t_max").map(|s| s.unwrap_or(2.0)), Ok)?,
                points: args.points.map_or_else(
                    || cfg.usize("exact", "points").map(|s| s.unwrap_or(201)),
                    Ok,
                )?,
            };
            let format = resolve_format(cli.format, &cfg, Format::Csv)?;
            (
                commands::exact_eval(&req, format == Format::Json)?,
                format,
                resolve_prefix(cli.output.as_deref(), &cfg),
            )
        }
        Command::Simulate => {
            let cfg = require_config(config, "simulate")?;
            let prefix = resolve_prefix(cli.output.as_deref(), &cfg);
            return simulate(&cfg, prefix);
        }
        Command::DemoBlowup => {
            let preset = RunConfig::parse(commands::BLOWUP_PRESET)?;
            let cfg = preset.overlay(&load_config(config)?);
            let prefix = resolve_prefix(cli.output.as_deref(), &cfg);
            return simulate(&cfg, prefix);
        }
        Command::DemoNonuniqueness(d) => {
            let cfg = load_config(config)?;
            let setup = NonuniquenessSetup {
                alpha: d.alpha,
                shift: d.shift,
                t0: d.t0,
                t_end: d.t_end,
                a: d.a,
                length: d.length,
                nx: d.nx,
                nt: d.nt,
            };
            (
                commands::demo_nonuniqueness(&setup)?,
                resolve_format(cli.format, &cfg, Format::Json)?,
                resolve_prefix(cli.output.as_deref(), &cfg),
            )
        }
    };
    let mut outcome = outcome;
    if let Some(report) = outcome.report.take() {
        emit(report, format, prefix.as_deref())?;
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(outcome) => {
            eprintln!("{}", outcome.verdict);
            if outcome.numerical_failure {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
