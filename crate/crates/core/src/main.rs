#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lpfiber::bundle::NormMode;
use lpfiber::evolution::write_trajectory_csv;
use lpfiber::extrapolation::identify_extrapolation;
use lpfiber::report::{CheckRecord, ReportFormat, Threshold, VerificationReport};
use lpfiber::scenario::{run_scenario, ScenarioConfig, ScenarioContext, IDENTIFY_TOLERANCE};
use lpfiber::space::FiberFunction;
use lpfiber::Error;

/// Multiplication semigroups, extrapolation spaces and evolution semigroups
/// on L^p fiber spaces.
#[derive(Parser)]
#[command(name = "lpfiber", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run; repeat to select several. Replaces the config's list.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
    },
    /// Dump an evolution-semigroup trajectory as CSV.
    Evolve {
        #[command(flatten)]
        common: Common,
    },
    /// Identify an extrapolation-mode function with its preimage and check the round trip.
    Identify {
        #[command(flatten)]
        common: Common,
        /// Function CSV on the config's grid (node, re0, im0, ...).
        input: PathBuf,
        /// Where to write the preimage g as CSV.
        #[arg(long, value_name = "PATH")]
        preimage: Option<PathBuf>,
    },
    /// Reformat a json report.
    Report {
        /// Json report to read.
        input: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e),
            other => Failure::Runtime(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn load(common: &Common) -> Result<ScenarioConfig, Failure> {
    let mut config = ScenarioConfig::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Runtime(e.into())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Runtime(e.into())),
    }
}

fn emit(report: &VerificationReport, common: &Common, config: &ScenarioConfig) -> Result<(), Failure> {
    let format = common.format.or(config.output.format).unwrap_or(ReportFormat::Json);
    let out = common.out.clone().or_else(|| config.output.path.as_ref().map(|p| base_dir(&common.config).join(p)));
    write_output(out.as_deref(), &report.render(format)?)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify { common, suites } => {
            let mut config = load(&common)?;
            if !suites.is_empty() {
                config.suites = suites;
            }
            config.validate()?;
            let report = run_scenario(&config, &base_dir(&common.config)).map_err(|e| match e {
                Error::Config { .. } => Failure::Config(e),
                other => Failure::Config(Error::Config { path: "bundle".into(), message: other.to_string() }),
            })?;
            emit(&report, &common, &config)?;
            eprintln!("{} checks, {} failed", report.summary.total, report.summary.failed);
            Ok(report.overall_pass())
        }
        Command::Evolve { common } => {
            let config = load(&common)?;
            let dir = base_dir(&common.config);
            let es = config.evolution.semigroup().map_err(config_at("evolution"))?;
            let f = config.evolution.initial_function(config.p, &dir).map_err(config_at("evolution.initial"))?;
            let tau = config.evolution.stride as f64 * es.spacing();
            let trajectory = es.trajectory(&f, tau, config.evolution.frames)?;
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &trajectory)?;
            write_output(common.out.as_deref(), &String::from_utf8_lossy(&buf))?;
            Ok(true)
        }
        Command::Identify { common, input, preimage } => {
            let config = load(&common)?;
            config.validate()?;
            let ctx = ScenarioContext::new(config.clone(), &base_dir(&common.config))?;
            let file = std::fs::File::open(&input).map_err(|e| Failure::Config(Error::Config {
                path: input.display().to_string(),
                message: e.to_string(),
            }))?;
            let f = FiberFunction::read_csv(file, ctx.grid.clone(), NormMode::Extrapolation, config.p)?;
            let (g, id) = identify_extrapolation(&ctx.bundle, &f)?;
            let mut report = VerificationReport::new(serde_json::to_value(&config).map_err(Error::from)?);
            let suite = IDENTIFY_TOLERANCE;
            let tol = config.tolerances.get(suite).copied().unwrap_or(1e-10);
            report.push(CheckRecord::new(suite, "isometry", "‖f‖₋₁ = ‖g‖", id.isometry_defect, Threshold::AtMost { value: tol }));
            report.push(CheckRecord::new(
                suite,
                "reconstruction",
                "𝓜₋₁ g = f",
                id.reconstruction_defect,
                Threshold::AtMost { value: tol },
            ));
            report.push(
                CheckRecord::flag(suite, "well-conditioned", "every fiber below the condition cap", id.ill_conditioned_nodes.is_empty())
                    .with_detail(format!("ill-conditioned nodes: {:?}", id.ill_conditioned_nodes)),
            );
            if let Some(path) = preimage {
                let file = std::fs::File::create(path).map_err(|e| Failure::Runtime(e.into()))?;
                g.write_csv(file)?;
            }
            emit(&report, &common, &config)?;
            Ok(report.overall_pass())
        }
        Command::Report { input, out, format } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Failure::Config(Error::Config {
                path: input.display().to_string(),
                message: e.to_string(),
            }))?;
            let report = VerificationReport::from_json(&text).map_err(|e| Failure::Config(Error::Config {
                path: input.display().to_string(),
                message: e.to_string(),
            }))?;
            write_output(out.as_deref(), &report.render(format)?)?;
            Ok(report.overall_pass())
        }
    }
}

fn config_at(path: &'static str) -> impl Fn(Error) -> Failure {
    move |e| match e {
        Error::Config { .. } => Failure::Config(e),
        other => Failure::Config(Error::Config { path: path.into(), message: other.to_string() }),
    }
}
