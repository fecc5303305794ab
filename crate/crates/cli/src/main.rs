use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use orthofield::harness::run;
use orthofield::{ExperimentConfig, Report};

/// Monte Carlo verification of deviation bounds for orthomartingale fields.
#[derive(Parser)]
#[command(name = "orthofield", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tail probabilities of the maximal partial sum.
    Deviation(RunArgs),
    /// Tail probabilities against a bound right-hand side.
    VerifyBound(RunArgs),
    /// Doob step of the induction over dimension.
    InductionCheck(RunArgs),
    /// Tightness sums over dyadic levels.
    Tightness(RunArgs),
    /// Finite-dimensional laws of W_n against the Gaussian limit.
    Fdd(RunArgs),
    /// Covariances of a simulated Brownian sheet.
    SheetCov(RunArgs),
    /// Sequential Hölder norms of W_n.
    HolderNorm(RunArgs),
    /// Bound constants by dimension.
    Constants(RunArgs),
    /// Summation lemma checks.
    LemmaChecks(RunArgs),
    /// Tail exponent of Gaussian products.
    ExponentFit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report path; defaults to the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; never changes a reported number.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the result table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Deviation(a) => ("deviation", a),
            Command::VerifyBound(a) => ("verify-bound", a),
            Command::InductionCheck(a) => ("induction-check", a),
            Command::Tightness(a) => ("tightness", a),
            Command::Fdd(a) => ("fdd", a),
            Command::SheetCov(a) => ("sheet-cov", a),
            Command::HolderNorm(a) => ("holder-norm", a),
            Command::Constants(a) => ("constants", a),
            Command::LemmaChecks(a) => ("lemma-checks", a),
            Command::ExponentFit(a) => ("exponent-fit", a),
        }
    }
}

fn write(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn execute(cli: Cli) -> Result<Report> {
    let (name, args) = cli.command.parts();
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut config = ExperimentConfig::from_json(&text)
        .with_context(|| format!("parsing config {}", args.config.display()))?;
    if config.experiment.name() != name {
        bail!(
            "config describes a `{}` experiment, not `{name}`",
            config.experiment.name()
        );
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let report = run(&config, args.threads)?;
    let json = report.to_json();
    match args.out.as_ref().or(config.output.as_ref()) {
        Some(path) => write(path, &json)?,
        None => println!("{json}"),
    }
    if let Some(path) = &args.csv {
        write(path, &report.to_csv())?;
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(report) => {
            for v in &report.verdicts {
                eprintln!("{}: {} ({})", v.name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
