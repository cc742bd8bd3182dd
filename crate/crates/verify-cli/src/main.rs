use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kmu_core::contactcore::DEFAULT_TOLERANCE;
use kmu_core::deformlab::GfVariant;
use kmu_core::sampling::Strategy;
use kmu_verify::{
    emit_all, exit_code, expand, parse_grid, registry, run_scenario, suite, Format, Overrides, RunSettings,
};

#[derive(Parser)]
#[command(name = "kmu-verify", version, about = "Residual checks for 3-dimensional contact metric structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Check(CheckArgs),
    /// List the built-in scenarios.
    ListScenarios,
    /// Run every built-in scenario.
    Run(RunArgs),
}

#[derive(Args)]
struct Output {
    /// Sampling grid, AxBxC.
    #[arg(long, value_parser = parse_grid, conflicts_with = "random")]
    grid: Option<Strategy>,
    /// Number of quasi-random sample points.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute residual tolerance.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// table, jsonl or csv.
    #[arg(long, default_value = "table")]
    format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn settings(&self) -> Result<RunSettings> {
        let strategy = match (self.grid, self.random) {
            (Some(g), _) => g,
            (None, Some(0)) => bail!("--random needs at least one point"),
            (None, Some(n)) => Strategy::Random(n),
            (None, None) => Strategy::DEFAULT_GRID,
        };
        if !(self.tol.is_finite() && self.tol > 0.0) {
            bail!("--tol must be positive");
        }
        Ok(RunSettings { strategy, seed: self.seed, tolerance: self.tol })
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    scenario: String,
    /// JSON structure definition to check instead of the built-in model.
    #[arg(long)]
    structure: Option<PathBuf>,
    /// Fiber-invariant function f(z) for the g^f scenarios.
    #[arg(long)]
    f: Option<String>,
    /// g^f variant: paper-literal, derived or half-offdiag.
    #[arg(long)]
    variant: Option<GfVariant>,
    /// D-homothety constant.
    #[arg(long)]
    a: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, required = true)]
    all: bool,
    #[command(flatten)]
    output: Output,
}

fn list(w: &mut dyn Write) -> Result<()> {
    for d in registry::REGISTRY {
        writeln!(w, "{:<32} {}", d.name, d.about)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    let (scenarios, output) = match &cli.command {
        Command::ListScenarios => {
            list(&mut io::stdout().lock())?;
            return Ok(0);
        }
        Command::Check(args) => {
            let def = registry::find(&args.scenario)
                .with_context(|| format!("unknown scenario '{}'; see list-scenarios", args.scenario))?;
            let ov = Overrides {
                structure: args.structure.clone(),
                f: args.f.clone(),
                variant: args.variant,
                a: args.a,
            };
            (expand(def, &ov, args.output.settings()?, false), &args.output)
        }
        Command::Run(args) => (suite(args.output.settings()?), &args.output),
    };
    let outcomes: Vec<_> = scenarios.iter().map(run_scenario).collect();
    let mut w = output.writer()?;
    emit_all(&outcomes, output.format, &mut w)?;
    w.flush()?;
    Ok(exit_code(&outcomes))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("kmu-verify: {e:#}");
            ExitCode::from(2)
        }
    }
}
