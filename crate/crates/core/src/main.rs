use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gtcq_core::cli::{diff_reports, run, Format, RunConfig};
use gtcq_core::models::ScenarioId;

#[derive(Parser)]
#[command(name = "gtcq", version, about = "Dirac brackets and generalized canonical quantization on the torus")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two JSON reports field by field, ignoring timings.
    #[command(name = "diff_reports", alias = "diff-reports")]
    DiffReports { r1: PathBuf, r2: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// torus-intrinsic or torus-extrinsic
    #[arg(long)]
    scenario: Option<ScenarioId>,
    /// Outer radius for the numeric oracle.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    a: f64,
    /// Inner radius for the numeric oracle.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',', default_value = "16,24,32,48")]
    grids: Vec<usize>,
    /// text or json
    #[arg(long, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Progress on stderr; chain, brackets and timings in text reports.
    #[arg(long, short)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(Command::DiffReports { r1, r2 }) = cli.command {
        return match diff_reports(&r1, &r2) {
            Ok(d) if d.is_empty() => ExitCode::SUCCESS,
            Ok(d) => {
                print!("{d}");
                ExitCode::from(1)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    let args = cli.run;
    let Some(scenario) = args.scenario else {
        eprintln!("error: --scenario is required (torus-intrinsic or torus-extrinsic)");
        return ExitCode::from(2);
    };
    let config = RunConfig {
        scenario,
        a: args.a,
        b: args.b,
        grids: args.grids,
        format: args.format,
        out: args.out,
        verbose: args.verbose,
        ..RunConfig::new(scenario)
    };
    if config.verbose {
        eprintln!("running {} at a = {}, b = {}, grids {:?}", scenario, config.a, config.b, config.grids);
    }
    match run(&config) {
        Ok(outcome) => {
            if config.out.is_none() {
                print!("{}", outcome.rendered);
            }
            if outcome.exit_code != 0 {
                for m in &outcome.report.diagnostics.mismatches {
                    eprintln!("mismatch: {m}");
                }
                if !outcome.report.verdict.reproduced {
                    eprintln!("verdict not reproduced");
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
