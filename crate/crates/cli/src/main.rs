use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hrw_cli::{run, validate, CliError, Experiment, ExperimentConfig};

/// Run one hierarchical random walk experiment from a JSON config.
#[derive(Debug, Parser)]
#[command(name = "hrw", version)]
struct Args {
    experiment: Experiment,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 picks the number of CPUs.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    quiet: bool,
    /// Validate the config and print diagnostics without running.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hrw {}: {e}", args.experiment);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<(), CliError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if args.seed.is_some() {
        config.seed = args.seed;
    }
    if args.check {
        let diagnostics = validate(&config, args.experiment);
        if diagnostics.is_empty() {
            if !args.quiet {
                println!("ok");
            }
            return Ok(());
        }
        return Err(CliError::Validation(diagnostics));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| run(&config, args.experiment, &args.out))?;
    if !args.quiet {
        println!("{}", outcome.summary);
    }
    Ok(())
}
