use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rotlab_cli::{ScenarioConfig, ScenarioId};

#[derive(Parser)]
#[command(
    name = "rotlab",
    version,
    about = "Rotation vectors, rotation sets and Mather functions on tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write report.json plus side tables.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for intra-scenario parallelism.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        parallel: u16,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// Print the known scenario ids.
    ListScenarios,
}

fn run(config: PathBuf, out: Option<PathBuf>, parallel: u16) -> ExitCode {
    let cfg = match ScenarioConfig::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(parallel as usize)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| rotlab_cli::run(&cfg, out.as_deref())) {
        Ok(report) => {
            for c in &report.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                println!(
                    "{mark} {} = {} ({} {})",
                    c.name, c.value, c.comparison, c.threshold
                );
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} check(s) failed", report.failed_checks().len());
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            parallel,
        } => run(config, out, parallel),
        Command::Validate { config } => {
            let diagnostics = rotlab_cli::validate(&config);
            for d in &diagnostics {
                println!("{d}");
            }
            if diagnostics.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::ListScenarios => {
            for id in ScenarioId::ALL {
                println!("{:<18} {}", id.name(), id.description());
            }
            ExitCode::SUCCESS
        }
    }
}
