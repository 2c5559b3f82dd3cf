use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "lvs", version, about = "Location verification Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write `<scenario>.csv` and `<scenario>.manifest.json`.
    Run {
        #[arg(long)]
        scenario: String,
        /// TOML file with sections geometry, channel, priors, threat, rule, sim.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed; every random stream derives from it.
        #[arg(long)]
        seed: Option<u64>,
        /// Trials per hypothesis.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Worker threads; all cores by default.
        #[arg(long)]
        threads: Option<usize>,
        /// Dotted-key override, e.g. `channel.sigma_dB=5`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// ρ/ρ* for fig5 and fig6.
        #[arg(long)]
        rho_factor: Option<f64>,
    },
    /// List the available scenarios.
    ListScenarios,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListScenarios => {
            print!("{}", lvs::scenarios::listing());
            ExitCode::SUCCESS
        }
        Command::Run {
            scenario,
            config,
            seed,
            trials,
            out_dir,
            threads,
            overrides,
            rho_factor,
        } => {
            let req = lvs::RunRequest {
                scenario,
                config_path: config,
                overrides,
                seed,
                trials,
                threads,
                rho_factor,
                out_dir,
            };
            match lvs::run(&req) {
                Ok(a) => {
                    println!("wrote {}", a.csv.display());
                    println!("wrote {}", a.manifest.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
