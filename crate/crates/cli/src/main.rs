use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hylab_cli::{load_scenario, report, run, ConfigError};

#[derive(Parser)]
#[command(name = "hylab", version, about = "Hydrogen two-body and hybrid dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Scenario file (JSON).
    config: PathBuf,
    /// Set a config field, e.g. `--override packet.n_bar=40`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (same as `--override output_dir=...`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sampling stride (same as `--override stride=...`).
    #[arg(long)]
    stride: Option<usize>,
}

impl ConfigArgs {
    fn overrides(&self) -> Vec<String> {
        let mut all = self.overrides.clone();
        if let Some(out) = &self.out {
            all.push(format!("output_dir={}", serde_json::Value::String(out.display().to_string())));
        }
        if let Some(s) = self.stride {
            all.push(format!("stride={s}"));
        }
        all
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts and manifest.
    Run(ConfigArgs),
    /// Check a scenario and print it with every default filled in.
    Validate(ConfigArgs),
    /// Merge the manifests of finished runs into one table.
    Report {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Write the table to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Stdout write that tolerates a closed pipe (`hylab validate x | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn config_failure(e: &ConfigError) -> ExitCode {
    eprintln!("hylab: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate(args) => match load_scenario(&args.config, &args.overrides()) {
            Ok(c) => {
                emit(&format!("{}\n", serde_json::to_string_pretty(&c).expect("config serializes")));
                ExitCode::SUCCESS
            }
            Err(e) => config_failure(&e),
        },
        Command::Run(args) => {
            let config = match load_scenario(&args.config, &args.overrides()) {
                Ok(c) => c,
                Err(e) => return config_failure(&e),
            };
            let manifest = match run(&config) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("hylab: cannot write to {}: {e}", config.output_dir().display());
                    return ExitCode::from(EXIT_FAILED);
                }
            };
            let dir = config.output_dir();
            if let Some(e) = &manifest.error {
                eprintln!("hylab: run aborted: {e} (partial manifest in {})", dir.display());
                return ExitCode::from(EXIT_FAILED);
            }
            let failed: Vec<_> = manifest.invariants.iter().filter(|c| !c.passed).collect();
            for c in &failed {
                eprintln!("hylab: invariant failed: {} = {:e} (limit {:e})", c.name, c.measured, c.limit);
            }
            emit(&format!("{}\n", dir.join(hylab_cli::manifest::MANIFEST_FILE).display()));
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
        Command::Report { runs, out } => {
            let manifests = match report::collect(&runs) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("hylab: {e}");
                    return ExitCode::from(EXIT_FAILED);
                }
            };
            let table = report::render(&manifests);
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &table) {
                        eprintln!("hylab: {}: {e}", path.display());
                        return ExitCode::from(EXIT_FAILED);
                    }
                }
                None => emit(&table),
            }
            if manifests.iter().all(|(_, m)| m.succeeded()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
    }
}
