use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tsfloquet_cli::{run_batch, run_file, RunOptions, EXIT_ERROR};

#[derive(Debug, Parser)]
#[command(name = "tsfloquet", version, about = "Floquet multipliers and stability on periodic time scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a system description (exit 0 stable, 1 unstable, 2 undetermined, 3 error).
    Analyze {
        /// Config file.
        #[arg(required_unless_present = "batch", conflicts_with = "batch")]
        config: Option<PathBuf>,
        /// Series order (default: number of scattered points on discrete scales, else 3).
        #[arg(long)]
        n: Option<usize>,
        /// Quadrature tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Cross-check against the brute-force monodromy matrix.
        #[arg(long)]
        oracle: bool,
        /// Use Shi's formula (continuous scales with B = 1).
        #[arg(long)]
        shi: bool,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Analyze every `*.cfg` file in a directory.
        #[arg(long, value_name = "DIR")]
        batch: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Analyze {
        config,
        n,
        tol,
        oracle,
        shi,
        json,
        batch,
    } = Cli::parse().command;
    let opts = RunOptions { n, tol, oracle, shi };

    let code = if let Some(dir) = batch {
        match run_batch(&dir, &opts) {
            Ok(entries) => {
                if json {
                    println!("{}", serde_json::to_string_pretty(&entries).expect("report serializes"));
                } else {
                    for (i, entry) in entries.iter().enumerate() {
                        if i > 0 {
                            println!();
                        }
                        println!("== {} ==", entry.file);
                        match (&entry.report, &entry.error) {
                            (Some(report), _) => print!("{}", report.to_text()),
                            (None, Some(e)) => println!("error: {e}"),
                            (None, None) => {}
                        }
                    }
                }
                for entry in &entries {
                    if let Some(e) = &entry.error {
                        eprintln!("{}: {e}", entry.file);
                    }
                }
                entries.iter().map(|e| e.exit_code).max().unwrap_or(0)
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        }
    } else {
        let path = config.expect("clap enforces a config without --batch");
        match run_file(&path, &opts) {
            Ok(report) => {
                if json {
                    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
                } else {
                    print!("{}", report.to_text());
                }
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
                if let Some(o) = report.oracle.as_ref().filter(|o| !o.passed) {
                    eprintln!(
                        "error: oracle disagrees: |dA| = {:e} (allowed {:e}), |dB| = {:e}",
                        o.a_delta, o.a_allowed, o.b_delta
                    );
                }
                report.exit_code()
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        }
    };
    ExitCode::from(code as u8)
}
