use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dislocation_cli::config::{load_config, RawConfig, Task};
use dislocation_cli::output::{sidecar_path, write_all_atomic};
use dislocation_cli::tasks::{run, Outcome};

/// Spectra, persistent currents and self-checks for a charge around a thick
/// screw dislocation in an inhomogeneous magnetic field.
#[derive(Parser)]
#[command(name = "dislocation", version)]
struct Cli {
    /// Task to run.
    #[arg(value_enum, required_unless_present = "print_defaults")]
    task: Option<Task>,
    /// JSON configuration file.
    #[arg(long, required_unless_present = "print_defaults")]
    config: Option<PathBuf>,
    /// Output path (CSV, or JSON for check reports); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.print_defaults {
        println!(
            "{}",
            serde_json::to_string_pretty(&RawConfig::default()).expect("defaults serialize")
        );
        return ExitCode::SUCCESS;
    }
    let path = cli.config.expect("clap enforces --config");
    let cfg = match load_config(&path, cli.task) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };

    let (files, passed) = match outcome {
        Outcome::Table(a) => {
            let json = serde_json::to_string_pretty(&a.sidecar).expect("sidecar serializes") + "\n";
            match &cli.out {
                Some(out) => (
                    vec![
                        (out.clone(), a.csv.into_bytes()),
                        (sidecar_path(out), json.into_bytes()),
                    ],
                    true,
                ),
                None => {
                    print!("{}", a.csv);
                    (Vec::new(), true)
                }
            }
        }
        Outcome::Report(r) => {
            let json = serde_json::to_string_pretty(&r).expect("report serializes") + "\n";
            for c in &r.checks {
                eprintln!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            match &cli.out {
                Some(out) => (vec![(out.clone(), json.into_bytes())], r.passed),
                None => {
                    print!("{json}");
                    (Vec::new(), r.passed)
                }
            }
        }
    };
    if let Err(e) = write_all_atomic(&files) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
