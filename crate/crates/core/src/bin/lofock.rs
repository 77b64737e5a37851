//! Scenario runner.
//!
//! Exit codes: 0 success, 1 usage or schema error, 2 a checked quantity
//! outside its tolerance (or a numerical failure such as a diverged solver).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lofock::scenario::{emit_figure_data, run_scenario, Experiment, Scenario, OUT_DIR_ENV};
use lofock::Error;

#[derive(Parser)]
#[command(
    name = "lofock",
    version,
    about = "Linear-optics Fock-space scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its report.
    Run {
        config: PathBuf,
        /// Output directory for the report and CSV files.
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out: PathBuf,
        /// Also write this series as CSV. May be repeated.
        #[arg(long = "csv", value_name = "SERIES")]
        csv: Vec<String>,
    },
    /// Check a scenario file without running it.
    Validate { config: PathBuf },
    /// List the experiment kinds with their default parameters.
    ListScenarios,
}

const OK: u8 = 0;
const USAGE: u8 = 1;
const CONTRACT: u8 = 2;

fn load(path: &Path) -> Result<Scenario, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Scenario::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(config: &Path, out: &Path, csv: &[String]) -> u8 {
    let scenario = match load(config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return USAGE;
        }
    };
    let known = scenario.experiment.series_names();
    if let Some(bad) = csv.iter().find(|s| !known.contains(&s.as_str())) {
        eprintln!(
            "error: unknown series {bad:?}; available: {}",
            known.join(", ")
        );
        return USAGE;
    }
    let report = match run_scenario(&scenario) {
        Ok(r) => r,
        Err(
            e @ (Error::Config(_) | Error::NonLogicalInput { .. } | Error::UnsupportedResource(_)),
        ) => {
            eprintln!("error: {e}");
            return USAGE;
        }
        Err(e) => {
            eprintln!("numerical failure: {e}");
            return CONTRACT;
        }
    };
    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("error: {}: {e}", out.display());
        return USAGE;
    }
    let report_path = out.join(format!("{}.report.json", scenario.name));
    if let Err(e) = fs::write(&report_path, report.to_json()) {
        eprintln!("error: {}: {e}", report_path.display());
        return USAGE;
    }
    println!("report: {}", report_path.display());
    for series in csv {
        let path = out.join(format!("{}.{series}.csv", scenario.name));
        let text = emit_figure_data(&report, series).expect("series checked above");
        if let Err(e) = fs::write(&path, text) {
            eprintln!("error: {}: {e}", path.display());
            return USAGE;
        }
        println!("series {series}: {}", path.display());
    }
    for s in &report.scalars {
        let status = match s.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "    ",
        };
        match (s.expected, s.tolerance) {
            (Some(e), Some(t)) => println!(
                "{status} {} = {:?} (expected {e:?} ± {t:e})",
                s.name, s.value
            ),
            _ => println!("{status} {} = {:?}", s.name, s.value),
        }
    }
    for e in &report.events {
        println!("event {:?}: {}", e.kind, e.message);
    }
    if report.violations().is_empty() {
        OK
    } else {
        CONTRACT
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Run { config, out, csv } => run(&config, &out, &csv),
        Command::Validate { config } => match load(&config) {
            Ok(s) => {
                println!("ok: {} ({})", s.name, s.experiment.kind());
                OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                USAGE
            }
        },
        Command::ListScenarios => {
            for kind in Experiment::KINDS {
                let e = Experiment::default_for(kind).expect("every kind has defaults");
                println!("{kind:<18} {}", e.description());
                println!(
                    "{:<18} defaults: {}",
                    "",
                    serde_json::to_string(&e).expect("serializes")
                );
            }
            OK
        }
    };
    ExitCode::from(code)
}
