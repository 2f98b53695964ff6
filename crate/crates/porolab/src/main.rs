use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use porolab::{emit_report, run_experiment, ExperimentConfig, LabError, Report, REGISTRY};

#[derive(Parser)]
#[command(name = "porolab", version, about = "Porosity and dimension experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the experiments and the property each one tests.
    List,
    /// Run one experiment and write its reports.
    Run {
        experiment: String,
        /// JSON config; see the README for the schema.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: the config's, else `porolab-out`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report (both formats are written when neither flag is given).
        #[arg(long)]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
}

fn print_failures(report: &Report) {
    for (name, ok) in &report.checks {
        if !ok {
            println!("  check failed: {name}");
        }
    }
    for &i in &report.failing_rows {
        let cells: Vec<String> = report.columns
            .iter()
            .zip(&report.rows[i])
            .map(|(c, v)| format!("{c}={v:?}"))
            .collect();
        println!("  row {i}: {}", cells.join(" "));
    }
}

fn run(experiment: &str, config: Option<PathBuf>, out: Option<PathBuf>, seed: Option<u64>, json: bool, csv: bool) -> Result<bool, LabError> {
    let mut cfg = match &config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = out.or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("porolab-out"));
    let (want_json, want_csv) = if json || csv { (json, csv) } else { (cfg.output.json, cfg.output.csv) };
    let report = run_experiment(experiment, &cfg)?;
    let files = emit_report(&report, &dir, want_json, want_csv)?;
    let pass = report.pass();
    println!("{experiment}: {} ({} rows, {} failing)", if pass { "PASS" } else { "FAIL" }, report.rows.len(), report.failing_rows.len());
    if !pass {
        print_failures(&report);
    }
    for f in files {
        println!("  wrote {}", f.display());
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for e in REGISTRY {
                println!("{:<24} {}", e.name, e.claim);
            }
            ExitCode::SUCCESS
        }
        Command::Run { experiment, config, out, seed, json, csv } => match run(&experiment, config, out, seed, json, csv) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
