use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use tacsearch::harness::{self, parse_grid, HarnessError};
use tacsearch::knowledge::load_corpus;
use tacsearch::search::{SearchConfig, SearchOutcome};

/// Learned tactic search over a corpus of proof scripts.
#[derive(Parser)]
#[command(name = "tacsearch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key=value` file overriding search parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seconds of search per theorem.
    #[arg(long)]
    budget: Option<f64>,
    /// Uniform priors, no abstraction and no evaluation.
    #[arg(long)]
    baseline: bool,
    /// Directory receiving the output files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Record every proof of the corpus and save the knowledge base.
    Build {
        corpus: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Re-prove each theorem using only the knowledge recorded before it.
    Reprove {
        corpus: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Re-prove the training slice once per cell of a parameter grid.
    Tune {
        corpus: PathBuf,
        /// Lines `key = v1, v2, ...`.
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Search for one goal against the whole corpus.
    Prove {
        corpus: PathBuf,
        goal: String,
        #[command(flatten)]
        common: Common,
    },
}

fn config(c: &Common) -> Result<SearchConfig, HarnessError> {
    let mut cfg = if c.baseline { SearchConfig::baseline() } else { SearchConfig::default() };
    if let Some(path) = &c.config {
        cfg.apply_text(&fs::read_to_string(path)?)?;
    }
    if let Some(b) = c.budget {
        cfg.set("global_timeout", &b.to_string())?;
    }
    Ok(cfg)
}

fn write_json(path: &Path, value: serde_json::Result<serde_json::Value>) -> Result<(), HarnessError> {
    let text = value.and_then(|v| serde_json::to_string_pretty(&v)).map_err(std::io::Error::from)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Build { corpus, common } => {
            let cfg = config(&common)?;
            let (kb, reports) = harness::build(&corpus, &cfg)?;
            kb.save(&common.out)?;
            write_json(&common.out.join("records.json"), serde_json::to_value(&reports))?;
            let failed = reports.iter().filter(|r| r.failure.is_some()).count();
            println!(
                "recorded {} theorems: {} pairs, {} goal lists, {} proofs did not replay",
                kb.recorded,
                kb.tactics.len(),
                kb.goal_lists.len(),
                failed
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Reprove { corpus, common } => {
            let cfg = config(&common)?;
            let report = harness::reprove(&corpus, &cfg)?;
            report.write(&common.out)?;
            println!("solved {}/{} ({:.1}%)", report.solved, report.attempted, 100.0 * report.solve_rate);
            Ok(ExitCode::SUCCESS)
        }
        Command::Tune { corpus, grid, common } => {
            let cfg = config(&common)?;
            let grid = parse_grid(&fs::read_to_string(grid)?)?;
            let entries = load_corpus(&corpus)?;
            let table = harness::tune(&entries, &cfg, &grid)?;
            fs::create_dir_all(&common.out)?;
            fs::write(common.out.join("tune.csv"), table.to_csv())?;
            write_json(&common.out.join("tune.json"), serde_json::to_value(&table))?;
            print!("{}", table.to_csv());
            Ok(ExitCode::SUCCESS)
        }
        Command::Prove { corpus, goal, common } => {
            let mut cfg = config(&common)?;
            if common.budget.is_none() && common.config.is_none() {
                cfg.global_timeout = Duration::from_secs(10);
            }
            let out = harness::prove(&goal, &corpus, &cfg)?;
            fs::create_dir_all(&common.out)?;
            write_json(&common.out.join("search.json"), serde_json::to_value(&out.status.stats))?;
            if let Some(side) = &out.sidecar {
                write_json(&common.out.join("proof.json"), serde_json::to_value(side))?;
            }
            match &out.status.outcome {
                SearchOutcome::Proved(p) => {
                    println!("{}", p.script);
                    Ok(ExitCode::SUCCESS)
                }
                _ => {
                    println!("{}", out.status.label());
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
