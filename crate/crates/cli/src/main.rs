//! Command-line front end for the target type tracking experiment.
//!
//! Exit codes: 0 success, 1 validation error, 2 runtime/rule failure,
//! 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use belief_fusion::experiment::{
    load_scenario_file, run_experiment, ExperimentConfig,
};
use belief_fusion::fusion::FusionRule;
use belief_fusion::tracker::DecisionCriterion;
use belief_fusion::Error;

#[derive(Debug, Parser)]
#[command(
    name = "ttt",
    about = "Monte-Carlo target type tracking: Dempster's rule vs PCR5",
    long_about = "Runs a seeded Monte-Carlo comparison of Dempster's rule and PCR5 on a \
ground-truth type sequence observed through an unreliable classifier, and writes \
summary.csv, latency.csv, meta.txt and plot.gp into the output directory."
)]
struct Cli {
    /// TOML config file; flags below override its values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Builtin classifier (c1, c2) or a matrix file path
    #[arg(long, value_name = "c1|c2|PATH")]
    classifier: Option<String>,

    /// Scenario file: one `label duration` pair per line
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,

    /// Number of Monte-Carlo runs
    #[arg(long, value_name = "N")]
    runs: Option<usize>,

    /// Master seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Fusion rule selection
    #[arg(long, value_name = "dempster|pcr5|both")]
    rule: Option<String>,

    /// Decision criterion
    #[arg(long, value_name = "belief|pignistic")]
    criterion: Option<String>,

    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for the Monte-Carlo runs (default: all cores)
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(selector) = &cli.classifier {
        config.set_classifier(selector)?;
    }
    if let Some(path) = &cli.scenario {
        config.segments = load_scenario_file(path)?;
    }
    if let Some(runs) = cli.runs {
        config.runs = runs;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(rule) = &cli.rule {
        config.rules = match rule.as_str() {
            "both" => FusionRule::ALL.to_vec(),
            other => vec![other.parse()?],
        };
    }
    if let Some(criterion) = &cli.criterion {
        config.criterion = match criterion.as_str() {
            "belief" => DecisionCriterion::MaxBelief,
            "pignistic" => DecisionCriterion::MaxPignistic,
            other => {
                return Err(Error::Parse(format!(
                    "unknown criterion {other:?} (expected belief or pignistic)"
                )))
            }
        };
    }
    if let Some(out) = &cli.out {
        config.out = out.to_string_lossy().into_owned();
    }
    config.validate()?;
    Ok(config)
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 3,
        Error::RuleUnusable { .. } | Error::TotalConflict { .. } | Error::FusionStep { .. } => 2,
        _ => 1,
    }
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let config = build_config(&cli)?;
    let output = run_experiment(&config)?;
    let summary = &output.summary;
    eprintln!(
        "{} runs over {} scans, seed {} ({})",
        summary.n_runs,
        summary.truth.len(),
        summary.master_seed,
        summary.generator
    );
    for rs in &summary.rules {
        eprintln!(
            "  {}: {} completed, {} failed",
            rs.rule, rs.completed_runs, rs.failures
        );
        for (si, stats) in rs.switch_latency.iter().enumerate() {
            let mean = stats
                .mean
                .map_or("censored".to_string(), |m| format!("{m:.2} scans"));
            eprintln!(
                "    switch {}: mean latency {mean}, censor rate {:.1}%",
                si + 1,
                100.0 * stats.censor_rate
            );
        }
    }
    eprintln!(
        "wrote {}, {}, {}, {}",
        output.summary_csv.display(),
        output.latency_csv.display(),
        output.meta.display(),
        output.plot_script.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
