use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cyclosync::detectors::DetectorId;
use cyclosync::harness::SwCandidates;
use cyclosync_cli::{commands, error::CliError, resolve_config};

#[derive(Parser)]
#[command(name = "cyclosync", version, about = "Frame synchronization experiments")]
struct Cli {
    /// Scenario file, or a bundled name (scenario1, scenario2).
    #[arg(long, global = true)]
    config: Option<String>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo trials; overrides the config.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Comma-separated detectors: lrt, alrt, ralrt, salrt, correlator.
    #[arg(long, global = true, value_delimiter = ',')]
    detectors: Option<Vec<String>>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    parallelism: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ROC curves for each detector and SNR as CSV.
    Roc {
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank sync words by AUC; JSON lines plus a histogram CSV.
    SearchSw {
        #[arg(long)]
        out: PathBuf,
        /// exhaustive or sample:<n>
        #[arg(long, default_value = "sample:100")]
        mode: String,
        /// SNR of the search; defaults to the first configured SNR.
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<f64>,
    },
    /// Closed-form multiplication and addition counts as CSV.
    Complexity {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        c1: u128,
        #[arg(long, default_value_t = 1)]
        c2: u128,
    },
    /// Monte-Carlo checks of the statistical model.
    Validate,
    /// Run the blind channel estimator once and compare with the true taps.
    EstimateChannel {
        /// Optional JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn detectors(names: &Option<Vec<String>>, default: &[DetectorId]) -> Result<Vec<DetectorId>, CliError> {
    match names {
        None => Ok(default.to_vec()),
        Some(v) => v.iter().map(|n| n.parse::<DetectorId>().map_err(CliError::from)).collect(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.parallelism {
        if n == 0 {
            return Err(CliError::config("--parallelism must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    let spec = cli.config.as_deref().ok_or_else(|| CliError::config("--config is required"))?;
    let cfg = resolve_config(spec)?;
    eprintln!("{}", cfg.derived_summary()?);
    let seed = cli.seed.unwrap_or(cfg.run.seed);
    match &cli.command {
        Command::Roc { out } => {
            let dets = detectors(&cli.detectors, &DetectorId::ALL)?;
            let trials = cli.trials.unwrap_or(cfg.run.roc_trials);
            for (d, snr, a) in commands::roc(&cfg, &dets, trials, seed, out)? {
                println!("{d} snr_db={snr} auc={a:.4}");
            }
        }
        Command::SearchSw { out, mode, snr_db } => {
            let mode: SwCandidates = mode.parse()?;
            let dets = detectors(&cli.detectors, &[DetectorId::Salrt])?;
            if dets.len() != 1 {
                return Err(CliError::config("search-sw takes exactly one detector"));
            }
            let trials = cli.trials.unwrap_or(cfg.run.search_trials);
            let snr = snr_db.unwrap_or(cfg.run.snr_db[0]);
            let best = commands::search_sw(&cfg, &mode, dets[0], snr, trials, seed, out)?;
            println!("best: {best}");
        }
        Command::Complexity { out, c1, c2 } => commands::complexity(&cfg, *c1, *c2, out)?,
        Command::Validate => {
            let trials = cli.trials.unwrap_or(cfg.run.validation_trials);
            print!("{}", commands::validate(&cfg, trials, seed)?);
        }
        Command::EstimateChannel { out } => {
            let rep = commands::estimate(&cfg, seed)?;
            for (i, (e, t)) in rep.estimate.iter().zip(&rep.truth).enumerate() {
                for (l, (a, b)) in e.iter().zip(t).enumerate() {
                    println!(
                        "phase {i} tap {l}: estimate {:+.4}{:+.4}i  truth {:+.4}{:+.4}i",
                        a[0], a[1], b[0], b[1]
                    );
                }
            }
            println!("nmse {:.4e} at {} dB", rep.nmse, rep.snr_db);
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&rep).expect("plain data"))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
