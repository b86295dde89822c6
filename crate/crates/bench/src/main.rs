use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rdae_bench::{acceptance, commands, report, sweep, BenchError, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "rdae", version, about = "Radar denoising autoencoder benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML). Defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `experiment.output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed; overrides `experiment.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesise the configured datasets.
    Generate,
    /// Train the learned algorithms and save weights and objective traces.
    Train,
    /// Run the full grid and write `sweep.csv`.
    Sweep,
    /// Summarise sweep CSVs into tables and gnuplot data files.
    Report {
        /// CSV files; defaults to `<out>/sweep.csv`.
        csv: Vec<PathBuf>,
    },
    /// Run the acceptance suite.
    Accept {
        /// Run only these criteria (1-9).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.experiment.output = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.experiment.master_seed = seed;
    }
    if cli.jobs == 0 {
        return Err(BenchError::Config("--jobs must be at least 1".into()));
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate => {
            let cfg = load(cli)?;
            for m in commands::generate(&cfg, &cfg.experiment.output, cli.jobs)? {
                println!("{}", m.display());
            }
        }
        Command::Train => {
            let cfg = load(cli)?;
            for t in commands::train_all(&cfg, &cfg.experiment.output, cli.jobs)? {
                println!("{}", t.display());
            }
        }
        Command::Sweep => {
            let cfg = load(cli)?;
            let rows = sweep::run_sweep(&cfg, cli.jobs)?;
            let path = cfg.experiment.output.join("sweep.csv");
            sweep::write_csv(&rows, &path)?;
            let hash = sweep::results_hash(&rows);
            let hpath = cfg.experiment.output.join("sweep.sha256");
            std::fs::write(&hpath, format!("{hash}\n")).map_err(|e| BenchError::io(&hpath, e))?;
            println!("{} rows -> {} (results hash {hash})", rows.len(), path.display());
        }
        Command::Report { csv } => {
            let out = match (&cli.out, &cli.config) {
                (Some(o), _) => o.clone(),
                (None, Some(_)) => load(cli)?.experiment.output,
                (None, None) => ExperimentConfig::default().experiment.output,
            };
            let paths = if csv.is_empty() { vec![out.join("sweep.csv")] } else { csv.clone() };
            let mut rows = Vec::new();
            for p in &paths {
                rows.extend(sweep::read_csv(p)?);
            }
            sweep::sort_rows(&mut rows);
            let written = report::write_report(&rows, &out.join("report"))?;
            print!("{}", report::table_text(&rows));
            let diverged = rows.iter().filter(|r| r.diverged()).count();
            if diverged > 0 {
                println!("{diverged} diverged rows excluded from means");
            }
            for w in written {
                println!("{}", w.display());
            }
        }
        Command::Accept { only } => {
            let mut failed = 0;
            for (id, check) in acceptance::all() {
                if !only.is_empty() && !only.contains(&id) {
                    continue;
                }
                let o = check()?;
                println!("{o}");
                failed += !o.passed as usize;
            }
            if failed > 0 {
                return Err(BenchError::Acceptance(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
