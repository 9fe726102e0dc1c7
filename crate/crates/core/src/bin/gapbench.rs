use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spectral_gap::config::ExperimentConfig;
use spectral_gap::runner::{self, Command, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "gapbench", version, about = "Counting, spectral and finite-group checks for quaternion lattices")]
struct Cli {
    /// TOML config; the shipped default when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration iteration budget.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Populate the enumeration cache.
    Enumerate,
    /// Counting series and bound report.
    Count,
    /// Spherical transform, convolution and orbital integral checks.
    Harmonic,
    /// Finite quotient groups.
    Group,
    /// Constants and bound surfaces.
    Bounds,
    /// Everything, aggregated into report.json.
    Report,
    /// The acceptance checks.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(p) => match ExperimentConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
        None => ExperimentConfig::default_config(),
    };
    if let Some(o) = cli.out {
        cfg.out_dir = o;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(b) = cli.budget {
        cfg.budget = b;
    }
    if cfg.workers > 0 {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
    }
    let cmd = match cli.cmd {
        Cmd::Enumerate => Command::Enumerate,
        Cmd::Count => Command::Count,
        Cmd::Harmonic => Command::Harmonic,
        Cmd::Group => Command::Group,
        Cmd::Bounds => Command::Bounds,
        Cmd::Report => Command::Report,
        Cmd::Verify => Command::Verify,
    };
    let res = runner::run(cmd, &cfg);
    match &res {
        Ok(s) => {
            for c in &s.checks {
                println!("{}", c.line());
            }
            println!("wrote {} files to {}", s.artifacts.len(), cfg.out_dir.display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(runner::exit_code(&res) as u8)
}
