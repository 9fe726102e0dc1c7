//! Loads a config (default, or the path given) and runs the acceptance checks.
//!
//! `cargo run --release --example experiment -- my.toml`

use spectral_gap::config::ExperimentConfig;
use spectral_gap::criteria::{self, Context, CRITERIA};

fn main() -> spectral_gap::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(p) => ExperimentConfig::load(p.as_ref())?,
        None => ExperimentConfig::default_config(),
    };
    println!("seed {}, {} ideals, x in e^{:?}", cfg.seed, cfg.ideals.len(), cfg.counting.x_exp);
    let ctx = Context::new(&cfg, None)?;
    for (id, _) in CRITERIA.iter().take(10) {
        println!("{}", criteria::run(&ctx, *id)?.line());
    }
    Ok(())
}
