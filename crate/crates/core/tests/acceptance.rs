//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test --release --test acceptance -- --nocapture` shows the lines.
//! Criterion 5 (counting scaling) is reported but not asserted, see README.

use std::fs;

use spectral_gap::config::ExperimentConfig;
use spectral_gap::criteria::{self, Context, Outcome, CRITERIA};
use spectral_gap::runner::{self, data_files, Command};

// reported, never asserted
const REPORT_ONLY: [u8; 1] = [5];

fn determinism(cfg: &ExperimentConfig) -> Outcome {
    let t0 = std::time::Instant::now();
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut listings = Vec::new();
    for d in &dirs {
        let mut c = cfg.clone();
        c.out_dir = d.path().join("out");
        c.cache_dir = d.path().join("cache");
        runner::run(Command::Report, &c).expect("report run");
        let files = data_files(&c.out_dir).unwrap();
        let named: Vec<(String, Vec<u8>)> = files
            .iter()
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(p).unwrap()))
            .collect();
        listings.push(named);
    }
    let differing: Vec<String> = listings[0]
        .iter()
        .zip(&listings[1])
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.clone())
        .collect();
    let passed = listings[0].len() == listings[1].len() && differing.is_empty() && !listings[0].is_empty();
    Outcome {
        id: 11,
        name: CRITERIA[10].1,
        passed,
        detail: format!("{} files compared, {} differ {:?}", listings[0].len(), differing.len(), differing),
        data: serde_json::Value::Null,
        elapsed_secs: t0.elapsed().as_secs_f64(),
    }
}

#[test]
fn acceptance() {
    let cfg = ExperimentConfig::default_config();
    let ctx = Context::new(&cfg, None).unwrap();
    let mut failed = Vec::new();
    for (id, _) in CRITERIA.iter().take(10) {
        let o = criteria::run(&ctx, *id).unwrap_or_else(|e| panic!("criterion {id} errored: {e}"));
        println!("{}", o.line());
        if !o.passed && !REPORT_ONLY.contains(id) {
            failed.push(*id);
        }
    }
    let o = determinism(&cfg);
    println!("{}", o.line());
    if !o.passed {
        failed.push(11);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
