use std::fs;
use std::path::Path;
use std::process::Command;

use spectral_gap::config::ExperimentConfig;
use spectral_gap::runner::{data_files, EXIT_BUDGET, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_PASS};

fn gapbench(dir: &Path, cfg: &ExperimentConfig, args: &[&str]) -> i32 {
    let p = dir.join("cfg.toml");
    fs::write(&p, toml::to_string(cfg).unwrap()).unwrap();
    let st = Command::new(env!("CARGO_BIN_EXE_gapbench"))
        .arg("--config")
        .arg(&p)
        .args(args)
        .output()
        .unwrap();
    st.status.code().unwrap()
}

fn cfg_in(dir: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::default_config();
    c.out_dir = dir.join("out");
    c.cache_dir = dir.join("cache");
    c
}

fn names(dir: &Path) -> Vec<String> {
    data_files(dir)
        .unwrap()
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect()
}

#[test]
fn bounds_with_empty_grids() {
    let d = tempfile::tempdir().unwrap();
    let mut c = cfg_in(d.path());
    c.bounds.t_grid.clear();
    c.bounds.v_grid.clear();
    c.bounds.p_grid.clear();
    c.bounds.c_grid.clear();
    c.bounds.delta.clear();
    assert_eq!(gapbench(d.path(), &c, &["bounds"]), EXIT_PASS);
    let n = names(&c.out_dir);
    assert!(n.contains(&"constants.csv".to_string()), "{n:?}");
    assert!(!n.iter().any(|f| f == "bound_surface.csv" || f == "corollary_exponents.csv"), "{n:?}");
    assert!(d.path().join("out/metadata.json").exists());
}

#[test]
fn bounds_surface_written() {
    let d = tempfile::tempdir().unwrap();
    let c = cfg_in(d.path());
    assert_eq!(gapbench(d.path(), &c, &["bounds"]), EXIT_PASS);
    let s = fs::read_to_string(c.out_dir.join("bound_surface.csv")).unwrap();
    assert!(s.starts_with("T,V,p,c,eps,thm1,thm1_spherical,thm2\n"));
    assert!(s.lines().count() > 1);
}

#[test]
fn unknown_key_is_config_error() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("bad.toml");
    let text = format!("{}\n[extra]\nfoo = 1\n", spectral_gap::config::DEFAULT_CONFIG);
    fs::write(&p, text).unwrap();
    let st = Command::new(env!("CARGO_BIN_EXE_gapbench"))
        .args(["--config", p.to_str().unwrap(), "bounds"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn wrong_version_is_config_error() {
    let d = tempfile::tempdir().unwrap();
    let mut c = cfg_in(d.path());
    c.format_version = 7;
    assert_eq!(gapbench(d.path(), &c, &["group"]), EXIT_CONFIG);
}

#[test]
fn tiny_budget_exits_with_budget_code() {
    let d = tempfile::tempdir().unwrap();
    let c = cfg_in(d.path());
    assert_eq!(gapbench(d.path(), &c, &["count", "--budget", "10"]), EXIT_BUDGET);
}

#[test]
fn warm_cache_count_matches_cold() {
    let d = tempfile::tempdir().unwrap();
    let c = cfg_in(d.path());
    assert_eq!(gapbench(d.path(), &c, &["enumerate"]), EXIT_PASS);
    assert!(fs::read_dir(&c.cache_dir).unwrap().count() > 0);
    assert_eq!(gapbench(d.path(), &c, &["count"]), EXIT_PASS);
    let warm: Vec<Vec<u8>> = data_files(&c.out_dir)
        .unwrap()
        .iter()
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("count"))
        .map(|p| fs::read(p).unwrap())
        .collect();

    let d2 = tempfile::tempdir().unwrap();
    let c2 = cfg_in(d2.path());
    assert_eq!(gapbench(d2.path(), &c2, &["count"]), EXIT_PASS);
    let cold: Vec<Vec<u8>> = data_files(&c2.out_dir)
        .unwrap()
        .iter()
        .map(|p| fs::read(p).unwrap())
        .collect();
    assert_eq!(warm.len(), 3);
    assert_eq!(warm, cold);
}

#[test]
fn group_passes() {
    let d = tempfile::tempdir().unwrap();
    let c = cfg_in(d.path());
    assert_eq!(gapbench(d.path(), &c, &["group"]), EXIT_PASS);
    let g = fs::read_to_string(c.out_dir.join("groups.csv")).unwrap();
    assert!(g.lines().any(|l| l.starts_with("F7,7,168,168,")), "{g}");
}

#[test]
fn verify_reports_failed_check() {
    // counting scaling fails on the default config, so verify exits 2
    let d = tempfile::tempdir().unwrap();
    let c = cfg_in(d.path());
    assert_eq!(gapbench(d.path(), &c, &["verify"]), EXIT_CHECK_FAILED);
    let v = fs::read_to_string(c.out_dir.join("verify.csv")).unwrap();
    assert!(v.lines().any(|l| l.starts_with("5,") && l.ends_with("FAIL")));
    assert_eq!(v.matches("PASS").count(), 9);
}
