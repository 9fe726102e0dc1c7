//! Subcommands behind `gapbench`: each writes its data files to the output
//! directory and returns the checks it ran.
//!
//! Data files depend only on the config. Timings and timestamps go to
//! `metadata.json` alone.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::bounds::{
    cor_exponents, cor_upper_instantiation, eigenvalue_floor, thm1_rhs, thm1_rhs_spherical, thm2_rhs,
    threshold_solver, Mode,
};
use crate::config::ExperimentConfig;
use crate::congruence_groups::mlb_evaluate;
use crate::counting::{bound_report, exp_grid, series_from_elements};
use crate::criteria::{self, Context, Outcome};
use crate::enumeration::{BallQuery, EnumerationCache};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Enumerate,
    Count,
    Harmonic,
    Group,
    Bounds,
    Report,
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Count => "count",
            Command::Harmonic => "harmonic",
            Command::Group => "group",
            Command::Bounds => "bounds",
            Command::Report => "report",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub checks: Vec<Outcome>,
    pub artifacts: Vec<PathBuf>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

pub fn exit_code(r: &Result<RunSummary>) -> i32 {
    match r {
        Ok(s) if s.passed() => EXIT_PASS,
        Ok(_) => EXIT_CHECK_FAILED,
        Err(Error::Budget { .. }) => EXIT_BUDGET,
        Err(Error::Config(_)) => EXIT_CONFIG,
        Err(_) => EXIT_OTHER,
    }
}

/// Twelve significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.11e}")
}

struct Out {
    dir: PathBuf,
    written: Vec<PathBuf>,
    timings: Vec<(String, f64)>,
}

impl Out {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Out {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            timings: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.dir.join(name);
        fs::write(&p, text)?;
        self.written.push(p);
        Ok(())
    }

    fn json(&mut self, name: &str, v: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.into()))?;
        s.push('\n');
        self.write(name, &s)
    }

    fn finish(mut self, cmd: Command, cfg: &ExperimentConfig, checks: Vec<Outcome>) -> Result<RunSummary> {
        for c in &checks {
            self.timings.push((format!("criterion {}", c.id), c.elapsed_secs));
        }
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let meta = json!({
            "command": cmd.name(),
            "unix_time": now,
            "seed": cfg.seed,
            "timings_secs": self.timings.iter().map(|(k, v)| json!({ "step": k, "secs": v })).collect::<Vec<_>>(),
        });
        let p = self.dir.join("metadata.json");
        fs::write(&p, serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.into()))?)?;
        Ok(RunSummary {
            checks,
            artifacts: self.written,
        })
    }
}

fn cache(cfg: &ExperimentConfig) -> Result<EnumerationCache> {
    EnumerationCache::new(&cfg.cache_dir)
}

pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let mut out = Out::new(&cfg.out_dir)?;
    let checks = match cmd {
        Command::Enumerate => {
            enumerate(cfg, &mut out)?;
            vec![]
        }
        Command::Count => {
            count(cfg, &mut out)?;
            vec![]
        }
        Command::Harmonic => harmonic(cfg, &mut out)?,
        Command::Group => group(cfg, &mut out)?,
        Command::Bounds => bounds(cfg, &mut out)?,
        Command::Report => report(cfg, &mut out)?,
        Command::Verify => verify(cfg, &mut out)?,
    };
    out.finish(cmd, cfg, checks)
}

fn x_max(cfg: &ExperimentConfig) -> f64 {
    *exp_grid(cfg.counting.x_exp.0, cfg.counting.x_exp.1).last().unwrap()
}

fn enumerate(cfg: &ExperimentConfig, out: &mut Out) -> Result<()> {
    let ctx = Context::new(cfg, Some(cache(cfg)?))?;
    let x = x_max(cfg);
    let mut csv = String::from("ideal,ideal_norm,x,count\n");
    for s in &cfg.ideals {
        let a = cfg.ideal(s)?;
        let q = BallQuery::new(&ctx.alg, a.clone(), x, cfg.counting.cap).with_roles(cfg.roles()?);
        let t0 = std::time::Instant::now();
        let n = ctx.cache.as_ref().unwrap().load_or_compute(&ctx.alg, &q, || {
            crate::enumeration::enumerate_fast_with_budget(&ctx.alg, &q, cfg.budget as u128)
        })?;
        out.timings.push((format!("enumerate {a}"), t0.elapsed().as_secs_f64()));
        writeln!(csv, "\"{a}\",{},{},{}", a.norm(), real(x), n.len()).unwrap();
    }
    out.write("enumeration.csv", &csv)
}

fn count(cfg: &ExperimentConfig, out: &mut Out) -> Result<Value> {
    let alg = cfg.algebra()?;
    let c = cache(cfg)?;
    let xs = exp_grid(cfg.counting.x_exp.0, cfg.counting.x_exp.1);
    let roles = cfg.roles()?;
    let mut samples = Vec::new();
    for s in &cfg.ideals {
        let a = cfg.ideal(s)?;
        let q = BallQuery::new(&alg, a.clone(), *xs.last().unwrap(), cfg.counting.cap).with_roles(roles.clone());
        let t0 = std::time::Instant::now();
        let elems = c.load_or_compute(&alg, &q, || {
            crate::enumeration::enumerate_fast_with_budget(&alg, &q, cfg.budget as u128)
        })?;
        let secs = t0.elapsed().as_secs_f64();
        out.timings.push((format!("count {a}"), secs));
        // elapsed stays out of the data files
        samples.extend(series_from_elements(&elems, &a, &xs, &roles, 0.0));
    }
    let rep = bound_report(&samples, cfg.counting.eps);
    out.write("count_report.csv", &rep.to_csv())?;
    out.write("count_summary.txt", &rep.summary())?;
    let v = json!({
        "eps": rep.eps,
        "families": rep.families.iter().map(|f| json!({
            "ideal_norm": f.ideal_norm,
            "max_ratio": f.max_ratio,
            "fitted_constant": f.fitted_constant,
            "slope": f.fit.as_ref().map(|x| x.slope),
            "zero_counts": f.zero_counts,
        })).collect::<Vec<_>>(),
    });
    out.json("count_summary.json", &v)?;
    Ok(v)
}

fn run_criteria(cfg: &ExperimentConfig, ids: &[u8], out: &mut Out) -> Result<Vec<Outcome>> {
    let ctx = Context::new(cfg, Some(cache(cfg)?))?;
    let mut v = Vec::new();
    for &id in ids {
        let o = criteria::run(&ctx, id)?;
        out.json(&format!("criterion_{id:02}.json"), &serde_json::to_value(&o).unwrap())?;
        v.push(o);
    }
    Ok(v)
}

fn harmonic(cfg: &ExperimentConfig, out: &mut Out) -> Result<Vec<Outcome>> {
    if !cfg.harmonic.enabled {
        return Ok(vec![]);
    }
    run_criteria(cfg, &[6, 7, 8, 9], out)
}

fn group(cfg: &ExperimentConfig, out: &mut Out) -> Result<Vec<Outcome>> {
    let checks = run_criteria(cfg, &[10], out)?;
    let mut csv = String::from("label,ideal_norm,order,formula_order,classes,degrees,min_faithful,appendix_bound,bound_ok\n");
    for row in checks[0].data["cases"].as_array().unwrap() {
        let degrees = row["degrees"]
            .as_array()
            .map(|d| d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"))
            .unwrap_or_else(|| "-".into());
        let norm = row["norm"].as_u64().unwrap();
        let min_f = row["min_faithful"].as_u64();
        // the bound is for prime residue fields, k = 1
        let bound = crate::congruence_groups::appendix_bound(norm, 1, 1);
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            row["label"].as_str().unwrap(),
            norm,
            row["order"].as_u64().map_or("-".into(), |x| x.to_string()),
            row["formula"],
            row["classes"].as_u64().map_or("-".into(), |x| x.to_string()),
            degrees,
            min_f.map_or("-".into(), |x| x.to_string()),
            real(bound),
            min_f.map_or("-".into(), |m| (m as f64 >= bound).to_string()),
        )
        .unwrap();
    }
    out.write("groups.csv", &csv)?;
    // multiplicity lower bound at each configured ideal
    let alg = cfg.algebra()?;
    let disc = cfg.discriminant(&alg)?;
    let mut mlb = String::from("ideal,ideal_norm,coprime_part_norm,eps,mlb\n");
    for s in &cfg.ideals {
        let a = cfg.ideal(s)?;
        let a1 = a.coprime_part(&disc)?;
        let v = mlb_evaluate(&a, &disc, cfg.groups.mlb_eps)?;
        writeln!(mlb, "\"{a}\",{},{},{},{}", a.norm(), a1.norm(), real(cfg.groups.mlb_eps), real(v)).unwrap();
    }
    mlb.push_str(&format!("# discriminant {disc} (norm {}), default unless set in config\n", disc.norm()));
    out.write("mlb.csv", &mlb)?;
    Ok(checks)
}

fn bounds(cfg: &ExperimentConfig, out: &mut Out) -> Result<Vec<Outcome>> {
    let checks = run_criteria(cfg, &[1], out)?;
    let g = threshold_solver(Mode::General);
    let s = threshold_solver(Mode::Spherical);
    let fl = eigenvalue_floor();
    let mut t = String::from("constant,value\n");
    for (k, v) in [
        ("alpha_general", g.alpha),
        ("p_star_general", g.p_star),
        ("alpha_spherical", s.alpha),
        ("p_star_spherical", s.p_star),
        ("s_star", fl.s_star),
        ("lambda_star", fl.lambda_star),
    ] {
        writeln!(t, "{k},{}", real(v)).unwrap();
    }
    out.write("constants.csv", &t)?;
    let b = &cfg.bounds;
    if !(b.t_grid.is_empty() || b.v_grid.is_empty() || b.p_grid.is_empty()) {
        let mut csv = String::from("T,V,p,c,eps,thm1,thm1_spherical,thm2\n");
        let cs: Vec<Option<f64>> = if b.c_grid.is_empty() {
            vec![None]
        } else {
            b.c_grid.iter().copied().map(Some).collect()
        };
        for &tt in &b.t_grid {
            for &v in &b.v_grid {
                for &p in &b.p_grid {
                    for c in &cs {
                        for &e in &b.eps {
                            let t2 = match c {
                                Some(c) => real(thm2_rhs(tt, v, p, *c, e)?),
                                None => "-".into(),
                            };
                            writeln!(
                                csv,
                                "{},{},{},{},{},{},{},{t2}",
                                real(tt),
                                real(v),
                                real(p),
                                c.map_or("-".into(), real),
                                real(e),
                                real(thm1_rhs(tt, v, p, e)?),
                                real(thm1_rhs_spherical(tt, v, p, e)?),
                            )
                            .unwrap();
                        }
                    }
                }
            }
        }
        out.write("bound_surface.csv", &csv)?;
    }
    if !b.delta.is_empty() {
        let mut csv = String::from("alpha,delta,eps,lower,upper,first,displayed_first,second,displayed_second\n");
        for alpha in [1.0, 2.0, g.alpha, 6.0] {
            let (lo, up) = cor_exponents(alpha)?;
            for &d in &b.delta {
                for &e in &b.eps {
                    let Ok(r) = cor_upper_instantiation(alpha, d, e) else { continue };
                    writeln!(
                        csv,
                        "{},{},{},{},{},{},{},{},{}",
                        real(alpha),
                        real(d),
                        real(e),
                        real(lo),
                        real(up),
                        real(r.first),
                        real(r.displayed_first),
                        real(r.second),
                        real(r.displayed_second)
                    )
                    .unwrap();
                }
            }
        }
        out.write("corollary_exponents.csv", &csv)?;
    }
    Ok(checks)
}

fn report(cfg: &ExperimentConfig, out: &mut Out) -> Result<Vec<Outcome>> {
    enumerate(cfg, out)?;
    let counts = count(cfg, out)?;
    let mut checks = bounds(cfg, out)?;
    checks.extend(group(cfg, out)?);
    checks.extend(harmonic(cfg, out)?);
    let agg = json!({
        "counting": counts,
        "checks": checks.iter().map(|c| json!({ "id": c.id, "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
    });
    out.json("report.json", &agg)?;
    Ok(checks)
}

fn verify(cfg: &ExperimentConfig, out: &mut Out) -> Result<Vec<Outcome>> {
    let ids: Vec<u8> = (1..=10).collect();
    let checks = run_criteria(cfg, &ids, out)?;
    let mut csv = String::from("criterion,name,result\n");
    for c in &checks {
        writeln!(csv, "{},{},{}", c.id, c.name, if c.passed { "PASS" } else { "FAIL" }).unwrap();
    }
    out.write("verify.csv", &csv)?;
    Ok(checks)
}

/// Data files (everything but `metadata.json`) in a run directory, sorted.
pub fn data_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.file_name().is_some_and(|n| n != "metadata.json"))
        .collect();
    v.sort();
    Ok(v)
}
