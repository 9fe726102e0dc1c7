//! Counting functions `N(x; a)`, `N(x; k, eta, a)` and empirical checks of their upper bounds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use crate::enumeration::{enumerate_fast_with_budget, BallQuery, LatticeElement, PlaceRole, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::number_field::IdealZBasis;
use crate::quaternion::QuaternionAlgebra;

/// Geometric grid `e^lo, e^{lo+1}, ..., e^hi`.
pub fn exp_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| (k as f64).exp()).collect()
}

/// `N(x; a)` with cap `C` at the other split places.
pub fn count_n(alg: &QuaternionAlgebra, ideal: &IdealZBasis, x: f64, cap: f64) -> Result<u64> {
    if x < 2.0 {
        return Ok(0);
    }
    let q = BallQuery::new(alg, ideal.clone(), x, cap);
    Ok(enumerate_fast_with_budget(alg, &q, DEFAULT_BUDGET)?.len() as u64)
}

/// `N(x; k, eta, a)`: one role per split place `2..=d`.
pub fn count_n_general(alg: &QuaternionAlgebra, ideal: &IdealZBasis, x: f64, roles: &[PlaceRole]) -> Result<u64> {
    let q = BallQuery::new(alg, ideal.clone(), x, 1.0).with_roles(roles.to_vec());
    q.validate(alg)?;
    if x < 2.0 {
        return Ok(0);
    }
    Ok(enumerate_fast_with_budget(alg, &q, DEFAULT_BUDGET)?.len() as u64)
}

/// One point of a counting series.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSample {
    pub x: f64,
    pub ideal: String,
    pub ideal_norm: u64,
    /// `k_j` for places in `J_1`, keyed by place.
    pub k: Vec<(usize, f64)>,
    /// `eta_j` for places in `J_2`, keyed by place.
    pub eta: Vec<(usize, f64)>,
    pub count: u64,
    pub elapsed_secs: f64,
}

fn windows(roles: &[PlaceRole]) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
    let mut k = Vec::new();
    let mut eta = Vec::new();
    for (i, r) in roles.iter().enumerate() {
        match *r {
            PlaceRole::NormWindow { k: v } => k.push((i + 2, v)),
            PlaceRole::TraceWindow { eta: v, .. } => eta.push((i + 2, v)),
            PlaceRole::Cap { .. } => {}
        }
    }
    (k, eta)
}

/// Counts over a strictly increasing x-grid.
///
/// The constraint sets nest in `x`, so one enumeration at the largest `x` is
/// filtered down; `elapsed_secs` is that single enumeration time on every row.
pub fn count_series(
    alg: &QuaternionAlgebra,
    ideal: &IdealZBasis,
    xs: &[f64],
    roles: &[PlaceRole],
    budget: u128,
) -> Result<Vec<CountSample>> {
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("x grid must be strictly increasing".into()));
    }
    let Some(&x_max) = xs.last() else {
        return Ok(Vec::new());
    };
    let q = BallQuery::new(alg, ideal.clone(), x_max, 1.0).with_roles(roles.to_vec());
    q.validate(alg)?;
    let t0 = Instant::now();
    let elems = if x_max < 2.0 {
        Vec::new()
    } else {
        enumerate_fast_with_budget(alg, &q, budget)?
    };
    let elapsed = t0.elapsed().as_secs_f64();
    Ok(series_from_elements(&elems, ideal, xs, roles, elapsed))
}

/// Same as [`count_series`] for an already enumerated list at `x >= max(xs)`.
pub fn series_from_elements(
    elems: &[LatticeElement],
    ideal: &IdealZBasis,
    xs: &[f64],
    roles: &[PlaceRole],
    elapsed_secs: f64,
) -> Vec<CountSample> {
    let (k, eta) = windows(roles);
    xs.iter()
        .map(|&x| CountSample {
            x,
            ideal: ideal.to_string(),
            ideal_norm: ideal.norm() as u64,
            k: k.clone(),
            eta: eta.clone(),
            count: elems.iter().filter(|e| e.frob_sq[0] <= x).count() as u64,
            elapsed_secs,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub points: usize,
    /// Points dropped because the count was zero.
    pub zero_points: usize,
}

/// Least-squares fit of `log count` against `log x`, zero counts excluded.
pub fn exponent_fit(series: &[(f64, u64)]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|&(x, c)| (x.ln(), (c as f64).ln()))
        .collect();
    let zero_points = series.len() - pts.len();
    if pts.len() < 3 {
        return Err(Error::Insufficient(format!(
            "{} positive points, need 3 ({zero_points} zero counts)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Insufficient("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
        points: pts.len(),
        zero_points,
    })
}

/// Shape of the proved upper bound, without its implied constant:
/// `|eta| (x^{1+eps}/N^3 + |k|^eps x^{1/2+eps}/N^2)`, or `|eta| x^{1+eps}/N^3` when `J_1` is empty.
/// `|eta|`, `|k|` are products over the windowed places (1 if none).
pub fn bound_shape(x: f64, norm: u64, k: &[(usize, f64)], eta: &[(usize, f64)], eps: f64) -> f64 {
    let n = norm as f64;
    let eta_prod: f64 = eta.iter().map(|e| e.1).product();
    let main = x.powf(1.0 + eps) / n.powi(3);
    if k.is_empty() {
        return eta_prod * main;
    }
    let k_prod: f64 = k.iter().map(|e| e.1.abs().max(1.0)).product();
    eta_prod * (main + k_prod.powf(eps) * x.powf(0.5 + eps) / (n * n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub x: f64,
    pub ideal_norm: u64,
    pub j1_windows: String,
    pub j2_windows: String,
    pub count: u64,
    pub bound_shape_value: f64,
    pub ratio: f64,
}

/// Per-family constants: a family is one ideal with one window choice.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySummary {
    pub ideal_norm: u64,
    pub j1_windows: String,
    pub j2_windows: String,
    /// Largest observed `count / bound_shape`.
    pub max_ratio: f64,
    /// Least-squares constant in log space over positive counts.
    pub fitted_constant: Option<f64>,
    pub fit: Option<ExponentFit>,
    pub zero_counts: usize,
}

/// Regression of `log count` on `log N(a)` at the largest common `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormScaling {
    pub x: f64,
    /// `(N(a), count)` at that `x`.
    pub counts: Vec<(u64, u64)>,
    /// Slope in `log N`; the `x`-dominant regime predicts `-3`.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundReport {
    pub eps: f64,
    pub rows: Vec<ReportRow>,
    pub families: Vec<FamilySummary>,
    pub norm_scaling: Option<NormScaling>,
}

fn window_text(w: &[(usize, f64)]) -> String {
    if w.is_empty() {
        return "-".into();
    }
    w.iter().map(|(j, v)| format!("{j}:{v:.11e}")).collect::<Vec<_>>().join(";")
}

fn parse_windows(s: &str) -> Result<Vec<(usize, f64)>> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|item| {
            let (j, v) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("bad window entry {item:?}")))?;
            let j = j.parse().map_err(|_| Error::Config(format!("bad place {j:?}")))?;
            let v = v.parse().map_err(|_| Error::Config(format!("bad window value {v:?}")))?;
            Ok((j, v))
        })
        .collect()
}

/// Observed counts against bound shapes, family constants and norm scaling.
pub fn bound_report(samples: &[CountSample], eps: f64) -> BoundReport {
    let rows: Vec<ReportRow> = samples
        .iter()
        .map(|s| {
            let shape = bound_shape(s.x, s.ideal_norm, &s.k, &s.eta, eps);
            ReportRow {
                x: s.x,
                ideal_norm: s.ideal_norm,
                j1_windows: window_text(&s.k),
                j2_windows: window_text(&s.eta),
                count: s.count,
                bound_shape_value: shape,
                ratio: s.count as f64 / shape,
            }
        })
        .collect();

    let mut fams: BTreeMap<(u64, String, String, String), Vec<&ReportRow>> = BTreeMap::new();
    for (s, r) in samples.iter().zip(&rows) {
        fams.entry((r.ideal_norm, s.ideal.clone(), r.j1_windows.clone(), r.j2_windows.clone()))
            .or_default()
            .push(r);
    }
    let families = fams
        .into_iter()
        .map(|((norm, _, j1, j2), rs)| {
            let pos: Vec<f64> = rs.iter().filter(|r| r.count > 0).map(|r| r.ratio.ln()).collect();
            let fitted_constant = (!pos.is_empty()).then(|| (pos.iter().sum::<f64>() / pos.len() as f64).exp());
            let series: Vec<(f64, u64)> = rs.iter().map(|r| (r.x, r.count)).collect();
            FamilySummary {
                ideal_norm: norm,
                j1_windows: j1,
                j2_windows: j2,
                max_ratio: rs.iter().map(|r| r.ratio).fold(0.0, f64::max),
                fitted_constant,
                fit: exponent_fit(&series).ok(),
                zero_counts: rs.iter().filter(|r| r.count == 0).count(),
            }
        })
        .collect();

    BoundReport {
        eps,
        norm_scaling: norm_scaling(&rows),
        rows,
        families,
    }
}

fn norm_scaling(rows: &[ReportRow]) -> Option<NormScaling> {
    // unwindowed rows only, at the largest x
    let plain: Vec<&ReportRow> = rows.iter().filter(|r| r.j1_windows == "-" && r.j2_windows == "-").collect();
    let x = plain.iter().map(|r| r.x).fold(f64::NEG_INFINITY, f64::max);
    let mut counts: Vec<(u64, u64)> = plain.iter().filter(|r| r.x == x).map(|r| (r.ideal_norm, r.count)).collect();
    counts.sort();
    counts.dedup_by_key(|c| c.0);
    if counts.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .filter(|c| c.1 > 0)
        .map(|&(n, c)| ((n as f64).ln(), (c as f64).ln()))
        .collect();
    let slope = (pts.len() >= 2).then(|| {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        sxy / sxx
    });
    Some(NormScaling { x, counts, slope })
}

/// Count ratio `N(x; a) / N(x; b)` at the largest `x` shared by both norms.
pub fn norm_ratio(report: &BoundReport, small: u64, large: u64) -> Result<f64> {
    let ns = report
        .norm_scaling
        .as_ref()
        .ok_or_else(|| Error::Insufficient("fewer than two ideals in report".into()))?;
    let get = |n: u64| {
        ns.counts
            .iter()
            .find(|c| c.0 == n)
            .map(|c| c.1)
            .ok_or_else(|| Error::Insufficient(format!("no series for norm {n}")))
    };
    let (a, b) = (get(small)?, get(large)?);
    if b == 0 {
        return Err(Error::Insufficient(format!(
            "count for norm {large} is zero at x = {:.6e} (norm {small}: {a})",
            ns.x
        )));
    }
    Ok(a as f64 / b as f64)
}

pub const CSV_HEADER: &str = "x,ideal_norm,J1_windows,J2_windows,count,bound_shape_value,ratio";

impl BoundReport {
    /// Reals as 12 significant digits in scientific notation.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.11e},{},{},{},{},{:.11e},{:.11e}",
                r.x, r.ideal_norm, r.j1_windows, r.j2_windows, r.count, r.bound_shape_value, r.ratio
            );
        }
        out
    }

    /// Parses rows written by [`BoundReport::to_csv`]; families are not stored.
    pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>> {
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(Error::Config("missing or wrong CSV header".into()));
        }
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| Error::Config(format!("bad number {s:?}"))) };
        let int = |s: &str| -> Result<u64> { s.parse().map_err(|_| Error::Config(format!("bad integer {s:?}"))) };
        lines
            .filter(|l| !l.is_empty())
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                if f.len() != 7 {
                    return Err(Error::Config(format!("expected 7 columns: {l:?}")));
                }
                parse_windows(f[2])?;
                parse_windows(f[3])?;
                Ok(ReportRow {
                    x: num(f[0])?,
                    ideal_norm: int(f[1])?,
                    j1_windows: f[2].to_string(),
                    j2_windows: f[3].to_string(),
                    count: int(f[4])?,
                    bound_shape_value: num(f[5])?,
                    ratio: num(f[6])?,
                })
            })
            .collect()
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "eps = {}", self.eps);
        for f in &self.families {
            let fit = match &f.fit {
                Some(fit) => format!("slope {:.4} (rms {:.3}, {} pts)", fit.slope, fit.residual, fit.points),
                None => "slope n/a".into(),
            };
            let _ = writeln!(
                s,
                "N={:<5} J1={} J2={}  max ratio {:.4e}  const {}  {fit}  zeros {}",
                f.ideal_norm,
                f.j1_windows,
                f.j2_windows,
                f.max_ratio,
                f.fitted_constant.map_or("n/a".into(), |c| format!("{c:.4e}")),
                f.zero_counts
            );
        }
        if let Some(ns) = &self.norm_scaling {
            let _ = writeln!(
                s,
                "norm scaling at x = {:.4e}: {:?}, slope {}",
                ns.x,
                ns.counts,
                ns.slope.map_or("n/a".into(), |v| format!("{v:.3}"))
            );
        }
        s
    }
}
