//! Exact enumeration of `R^1(a)` inside archimedean balls and trace windows.

mod brute;
mod cache;
mod fast;
mod sums;

pub use brute::{enumerate_brute, enumerate_brute_with_budget};
pub use cache::{cache_key, read_cache, write_cache, EnumerationCache, CACHE_FORMAT};
pub use fast::{enumerate_fast, enumerate_fast_with_budget};
pub use sums::{
    count_trace_pairs, trace_spectrum, weighted_displacement_sum, weighted_displacement_sum_mixed,
    TracePairCounts, TraceTuple,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::number_field::{EmbeddingBox, IdealZBasis};
use crate::quaternion::{frob_sq_from_coords, Quat, QuaternionAlgebra};

/// Default loop-iteration cap for both enumerators.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Default value of the cap `C` on `||alpha||_j^2` at places `2..=d`.
pub const DEFAULT_CAP: f64 = 10.0;

/// Constraint attached to one of the split places `2..=d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlaceRole {
    /// `J_1`: `k <= ||alpha||_j^2 <= k + 1` and `|Tr iota_j(alpha)| < 2`.
    NormWindow { k: f64 },
    /// `J_2`: `2 - eta <= |Tr iota_j(alpha)| < 2` and `||alpha||_j^2 <= cap`.
    TraceWindow { eta: f64, cap: f64 },
    /// `J_3`: `||alpha||_j^2 <= cap`.
    Cap { cap: f64 },
}

impl PlaceRole {
    fn norm_cap(&self) -> f64 {
        match *self {
            PlaceRole::NormWindow { k } => k + 1.0,
            PlaceRole::TraceWindow { cap, .. } | PlaceRole::Cap { cap } => cap,
        }
    }
}

impl fmt::Display for PlaceRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceRole::NormWindow { k } => write!(f, "J1(k={k})"),
            PlaceRole::TraceWindow { eta, cap } => write!(f, "J2(eta={eta},C={cap})"),
            PlaceRole::Cap { cap } => write!(f, "J3(C={cap})"),
        }
    }
}

/// `||alpha||_1^2 <= x` plus one [`PlaceRole`] for each split place `2..=d`.
#[derive(Clone, Debug)]
pub struct BallQuery {
    pub ideal: IdealZBasis,
    pub x: f64,
    pub roles: Vec<PlaceRole>,
    pub exclude_identity: bool,
}

impl BallQuery {
    /// The query behind `N(x; a)`: every other split place capped by `cap`, identity excluded.
    pub fn new(alg: &QuaternionAlgebra, ideal: IdealZBasis, x: f64, cap: f64) -> Self {
        BallQuery {
            ideal,
            x,
            roles: vec![PlaceRole::Cap { cap }; alg.split_places().saturating_sub(1)],
            exclude_identity: true,
        }
    }

    pub fn with_roles(mut self, roles: Vec<PlaceRole>) -> Self {
        self.roles = roles;
        self
    }

    pub fn including_identity(mut self) -> Self {
        self.exclude_identity = false;
        self
    }

    pub fn validate(&self, alg: &QuaternionAlgebra) -> Result<()> {
        if self.ideal.field() != alg.field() {
            return Err(Error::MismatchedField);
        }
        if self.roles.len() + 1 != alg.split_places() {
            return Err(Error::Precondition(format!(
                "{} place roles given for {} split places",
                self.roles.len(),
                alg.split_places()
            )));
        }
        if !(self.x.is_finite()) {
            return Err(Error::Precondition("x must be finite".into()));
        }
        for r in &self.roles {
            let ok = match *r {
                PlaceRole::NormWindow { k } => k >= 1.0 && k.is_finite(),
                PlaceRole::TraceWindow { eta, cap } => eta > 0.0 && eta <= 2.0 && cap > 0.0 && cap.is_finite(),
                PlaceRole::Cap { cap } => cap > 0.0 && cap.is_finite(),
            };
            if !ok {
                return Err(Error::Precondition(format!("invalid window {r}")));
            }
        }
        Ok(())
    }

    /// Cap on `||alpha||_j^2` at algebra place `j` (split places only).
    fn frob_cap(&self, j: usize) -> f64 {
        if j == 1 {
            self.x
        } else {
            self.roles[j - 2].norm_cap()
        }
    }

    /// Text form used in cache headers and reports.
    pub fn describe(&self) -> String {
        let roles: Vec<String> = self.roles.iter().map(|r| r.to_string()).collect();
        format!(
            "x={} roles=[{}] exclude_identity={}",
            self.x,
            roles.join(","),
            self.exclude_identity
        )
    }

    /// Exact test of every constraint except the norm and congruence conditions.
    pub(crate) fn archimedean_ok(&self, alg: &QuaternionAlgebra, q: &Quat) -> bool {
        for j in 1..=alg.split_places() {
            let [a, b, c, d] = alg.place_coords(q, j);
            let f = frob_sq_from_coords(a, b, c, d, alg.sqrt_abs_p(j), alg.q_at(j), true);
            if j == 1 {
                if f > self.x {
                    return false;
                }
                continue;
            }
            let tr = (2.0 * a).abs();
            match self.roles[j - 2] {
                PlaceRole::NormWindow { k } => {
                    if f < k || f > k + 1.0 || tr >= 2.0 {
                        return false;
                    }
                }
                PlaceRole::TraceWindow { eta, cap } => {
                    if f > cap || tr >= 2.0 || tr < 2.0 - eta {
                        return false;
                    }
                }
                PlaceRole::Cap { cap } => {
                    if f > cap {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Per-coordinate radii `|iota_j(a)|, |iota_j(b)|, |iota_j(c)|, |iota_j(d)|`
    /// implied by the caps, in algebra place order.
    pub(crate) fn coordinate_radii(&self, alg: &QuaternionAlgebra) -> [Vec<f64>; 4] {
        let n = alg.degree();
        let mut out: [Vec<f64>; 4] = Default::default();
        for j in 1..=n {
            let s = alg.sqrt_abs_p(j);
            let qa = alg.q_at(j).abs();
            let r = if j <= alg.split_places() {
                let rx = self.frob_cap(j).max(0.0).sqrt();
                let mut ra = rx / std::f64::consts::SQRT_2;
                if j >= 2 && !matches!(self.roles[j - 2], PlaceRole::Cap { .. }) {
                    ra = ra.min(1.0);
                }
                let rc = 0.5 * (rx / qa + rx);
                [ra, rx / std::f64::consts::SQRT_2 / s, rc, rc / s]
            } else {
                // a^2 + |p| b^2 + |q| c^2 + |pq| d^2 = 1
                let rq = qa.sqrt();
                [1.0, 1.0 / s, 1.0 / rq, 1.0 / (rq * s)]
            };
            for k in 0..4 {
                out[k].push(r[k]);
            }
        }
        out
    }

    /// Symmetric boxes (field place order) for the four coordinates, slightly inflated.
    pub(crate) fn coordinate_boxes(&self, alg: &QuaternionAlgebra) -> Result<[EmbeddingBox; 4]> {
        let radii = self.coordinate_radii(alg);
        let n = alg.degree();
        let mk = |r: &Vec<f64>| -> Result<EmbeddingBox> {
            let mut field_order = vec![0.0; n];
            for j in 1..=n {
                field_order[alg.field_place(j)?] = r[j - 1] * (1.0 + 1e-9) + 1e-9;
            }
            EmbeddingBox::symmetric(&field_order)
        };
        Ok([mk(&radii[0])?, mk(&radii[1])?, mk(&radii[2])?, mk(&radii[3])?])
    }
}

/// An enumerated element with cached archimedean data.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeElement {
    pub quat: Quat,
    /// `||iota_j(alpha)||^2` at every place, algebra order.
    pub frob_sq: Vec<f64>,
    /// `H(iota_j(alpha))` at split places.
    pub displacement: Vec<f64>,
    /// `iota_j(Tr alpha)` at split places.
    pub traces: Vec<f64>,
}

impl LatticeElement {
    pub fn new(alg: &QuaternionAlgebra, quat: Quat) -> Self {
        let n = alg.degree();
        let d = alg.split_places();
        let frob_sq: Vec<f64> = (1..=n)
            .map(|j| alg.frob_norm_sq(&quat, j).expect("place in range"))
            .collect();
        let displacement = frob_sq[..d].iter().map(|f| (f / 2.0).max(1.0).acosh()).collect();
        let traces = (1..=d).map(|j| 2.0 * alg.embed_scalar(&quat.a, j)).collect();
        LatticeElement {
            quat,
            frob_sq,
            displacement,
            traces,
        }
    }
}

/// Shared post-processing: PSL dedup, identity removal, canonical order.
pub(crate) fn finish(alg: &QuaternionAlgebra, query: &BallQuery, mut found: Vec<Quat>) -> Vec<LatticeElement> {
    if query.ideal.contains_two() {
        // -alpha is also in R^1(a); keep one representative per PSL class
        for q in found.iter_mut() {
            *q = q.canonical_sign();
        }
    }
    found.sort();
    found.dedup();
    if query.exclude_identity {
        let one = alg.one();
        let minus_one = one.neg();
        found.retain(|q| *q != one && *q != minus_one);
    }
    found.into_iter().map(|q| LatticeElement::new(alg, q)).collect()
}

/// Exact invariants every element of `R^1(a)` must satisfy.
///
/// The `a - 1 in a^2` and trace congruences are only claimed when `a` is coprime to 2.
pub fn check_invariants(alg: &QuaternionAlgebra, ideal: &IdealZBasis, elems: &[LatticeElement]) -> Result<Vec<String>> {
    let f = alg.field();
    let a2 = ideal.power(2);
    let two = IdealZBasis::principal(f, &f.integer(2))?;
    let odd = ideal.coprime(&two)?;
    let mut violations = Vec::new();
    for e in elems {
        let q = &e.quat;
        let mut ok = alg.is_norm_one(q) && {
            let (qa, qn) = (q.clone(), q.neg());
            alg.is_in_r1(&qa, ideal) || (ideal.contains_two() && alg.is_in_r1(&qn, ideal))
        };
        if odd {
            ok &= a2.contains(&(&q.a - &f.one()));
            ok &= a2.congruent(&alg.trace(q), &f.integer(2));
        }
        for j in alg.split_places() + 1..=alg.degree() {
            ok &= (e.frob_sq[j - 1] - 2.0).abs() < 1e-9;
        }
        if !ok {
            violations.push(q.to_string());
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests;
