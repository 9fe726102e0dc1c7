//! Weighted lattice sums and trace statistics over enumerated elements.

use std::collections::BTreeSet;

use super::LatticeElement;
use crate::error::{Error, Result};
use crate::number_field::{FieldInt, IdealZBasis};
use crate::quaternion::QuaternionAlgebra;

/// `sum_gamma exp(-H(gamma_j) / 2)` over the given elements, `j` 1-based.
pub fn weighted_displacement_sum(elems: &[LatticeElement], place: usize) -> f64 {
    elems.iter().map(|e| (-0.5 * e.displacement[place - 1]).exp()).sum()
}

/// `sum_gamma exp(-H(gamma_j) / 2) exp(-m H(gamma_k))`.
pub fn weighted_displacement_sum_mixed(elems: &[LatticeElement], place: usize, other: usize, m: f64) -> f64 {
    elems
        .iter()
        .map(|e| (-0.5 * e.displacement[place - 1] - m * e.displacement[other - 1]).exp())
        .sum()
}

/// Reduced trace of an element, sign-normalized (traces live in `PSL`).
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct TraceTuple {
    pub exact: FieldInt,
    /// `iota_j` of the normalized trace at the split places.
    pub embedded: Vec<f64>,
}

/// One trace tuple per element, in canonical order.
pub fn trace_spectrum(alg: &QuaternionAlgebra, elems: &[LatticeElement]) -> Vec<TraceTuple> {
    let mut out: Vec<TraceTuple> = elems
        .iter()
        .map(|e| {
            let t = alg.trace(&e.quat);
            let t = if t.leading_sign() < 0 { -&t } else { t };
            let embedded = (1..=alg.split_places()).map(|j| alg.embed_scalar(&t, j)).collect();
            TraceTuple { exact: t, embedded }
        })
        .collect();
    out.sort_by(|a, b| a.exact.cmp(&b.exact));
    out
}

/// Distinct-trace counts in the two windows of the trace-formula estimate,
/// with the corresponding box-lemma bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct TracePairCounts {
    /// `|t_1| <= T^{c/2}`, `||t_2| - 2| <= T^{eps - 2}`, `t != (2, 2)`.
    pub near_two: u64,
    /// `|t_1| <= T^{c/2}`, `|t_2| < 2`.
    pub elliptic: u64,
    pub near_two_bound: f64,
    pub elliptic_bound: f64,
}

/// Counts distinct trace tuples of `elems` in the two windows.
///
/// Places beyond the second split place must satisfy `|t_j| < 2`. The bounds
/// apply the box lemma to the cosets `+-2 + a^2` with side 4 at remaining places.
pub fn count_trace_pairs(
    alg: &QuaternionAlgebra,
    ideal: &IdealZBasis,
    elems: &[LatticeElement],
    t_param: f64,
    c: f64,
    eps: f64,
) -> Result<TracePairCounts> {
    let d = alg.split_places();
    if d < 2 {
        return Err(Error::Precondition("trace pairs need at least two split places".into()));
    }
    let two = alg.field().integer(2);
    let r1 = t_param.powf(c / 2.0);
    let w = t_param.powf(eps - 2.0);
    let mut near = BTreeSet::new();
    let mut ell = BTreeSet::new();
    for t in trace_spectrum(alg, elems) {
        let e = &t.embedded;
        if e[0].abs() > r1 || e[2..].iter().any(|v| v.abs() >= 2.0) {
            continue;
        }
        if e[1].abs() < 2.0 {
            ell.insert(t.exact.clone());
        }
        if (e[1].abs() - 2.0).abs() <= w && t.exact != two {
            near.insert(t.exact);
        }
    }
    let norm = ideal.power(2).norm() as f64;
    let rest: f64 = 4f64.powi((alg.degree() - 2) as i32);
    // two sign cosets; the near-two window is two boxes
    let near_two_bound = 2.0 * 2.0 * ((2.0 * r1) * (2.0 * w) * rest / norm + 1.0);
    let elliptic_bound = 2.0 * ((2.0 * r1) * 4.0 * rest / norm + 1.0);
    Ok(TracePairCounts {
        near_two: near.len() as u64,
        elliptic: ell.len() as u64,
        near_two_bound,
        elliptic_bound,
    })
}
