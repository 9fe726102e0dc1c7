//! Reference enumerator: exhaustive loops over integer coordinate boxes.

use rayon::prelude::*;

use super::{finish, BallQuery, LatticeElement, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::number_field::{EmbeddingBox, FieldInt, TotallyRealField};
use crate::quaternion::{Quat, QuaternionAlgebra};

/// Every element of `Z[w]` whose coordinates lie in the integer box covering `bx`.
fn coordinate_candidates(field: &TotallyRealField, bx: &EmbeddingBox) -> Vec<FieldInt> {
    let n = field.degree();
    // columns of the inverse Vandermonde matrix
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            field.coords_from_embedding(&e)
        })
        .collect();
    let bounds: Vec<i128> = (0..n)
        .map(|i| {
            let r: f64 = (0..n).map(|j| cols[j][i].abs() * bx.hi[j].max(-bx.lo[j])).sum();
            r.ceil() as i128 + 1
        })
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<i128> = bounds.iter().map(|b| -b).collect();
    loop {
        out.push(FieldInt::from_coords(&cur));
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if cur[i] < bounds[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = -bounds[i];
            i += 1;
        }
    }
}

pub fn enumerate_brute(alg: &QuaternionAlgebra, query: &BallQuery) -> Result<Vec<LatticeElement>> {
    enumerate_brute_with_budget(alg, query, DEFAULT_BUDGET)
}

pub fn enumerate_brute_with_budget(
    alg: &QuaternionAlgebra,
    query: &BallQuery,
    budget: u128,
) -> Result<Vec<LatticeElement>> {
    query.validate(alg)?;
    if query.x < 2.0 {
        return Ok(Vec::new());
    }
    let f = alg.field();
    let ideal = &query.ideal;
    let boxes = query.coordinate_boxes(alg)?;
    let one = f.one();
    let lists: Vec<Vec<FieldInt>> = boxes
        .iter()
        .enumerate()
        .map(|(k, bx)| {
            coordinate_candidates(f, bx)
                .into_iter()
                .filter(|t| bx.contains(&f.embed_all(t)))
                .filter(|t| if k == 0 { ideal.congruent(t, &one) } else { ideal.contains(t) })
                .collect()
        })
        .collect();
    let work = lists.iter().fold(1u128, |acc, l| acc.saturating_mul(l.len() as u128));
    if work > budget {
        return Err(Error::Budget {
            what: "brute-force quadruple loop",
            needed: work,
            budget,
        });
    }
    let pq = f.mul(alg.p(), alg.q());
    // norm terms a^2, -p b^2, -q c^2, pq d^2
    let sq = |l: &Vec<FieldInt>, m: Option<&FieldInt>| -> Vec<FieldInt> {
        l.iter()
            .map(|t| {
                let s = f.square(t);
                match m {
                    Some(m) => f.mul(m, &s),
                    None => s,
                }
            })
            .collect()
    };
    let neg_p = -alg.p();
    let neg_q = -alg.q();
    let ta = sq(&lists[0], None);
    let tb = sq(&lists[1], Some(&neg_p));
    let tc = sq(&lists[2], Some(&neg_q));
    let td = sq(&lists[3], Some(&pq));

    let found: Vec<Quat> = (0..lists[0].len())
        .into_par_iter()
        .flat_map_iter(|ia| {
            let mut local = Vec::new();
            for ib in 0..lists[1].len() {
                let s_ab = &ta[ia] + &tb[ib];
                for ic in 0..lists[2].len() {
                    let s_abc = &s_ab + &tc[ic];
                    for id in 0..lists[3].len() {
                        if &s_abc + &td[id] != one {
                            continue;
                        }
                        let q = Quat::new(
                            lists[0][ia].clone(),
                            lists[1][ib].clone(),
                            lists[2][ic].clone(),
                            lists[3][id].clone(),
                        );
                        if query.archimedean_ok(alg, &q) {
                            local.push(q);
                        }
                    }
                }
            }
            local
        })
        .collect();
    Ok(finish(alg, query, found))
}
