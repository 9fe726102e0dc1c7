//! Production enumerator: `a` in `1 + a^2`, then `c`, then `b`, then an exact solve for `d`.

use rayon::prelude::*;

use super::{finish, BallQuery, LatticeElement, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::number_field::{enumerate_in_box_with_budget, FieldInt, IdealZBasis};
use crate::quaternion::{Quat, QuaternionAlgebra};

pub fn enumerate_fast(alg: &QuaternionAlgebra, query: &BallQuery) -> Result<Vec<LatticeElement>> {
    enumerate_fast_with_budget(alg, query, DEFAULT_BUDGET)
}

pub fn enumerate_fast_with_budget(
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
    let two = IdealZBasis::principal(f, &f.integer(2))?;
    // (a - 1)(a + 1) lies in a^2; when a is prime to 2 this forces a - 1 in a^2
    let a_modulus = if ideal.coprime(&two)? {
        ideal.power(2)
    } else {
        ideal.clone()
    };
    let [box_a, box_b, box_c, _] = query.coordinate_boxes(alg)?;
    let a_list = enumerate_in_box_with_budget(&a_modulus, &f.one(), &box_a, budget)?;
    let c_list = enumerate_in_box_with_budget(ideal, &f.zero(), &box_c, budget)?;
    let b_list = enumerate_in_box_with_budget(ideal, &f.zero(), &box_b, budget)?;
    let work = (a_list.len() as u128)
        .saturating_mul(c_list.len() as u128)
        .saturating_mul(b_list.len() as u128);
    if work > budget {
        return Err(Error::Budget {
            what: "fast enumeration (a, c, b) loop",
            needed: work,
            budget,
        });
    }
    let pq = f.mul(alg.p(), alg.q());
    let pq_emb = f.embed_all(&pq);
    let one = f.one();
    let pb2: Vec<FieldInt> = b_list.iter().map(|b| f.mul(alg.p(), &f.square(b))).collect();
    let qc2: Vec<FieldInt> = c_list.iter().map(|c| f.mul(alg.q(), &f.square(c))).collect();

    let found: Vec<Quat> = a_list
        .par_iter()
        .flat_map_iter(|a| {
            let mut local = Vec::new();
            let base = &one - &f.square(a);
            let mut roots: Vec<FieldInt> = Vec::new();
            for (ic, c) in c_list.iter().enumerate() {
                let base_c = &base + &qc2[ic];
                for (ib, b) in b_list.iter().enumerate() {
                    // pq d^2 = 1 - a^2 + p b^2 + q c^2
                    let rhs = &base_c + &pb2[ib];
                    roots.clear();
                    if rhs.is_zero() {
                        roots.push(f.zero());
                    } else {
                        let t = f.embed_all(&rhs);
                        let mut ok = true;
                        let mut abs_roots = Vec::with_capacity(t.len());
                        for (tj, pj) in t.iter().zip(&pq_emb) {
                            let v = tj / pj;
                            if v < -1e-9 * (1.0 + tj.abs()) {
                                ok = false;
                                break;
                            }
                            abs_roots.push(v.max(0.0).sqrt());
                        }
                        if !ok {
                            continue;
                        }
                        for d in f.signed_root_candidates(&abs_roots) {
                            if !roots.contains(&d) && f.mul(&pq, &f.square(&d)) == rhs {
                                roots.push(d);
                            }
                        }
                    }
                    for d in &roots {
                        if !ideal.contains(d) {
                            continue;
                        }
                        let q = Quat::new(a.clone(), b.clone(), c.clone(), d.clone());
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
