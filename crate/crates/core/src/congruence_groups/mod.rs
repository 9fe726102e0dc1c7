//! Finite quotients `PSL(2, O_L / a)`: residue rings, brute-force groups,
//! order formula, reduction of lattice elements, character degrees.

mod characters;
mod reduction;

#[cfg(test)]
mod tests;

pub use characters::{character_degrees, conjugacy_classes, CharacterDegrees, ConjugacyClasses, MAX_CHARACTER_ORDER};
pub use reduction::{default_discriminant, generated_subgroup, mlb_evaluate, ReductionMap};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::number_field::{FieldInt, IdealZBasis};

/// Default cap on `N(a)` for [`build_psl2`].
pub const DEFAULT_GROUP_BUDGET: u64 = 32;

/// `O_L / a` with residues indexed `0..N(a)`; index 0 is zero.
#[derive(Clone, Debug)]
pub struct FiniteQuotientRing {
    ideal: IdealZBasis,
    elems: Vec<FieldInt>,
    index: HashMap<FieldInt, u16>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    one: u16,
}

impl FiniteQuotientRing {
    pub fn new(ideal: &IdealZBasis) -> Result<Self> {
        let n = ideal.norm();
        if n > u16::MAX as i128 / 2 {
            return Err(Error::Budget {
                what: "residue ring size",
                needed: n as u128,
                budget: (u16::MAX / 2) as u128,
            });
        }
        let f = ideal.field();
        let elems = ideal.residues();
        let index: HashMap<FieldInt, u16> = elems.iter().enumerate().map(|(i, e)| (e.clone(), i as u16)).collect();
        let n = elems.len();
        let look = |x: &FieldInt| index[&ideal.reduce_mod(x)];
        let mut add = vec![0u16; n * n];
        let mut mul = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                add[i * n + j] = look(&(&elems[i] + &elems[j]));
                mul[i * n + j] = look(&f.mul(&elems[i], &elems[j]));
            }
        }
        let neg = elems.iter().map(|e| look(&-e)).collect();
        let one = look(&f.one());
        Ok(FiniteQuotientRing {
            ideal: ideal.clone(),
            elems,
            index,
            add,
            mul,
            neg,
            one,
        })
    }

    pub fn ideal(&self) -> &IdealZBasis {
        &self.ideal
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn element(&self, i: u16) -> &FieldInt {
        &self.elems[i as usize]
    }

    /// Residue class of an element of `O_L`.
    pub fn reduce(&self, x: &FieldInt) -> u16 {
        self.index[&self.ideal.reduce_mod(x)]
    }

    pub fn zero(&self) -> u16 {
        0
    }

    pub fn one(&self) -> u16 {
        self.one
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.elems.len() + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.elems.len() + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    /// Exhaustive ring-axiom check, only for small rings.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.len() as u16;
        if n > 100 {
            return Err(Error::Precondition("axiom check limited to N(a) <= 100".into()));
        }
        for a in 0..n {
            if self.add(a, 0) != a || self.mul(a, self.one) != a || self.add(a, self.neg(a)) != 0 {
                return Err(Error::Domain(format!("identity axioms fail at {a}")));
            }
            for b in 0..n {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return Err(Error::Domain(format!("commutativity fails at ({a}, {b})")));
                }
                for c in 0..n {
                    let l = self.mul(a, self.add(b, c));
                    let r = self.add(self.mul(a, b), self.mul(a, c));
                    if l != r
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                        || self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                    {
                        return Err(Error::Domain(format!("axioms fail at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A 2x2 matrix over the residue ring, entries `[a, b, c, d]`.
pub type Mat = [u16; 4];

/// `PSL(2, O_L / a)` as a sorted list of sign-canonical matrices.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    ring: FiniteQuotientRing,
    elems: Vec<Mat>,
    index: HashMap<Mat, u32>,
    identity: u32,
}

impl FiniteMatrixGroup {
    pub fn ring(&self) -> &FiniteQuotientRing {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elems
    }

    pub fn element(&self, i: u32) -> Mat {
        self.elems[i as usize]
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    /// Lexicographic minimum of `M` and `-M`.
    pub fn canonical(&self, m: Mat) -> Mat {
        let r = &self.ring;
        let neg = [r.neg(m[0]), r.neg(m[1]), r.neg(m[2]), r.neg(m[3])];
        m.min(neg)
    }

    pub fn mat_mul(&self, x: Mat, y: Mat) -> Mat {
        let r = &self.ring;
        [
            r.add(r.mul(x[0], y[0]), r.mul(x[1], y[2])),
            r.add(r.mul(x[0], y[1]), r.mul(x[1], y[3])),
            r.add(r.mul(x[2], y[0]), r.mul(x[3], y[2])),
            r.add(r.mul(x[2], y[1]), r.mul(x[3], y[3])),
        ]
    }

    /// Index of a determinant-one matrix (either sign).
    pub fn index_of(&self, m: Mat) -> Option<u32> {
        self.index.get(&self.canonical(m)).copied()
    }

    pub fn mul(&self, i: u32, j: u32) -> u32 {
        self.index[&self.canonical(self.mat_mul(self.elems[i as usize], self.elems[j as usize]))]
    }

    pub fn inverse(&self, i: u32) -> u32 {
        let r = &self.ring;
        let [a, b, c, d] = self.elems[i as usize];
        self.index[&self.canonical([d, r.neg(b), r.neg(c), a])]
    }

    /// Order of an element.
    pub fn element_order(&self, i: u32) -> u64 {
        let mut x = i;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }
}

/// Exhaustive `PSL(2, O_L / a)`: all determinant-one matrices modulo `+-1`.
pub fn build_psl2(ideal: &IdealZBasis, budget: u64) -> Result<FiniteMatrixGroup> {
    let n = ideal.norm() as u64;
    if n > budget {
        return Err(Error::Budget {
            what: "PSL(2) construction, N(a)",
            needed: n as u128,
            budget: budget as u128,
        });
    }
    let ring = FiniteQuotientRing::new(ideal)?;
    let size = ring.len() as u16;
    let one = ring.one();
    let mut elems = Vec::new();
    for a in 0..size {
        for d in 0..size {
            // bc = ad - 1
            let target = ring.sub(ring.mul(a, d), one);
            for b in 0..size {
                for c in 0..size {
                    if ring.mul(b, c) == target {
                        let m = [a, b, c, d];
                        let neg = [ring.neg(a), ring.neg(b), ring.neg(c), ring.neg(d)];
                        if m <= neg {
                            elems.push(m);
                        }
                    }
                }
            }
        }
    }
    elems.sort_unstable();
    let index = elems.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect::<HashMap<_, _>>();
    let id = [one, 0, 0, one];
    let idc = id.min([ring.neg(one), 0, 0, ring.neg(one)]);
    let identity = index[&idc];
    Ok(FiniteMatrixGroup {
        ring,
        elems,
        index,
        identity,
    })
}

/// `|PSL(2, O_L / a)| = prod N(p)^{3e - 2} (N(p)^2 - 1)`, halved unless `2 in a`.
pub fn group_order_formula(ideal: &IdealZBasis) -> Result<u128> {
    let mut sl: u128 = 1;
    for pf in ideal.factor()? {
        let q = pf.norm() as u128;
        sl *= q.pow(3 * pf.exponent - 2) * (q * q - 1);
    }
    Ok(if ideal.contains_two() { sl } else { sl / 2 })
}

/// Lower bound `N(p)^k / 3` on nontrivial irreducible degrees of `SL(2, O/p^e)`
/// that do not factor through `O/p^{e-1}`; here the `k = e` layer.
pub fn appendix_bound(p_norm: u64, _e: u32, k: u32) -> f64 {
    (p_norm as f64).powi(k as i32) / 3.0
}
