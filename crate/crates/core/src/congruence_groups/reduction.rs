//! Reduction `R^1(O) -> PSL(2, O_L / a)` through an explicit splitting of
//! the algebra mod `a`.

use std::collections::VecDeque;

use super::{FiniteMatrixGroup, Mat};
use crate::error::{Error, Result};
use crate::number_field::IdealZBasis;
use crate::quaternion::{Quat, QuaternionAlgebra};

/// Trace-zero `X, Y` over `O_L / a` with `X^2 = p`, `Y^2 = q`, `XY = -YX`.
#[derive(Clone, Debug)]
pub struct ReductionMap {
    x: Mat,
    y: Mat,
    xy: Mat,
}

fn trace_zero(r: &super::FiniteQuotientRing, v: [u16; 3]) -> Mat {
    [v[0], v[1], v[2], r.neg(v[0])]
}

impl ReductionMap {
    /// Searches for a splitting; needs `a` coprime to `2pq`.
    pub fn new(alg: &QuaternionAlgebra, group: &FiniteMatrixGroup) -> Result<Self> {
        let ring = group.ring();
        let ideal = ring.ideal();
        let f = alg.field();
        if ideal.field() != f {
            return Err(Error::MismatchedField);
        }
        let two_pq = f.mul(&f.integer(2), &f.mul(alg.p(), alg.q()));
        if !ideal.coprime(&IdealZBasis::principal(f, &two_pq)?)? {
            return Err(Error::Precondition(format!(
                "ideal {ideal} is not coprime to 2pq; no reduction model"
            )));
        }
        let p = ring.reduce(alg.p());
        let q = ring.reduce(alg.q());
        let n = ring.len() as u16;
        let find = |target: u16, other: Option<Mat>| -> Option<Mat> {
            for a in 0..n {
                let a2 = ring.mul(a, a);
                for b in 0..n {
                    for c in 0..n {
                        if ring.add(a2, ring.mul(b, c)) != target {
                            continue;
                        }
                        let m = trace_zero(ring, [a, b, c]);
                        match other {
                            None => return Some(m),
                            Some(x) => {
                                // XY + YX = (2 x1 y1 + x2 y3 + x3 y2) I
                                let s = ring.add(
                                    ring.mul(ring.add(x[0], x[0]), a),
                                    ring.add(ring.mul(x[1], c), ring.mul(x[2], b)),
                                );
                                if s == 0 {
                                    return Some(m);
                                }
                            }
                        }
                    }
                }
            }
            None
        };
        let no = || Error::Precondition(format!("no splitting of the algebra found modulo {ideal}"));
        let x = find(p, None).ok_or_else(no)?;
        let y = find(q, Some(x)).ok_or_else(no)?;
        let xy = group.mat_mul(x, y);
        let map = ReductionMap { x, y, xy };
        if !map.spans(group) {
            return Err(no());
        }
        Ok(map)
    }

    /// `1, X, Y, XY` span `M_2`: the 4x4 coordinate determinant is a unit.
    fn spans(&self, group: &FiniteMatrixGroup) -> bool {
        let r = group.ring();
        let one = r.one();
        let rows = [[one, 0, 0, one], self.x, self.y, self.xy];
        let det = det4(r, &rows);
        (0..r.len() as u16).any(|u| r.mul(det, u) == one)
    }

    pub fn matrices(&self) -> (Mat, Mat) {
        (self.x, self.y)
    }

    /// `a + bX + cY + dXY` reduced, as a determinant-one matrix (not sign-normalized).
    pub fn matrix(&self, group: &FiniteMatrixGroup, x: &Quat) -> Mat {
        let r = group.ring();
        let [a, b, c, d] = [r.reduce(&x.a), r.reduce(&x.b), r.reduce(&x.c), r.reduce(&x.d)];
        let mut out = [0u16; 4];
        for i in 0..4 {
            let mut v = r.mul(b, self.x[i]);
            v = r.add(v, r.mul(c, self.y[i]));
            v = r.add(v, r.mul(d, self.xy[i]));
            if i == 0 || i == 3 {
                v = r.add(v, a);
            }
            out[i] = v;
        }
        out
    }

    /// Group index of the image of a norm-one element.
    pub fn reduce(&self, group: &FiniteMatrixGroup, x: &Quat) -> Result<u32> {
        let m = self.matrix(group, x);
        group
            .index_of(m)
            .ok_or_else(|| Error::Domain(format!("image of {x:?} does not have determinant one")))
    }
}

fn det4(r: &super::FiniteQuotientRing, m: &[Mat; 4]) -> u16 {
    // Leibniz over the 24 permutations
    let mut acc = 0u16;
    let mut perm = [0usize, 1, 2, 3];
    let mut c = [0usize; 4];
    let mut sign_pos = true;
    let mut term = |perm: &[usize; 4], pos: bool| {
        let mut t = r.one();
        for (i, &j) in perm.iter().enumerate() {
            t = r.mul(t, m[i][j]);
        }
        acc = if pos { r.add(acc, t) } else { r.sub(acc, t) };
    };
    term(&perm, sign_pos);
    // Heap's algorithm, each swap flips the sign
    let mut i = 1;
    while i < 4 {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign_pos = !sign_pos;
            term(&perm, sign_pos);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    acc
}

/// Order of the subgroup generated by `gens`, by breadth-first closure.
pub fn generated_subgroup(group: &FiniteMatrixGroup, gens: &[u32]) -> usize {
    let mut seen = vec![false; group.order()];
    let id = group.identity();
    seen[id as usize] = true;
    let mut queue = VecDeque::from([id]);
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = group.mul(x, g);
            if !seen[y as usize] {
                seen[y as usize] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count
}

/// Conservative discriminant ideal: `(2pq)` times the primes dividing the
/// index of `Z[w]` in `O_L`.
pub fn default_discriminant(alg: &QuaternionAlgebra) -> Result<IdealZBasis> {
    let f = alg.field();
    let mut acc = IdealZBasis::principal(f, &f.mul(&f.integer(2), &f.mul(alg.p(), alg.q())))?;
    for &l in f.index_primes() {
        acc = acc.mul(&IdealZBasis::principal(f, &f.integer(l as i128))?)?;
    }
    Ok(acc)
}

/// `N(a_1)^{1 - eps}` with `a_1` the largest divisor of `a` coprime to `disc`.
pub fn mlb_evaluate(a: &IdealZBasis, disc: &IdealZBasis, eps: f64) -> Result<f64> {
    let a1 = a.coprime_part(disc)?;
    Ok((a1.norm() as f64).powf(1.0 - eps))
}
