//! The quaternion algebra `(p, q / L)` and its standard order.

use std::collections::HashMap;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::number_field::{FieldInt, IdealZBasis, TotallyRealField};

/// `a + bI + cJ + dK` with coordinates in `Z[w]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Quat {
    pub a: FieldInt,
    pub b: FieldInt,
    pub c: FieldInt,
    pub d: FieldInt,
}

impl Quat {
    pub fn new(a: FieldInt, b: FieldInt, c: FieldInt, d: FieldInt) -> Self {
        Quat { a, b, c, d }
    }

    pub fn parts(&self) -> [&FieldInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// The `4n` integer coordinates, `a` first.
    pub fn flat(&self) -> Vec<i128> {
        self.parts().iter().flat_map(|x| x.coords().iter().copied()).collect()
    }

    pub fn from_flat(n: usize, v: &[i128]) -> Self {
        let part = |k: usize| FieldInt::from_coords(&v[k * n..(k + 1) * n]);
        Quat::new(part(0), part(1), part(2), part(3))
    }

    pub fn neg(&self) -> Self {
        Quat::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn is_zero(&self) -> bool {
        self.parts().iter().all(|x| x.is_zero())
    }

    /// Representative of `{x, -x}` whose first nonzero coordinate is positive.
    pub fn canonical_sign(&self) -> Self {
        let s = self
            .parts()
            .iter()
            .map(|x| x.leading_sign())
            .find(|&s| s != 0)
            .unwrap_or(0);
        if s < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})I + ({})J + ({})K", self.a, self.b, self.c, self.d)
    }
}

/// `(p, q / L)` with `iota_j(q) < 0` everywhere and `iota_j(p) > 0` at exactly `d` places.
///
/// Places are renumbered so that the split places (`iota(p) > 0`) come first;
/// `place_index` maps them back to the field's descending-root order.
#[derive(Clone, Debug)]
pub struct QuaternionAlgebra {
    field: TotallyRealField,
    p: FieldInt,
    q: FieldInt,
    split: usize,
    place_index: Vec<usize>,
    /// `sqrt |iota_j(p)|`, algebra place order.
    sqrt_p: Vec<f64>,
    /// `iota_j(q)`, algebra place order.
    q_emb: Vec<f64>,
}

impl PartialEq for QuaternionAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.p == other.p && self.q == other.q
    }
}

impl QuaternionAlgebra {
    /// Validates the sign pattern. If `declared_split` is given it must match
    /// the number of places where `p` is positive.
    pub fn new(
        field: &TotallyRealField,
        p: FieldInt,
        q: FieldInt,
        declared_split: Option<usize>,
    ) -> Result<Self> {
        let n = field.degree();
        if p.degree() != n || q.degree() != n {
            return Err(Error::MismatchedField);
        }
        let pe = field.embed_all(&p);
        let qe = field.embed_all(&q);
        if let Some(j) = qe.iter().position(|&v| v >= 0.0) {
            return Err(Error::InvalidAlgebra(format!(
                "q must be totally negative; iota_{}(q) = {}",
                j + 1,
                qe[j]
            )));
        }
        if pe.iter().any(|&v| v == 0.0) {
            return Err(Error::InvalidAlgebra("p vanishes at a place".into()));
        }
        let mut place_index: Vec<usize> = (0..n).filter(|&j| pe[j] > 0.0).collect();
        let split = place_index.len();
        place_index.extend((0..n).filter(|&j| pe[j] < 0.0));
        if split == 0 {
            return Err(Error::InvalidAlgebra("p is totally negative: no split place".into()));
        }
        if let Some(d) = declared_split {
            if d != split {
                return Err(Error::InvalidAlgebra(format!(
                    "declared d = {d} but p is positive at {split} places"
                )));
            }
        }
        let sqrt_p = place_index.iter().map(|&j| pe[j].abs().sqrt()).collect();
        let q_emb = place_index.iter().map(|&j| qe[j]).collect();
        Ok(QuaternionAlgebra {
            field: field.clone(),
            p,
            q,
            split,
            place_index,
            sqrt_p,
            q_emb,
        })
    }

    pub fn field(&self) -> &TotallyRealField {
        &self.field
    }

    pub fn p(&self) -> &FieldInt {
        &self.p
    }

    pub fn q(&self) -> &FieldInt {
        &self.q
    }

    /// The number `d` of split real places.
    pub fn split_places(&self) -> usize {
        self.split
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    /// Field place (0-based, descending-root order) for algebra place `j` (1-based).
    pub fn field_place(&self, j: usize) -> Result<usize> {
        self.check_place(j)?;
        Ok(self.place_index[j - 1])
    }

    fn check_place(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.degree() {
            return Err(Error::PlaceOutOfRange {
                index: j,
                max: self.degree(),
            });
        }
        Ok(())
    }

    /// `iota_j(x)` using the algebra's place numbering.
    #[inline]
    pub fn embed_scalar(&self, x: &FieldInt, j: usize) -> f64 {
        self.field.embed0(x, self.place_index[j - 1])
    }

    pub fn sqrt_abs_p(&self, j: usize) -> f64 {
        self.sqrt_p[j - 1]
    }

    pub fn q_at(&self, j: usize) -> f64 {
        self.q_emb[j - 1]
    }

    pub fn elem(&self, a: FieldInt, b: FieldInt, c: FieldInt, d: FieldInt) -> Result<Quat> {
        let n = self.degree();
        if [&a, &b, &c, &d].iter().any(|x| x.degree() != n) {
            return Err(Error::MismatchedAlgebra);
        }
        Ok(Quat::new(a, b, c, d))
    }

    pub fn from_flat(&self, v: &[i128]) -> Result<Quat> {
        if v.len() != 4 * self.degree() {
            return Err(Error::MismatchedAlgebra);
        }
        Ok(Quat::from_flat(self.degree(), v))
    }

    pub fn scalar(&self, a: FieldInt) -> Quat {
        let z = self.field.zero();
        Quat::new(a, z.clone(), z.clone(), z)
    }

    pub fn one(&self) -> Quat {
        self.scalar(self.field.one())
    }

    fn basis_unit(&self, k: usize) -> Quat {
        let z = self.field.zero();
        let mut parts = [z.clone(), z.clone(), z.clone(), z];
        parts[k] = self.field.one();
        let [a, b, c, d] = parts;
        Quat::new(a, b, c, d)
    }

    pub fn i(&self) -> Quat {
        self.basis_unit(1)
    }

    pub fn j(&self) -> Quat {
        self.basis_unit(2)
    }

    pub fn k(&self) -> Quat {
        self.basis_unit(3)
    }

    pub fn add(&self, x: &Quat, y: &Quat) -> Quat {
        Quat::new(&x.a + &y.a, &x.b + &y.b, &x.c + &y.c, &x.d + &y.d)
    }

    pub fn sub(&self, x: &Quat, y: &Quat) -> Quat {
        Quat::new(&x.a - &y.a, &x.b - &y.b, &x.c - &y.c, &x.d - &y.d)
    }

    pub fn mul(&self, x: &Quat, y: &Quat) -> Quat {
        let f = &self.field;
        let m = |u: &FieldInt, v: &FieldInt| f.mul(u, v);
        let (p, q) = (&self.p, &self.q);
        let pq = f.mul(p, q);
        let a = &(&(&m(&x.a, &y.a) + &m(p, &m(&x.b, &y.b))) + &m(q, &m(&x.c, &y.c)))
            - &m(&pq, &m(&x.d, &y.d));
        let b = &(&(&m(&x.a, &y.b) + &m(&x.b, &y.a)) - &m(q, &m(&x.c, &y.d)))
            + &m(q, &m(&x.d, &y.c));
        let c = &(&(&m(&x.a, &y.c) + &m(&x.c, &y.a)) + &m(p, &m(&x.b, &y.d)))
            - &m(p, &m(&x.d, &y.b));
        let d = &(&(&m(&x.a, &y.d) + &m(&x.d, &y.a)) + &m(&x.b, &y.c)) - &m(&x.c, &y.b);
        Quat::new(a, b, c, d)
    }

    pub fn conj(&self, x: &Quat) -> Quat {
        Quat::new(x.a.clone(), -&x.b, -&x.c, -&x.d)
    }

    /// Reduced norm `a^2 - p b^2 - q c^2 + p q d^2`.
    pub fn norm(&self, x: &Quat) -> FieldInt {
        let f = &self.field;
        let pq = f.mul(&self.p, &self.q);
        let t1 = &f.square(&x.a) - &f.mul(&self.p, &f.square(&x.b));
        let t2 = &f.mul(&pq, &f.square(&x.d)) - &f.mul(&self.q, &f.square(&x.c));
        &t1 + &t2
    }

    /// Reduced trace `2a`.
    pub fn trace(&self, x: &Quat) -> FieldInt {
        x.a.scale(2)
    }

    pub fn is_norm_one(&self, x: &Quat) -> bool {
        self.norm(x) == self.field.one()
    }

    /// `(iota_j(a), iota_j(b), iota_j(c), iota_j(d))` at algebra place `j`.
    #[inline]
    pub fn place_coords(&self, x: &Quat, j: usize) -> [f64; 4] {
        [
            self.embed_scalar(&x.a, j),
            self.embed_scalar(&x.b, j),
            self.embed_scalar(&x.c, j),
            self.embed_scalar(&x.d, j),
        ]
    }

    /// Real matrix image at a split place.
    pub fn embed_matrix(&self, x: &Quat, j: usize) -> Result<Matrix2<f64>> {
        self.check_place(j)?;
        if j > self.split {
            return Err(Error::DefinitePlace(j));
        }
        let [a, b, c, d] = self.place_coords(x, j);
        Ok(split_matrix(a, b, c, d, self.sqrt_p[j - 1], self.q_emb[j - 1]))
    }

    /// Complex matrix image at a definite place, conjugated by
    /// `diag(|q|^(-1/2), 1)` so that norm-one elements land in `SU(2)`.
    pub fn embed_matrix_definite(&self, x: &Quat, j: usize) -> Result<Matrix2<Complex64>> {
        self.check_place(j)?;
        if j <= self.split {
            return Err(Error::Precondition(format!("place {j} is split")));
        }
        let [a, b, c, d] = self.place_coords(x, j);
        let s = self.sqrt_p[j - 1];
        let rq = self.q_emb[j - 1].abs().sqrt();
        let alpha = Complex64::new(a, b * s);
        let gamma = Complex64::new(c, -d * s) * rq;
        Ok(Matrix2::new(alpha, -gamma.conj(), gamma, alpha.conj()))
    }

    /// `||iota_j(x)||^2`; at definite places this is `2 iota_j(n(x))`.
    pub fn frob_norm_sq(&self, x: &Quat, j: usize) -> Result<f64> {
        self.check_place(j)?;
        let [a, b, c, d] = self.place_coords(x, j);
        Ok(frob_sq_from_coords(
            a,
            b,
            c,
            d,
            self.sqrt_p[j - 1],
            self.q_emb[j - 1],
            j <= self.split,
        ))
    }

    /// `H(iota_j(x)) = arccosh(||iota_j(x)||^2 / 2)` for norm-one `x` at a split place.
    pub fn displacement(&self, x: &Quat, j: usize) -> Result<f64> {
        if !self.is_norm_one(x) {
            return Err(Error::Precondition("displacement needs a norm-one element".into()));
        }
        if j > self.split && j <= self.degree() {
            return Err(Error::DefinitePlace(j));
        }
        let f = self.frob_norm_sq(x, j)?;
        Ok((f / 2.0).max(1.0).acosh())
    }

    /// Membership in `R^1(a)`: norm one and `a - 1, b, c, d` in the ideal.
    pub fn is_in_r1(&self, x: &Quat, ideal: &IdealZBasis) -> bool {
        if ideal.field() != &self.field {
            return false;
        }
        self.is_norm_one(x)
            && ideal.contains(&(&x.a - &self.field.one()))
            && ideal.contains(&x.b)
            && ideal.contains(&x.c)
            && ideal.contains(&x.d)
    }

    /// Searches for a nonzero `(a, b, c, d)` with every power-basis coordinate
    /// in `[-bound, bound]` and reduced norm zero.
    ///
    /// Splits the norm form as `a^2 - p b^2 = q (c^2 - p d^2)` and matches the
    /// two halves through a table of hashed values.
    pub fn isotropy_search(&self, bound: i128) -> Option<Quat> {
        if bound <= 0 {
            return None;
        }
        let f = &self.field;
        let n = f.degree();
        let pairs = coordinate_box(n, bound);
        let left = |a: &FieldInt, b: &FieldInt| &f.square(a) - &f.mul(&self.p, &f.square(b));
        let right = |c: &FieldInt, d: &FieldInt| f.mul(&self.q, &left(c, d));

        let mut table: HashMap<FieldInt, (usize, usize)> = HashMap::new();
        for (ia, a) in pairs.iter().enumerate() {
            for (ib, b) in pairs.iter().enumerate() {
                // sign changes of a or b leave the value fixed
                if a.leading_sign() < 0 || b.leading_sign() < 0 {
                    continue;
                }
                let v = left(a, b);
                if v.is_zero() && !(a.is_zero() && b.is_zero()) {
                    let z = f.zero();
                    return Some(Quat::new(a.clone(), b.clone(), z.clone(), z));
                }
                table.entry(v).or_insert((ia, ib));
            }
        }
        for c in &pairs {
            for d in &pairs {
                if c.leading_sign() < 0 || d.leading_sign() < 0 || (c.is_zero() && d.is_zero()) {
                    continue;
                }
                if let Some(&(ia, ib)) = table.get(&right(c, d)) {
                    let w = Quat::new(pairs[ia].clone(), pairs[ib].clone(), c.clone(), d.clone());
                    debug_assert!(self.norm(&w).is_zero());
                    return Some(w);
                }
            }
        }
        None
    }
}

/// All elements with power-basis coordinates in `[-bound, bound]`.
fn coordinate_box(n: usize, bound: i128) -> Vec<FieldInt> {
    let side = (2 * bound + 1) as usize;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let coords: Vec<i128> = (0..n)
                .map(|_| {
                    let c = (idx % side) as i128 - bound;
                    idx /= side;
                    c
                })
                .collect();
            FieldInt::from_coords(&coords)
        })
        .collect()
}

pub(crate) fn split_matrix(a: f64, b: f64, c: f64, d: f64, s: f64, q: f64) -> Matrix2<f64> {
    Matrix2::new(a + b * s, q * (c + d * s), c - d * s, a - b * s)
}

#[inline]
pub(crate) fn frob_sq_from_coords(a: f64, b: f64, c: f64, d: f64, s: f64, q: f64, split: bool) -> f64 {
    if split {
        let (m11, m12, m21, m22) = (a + b * s, q * (c + d * s), c - d * s, a - b * s);
        m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22
    } else {
        // 2 (|alpha|^2 + |gamma|^2) after the unitary normalization
        2.0 * (a * a + b * b * s * s + q.abs() * (c * c + d * d * s * s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q2() -> TotallyRealField {
        TotallyRealField::real_quadratic(2).unwrap()
    }

    fn default_algebra() -> QuaternionAlgebra {
        let f = q2();
        QuaternionAlgebra::new(&f, f.element(&[5, 1]).unwrap(), f.integer(-1), Some(2)).unwrap()
    }

    fn one_split() -> QuaternionAlgebra {
        let f = q2();
        QuaternionAlgebra::new(&f, f.generator(), f.integer(-1), Some(1)).unwrap()
    }

    fn random_quat(alg: &QuaternionAlgebra, rng: &mut ChaCha8Rng, r: i128) -> Quat {
        let n = alg.degree();
        let v: Vec<i128> = (0..4 * n).map(|_| rng.gen_range(-r..=r)).collect();
        alg.from_flat(&v).unwrap()
    }

    #[test]
    fn defining_relations() {
        let alg = default_algebra();
        let (i, j, k) = (alg.i(), alg.j(), alg.k());
        assert_eq!(alg.mul(&i, &j), k);
        assert_eq!(alg.mul(&j, &i), k.neg());
        assert_eq!(alg.mul(&i, &i), alg.scalar(alg.p().clone()));
        assert_eq!(alg.mul(&j, &j), alg.scalar(alg.q().clone()));
        let pq = alg.field().mul(alg.p(), alg.q());
        assert_eq!(alg.mul(&k, &k), alg.scalar(-&pq));
    }

    #[test]
    fn norm_and_trace_of_units() {
        let alg = default_algebra();
        let f = alg.field().clone();
        assert_eq!(alg.norm(&alg.one()), f.one());
        assert_eq!(alg.trace(&alg.one()), f.integer(2));
        assert_eq!(alg.norm(&alg.i()), -alg.p());
        assert_eq!(alg.trace(&alg.i()), f.zero());
    }

    #[test]
    fn conjugate_gives_norm() {
        let alg = default_algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = random_quat(&alg, &mut rng, 6);
            assert_eq!(alg.mul(&x, &alg.conj(&x)), alg.scalar(alg.norm(&x)));
        }
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        for alg in [default_algebra(), one_split()] {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..1000 {
                let x = random_quat(&alg, &mut rng, 4);
                let y = random_quat(&alg, &mut rng, 4);
                let xy = alg.mul(&x, &y);
                for j in 1..=alg.split_places() {
                    let lhs = alg.embed_matrix(&xy, j).unwrap();
                    let rhs = alg.embed_matrix(&x, j).unwrap() * alg.embed_matrix(&y, j).unwrap();
                    assert!((lhs - rhs).abs().max() <= 1e-9 * (1.0 + rhs.abs().max()));
                    let m = alg.embed_matrix(&x, j).unwrap();
                    let nrm = alg.embed_scalar(&alg.norm(&x), j);
                    assert!((m.determinant() - nrm).abs() <= 1e-9 * (1.0 + nrm.abs()));
                    let tr = alg.embed_scalar(&alg.trace(&x), j);
                    assert!((m.trace() - tr).abs() <= 1e-9 * (1.0 + tr.abs()));
                }
                for j in alg.split_places() + 1..=alg.degree() {
                    let lhs = alg.embed_matrix_definite(&xy, j).unwrap();
                    let rhs = alg.embed_matrix_definite(&x, j).unwrap()
                        * alg.embed_matrix_definite(&y, j).unwrap();
                    assert!((lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-9 * (1.0 + rhs.norm()));
                    let nrm = alg.embed_scalar(&alg.norm(&x), j);
                    let det = alg.embed_matrix_definite(&x, j).unwrap().determinant();
                    assert!((det.re - nrm).abs() <= 1e-9 * (1.0 + nrm.abs()) && det.im.abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn identity_embeds_to_identity() {
        let alg = default_algebra();
        for j in 1..=2 {
            assert_eq!(alg.embed_matrix(&alg.one(), j).unwrap(), Matrix2::identity());
            assert_eq!(alg.frob_norm_sq(&alg.one(), j).unwrap(), 2.0);
            assert_eq!(alg.displacement(&alg.one(), j).unwrap(), 0.0);
        }
        assert!(matches!(alg.embed_matrix(&alg.one(), 3), Err(Error::PlaceOutOfRange { .. })));
    }

    #[test]
    fn definite_place_is_unitary() {
        let alg = one_split();
        assert_eq!(alg.split_places(), 1);
        let mut found = 0;
        for idx in 0..3usize.pow(8) {
            let v: Vec<i128> = (0..8).map(|k| (idx / 3usize.pow(k)) as i128 % 3 - 1).collect();
            let x = alg.from_flat(&v).unwrap();
            if !alg.is_norm_one(&x) {
                continue;
            }
            found += 1;
            let m = alg.embed_matrix_definite(&x, 2).unwrap();
            let prod = m.adjoint() * m;
            assert!((prod - Matrix2::identity()).iter().all(|z| z.norm() < 1e-9));
            assert!((alg.frob_norm_sq(&x, 2).unwrap() - 2.0).abs() < 1e-9);
            let f: f64 = m.iter().map(|z| z.norm_sqr()).sum();
            assert!((f - 2.0).abs() < 1e-9);
        }
        assert!(found > 2);
        assert!(matches!(alg.embed_matrix(&alg.one(), 2), Err(Error::DefinitePlace(2))));
    }

    #[test]
    fn loader_checks_sign_pattern() {
        let f = q2();
        let p = f.element(&[5, 1]).unwrap();
        assert!(QuaternionAlgebra::new(&f, p.clone(), f.integer(-1), Some(1)).is_err());
        assert!(QuaternionAlgebra::new(&f, p.clone(), f.integer(1), None).is_err());
        // -1 - sqrt2 is negative at the first place, positive at the second
        let alg = QuaternionAlgebra::new(&f, f.element(&[-1, -1]).unwrap(), f.integer(-1), None).unwrap();
        assert_eq!(alg.split_places(), 1);
        assert_eq!(alg.field_place(1).unwrap(), 1);
        assert_eq!(alg.field_place(2).unwrap(), 0);
    }

    #[test]
    fn split_algebra_has_zero_divisor() {
        let f = q2();
        let alg = QuaternionAlgebra::new(&f, f.integer(1), f.integer(-1), None).unwrap();
        let w = alg.isotropy_search(1).unwrap();
        assert!(!w.is_zero());
        assert!(alg.norm(&w).is_zero());
        assert!(alg.isotropy_search(0).is_none());
    }

    #[test]
    fn two_plus_sqrt2_algebra_is_split() {
        // (2 + sqrt2, -1) is ramified at an even number of places, so none
        let f = q2();
        let alg =
            QuaternionAlgebra::new(&f, f.element(&[2, 1]).unwrap(), f.integer(-1), Some(2)).unwrap();
        let w = alg.isotropy_search(2).unwrap();
        assert!(alg.norm(&w).is_zero() && !w.is_zero());
    }

    #[test]
    fn default_algebra_has_no_small_isotropic_vector() {
        assert!(default_algebra().isotropy_search(20).is_none());
    }

    #[test]
    fn congruence_order_membership() {
        let alg = default_algebra();
        let f = alg.field().clone();
        let ideal = IdealZBasis::principal(&f, &f.element(&[3, 1]).unwrap()).unwrap();
        assert!(alg.is_in_r1(&alg.one(), &ideal));
        assert!(!alg.is_in_r1(&alg.i(), &ideal));
        assert!(!alg.is_in_r1(&alg.scalar(f.integer(2)), &IdealZBasis::unit(&f)));
    }

    #[test]
    fn canonical_sign_rule() {
        let alg = default_algebra();
        let x = alg.from_flat(&[0, 0, -1, 2, 0, 0, 0, 0]).unwrap();
        assert_eq!(x.canonical_sign(), x.neg());
        assert_eq!(x.neg().canonical_sign(), x.neg());
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(v in proptest::collection::vec(-5i128..=5, 16)) {
            let alg = default_algebra();
            let x = alg.from_flat(&v[..8]).unwrap();
            let y = alg.from_flat(&v[8..]).unwrap();
            let f = alg.field();
            prop_assert_eq!(alg.norm(&alg.mul(&x, &y)), f.mul(&alg.norm(&x), &alg.norm(&y)));
        }
    }
}
