//! Exact arithmetic in `Z[w]` for a totally real field `L = Q(w)`.
//!
//! Elements are integer coordinate vectors on the power basis `1, w, ..., w^(n-1)`.
//! Every decision (equality, membership, norms) is made in exact integer
//! arithmetic; the real embeddings are only used to derive search boxes.

mod factor;
mod ideal;
mod lattice;

pub use factor::PrimeFactor;
pub use ideal::IdealZBasis;
pub use lattice::{
    count_sum_two_squares, enumerate_in_box, enumerate_in_box_with_budget, for_each_in_box, EmbeddingBox,
    DEFAULT_BOX_BUDGET,
};

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// An element of `Z[w]` in power-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FieldInt(pub(crate) SmallVec<[i128; 4]>);

impl FieldInt {
    pub fn from_coords(coords: &[i128]) -> Self {
        FieldInt(SmallVec::from_slice(coords))
    }

    pub fn zero(n: usize) -> Self {
        FieldInt(SmallVec::from_elem(0, n))
    }

    pub fn one(n: usize) -> Self {
        Self::integer(n, 1)
    }

    pub fn integer(n: usize, k: i128) -> Self {
        let mut v = Self::zero(n);
        v.0[0] = k;
        v
    }

    pub fn coords(&self) -> &[i128] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i128) -> Self {
        FieldInt(self.0.iter().map(|&c| c * k).collect())
    }

    /// Sign of the first nonzero coordinate (0 for zero).
    pub fn leading_sign(&self) -> i32 {
        self.0
            .iter()
            .find(|&&c| c != 0)
            .map(|c| c.signum() as i32)
            .unwrap_or(0)
    }
}

impl std::ops::Add for &FieldInt {
    type Output = FieldInt;
    fn add(self, rhs: &FieldInt) -> FieldInt {
        FieldInt(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub for &FieldInt {
    type Output = FieldInt;
    fn sub(self, rhs: &FieldInt) -> FieldInt {
        FieldInt(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl std::ops::Neg for &FieldInt {
    type Output = FieldInt;
    fn neg(self) -> FieldInt {
        FieldInt(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for FieldInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 if a == 1 => write!(f, "w")?,
                1 => write!(f, "{a}w")?,
                _ if a == 1 => write!(f, "w^{i}")?,
                _ => write!(f, "{a}w^{i}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

struct FieldInner {
    degree: usize,
    /// `c_0, ..., c_n` with `c_n = 1`.
    min_poly: Vec<i128>,
    /// Real roots of the minimal polynomial, descending.
    roots: Vec<f64>,
    /// `powers[j][i] = roots[j]^i`.
    powers: Vec<Vec<f64>>,
    /// Inverse of the Vandermonde matrix `powers`: coordinates from embeddings.
    coord_inverse: Vec<Vec<f64>>,
    /// Power-basis coordinates of `w^k` for `k = n .. 2n-2`.
    high_powers: Vec<Vec<i128>>,
    discriminant: i128,
    /// Rational primes at which `Z[w]` fails Dedekind's criterion.
    index_primes: Vec<u64>,
}

/// A totally real number field presented by a monic integer minimal polynomial.
#[derive(Clone)]
pub struct TotallyRealField(Arc<FieldInner>);

impl fmt::Debug for TotallyRealField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TotallyRealField({:?})", self.0.min_poly)
    }
}

impl PartialEq for TotallyRealField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.min_poly == other.0.min_poly
    }
}

impl Eq for TotallyRealField {}

/// Relative tolerance used when checking that computed roots reproduce the polynomial.
pub const ROOT_TOLERANCE: f64 = 1e-9;

impl TotallyRealField {
    /// Builds the field from minimal-polynomial coefficients `c_0, ..., c_n` (monic).
    pub fn new(min_poly: &[i128]) -> Result<Self> {
        let n = min_poly.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| {
            Error::InvalidField("minimal polynomial must have degree >= 1".into())
        })?;
        if min_poly[n] != 1 {
            return Err(Error::InvalidField("minimal polynomial must be monic".into()));
        }
        let roots = real_roots(min_poly)?;
        let powers: Vec<Vec<f64>> = roots
            .iter()
            .map(|&r| (0..n).map(|i| r.powi(i as i32)).collect())
            .collect();
        let vander = DMatrix::from_fn(n, n, |j, i| powers[j][i]);
        let inv = vander
            .try_inverse()
            .ok_or_else(|| Error::InvalidField("repeated roots".into()))?;
        let coord_inverse = (0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect();

        // w^k for k >= n, from w^n = -sum c_i w^i.
        let mut high_powers: Vec<Vec<i128>> = Vec::new();
        let mut cur: Vec<i128> = (0..n).map(|i| -min_poly[i]).collect();
        for _ in n..(2 * n).max(n + 1) - 1 {
            high_powers.push(cur.clone());
            let top = cur[n - 1];
            let mut next = vec![0i128; n];
            for i in (1..n).rev() {
                next[i] = cur[i - 1];
            }
            for i in 0..n {
                next[i] -= top * min_poly[i];
            }
            cur = next;
        }
        let mut field = TotallyRealField(Arc::new(FieldInner {
            degree: n,
            min_poly: min_poly.to_vec(),
            roots,
            powers,
            coord_inverse,
            high_powers,
            discriminant: 0,
            index_primes: Vec::new(),
        }));
        let disc = field.poly_discriminant();
        if disc == 0 {
            return Err(Error::InvalidField("minimal polynomial is not squarefree".into()));
        }
        let index_primes = factor::index_suspects(min_poly, disc);
        let inner = Arc::get_mut(&mut field.0).expect("fresh field");
        inner.discriminant = disc;
        inner.index_primes = index_primes;
        Ok(field)
    }

    pub fn rationals() -> Self {
        Self::new(&[0, 1]).expect("Q is a field")
    }

    /// `Q(sqrt(k))` presented as `Z[sqrt(k)]`, minimal polynomial `X^2 - k`.
    pub fn real_quadratic(k: i128) -> Result<Self> {
        Self::new(&[-k, 0, 1])
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn min_poly(&self) -> &[i128] {
        &self.0.min_poly
    }

    pub fn roots(&self) -> &[f64] {
        &self.0.roots
    }

    pub fn discriminant(&self) -> i128 {
        self.0.discriminant
    }

    /// Primes dividing `[O_L : Z[w]]` (detected by Dedekind's criterion).
    pub fn index_primes(&self) -> &[u64] {
        &self.0.index_primes
    }

    pub fn zero(&self) -> FieldInt {
        FieldInt::zero(self.degree())
    }

    pub fn one(&self) -> FieldInt {
        FieldInt::one(self.degree())
    }

    pub fn integer(&self, k: i128) -> FieldInt {
        FieldInt::integer(self.degree(), k)
    }

    /// The generator `w`.
    pub fn generator(&self) -> FieldInt {
        let n = self.degree();
        if n == 1 {
            return FieldInt::integer(1, -self.0.min_poly[0]);
        }
        let mut v = FieldInt::zero(n);
        v.0[1] = 1;
        v
    }

    pub fn element(&self, coords: &[i128]) -> Result<FieldInt> {
        if coords.len() != self.degree() {
            return Err(Error::MismatchedField);
        }
        Ok(FieldInt::from_coords(coords))
    }

    pub fn mul(&self, x: &FieldInt, y: &FieldInt) -> FieldInt {
        let n = self.degree();
        let mut prod = [0i128; 16];
        let mut big;
        let buf: &mut [i128] = if 2 * n <= prod.len() {
            &mut prod[..2 * n]
        } else {
            big = vec![0i128; 2 * n];
            &mut big
        };
        for (i, &a) in x.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.0.iter().enumerate() {
                buf[i + j] += a * b;
            }
        }
        let mut out: SmallVec<[i128; 4]> = SmallVec::from_slice(&buf[..n]);
        for k in n..2 * n - 1 {
            let c = buf[k];
            if c != 0 {
                for (o, &h) in out.iter_mut().zip(&self.0.high_powers[k - n]) {
                    *o += c * h;
                }
            }
        }
        FieldInt(out)
    }

    pub fn square(&self, x: &FieldInt) -> FieldInt {
        self.mul(x, x)
    }

    pub fn pow(&self, x: &FieldInt, e: u32) -> FieldInt {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// `iota_j(x)` for 1-based place index `j`.
    pub fn embed(&self, x: &FieldInt, j: usize) -> Result<f64> {
        if j == 0 || j > self.degree() {
            return Err(Error::PlaceOutOfRange {
                index: j,
                max: self.degree(),
            });
        }
        Ok(self.embed0(x, j - 1))
    }

    /// Embedding with 0-based place index.
    #[inline]
    pub fn embed0(&self, x: &FieldInt, j: usize) -> f64 {
        x.0.iter()
            .zip(&self.0.powers[j])
            .map(|(&c, &p)| c as f64 * p)
            .sum()
    }

    pub fn embed_all(&self, x: &FieldInt) -> Vec<f64> {
        (0..self.degree()).map(|j| self.embed0(x, j)).collect()
    }

    /// Real coordinates `c` with `sum_i c_i w_j^i = y_j`.
    pub fn coords_from_embedding(&self, y: &[f64]) -> Vec<f64> {
        self.0
            .coord_inverse
            .iter()
            .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Integer matrix of multiplication by `x`; row `i` holds `x * w^i`.
    pub fn mul_matrix(&self, x: &FieldInt) -> Vec<Vec<i128>> {
        let n = self.degree();
        let w = self.generator();
        let mut rows = Vec::with_capacity(n);
        let mut cur = x.clone();
        for _ in 0..n {
            rows.push(cur.0.to_vec());
            cur = self.mul(&cur, &w);
        }
        rows
    }

    /// Exact `N_{L/Q}(x)`, the determinant of the multiplication matrix.
    pub fn norm(&self, x: &FieldInt) -> i128 {
        bareiss_det(self.mul_matrix(x))
    }

    /// Exact `Tr_{L/Q}(x)`, the trace of the multiplication matrix.
    pub fn trace(&self, x: &FieldInt) -> i128 {
        self.mul_matrix(x)
            .iter()
            .enumerate()
            .map(|(i, r)| r[i])
            .sum()
    }

    fn poly_discriminant(&self) -> i128 {
        let n = self.degree();
        if n == 1 {
            return 1;
        }
        // disc(f) = (-1)^{n(n-1)/2} N(f'(w))
        let w = self.generator();
        let mut deriv = self.zero();
        let mut wp = self.one();
        for i in 1..=n {
            let coeff = self.0.min_poly[i] * i as i128;
            deriv = &deriv + &wp.scale(coeff);
            wp = self.mul(&wp, &w);
        }
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
        sign * self.norm(&deriv)
    }

    /// Exact square root in `Z[w]`, if `t` is a square.
    pub fn sqrt_exact(&self, t: &FieldInt) -> Option<FieldInt> {
        if t.is_zero() {
            return Some(self.zero());
        }
        let e = self.embed_all(t);
        if e.iter().any(|&v| v < -1e-9 * (1.0 + v.abs())) {
            return None;
        }
        let s: Vec<f64> = e.iter().map(|v| v.max(0.0).sqrt()).collect();
        self.signed_root_candidates(&s)
            .into_iter()
            .find(|c| self.square(c) == *t)
    }

    /// Integral rounding of every sign pattern of the given absolute embeddings.
    pub(crate) fn signed_root_candidates(&self, abs_embeddings: &[f64]) -> Vec<FieldInt> {
        let n = self.degree();
        let mut out = Vec::with_capacity(1 << n);
        let mut y = vec![0.0; n];
        for mask in 0u32..(1 << n) {
            for j in 0..n {
                y[j] = if mask >> j & 1 == 1 {
                    -abs_embeddings[j]
                } else {
                    abs_embeddings[j]
                };
            }
            let c = self.coords_from_embedding(&y);
            out.push(FieldInt(c.iter().map(|v| v.round() as i128).collect()));
        }
        out
    }
}

/// Fraction-free determinant.
pub(crate) fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn eval_poly(c: &[i128], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a as f64)
}

fn eval_deriv(c: &[i128], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, &a)| acc * x + (i as f64) * a as f64)
}

fn real_roots(c: &[i128]) -> Result<Vec<f64>> {
    let n = c.len() - 1;
    if n == 1 {
        return Ok(vec![-(c[0] as f64)]);
    }
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if j == n - 1 {
            -(c[i] as f64)
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = companion.complex_eigenvalues();
    let scale = 1.0 + c.iter().map(|&a| (a as f64).abs()).fold(0.0, f64::max);
    let mut roots = Vec::with_capacity(n);
    for z in eig.iter() {
        if z.im.abs() > 1e-6 * scale {
            return Err(Error::InvalidField(format!(
                "minimal polynomial has a non-real root {z}"
            )));
        }
        let mut x = z.re;
        for _ in 0..50 {
            let d = eval_deriv(c, x);
            if d == 0.0 {
                break;
            }
            let step = eval_poly(c, x) / d;
            x -= step;
            if step.abs() <= 1e-17 * (1.0 + x.abs()) {
                break;
            }
        }
        let resid = eval_poly(c, x).abs();
        if resid > ROOT_TOLERANCE * scale.powi(n as i32) {
            return Err(Error::InvalidField(format!("root refinement failed at {x}")));
        }
        roots.push(x);
    }
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> TotallyRealField {
        TotallyRealField::real_quadratic(2).unwrap()
    }

    #[test]
    fn embeddings_of_sqrt2() {
        let f = q2();
        let w = f.generator();
        assert!((f.embed(&w, 1).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((f.embed(&w, 2).unwrap() + 2f64.sqrt()).abs() < 1e-14);
        let x = f.element(&[2, 1]).unwrap();
        assert!((f.embed(&x, 1).unwrap() - 3.414213562373095).abs() < 1e-12);
        assert!((f.embed(&x, 2).unwrap() - 0.585786437626905).abs() < 1e-12);
        for j in 1..=2 {
            assert_eq!(f.embed(&f.one(), j).unwrap(), 1.0);
        }
        assert!(matches!(f.embed(&w, 3), Err(Error::PlaceOutOfRange { .. })));
        assert!(f.embed(&w, 0).is_err());
    }

    #[test]
    fn norm_and_trace() {
        let f = q2();
        let x = f.element(&[3, 1]).unwrap();
        assert_eq!(f.norm(&x), 7);
        assert_eq!(f.trace(&x), 6);
        assert_eq!(f.norm(&f.one()), 1);
        assert_eq!(f.trace(&f.one()), 2);
        assert_eq!(f.norm(&f.zero()), 0);
        assert_eq!(f.trace(&f.zero()), 0);
        assert_eq!(f.discriminant(), 8);
    }

    #[test]
    fn cubic_field() {
        // X^3 - 3X + 1, totally real, discriminant 81
        let f = TotallyRealField::new(&[1, -3, 0, 1]).unwrap();
        assert_eq!(f.discriminant(), 81);
        let w = f.generator();
        let w3 = f.pow(&w, 3);
        assert_eq!(w3.coords(), &[-1, 3, 0]);
        let x = f.element(&[1, 2, -1]).unwrap();
        let prod: f64 = (1..=3).map(|j| f.embed(&x, j).unwrap()).product();
        assert!((prod - f.norm(&x) as f64).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_totally_real() {
        assert!(TotallyRealField::new(&[1, 0, 1]).is_err());
        assert!(TotallyRealField::new(&[1, 0, 2]).is_err());
        assert!(TotallyRealField::new(&[1]).is_err());
    }

    #[test]
    fn exact_sqrt() {
        let f = q2();
        let x = f.element(&[3, -2]).unwrap();
        let sq = f.square(&x);
        let r = f.sqrt_exact(&sq).unwrap();
        assert_eq!(f.square(&r), sq);
        assert!(f.sqrt_exact(&f.integer(3)).is_none());
        assert!(f.sqrt_exact(&f.integer(-4)).is_none());
    }

    #[test]
    fn rationals_have_degree_one() {
        let q = TotallyRealField::rationals();
        assert_eq!(q.degree(), 1);
        let x = q.integer(-6);
        assert_eq!(q.norm(&x), -6);
        assert_eq!(q.embed(&x, 1).unwrap(), -6.0);
        assert_eq!(q.mul(&x, &x).coords(), &[36]);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in -20i128..20, b in -20i128..20, c in -20i128..20, d in -20i128..20) {
            let f = q2();
            let x = f.element(&[a, b]).unwrap();
            let y = f.element(&[c, d]).unwrap();
            prop_assert_eq!(f.norm(&f.mul(&x, &y)), f.norm(&x) * f.norm(&y));
            let float_norm: f64 = (1..=2).map(|j| f.embed(&x, j).unwrap()).product();
            prop_assert!((float_norm - f.norm(&x) as f64).abs() <= 1e-9 * (1.0 + float_norm.abs()));
        }
    }
}
