use std::fmt;

use super::{bareiss_det, FieldInt, TotallyRealField};
use crate::error::{Error, Result};

/// An ideal of `Z[w]` given by a row Hermite normal form `Z`-basis.
///
/// Rows are upper triangular with positive pivots, and every entry above a
/// pivot lies in `[0, pivot)`.
#[derive(Clone)]
pub struct IdealZBasis {
    field: TotallyRealField,
    rows: Vec<Vec<i128>>,
}

impl PartialEq for IdealZBasis {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rows == other.rows
    }
}

impl Eq for IdealZBasis {}

impl std::hash::Hash for IdealZBasis {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state)
    }
}

impl fmt::Debug for IdealZBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{:?}", self.rows)
    }
}

impl fmt::Display for IdealZBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let s: Vec<String> = r.iter().map(|c| c.to_string()).collect();
                s.join(" ")
            })
            .collect();
        write!(f, "[{}]", parts.join("; "))
    }
}

/// Row Hermite normal form of the lattice spanned by `gens` (each of length `n`).
pub(crate) fn hermite_normal_form(gens: &[Vec<i128>], n: usize) -> Result<Vec<Vec<i128>>> {
    let mut pool: Vec<Vec<i128>> = gens
        .iter()
        .filter(|g| g.iter().any(|&c| c != 0))
        .cloned()
        .collect();
    let mut out: Vec<Vec<i128>> = Vec::with_capacity(n);
    for col in 0..n {
        loop {
            let nonzero: Vec<usize> = (0..pool.len()).filter(|&i| pool[i][col] != 0).collect();
            if nonzero.is_empty() {
                return Err(Error::NotIdeal("generators do not span a full-rank lattice".into()));
            }
            let piv = *nonzero
                .iter()
                .min_by_key(|&&i| pool[i][col].abs())
                .unwrap();
            if nonzero.len() == 1 {
                let mut row = pool.swap_remove(piv);
                if row[col] < 0 {
                    row.iter_mut().for_each(|c| *c = -*c);
                }
                out.push(row);
                break;
            }
            let pivot_row = pool[piv].clone();
            for &i in &nonzero {
                if i == piv {
                    continue;
                }
                let q = pool[i][col].div_euclid(pivot_row[col]);
                for (c, p) in pool[i].iter_mut().zip(&pivot_row) {
                    *c -= q * p;
                }
            }
        }
        pool.retain(|r| r.iter().any(|&c| c != 0));
    }
    for i in 0..n {
        for k in 0..i {
            let q = out[k][i].div_euclid(out[i][i]);
            if q != 0 {
                let ri = out[i].clone();
                for (c, p) in out[k].iter_mut().zip(&ri) {
                    *c -= q * p;
                }
            }
        }
    }
    Ok(out)
}

impl IdealZBasis {
    /// Builds the ideal from an HNF (or any) basis, verifying closure under `w`.
    pub fn from_basis(field: &TotallyRealField, rows: Vec<Vec<i128>>) -> Result<Self> {
        let n = field.degree();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::MismatchedField);
        }
        let rows = hermite_normal_form(&rows, n)?;
        let ideal = IdealZBasis {
            field: field.clone(),
            rows,
        };
        let w = field.generator();
        for r in &ideal.rows {
            let prod = field.mul(&FieldInt::from_coords(r), &w);
            if !ideal.contains(&prod) {
                return Err(Error::NotIdeal(format!("row {r:?} times w leaves the lattice")));
            }
        }
        Ok(ideal)
    }

    /// The ideal generated by the given elements.
    pub fn generated_by(field: &TotallyRealField, gens: &[FieldInt]) -> Result<Self> {
        let n = field.degree();
        let w = field.generator();
        let mut rows = Vec::with_capacity(gens.len() * n);
        for g in gens {
            if g.degree() != n {
                return Err(Error::MismatchedField);
            }
            let mut cur = g.clone();
            for _ in 0..n {
                rows.push(cur.coords().to_vec());
                cur = field.mul(&cur, &w);
            }
        }
        Ok(IdealZBasis {
            field: field.clone(),
            rows: hermite_normal_form(&rows, n)?,
        })
    }

    pub fn principal(field: &TotallyRealField, g: &FieldInt) -> Result<Self> {
        Self::generated_by(field, std::slice::from_ref(g))
    }

    pub fn unit(field: &TotallyRealField) -> Self {
        Self::principal(field, &field.one()).expect("unit ideal")
    }

    pub fn field(&self) -> &TotallyRealField {
        &self.field
    }

    pub fn rows(&self) -> &[Vec<i128>] {
        &self.rows
    }

    pub fn basis(&self) -> Vec<FieldInt> {
        self.rows.iter().map(|r| FieldInt::from_coords(r)).collect()
    }

    /// `N(a) = #(Z[w]/a)`.
    pub fn norm(&self) -> i128 {
        self.rows.iter().enumerate().map(|(i, r)| r[i]).product()
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    fn check_field(&self, other: &TotallyRealField) -> Result<()> {
        if &self.field == other {
            Ok(())
        } else {
            Err(Error::MismatchedField)
        }
    }

    pub fn contains(&self, x: &FieldInt) -> bool {
        if x.degree() != self.rows.len() {
            return false;
        }
        let mut r: Vec<i128> = x.coords().to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            if r[i] % row[i] != 0 {
                return false;
            }
            let q = r[i] / row[i];
            if q != 0 {
                for (c, p) in r.iter_mut().zip(row) {
                    *c -= q * p;
                }
            }
        }
        true
    }

    /// Canonical representative with every coordinate `i` in `[0, pivot_i)`.
    pub fn reduce_mod(&self, x: &FieldInt) -> FieldInt {
        let mut r: Vec<i128> = x.coords().to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let q = r[i].div_euclid(row[i]);
            if q != 0 {
                for (c, p) in r.iter_mut().zip(row) {
                    *c -= q * p;
                }
            }
        }
        FieldInt::from_coords(&r)
    }

    pub fn congruent(&self, x: &FieldInt, y: &FieldInt) -> bool {
        self.contains(&(x - y))
    }

    pub fn mul(&self, other: &IdealZBasis) -> Result<IdealZBasis> {
        self.check_field(&other.field)?;
        let mut gens = Vec::with_capacity(self.rows.len() * other.rows.len());
        for a in &self.rows {
            for b in &other.rows {
                let p = self
                    .field
                    .mul(&FieldInt::from_coords(a), &FieldInt::from_coords(b));
                gens.push(p.coords().to_vec());
            }
        }
        Ok(IdealZBasis {
            field: self.field.clone(),
            rows: hermite_normal_form(&gens, self.rows.len())?,
        })
    }

    pub fn add(&self, other: &IdealZBasis) -> Result<IdealZBasis> {
        self.check_field(&other.field)?;
        let gens: Vec<Vec<i128>> = self.rows.iter().chain(&other.rows).cloned().collect();
        Ok(IdealZBasis {
            field: self.field.clone(),
            rows: hermite_normal_form(&gens, self.rows.len())?,
        })
    }

    pub fn power(&self, k: u32) -> IdealZBasis {
        let mut acc = IdealZBasis::unit(&self.field);
        for _ in 0..k {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    pub fn coprime(&self, other: &IdealZBasis) -> Result<bool> {
        Ok(self.add(other)?.is_unit())
    }

    /// `self` contains `other`, i.e. `self | other`.
    pub fn divides(&self, other: &IdealZBasis) -> bool {
        other.rows.iter().all(|r| self.contains(&FieldInt::from_coords(r)))
    }

    /// Absolute determinant of the basis, equal to the norm for an HNF basis.
    pub fn determinant(&self) -> i128 {
        bareiss_det(self.rows.clone()).abs()
    }

    /// Every canonical residue, in mixed-radix order of the pivot box.
    pub fn residues(&self) -> Vec<FieldInt> {
        let n = self.rows.len();
        let pivots: Vec<i128> = (0..n).map(|i| self.rows[i][i]).collect();
        let total: i128 = pivots.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut cur = vec![0i128; n];
        loop {
            out.push(FieldInt::from_coords(&cur));
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                cur[i] += 1;
                if cur[i] < pivots[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    /// `2` lies in the ideal, so `1` and `-1` coincide modulo it.
    pub fn contains_two(&self) -> bool {
        self.contains(&self.field.integer(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> TotallyRealField {
        TotallyRealField::real_quadratic(2).unwrap()
    }

    #[test]
    fn norms_of_principal_ideals() {
        let f = q2();
        assert_eq!(IdealZBasis::unit(&f).norm(), 1);
        let a = IdealZBasis::principal(&f, &f.element(&[3, 1]).unwrap()).unwrap();
        assert_eq!(a.norm(), 7);
        let five = IdealZBasis::principal(&f, &f.integer(5)).unwrap();
        assert_eq!(five.norm(), 25);
        assert_eq!(five.residues().len(), 25);
        assert_eq!(a.power(2).norm(), 49);
        assert_eq!(a.determinant(), 7);
    }

    #[test]
    fn residue_count_matches_norm_by_enumeration() {
        // count classes of a 0..25 x 0..25 coordinate grid modulo (5)
        let f = q2();
        let five = IdealZBasis::principal(&f, &f.integer(5)).unwrap();
        let mut seen = std::collections::HashSet::new();
        for a in 0..25 {
            for b in 0..25 {
                seen.insert(five.reduce_mod(&f.element(&[a, b]).unwrap()));
            }
        }
        assert_eq!(seen.len(), 25);
    }

    #[test]
    fn coprimality() {
        let f = q2();
        let a = IdealZBasis::principal(&f, &f.element(&[3, 1]).unwrap()).unwrap();
        let b = IdealZBasis::principal(&f, &f.element(&[3, -1]).unwrap()).unwrap();
        assert!(a.coprime(&b).unwrap());
        assert!(!a.coprime(&a.power(2)).unwrap());
        let seven = IdealZBasis::principal(&f, &f.integer(7)).unwrap();
        assert_eq!(a.mul(&b).unwrap(), seven);
    }

    #[test]
    fn contains_and_reduce() {
        let f = q2();
        let unit = IdealZBasis::unit(&f);
        assert!(unit.contains(&f.element(&[17, -4]).unwrap()));
        let a = IdealZBasis::principal(&f, &f.element(&[3, 1]).unwrap()).unwrap();
        let g = f.element(&[3, 1]).unwrap();
        assert!(a.contains(&f.mul(&g, &f.element(&[5, -2]).unwrap())));
        assert!(!a.contains(&f.one()));
        let x = f.element(&[40, -13]).unwrap();
        let r = a.reduce_mod(&x);
        assert!(a.congruent(&x, &r));
        assert_eq!(a.reduce_mod(&r), r);
    }

    #[test]
    fn rejects_non_ideal_basis() {
        let f = q2();
        // Z + 2Z w is not closed under w: w * w = 2, fine, but w * 1 = w not in it
        let r = IdealZBasis::from_basis(&f, vec![vec![1, 0], vec![0, 2]]);
        assert!(matches!(r, Err(Error::NotIdeal(_))));
        let ok = IdealZBasis::from_basis(&f, vec![vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(ok.norm(), 2);
    }

    #[test]
    fn mismatched_fields() {
        let f = q2();
        let g = TotallyRealField::real_quadratic(5).unwrap();
        let a = IdealZBasis::unit(&f);
        let b = IdealZBasis::unit(&g);
        assert!(matches!(a.mul(&b), Err(Error::MismatchedField)));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn norm_multiplicativity(a in -9i128..9, b in -9i128..9, c in -9i128..9, d in -9i128..9, k in 1u32..4) {
            let f = q2();
            let x = f.element(&[a, b]).unwrap();
            let y = f.element(&[c, d]).unwrap();
            prop_assume!(!x.is_zero() && !y.is_zero());
            let ix = IdealZBasis::principal(&f, &x).unwrap();
            let iy = IdealZBasis::principal(&f, &y).unwrap();
            prop_assert_eq!(ix.norm(), f.norm(&x).abs());
            prop_assert_eq!(ix.power(k).norm(), ix.norm().pow(k));
            if ix.coprime(&iy).unwrap() {
                prop_assert_eq!(ix.mul(&iy).unwrap().norm(), ix.norm() * iy.norm());
            }
            let z = f.element(&[a * 7 + c, b * 3 - d]).unwrap();
            let r = ix.reduce_mod(&z);
            prop_assert!(ix.congruent(&z, &r));
            prop_assert_eq!(ix.reduce_mod(&r), r.clone());
        }
    }
}
