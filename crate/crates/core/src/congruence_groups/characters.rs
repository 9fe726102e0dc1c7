//! Conjugacy classes and irreducible degrees from the class algebra.
//!
//! Central characters `w_i = |C_i| chi(g_i) / chi(1)` are the common right
//! eigenvectors of the class matrices `(A_j)_{il} = #{x in C_j : x^-1 z_l in C_i}`;
//! then `chi(1)^2 = |G| / sum_i |w_i|^2 / |C_i|`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::reduction::generated_subgroup;
use super::FiniteMatrixGroup;
use crate::error::{Error, Result};

/// Largest group handled by [`conjugacy_classes`] and [`character_degrees`].
pub const MAX_CHARACTER_ORDER: usize = 10_000;

#[derive(Clone, Debug)]
pub struct ConjugacyClasses {
    /// Class index of every group element.
    pub class_of: Vec<u32>,
    /// Members of each class; class 0 is the identity.
    pub classes: Vec<Vec<u32>>,
    /// Generators used for the orbit computation.
    pub generators: Vec<u32>,
}

impl ConjugacyClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

fn find_generators(g: &FiniteMatrixGroup, seed: u64) -> Vec<u32> {
    let n = g.order();
    if n == 1 {
        return vec![];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let gens = vec![rng.gen_range(0..n as u32), rng.gen_range(0..n as u32)];
        if generated_subgroup(g, &gens) == n {
            return gens;
        }
    }
    // rare; grow a list until it generates
    let mut gens = Vec::new();
    while generated_subgroup(g, &gens) < n {
        gens.push(rng.gen_range(0..n as u32));
    }
    gens
}

pub fn conjugacy_classes(g: &FiniteMatrixGroup, seed: u64) -> Result<ConjugacyClasses> {
    let n = g.order();
    if n > MAX_CHARACTER_ORDER {
        return Err(Error::Budget {
            what: "conjugacy classes, group order",
            needed: n as u128,
            budget: MAX_CHARACTER_ORDER as u128,
        });
    }
    let gens = find_generators(g, seed);
    let inv: Vec<u32> = gens.iter().map(|&x| g.inverse(x)).collect();
    let mut class_of = vec![u32::MAX; n];
    let mut classes: Vec<Vec<u32>> = Vec::new();
    let mut start: Vec<u32> = vec![g.identity()];
    start.extend(0..n as u32);
    for s in start {
        if class_of[s as usize] != u32::MAX {
            continue;
        }
        let c = classes.len() as u32;
        let mut members = vec![s];
        class_of[s as usize] = c;
        let mut k = 0;
        while k < members.len() {
            let x = members[k];
            for (h, hi) in gens.iter().zip(&inv) {
                let y = g.mul(g.mul(*hi, x), *h);
                if class_of[y as usize] == u32::MAX {
                    class_of[y as usize] = c;
                    members.push(y);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        classes.push(members);
    }
    Ok(ConjugacyClasses {
        class_of,
        classes,
        generators: gens,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterDegrees {
    /// Sorted ascending.
    pub degrees: Vec<u64>,
    /// Whether each character (same order as `degrees`) has trivial kernel.
    pub faithful: Vec<bool>,
    /// Largest `|d - round(d)|` before rounding.
    pub max_deviation: f64,
    pub class_count: usize,
}

impl CharacterDegrees {
    pub fn sum_of_squares(&self) -> u64 {
        self.degrees.iter().map(|d| d * d).sum()
    }

    pub fn min_nontrivial(&self) -> Option<u64> {
        self.degrees.iter().copied().filter(|&d| d > 1).min()
    }

    pub fn min_faithful(&self) -> Option<u64> {
        self.degrees
            .iter()
            .zip(&self.faithful)
            .filter(|(_, f)| **f)
            .map(|(d, _)| *d)
            .min()
    }
}

/// Class matrices `A_j` as dense real matrices.
fn class_matrices(g: &FiniteMatrixGroup, cc: &ConjugacyClasses) -> Vec<DMatrix<f64>> {
    let k = cc.len();
    let reps: Vec<u32> = cc.classes.iter().map(|c| c[0]).collect();
    cc.classes
        .par_iter()
        .map(|cj| {
            let mut a = DMatrix::zeros(k, k);
            for (l, &z) in reps.iter().enumerate() {
                for &x in cj {
                    let i = cc.class_of[g.mul(g.inverse(x), z) as usize] as usize;
                    a[(i, l)] += 1.0;
                }
            }
            a
        })
        .collect()
}

/// Null vector of `m - lambda` by inverse iteration.
fn eigvec(m: &DMatrix<Complex64>, lambda: Complex64, seed: u64) -> Result<nalgebra::DVector<Complex64>> {
    let k = m.nrows();
    // shift slightly off the eigenvalue so the solve is regular
    let shift = lambda + Complex64::new(1e-9, 1e-9) * (1.0 + lambda.norm());
    let a = m - DMatrix::from_diagonal_element(k, k, shift);
    let lu = a.lu();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = nalgebra::DVector::from_fn(k, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    for _ in 0..4 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::Separation("singular shifted class matrix".into()))?;
        let n = v.norm();
        v /= Complex64::new(n, 0.0);
    }
    Ok(v)
}

/// Irreducible degrees by simultaneous diagonalization of the class algebra.
pub fn character_degrees(g: &FiniteMatrixGroup, cc: &ConjugacyClasses, seed: u64) -> Result<CharacterDegrees> {
    let k = cc.len();
    let order = g.order() as f64;
    let sizes: Vec<f64> = cc.classes.iter().map(|c| c.len() as f64).collect();
    let mats = class_matrices(g, cc);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_gap = 0.0;
    for _attempt in 0..8 {
        let coef: Vec<f64> = (0..k).map(|_| rng.gen_range(0.5..1.5)).collect();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for (a, c) in mats.iter().zip(&coef) {
            m += a * *c;
        }
        let eig = m.clone().complex_eigenvalues();
        let ev: Vec<Complex64> = eig.iter().copied().collect();
        let scale = ev.iter().map(|e| e.norm()).fold(1.0, f64::max);
        let mut gap = f64::INFINITY;
        for i in 0..k {
            for j in 0..i {
                gap = gap.min((ev[i] - ev[j]).norm() / scale);
            }
        }
        last_gap = gap;
        if gap < 1e-6 {
            continue;
        }
        let mc = m.map(|x| Complex64::new(x, 0.0));
        let mut rows = Vec::with_capacity(k);
        for (idx, &lam) in ev.iter().enumerate() {
            let v = eigvec(&mc, lam, seed ^ idx as u64)?;
            // class 0 is the identity; w_0 = 1
            let w: Vec<Complex64> = v.iter().map(|x| x / v[0]).collect();
            let s: f64 = w.iter().zip(&sizes).map(|(x, c)| x.norm_sqr() / c).sum();
            let d = (order / s).sqrt();
            let faithful = (1..k).all(|i| (w[i] - Complex64::new(sizes[i], 0.0)).norm() > 1e-6 * sizes[i]);
            rows.push((d, faithful));
        }
        let max_deviation = rows.iter().map(|(d, _)| (d - d.round()).abs()).fold(0.0, f64::max);
        if max_deviation > 1e-6 {
            return Err(Error::Separation(format!(
                "degrees not integral: deviation {max_deviation:.3e}"
            )));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        let degrees: Vec<u64> = rows.iter().map(|(d, _)| d.round() as u64).collect();
        let sum: u64 = degrees.iter().map(|d| d * d).sum();
        if sum != g.order() as u64 {
            return Err(Error::Separation(format!("sum of squared degrees {sum} != |G| = {}", g.order())));
        }
        return Ok(CharacterDegrees {
            faithful: rows.iter().map(|r| r.1).collect(),
            degrees,
            max_deviation,
            class_count: k,
        });
    }
    Err(Error::Separation(format!(
        "eigenvalues of the class-algebra combination not separated (relative gap {last_gap:.2e}); rerun with another seed"
    )))
}
