//! Enumerating ideal cosets inside boxes in the Minkowski embedding.

use super::{FieldInt, IdealZBasis, TotallyRealField};
use crate::error::{Error, Result};

/// Default cap on the number of candidate lattice points visited.
pub const DEFAULT_BOX_BUDGET: u128 = 200_000_000;

/// An axis-parallel box in `R^n`, one interval per real place.
///
/// Lower ends are always closed. Upper ends are closed or open per `closed_upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub closed_upper: bool,
}

impl EmbeddingBox {
    pub fn closed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::build(lo, hi, true)
    }

    pub fn half_open(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::build(lo, hi, false)
    }

    /// `[-r_j, r_j]` at every place.
    pub fn symmetric(radii: &[f64]) -> Result<Self> {
        Self::closed(radii.iter().map(|r| -r).collect(), radii.to_vec())
    }

    fn build(lo: Vec<f64>, hi: Vec<f64>, closed_upper: bool) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Domain("box bounds have inconsistent dimension".into()));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a.is_finite() && b.is_finite()) || b <= a {
                return Err(Error::Domain(format!("degenerate box side [{a}, {b}]")));
            }
        }
        Ok(EmbeddingBox {
            lo,
            hi,
            closed_upper,
        })
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter().enumerate().all(|(j, &v)| {
            v >= self.lo[j] && if self.closed_upper { v <= self.hi[j] } else { v < self.hi[j] }
        })
    }
}

/// LLL-reduces integer rows with respect to the Euclidean form on their embeddings.
fn lll_reduce(field: &TotallyRealField, mut rows: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let n = rows.len();
    if n < 2 {
        return rows;
    }
    let emb = |r: &Vec<i128>| field.embed_all(&FieldInt::from_coords(r));
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut k = 1;
    let mut iterations = 0;
    while k < n && iterations < 10_000 {
        iterations += 1;
        let e: Vec<Vec<f64>> = rows.iter().map(emb).collect();
        // Gram-Schmidt
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = e[i].clone();
            for j in 0..i {
                let bb = dot(&bstar[j], &bstar[j]);
                mu[i][j] = dot(&e[i], &bstar[j]) / bb;
                for (x, y) in v.iter_mut().zip(&bstar[j]) {
                    *x -= mu[i][j] * y;
                }
            }
            bstar.push(v);
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let q = q as i128;
                let rj = rows[j].clone();
                for (c, p) in rows[k].iter_mut().zip(&rj) {
                    *c -= q * p;
                }
                // refresh mu row k for lower j
                for l in 0..=j {
                    let m = if l == j { 1.0 } else { mu[j][l] };
                    mu[k][l] -= q as f64 * m;
                }
            }
        }
        let bk = dot(&bstar[k], &bstar[k]);
        let bk1 = dot(&bstar[k - 1], &bstar[k - 1]);
        if bk >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * bk1 {
            k += 1;
        } else {
            rows.swap(k, k - 1);
            k = k.saturating_sub(1).max(1);
        }
    }
    rows
}

/// All `t` with `t = t0 (mod a)` and `iota(t)` in the box.
pub fn enumerate_in_box(a: &IdealZBasis, t0: &FieldInt, bx: &EmbeddingBox) -> Result<Vec<FieldInt>> {
    enumerate_in_box_with_budget(a, t0, bx, DEFAULT_BOX_BUDGET)
}

/// [`enumerate_in_box`] with an explicit cap on visited candidates.
pub fn enumerate_in_box_with_budget(
    a: &IdealZBasis,
    t0: &FieldInt,
    bx: &EmbeddingBox,
    budget: u128,
) -> Result<Vec<FieldInt>> {
    let mut out = Vec::new();
    for_each_in_box(a, t0, bx, budget, |t| out.push(t.clone()))?;
    Ok(out)
}

/// Visits every element of the coset `t0 + a` whose embedding lies in `bx`.
pub fn for_each_in_box<F: FnMut(&FieldInt)>(
    a: &IdealZBasis,
    t0: &FieldInt,
    bx: &EmbeddingBox,
    budget: u128,
    mut visit: F,
) -> Result<()> {
    let field = a.field();
    let n = field.degree();
    if bx.lo.len() != n || t0.degree() != n {
        return Err(Error::MismatchedField);
    }
    let rows = lll_reduce(field, a.rows().to_vec());
    let basis: Vec<FieldInt> = rows.iter().map(|r| FieldInt::from_coords(r)).collect();
    // E[j][i] = iota_j(r_i); k = E^{-1} (y - iota(t0))
    let e = nalgebra::DMatrix::from_fn(n, n, |j, i| field.embed0(&basis[i], j));
    let einv = e
        .try_inverse()
        .ok_or_else(|| Error::Domain("ideal basis has singular embedding".into()))?;
    let base = field.embed_all(t0);
    let mut k_lo = vec![0i128; n];
    let mut k_hi = vec![0i128; n];
    let mut total: u128 = 1;
    for i in 0..n {
        let (mut lo, mut hi) = (0.0, 0.0);
        for j in 0..n {
            let c = einv[(i, j)];
            let a1 = c * (bx.lo[j] - base[j]);
            let a2 = c * (bx.hi[j] - base[j]);
            lo += a1.min(a2);
            hi += a1.max(a2);
        }
        // one extra unit on each side absorbs rounding in the float bounds
        k_lo[i] = lo.floor() as i128 - 1;
        k_hi[i] = hi.ceil() as i128 + 1;
        total = total.saturating_mul((k_hi[i] - k_lo[i] + 1) as u128);
    }
    if total > budget {
        return Err(Error::Budget {
            what: "lattice points in box",
            needed: total,
            budget,
        });
    }
    // odometer over k, with the last coordinate innermost
    let mut k = k_lo.clone();
    let start = {
        let mut acc = t0.clone();
        for i in 0..n {
            acc = &acc + &basis[i].scale(k[i]);
        }
        acc
    };
    let mut cur = start;
    loop {
        let y = field.embed_all(&cur);
        if bx.contains(&y) {
            visit(&cur);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if k[i] < k_hi[i] {
                k[i] += 1;
                cur = &cur + &basis[i];
                break;
            }
            cur = &cur - &basis[i].scale(k[i] - k_lo[i]);
            k[i] = k_lo[i];
        }
    }
}

/// `#{(a, b) in O_L^2 : a^2 + b^2 = t}`.
pub fn count_sum_two_squares(field: &TotallyRealField, t: &FieldInt) -> u64 {
    let e = field.embed_all(t);
    if e.iter().any(|&v| v < -1e-9) {
        return 0;
    }
    if t.is_zero() {
        return 1;
    }
    let radii: Vec<f64> = e.iter().map(|v| v.max(0.0).sqrt() * (1.0 + 1e-12) + 1e-12).collect();
    let bx = match EmbeddingBox::symmetric(&radii) {
        Ok(b) => b,
        Err(_) => return 0,
    };
    let unit = IdealZBasis::unit(field);
    let mut count = 0u64;
    for_each_in_box(&unit, &field.zero(), &bx, u128::MAX, |a| {
        let rest = t - &field.square(a);
        if let Some(b) = field.sqrt_exact(&rest) {
            count += if b.is_zero() { 1 } else { 2 };
        }
    })
    .expect("unbounded budget");
    count
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

    /// Naive search over a coordinate box large enough to contain every solution.
    fn naive_box(f: &TotallyRealField, a: &IdealZBasis, t0: &FieldInt, bx: &EmbeddingBox, r: i128) -> usize {
        let mut n = 0;
        for x in -r..=r {
            for y in -r..=r {
                let t = f.element(&[x, y]).unwrap();
                if a.congruent(&t, t0) && bx.contains(&f.embed_all(&t)) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn tiny_box_contains_only_zero() {
        let f = q2();
        let unit = IdealZBasis::unit(&f);
        let bx = EmbeddingBox::closed(vec![-0.5, -0.5], vec![0.5, 0.5]).unwrap();
        let got = enumerate_in_box(&unit, &f.zero(), &bx).unwrap();
        assert_eq!(got, vec![f.zero()]);
    }

    #[test]
    fn box_over_norm_seven_ideal() {
        let f = q2();
        let a = IdealZBasis::principal(&f, &f.element(&[3, 1]).unwrap()).unwrap();
        let bx = EmbeddingBox::half_open(vec![0.0, 0.0], vec![10.0, 10.0]).unwrap();
        let got = enumerate_in_box(&a, &f.zero(), &bx).unwrap();
        assert!(got.len() <= 15);
        // |x| + |y| sqrt2 <= 10 covers the box
        assert_eq!(got.len(), naive_box(&f, &a, &f.zero(), &bx, 12));
    }

    #[test]
    fn rejects_degenerate_box() {
        assert!(EmbeddingBox::closed(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(EmbeddingBox::closed(vec![0.0], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let f = q2();
        let unit = IdealZBasis::unit(&f);
        let bx = EmbeddingBox::symmetric(&[1e6, 1e6]).unwrap();
        let r = enumerate_in_box_with_budget(&unit, &f.zero(), &bx, 1000);
        assert!(matches!(r, Err(Error::Budget { .. })));
    }

    #[test]
    fn lemma_box_bound_randomized() {
        let f = q2();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let gens = [[3, 1], [3, -1], [5, 0], [1, 1], [2, 0], [7, 3], [4, 1], [0, 1]];
        for _ in 0..1000 {
            let g = gens[rng.gen_range(0..gens.len())];
            let k: u32 = rng.gen_range(1..=2);
            let a = IdealZBasis::principal(&f, &f.element(&g).unwrap()).unwrap().power(k);
            let t0 = f.element(&[rng.gen_range(-20..20), rng.gen_range(-20..20)]).unwrap();
            let lo: Vec<f64> = (0..2).map(|_| rng.gen_range(-30.0..30.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.01..25.0)).collect();
            let bx = EmbeddingBox::half_open(lo, hi).unwrap();
            let got = enumerate_in_box(&a, &t0, &bx).unwrap();
            assert!(got.len() as f64 <= bx.volume() / a.norm() as f64 + 1.0);
            for t in &got {
                assert!(a.congruent(t, &t0));
            }
        }
    }

    #[test]
    fn enumeration_matches_naive_search() {
        let f = q2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let a = IdealZBasis::principal(&f, &f.element(&[rng.gen_range(1..6), rng.gen_range(-3..4)]).unwrap()).unwrap();
            let t0 = f.element(&[rng.gen_range(-5..5), rng.gen_range(-5..5)]).unwrap();
            let lo: Vec<f64> = (0..2).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.5..8.0)).collect();
            let bx = EmbeddingBox::closed(lo, hi).unwrap();
            // |y| sqrt2 <= (|e1| + |e2|)/2 <= 16, |x| <= 16
            assert_eq!(enumerate_in_box(&a, &t0, &bx).unwrap().len(), naive_box(&f, &a, &t0, &bx, 20));
        }
    }

    #[test]
    fn cubic_field_box() {
        let f = TotallyRealField::new(&[1, -3, 0, 1]).unwrap();
        let unit = IdealZBasis::unit(&f);
        let bx = EmbeddingBox::symmetric(&[3.0, 3.0, 3.0]).unwrap();
        let got = enumerate_in_box(&unit, &f.zero(), &bx).unwrap();
        let mut naive = 0;
        for a in -12..=12 {
            for b in -12..=12 {
                for c in -12..=12 {
                    let t = f.element(&[a, b, c]).unwrap();
                    if bx.contains(&f.embed_all(&t)) {
                        naive += 1;
                    }
                }
            }
        }
        assert_eq!(got.len(), naive);
        assert!(got.len() as f64 <= bx.volume() + 1.0);
    }

    fn naive_two_squares(f: &TotallyRealField, t: &FieldInt, r: i128) -> u64 {
        let mut n = 0;
        for a0 in -r..=r {
            for a1 in -r..=r {
                let a = f.element(&[a0, a1]).unwrap();
                for b0 in -r..=r {
                    for b1 in -r..=r {
                        let b = f.element(&[b0, b1]).unwrap();
                        if &(&f.square(&a) + &f.square(&b)) == t {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn two_squares_small_cases() {
        let f = q2();
        assert_eq!(count_sum_two_squares(&f, &f.zero()), 1);
        assert_eq!(count_sum_two_squares(&f, &f.one()), 4);
        assert_eq!(count_sum_two_squares(&f, &f.integer(-1)), 0);
        let two = f.integer(2);
        let c = count_sum_two_squares(&f, &two);
        assert_eq!(c, naive_two_squares(&f, &two, 4));
        // 1+1, plus w^2 + 0 in four sign/order arrangements
        assert_eq!(c, 8);
        let q = TotallyRealField::rationals();
        assert_eq!(count_sum_two_squares(&q, &q.integer(25)), 12);
        assert_eq!(count_sum_two_squares(&q, &q.integer(3)), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn two_squares_matches_naive(a in -4i128..5, b in -3i128..4) {
            let f = q2();
            let t = f.element(&[a.abs() + 3 * b.abs(), b]).unwrap();
            // iota_j(t) <= 3|a| + 3|b| (1 + sqrt2) < 40, so coordinates of a solution are below 7
            prop_assert_eq!(count_sum_two_squares(&f, &t), naive_two_squares(&f, &t, 7));
        }
    }
}
