use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::enumeration::{enumerate_fast, BallQuery};
use crate::number_field::TotallyRealField;
use crate::quaternion::QuaternionAlgebra;

fn algebra() -> QuaternionAlgebra {
    let f = TotallyRealField::real_quadratic(2).unwrap();
    QuaternionAlgebra::new(&f, f.element(&[5, 1]).unwrap(), f.integer(-1), Some(2)).unwrap()
}

fn quad(g: &[i128]) -> IdealZBasis {
    let f = TotallyRealField::real_quadratic(2).unwrap();
    IdealZBasis::principal(&f, &f.element(g).unwrap()).unwrap()
}

fn rational(n: i128) -> IdealZBasis {
    let f = TotallyRealField::rationals();
    IdealZBasis::principal(&f, &f.integer(n)).unwrap()
}

/// `|PSL(2, Z/n)|` from counting solutions of `ad - bc = 1` directly on integers.
fn psl_z_mod_n(n: i64) -> u64 {
    let mut sl = 0u64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a * d - b * c - 1).rem_euclid(n) == 0 {
                        sl += 1;
                    }
                }
            }
        }
    }
    if n <= 2 {
        sl
    } else {
        sl / 2
    }
}

#[test]
fn ring_axioms_and_size() {
    for a in [quad(&[0, 1]), quad(&[3, 1]), quad(&[3, 0]), rational(12)] {
        let r = FiniteQuotientRing::new(&a).unwrap();
        assert_eq!(r.len() as i128, a.norm());
        r.check_axioms().unwrap();
    }
}

#[test]
fn small_orders_brute_force() {
    assert_eq!(build_psl2(&quad(&[0, 1]), 32).unwrap().order(), 6);
    assert_eq!(build_psl2(&rational(5), 32).unwrap().order(), 60);
    assert_eq!(build_psl2(&quad(&[3, 1]), 32).unwrap().order(), 168);
    assert_eq!(build_psl2(&quad(&[3, 0]), 32).unwrap().order(), 360);
    assert!(matches!(build_psl2(&quad(&[7, 0]), 32), Err(Error::Budget { .. })));
}

#[test]
fn formula_matches_brute_force() {
    let mut window = (f64::INFINITY, 0.0f64);
    let mut ideals: Vec<IdealZBasis> = [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13].iter().map(|&n| rational(n)).collect();
    ideals.extend([quad(&[0, 1]), quad(&[3, 1]), quad(&[3, 0]), quad(&[2, 0]), quad(&[1, 2]), quad(&[4, 1])]);
    for a in &ideals {
        let g = build_psl2(a, 32).unwrap();
        let want = group_order_formula(a).unwrap();
        assert_eq!(g.order() as u128, want, "{a}");
        let r = want as f64 / (a.norm() as f64).powi(3);
        window = (window.0.min(r), window.1.max(r));
    }
    // independent integer count for the rational ideals
    for n in [2, 4, 6, 9] {
        assert_eq!(build_psl2(&rational(n as i128), 32).unwrap().order() as u64, psl_z_mod_n(n));
    }
    assert!(window.0 >= 0.25 && window.1 <= 1.0, "{window:?}");
}

#[test]
fn split_norm_49_local_factors() {
    let a = quad(&[3, 1]).mul(&quad(&[3, -1])).unwrap();
    assert_eq!(group_order_formula(&a).unwrap(), 336 * 336 / 2);
    let g = build_psl2(&a, 49).unwrap();
    assert_eq!(g.order(), 56448);
}

#[test]
fn group_axioms() {
    let g = build_psl2(&quad(&[3, 1]), 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = g.order() as u32;
    for _ in 0..500 {
        let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
        assert_eq!(g.mul(x, g.inverse(x)), g.identity());
        assert_eq!(g.mul(x, g.identity()), x);
    }
}

fn degrees(a: &IdealZBasis) -> CharacterDegrees {
    let g = build_psl2(a, 32).unwrap();
    let cc = conjugacy_classes(&g, 1).unwrap();
    character_degrees(&g, &cc, 2).unwrap()
}

#[test]
fn psl2_f5_degrees() {
    let d = degrees(&rational(5));
    assert_eq!(d.degrees, vec![1, 3, 3, 4, 5]);
    assert_eq!(d.sum_of_squares(), 60);
    assert!(d.max_deviation < 1e-6);
    assert!(d.min_nontrivial().unwrap() as f64 >= appendix_bound(5, 1, 1));
    // simple group: every nontrivial character is faithful
    assert_eq!(d.min_faithful(), Some(3));
}

#[test]
fn min_degree_bounds_prime_fields() {
    let cases = [
        (rational(5), 5u64),
        (quad(&[3, 1]), 7),
        (quad(&[3, 0]), 9),
        (rational(11), 11),
        (rational(13), 13),
    ];
    for (a, q) in cases {
        let d = degrees(&a);
        assert_eq!(d.sum_of_squares(), group_order_formula(&a).unwrap() as u64);
        let m = d.min_nontrivial().unwrap();
        assert!(m >= (q - 1) / 2, "q={q}: {m}");
        assert!(m as f64 >= appendix_bound(q, 1, 1));
    }
    assert_eq!(degrees(&quad(&[3, 1])).min_nontrivial(), Some(3));
}

#[test]
fn solvable_quotients() {
    // PSL(2, F_2) = S_3, PSL(2, F_3) = A_4
    assert_eq!(degrees(&quad(&[0, 1])).degrees, vec![1, 1, 2]);
    assert_eq!(degrees(&rational(3)).degrees, vec![1, 1, 1, 3]);
    let d = degrees(&rational(4));
    assert_eq!(d.sum_of_squares(), 24);
}

#[test]
fn classes_partition() {
    let g = build_psl2(&quad(&[3, 1]), 32).unwrap();
    let cc = conjugacy_classes(&g, 9).unwrap();
    assert_eq!(cc.sizes().iter().sum::<usize>(), 168);
    let mut sizes = cc.sizes();
    sizes.sort();
    assert_eq!(sizes, vec![1, 21, 24, 24, 42, 56]);
}

#[test]
fn reduction_is_a_homomorphism_and_surjective() {
    let alg = algebra();
    let a = quad(&[3, 1]);
    let g = build_psl2(&a, 32).unwrap();
    let red = ReductionMap::new(&alg, &g).unwrap();
    assert_eq!(red.reduce(&g, &alg.one()).unwrap(), g.identity());
    let q = BallQuery::new(&alg, IdealZBasis::unit(alg.field()), 403.0, 10.0);
    let elems = enumerate_fast(&alg, &q).unwrap();
    assert!(elems.len() > 10);
    let imgs: Vec<u32> = elems.iter().map(|e| red.reduce(&g, &e.quat).unwrap()).collect();
    for (x, ix) in elems.iter().zip(&imgs) {
        for (y, iy) in elems.iter().zip(&imgs) {
            let xy = alg.mul(&x.quat, &y.quat);
            assert_eq!(red.reduce(&g, &xy).unwrap(), g.mul(*ix, *iy));
        }
    }
    assert_eq!(generated_subgroup(&g, &imgs), 168);
}

#[test]
fn kernel_is_the_congruence_subgroup() {
    let alg = algebra();
    let a = quad(&[3, 1]);
    let g = build_psl2(&a, 32).unwrap();
    let red = ReductionMap::new(&alg, &g).unwrap();
    let (x, cap) = (3000.0, 40.0);
    let all = enumerate_fast(&alg, &BallQuery::new(&alg, IdealZBasis::unit(alg.field()), x, cap)).unwrap();
    let kernel: BTreeSet<_> = all
        .iter()
        .filter(|e| red.reduce(&g, &e.quat).unwrap() == g.identity())
        .map(|e| e.quat.canonical_sign())
        .collect();
    let sub: BTreeSet<_> = enumerate_fast(&alg, &BallQuery::new(&alg, a, x, cap))
        .unwrap()
        .into_iter()
        .map(|e| e.quat.canonical_sign())
        .collect();
    assert_eq!(kernel, sub);
}

#[test]
fn reduction_needs_coprime_ideal() {
    let alg = algebra();
    // 2 divides (sqrt 2)
    let g = build_psl2(&quad(&[0, 1]), 32).unwrap();
    assert!(ReductionMap::new(&alg, &g).is_err());
}

#[test]
fn mlb_trivial_cases() {
    let alg = algebra();
    let disc = default_discriminant(&alg).unwrap();
    assert_eq!(disc.norm(), 4 * 23);
    let a = quad(&[3, 1]);
    assert!((mlb_evaluate(&a, &disc, 0.1).unwrap() - 7f64.powf(0.9)).abs() < 1e-12);
    assert_eq!(mlb_evaluate(&disc, &disc, 0.1).unwrap(), 1.0);
    let mixed = a.mul(&quad(&[0, 1])).unwrap();
    assert!((mlb_evaluate(&mixed, &disc, 0.0).unwrap() - 7.0).abs() < 1e-12);
}
