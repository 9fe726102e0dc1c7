use super::*;
use crate::number_field::TotallyRealField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn algebra() -> QuaternionAlgebra {
    let f = TotallyRealField::real_quadratic(2).unwrap();
    QuaternionAlgebra::new(&f, f.element(&[5, 1]).unwrap(), f.integer(-1), Some(2)).unwrap()
}

fn ideal(alg: &QuaternionAlgebra, g: &[i128], k: u32) -> IdealZBasis {
    let f = alg.field();
    IdealZBasis::principal(f, &f.element(g).unwrap()).unwrap().power(k)
}

fn quats(v: &[LatticeElement]) -> Vec<Quat> {
    v.iter().map(|e| e.quat.clone()).collect()
}

#[test]
fn below_two_is_empty() {
    let alg = algebra();
    let q = BallQuery::new(&alg, IdealZBasis::unit(alg.field()), 1.99, DEFAULT_CAP);
    assert!(enumerate_brute(&alg, &q).unwrap().is_empty());
    assert!(enumerate_fast(&alg, &q).unwrap().is_empty());
}

#[test]
fn unit_ideal_golden_count() {
    let alg = algebra();
    let q = BallQuery::new(&alg, IdealZBasis::unit(alg.field()), 10.0, 10.0);
    let brute = enumerate_brute(&alg, &q).unwrap();
    let fast = enumerate_fast(&alg, &q).unwrap();
    assert_eq!(quats(&brute), quats(&fast));
    assert_eq!(brute.len(), GOLDEN_UNIT_X10);
}

// pinned from enumerate_brute
const GOLDEN_UNIT_X10: usize = 1;

#[test]
fn fast_matches_brute_randomized() {
    let alg = algebra();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ideals = [
        IdealZBasis::unit(alg.field()),
        ideal(&alg, &[0, 1], 1),
        ideal(&alg, &[3, 1], 1),
        ideal(&alg, &[3, -1], 1),
        ideal(&alg, &[3, 1], 2),
    ];
    for _ in 0..12 {
        let a = ideals[rng.gen_range(0..ideals.len())].clone();
        let x = rng.gen_range(2.0..40.0);
        let roles = match rng.gen_range(0..3) {
            0 => vec![PlaceRole::Cap { cap: rng.gen_range(2.0..12.0) }],
            1 => vec![PlaceRole::NormWindow { k: rng.gen_range(1.0..6.0) }],
            _ => vec![PlaceRole::TraceWindow { eta: rng.gen_range(0.2..2.0), cap: rng.gen_range(2.0..12.0) }],
        };
        let q = BallQuery::new(&alg, a, x, DEFAULT_CAP).with_roles(roles);
        let brute = enumerate_brute(&alg, &q).unwrap();
        let fast = enumerate_fast(&alg, &q).unwrap();
        assert_eq!(quats(&brute), quats(&fast), "query {}", q.describe());
    }
}

#[test]
fn congruence_invariants_hold() {
    let alg = algebra();
    for a in [ideal(&alg, &[3, 1], 1), ideal(&alg, &[3, -1], 2), ideal(&alg, &[5, 0], 1)] {
        let q = BallQuery::new(&alg, a.clone(), 400.0, DEFAULT_CAP);
        let elems = enumerate_fast(&alg, &q).unwrap();
        assert!(check_invariants(&alg, &a, &elems).unwrap().is_empty());
        for e in &elems {
            assert!(alg.is_in_r1(&e.quat, &a));
        }
        let two = alg.field().integer(2);
        assert!(trace_spectrum(&alg, &elems).iter().all(|t| t.exact != two));
    }
}

#[test]
fn trace_window_forces_nonzero_c() {
    let alg = algebra();
    let q = BallQuery::new(&alg, IdealZBasis::unit(alg.field()), 3000.0, DEFAULT_CAP)
        .with_roles(vec![PlaceRole::TraceWindow { eta: 1.0, cap: 10.0 }]);
    let elems = enumerate_fast(&alg, &q).unwrap();
    assert!(!elems.is_empty());
    for e in &elems {
        assert!(!e.quat.c.is_zero());
        let t = e.traces[1].abs();
        assert!((1.0..2.0).contains(&t));
    }
}

#[test]
fn large_level_is_empty_at_small_x() {
    let alg = algebra();
    let q = BallQuery::new(&alg, ideal(&alg, &[3, 1], 3), 30.0, DEFAULT_CAP);
    assert!(enumerate_brute(&alg, &q).unwrap().is_empty());
}

#[test]
fn identity_flag() {
    let alg = algebra();
    let q = BallQuery::new(&alg, ideal(&alg, &[3, 1], 1), 20.0, DEFAULT_CAP);
    let with = enumerate_fast(&alg, &q.clone().including_identity()).unwrap();
    let without = enumerate_fast(&alg, &q).unwrap();
    assert_eq!(with.len(), without.len() + 1);
    assert!(with.iter().any(|e| e.quat == alg.one()));
}

#[test]
fn products_found_in_larger_ball() {
    let alg = algebra();
    let unit = IdealZBasis::unit(alg.field());
    let small = enumerate_fast(&alg, &BallQuery::new(&alg, unit.clone(), 403.0, 10.0)).unwrap();
    let (x_big, c_big) = (3000.0, 40.0);
    let big = enumerate_fast(&alg, &BallQuery::new(&alg, unit, x_big, c_big)).unwrap();
    let big_set: std::collections::BTreeSet<Quat> = quats(&big).into_iter().collect();
    let mut checked = 0;
    for x in &small {
        for y in &small {
            let p = alg.mul(&x.quat, &y.quat).canonical_sign();
            if p == alg.one() {
                continue;
            }
            let e = LatticeElement::new(&alg, p.clone());
            if e.frob_sq[0] <= x_big && e.frob_sq[1] <= c_big {
                assert!(big_set.contains(&p), "{p}");
                checked += 1;
            }
        }
    }
    assert!(checked > 10, "{checked}");
}

#[test]
fn definite_places_have_frobenius_two() {
    let f = TotallyRealField::real_quadratic(2).unwrap();
    let alg = QuaternionAlgebra::new(&f, f.generator(), f.integer(-1), Some(1)).unwrap();
    let q = BallQuery::new(&alg, IdealZBasis::unit(&f), 200.0, DEFAULT_CAP);
    let brute = enumerate_brute(&alg, &BallQuery::new(&alg, IdealZBasis::unit(&f), 40.0, DEFAULT_CAP)).unwrap();
    let fast40 = enumerate_fast(&alg, &BallQuery::new(&alg, IdealZBasis::unit(&f), 40.0, DEFAULT_CAP)).unwrap();
    assert_eq!(quats(&brute), quats(&fast40));
    let elems = enumerate_fast(&alg, &q).unwrap();
    assert!(!elems.is_empty());
    for e in &elems {
        assert!((e.frob_sq[1] - 2.0).abs() < 1e-9);
    }
}

#[test]
fn weighted_sums() {
    assert_eq!(weighted_displacement_sum(&[], 1), 0.0);
    let alg = algebra();
    let elem = LatticeElement {
        quat: alg.one(),
        frob_sq: vec![2.0 * 2f64.cosh(), 2.0],
        displacement: vec![2.0, 0.0],
        traces: vec![2.0, 2.0],
    };
    assert!((weighted_displacement_sum(std::slice::from_ref(&elem), 1) - (-1f64).exp()).abs() < 1e-15);
    assert!((weighted_displacement_sum_mixed(&[elem], 1, 2, 3.0) - (-1f64).exp()).abs() < 1e-15);
}

#[test]
fn trace_pair_windows() {
    let alg = algebra();
    let a = ideal(&alg, &[3, 1], 1);
    let elems = enumerate_fast(&alg, &BallQuery::new(&alg, a.clone(), 3000.0, DEFAULT_CAP)).unwrap();
    for t_param in [4.0, 8.0, 16.0] {
        let c = count_trace_pairs(&alg, &a, &elems, t_param, 5.0, 0.5).unwrap();
        assert!(c.near_two as f64 <= c.near_two_bound);
        assert!(c.elliptic as f64 <= c.elliptic_bound);
    }
}

#[test]
fn cache_round_trip() {
    let alg = algebra();
    let q = BallQuery::new(&alg, ideal(&alg, &[3, 1], 1), 300.0, DEFAULT_CAP);
    let elems = enumerate_fast(&alg, &q).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cache = EnumerationCache::new(dir.path()).unwrap();
    let first = cache.load_or_compute(&alg, &q, || Ok(elems.clone())).unwrap();
    let second = cache
        .load_or_compute(&alg, &q, || panic!("cache miss on second load"))
        .unwrap();
    assert_eq!(quats(&first), quats(&second));
    let path = cache.path_for(&alg, &q);
    let bytes = std::fs::read(&path).unwrap();
    write_cache(&path, &alg, &q, &second).unwrap();
    assert_eq!(bytes, std::fs::read(&path).unwrap());
    let other = BallQuery::new(&alg, ideal(&alg, &[3, 1], 1), 301.0, DEFAULT_CAP);
    assert!(read_cache(&path, &alg, &other).unwrap().is_none());
    assert_ne!(cache_key(&alg, &q), cache_key(&alg, &other));
}
