//! Norm-one elements of level a in a ball: fast path against brute force.

use std::time::Instant;

use spectral_gap::enumeration::{
    check_invariants, enumerate_brute, enumerate_fast, trace_spectrum, BallQuery, PlaceRole,
};
use spectral_gap::number_field::{IdealZBasis, TotallyRealField};
use spectral_gap::quaternion::QuaternionAlgebra;

fn main() -> spectral_gap::Result<()> {
    let f = TotallyRealField::real_quadratic(2)?;
    let alg = QuaternionAlgebra::new(&f, f.element(&[5, 1])?, f.integer(-1), Some(2))?;
    let x = 1500.0;
    for (label, a) in [
        ("(1)", IdealZBasis::unit(&f)),
        ("(sqrt 2)", IdealZBasis::principal(&f, &f.element(&[0, 1])?)?),
        ("(3+w)", IdealZBasis::principal(&f, &f.element(&[3, 1])?)?),
    ] {
        let q = BallQuery::new(&alg, a.clone(), x, 10.0);
        let t = Instant::now();
        let fast = enumerate_fast(&alg, &q)?;
        let tf = t.elapsed();
        let t = Instant::now();
        let brute = enumerate_brute(&alg, &q)?;
        let tb = t.elapsed();
        println!(
            "{label:>9}: {} elements (fast {:?}, brute {} in {:?}), invariant violations {}",
            fast.len(),
            tf,
            brute.len(),
            tb,
            check_invariants(&alg, &a, &fast)?.len()
        );
    }

    // trace window at the second place
    let q = BallQuery::new(&alg, IdealZBasis::unit(&f), x, 10.0)
        .with_roles(vec![PlaceRole::TraceWindow { eta: 0.5, cap: 10.0 }]);
    let elems = enumerate_fast(&alg, &q)?;
    println!("{}: {} elements", q.describe(), elems.len());
    let spec = trace_spectrum(&alg, &elems);
    let mut distinct = spec.clone();
    distinct.dedup_by(|a, b| a.exact == b.exact);
    println!("{} distinct traces", distinct.len());
    for t in distinct.iter().take(8) {
        let mult = spec.iter().filter(|s| s.exact == t.exact).count();
        println!("  trace {:?} x{mult} embeddings {:?}", t.exact.coords(), t.embedded);
    }
    Ok(())
}
