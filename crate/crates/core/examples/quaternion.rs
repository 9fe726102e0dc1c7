//! The algebra (5 + sqrt 2, -1) over Q(sqrt 2): embeddings, norms, displacement.

use spectral_gap::enumeration::{enumerate_fast, BallQuery};
use spectral_gap::hyperbolic::{compose_kak, displacement, kak, Motion};
use spectral_gap::number_field::{IdealZBasis, TotallyRealField};
use spectral_gap::quaternion::QuaternionAlgebra;

fn main() -> spectral_gap::Result<()> {
    let f = TotallyRealField::real_quadratic(2)?;
    let alg = QuaternionAlgebra::new(&f, f.element(&[5, 1])?, f.integer(-1), Some(2))?;
    println!("split places: {} of {}", alg.split_places(), alg.degree());

    // shortest norm-one element with |trace| > 2 at both places
    let q = BallQuery::new(&alg, IdealZBasis::unit(&f), 403.0, 10.0);
    let elems = enumerate_fast(&alg, &q)?;
    let e = elems
        .iter()
        .filter(|e| e.traces.iter().all(|t| t.abs() > 2.0))
        .min_by(|a, b| a.frob_sq[0].total_cmp(&b.frob_sq[0]))
        .expect("no hyperbolic element in the ball");
    let x = e.quat.clone();
    println!("x = {:?}", x.flat());
    println!("N(x) = {:?}, Tr(x) = {:?}", alg.norm(&x).coords(), alg.trace(&x).coords());
    println!("x in R^1(1): {}", alg.is_in_r1(&x, &IdealZBasis::unit(&f)));

    for j in 1..=alg.split_places() {
        let m = alg.embed_matrix(&x, j)?;
        let g = Motion::from_matrix(m)?;
        let k = kak(&g);
        let back = compose_kak(&k);
        println!(
            "place {j}: ||x||^2 = {:.6}, H = {:.6} (matrix {:.6}), KAK t = {:.6}, reassembly error {:.1e}",
            alg.frob_norm_sq(&x, j)?,
            alg.displacement(&x, j)?,
            displacement(&g),
            k.t,
            (back.matrix() - g.matrix()).norm().min((back.matrix() + g.matrix()).norm())
        );
    }
    let x2 = alg.mul(&x, &x);
    println!("x^2 = {:?}, norm one: {}", x2.flat(), alg.is_norm_one(&x2));
    Ok(())
}
