//! Ideals of Z[sqrt 2]: factorization, residues, and lattice points in a box.

use spectral_gap::number_field::{enumerate_in_box, EmbeddingBox, IdealZBasis, TotallyRealField};

fn main() -> spectral_gap::Result<()> {
    let f = TotallyRealField::real_quadratic(2)?;
    println!("field with min poly {:?}, roots {:?}, disc {}", f.min_poly(), f.roots(), f.discriminant());

    for (g, k) in [([3, 1], 1), ([3, 1], 2), ([0, 1], 3), ([7, 0], 1), ([5, 0], 1)] {
        let a = IdealZBasis::principal(&f, &f.element(&g)?)?.power(k);
        let parts: Vec<String> = a
            .factor()?
            .iter()
            .map(|p| format!("(N={} over {})^{}", p.prime.norm(), p.rational_prime, p.exponent))
            .collect();
        println!("({}+{}w)^{k}: norm {:>4} = {}", g[0], g[1], a.norm(), parts.join(" "));
    }

    // translate of a norm-7 ideal inside a box: at most vol/N + 1 points
    let a = IdealZBasis::principal(&f, &f.element(&[3, -1])?)?;
    let t0 = f.element(&[2, 5])?;
    let bx = EmbeddingBox::half_open(vec![-4.0, 1.5], vec![9.0, 8.0])?;
    let pts = enumerate_in_box(&a, &t0, &bx)?;
    println!(
        "box volume {:.2}: {} points of t0 + a, bound {:.2}",
        bx.volume(),
        pts.len(),
        bx.volume() / a.norm() as f64 + 1.0
    );
    for p in pts.iter().take(5) {
        println!("  {:?} -> {:?}", p.coords(), f.embed_all(p));
    }
    Ok(())
}
