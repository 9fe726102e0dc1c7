//! PSL_2 over finite quotients: orders, character degrees, reduction of lattice elements.

use spectral_gap::congruence_groups::{
    build_psl2, character_degrees, conjugacy_classes, generated_subgroup, group_order_formula, ReductionMap,
};
use spectral_gap::enumeration::{enumerate_fast, BallQuery};
use spectral_gap::number_field::{IdealZBasis, TotallyRealField};
use spectral_gap::quaternion::QuaternionAlgebra;

fn main() -> spectral_gap::Result<()> {
    let f = TotallyRealField::real_quadratic(2)?;
    for g in [[0, 1], [3, 1], [3, 0], [5, 0], [0, 2]] {
        let a = IdealZBasis::principal(&f, &f.element(&g)?)?;
        let grp = build_psl2(&a, 32)?;
        let cc = conjugacy_classes(&grp, 1)?;
        let deg = character_degrees(&grp, &cc, 1)?;
        println!(
            "({}+{}w) N = {:>2}: |G| = {:>5} (formula {}), {} classes, degrees {:?}, min faithful {:?}",
            g[0],
            g[1],
            a.norm(),
            grp.order(),
            group_order_formula(&a)?,
            deg.class_count,
            deg.degrees,
            deg.min_faithful()
        );
    }

    // reduce short lattice elements mod (3 + w) and see what they generate
    let alg = QuaternionAlgebra::new(&f, f.element(&[5, 1])?, f.integer(-1), Some(2))?;
    let a = IdealZBasis::principal(&f, &f.element(&[3, 1])?)?;
    let grp = build_psl2(&a, 32)?;
    let red = ReductionMap::new(&alg, &grp)?;
    let elems = enumerate_fast(&alg, &BallQuery::new(&alg, IdealZBasis::unit(&f), 403.0, 10.0))?;
    let gens = elems
        .iter()
        .map(|e| red.reduce(&grp, &e.quat))
        .collect::<spectral_gap::Result<Vec<u32>>>()?;
    println!(
        "{} elements of norm-one units reduce into a subgroup of order {} in PSL_2(F_7)",
        elems.len(),
        generated_subgroup(&grp, &gens)
    );
    Ok(())
}
