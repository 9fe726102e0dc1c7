//! Counting series N(x; a) on an exponential grid, with log-log slopes.

use spectral_gap::counting::{bound_report, count_series, exp_grid, exponent_fit};
use spectral_gap::enumeration::PlaceRole;
use spectral_gap::number_field::{IdealZBasis, TotallyRealField};
use spectral_gap::quaternion::QuaternionAlgebra;

fn main() -> spectral_gap::Result<()> {
    let f = TotallyRealField::real_quadratic(2)?;
    let alg = QuaternionAlgebra::new(&f, f.element(&[5, 1])?, f.integer(-1), Some(2))?;
    let xs = exp_grid(2, 9);
    let mut samples = Vec::new();
    for (label, roles) in [
        ("cap 10", vec![PlaceRole::Cap { cap: 10.0 }]),
        ("norm window k=4", vec![PlaceRole::NormWindow { k: 4.0 }]),
    ] {
        for a in [IdealZBasis::unit(&f), IdealZBasis::principal(&f, &f.element(&[0, 1])?)?] {
            let s = count_series(&alg, &a, &xs, &roles, 1_000_000_000)?;
            let series: Vec<(f64, u64)> = s.iter().map(|c| (c.x, c.count)).collect();
            let counts: Vec<u64> = s.iter().map(|c| c.count).collect();
            let fit = exponent_fit(&series)
                .map(|f| format!("slope {:.3}", f.slope))
                .unwrap_or_else(|e| format!("no fit: {e}"));
            println!("{label}, N(a) = {}: {counts:?}  {fit}", a.norm());
            if label == "cap 10" {
                samples.extend(s);
            }
        }
    }
    println!("{}", bound_report(&samples, 0.0).summary());
    Ok(())
}
