//! Exponent thresholds, the eigenvalue floor and the bound surfaces.

use spectral_gap::bounds::{
    cor_exponents, default_psi, eigenvalue_floor, sandwich_check, thm1_rhs, thm2_rhs, threshold_solver, Mode,
};

fn main() -> spectral_gap::Result<()> {
    for mode in [Mode::General, Mode::Spherical] {
        let t = threshold_solver(mode);
        println!("{mode:?}: alpha = {:.10}, p* = {:.10} ({} bisection steps)", t.alpha, t.p_star, t.iterations);
    }
    let fl = eigenvalue_floor();
    println!("s* = {:.7}, lambda* = {:.7}", fl.s_star, fl.lambda_star);

    for alpha in [1.0, 2.0, 4.0] {
        let (lo, up) = cor_exponents(alpha)?;
        println!("alpha = {alpha}: exponents ({lo:.4}, {up:.4})");
    }

    println!("      T         V   thm1(p=12)   thm2(p=12, c=1)");
    for t in [2.0, 8.0, 32.0] {
        for v in [10.0, 1e3, 1e6] {
            println!(
                "{t:>7} {v:>9} {:>12.5e} {:>12.5e}",
                thm1_rhs(t, v, 12.0, 0.0)?,
                thm2_rhs(t, v, 12.0, 1.0, 0.0)?
            );
        }
    }

    for r in [1.0, 5.0] {
        let s = sandwich_check(r, 100, default_psi)?;
        println!(
            "sandwich R = {r}: {} upper and {} lower violations of {}",
            s.upper_violations, s.lower_violations, s.points
        );
    }
    Ok(())
}
