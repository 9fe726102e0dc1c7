//! Spherical transforms, a convolution and an elliptic orbital integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use spectral_gap::harmonic::{
    check, convolve, orbital_elliptic, orbital_elliptic_expected, spherical_transform, RadialWeightFunction,
    SphericalPhiM, DEFAULT_THETA_MIN,
};
use spectral_gap::hyperbolic::{a_t, k_theta};
use spectral_gap::quadrature::Tolerance;

fn main() -> spectral_gap::Result<()> {
    let tol = Tolerance {
        abs: 1e-8,
        rel: 1e-10,
        ..Tolerance::default()
    };
    for m in [2, 3, 4] {
        let phi = SphericalPhiM::new(m)?;
        let r = Complex64::new(0.0, m as f64 - 0.5);
        let v = spherical_transform(&phi, r, &tol)?;
        println!("Phi_{m}: transform at r = i(m - 1/2) is {:.12}, closed form {:.12}", v.value.re, phi.transform_peak());
    }

    let f = RadialWeightFunction::bump(0, 1.0)?;
    for r in [0.0, 1.0, 3.0] {
        let s = spherical_transform(&f, Complex64::new(r, 0.0), &tol)?;
        println!("bump: S f({r}) = {:.10}", s.value.re);
    }
    let g = k_theta(0.3).mul(&a_t(0.7));
    let c = convolve(&f, &check(&f), &g, &tol)?;
    println!("(f * f_check)(g) = {:.10} +- {:.1e}", c.value.re, c.error);

    for m in [2, 3] {
        let phi = SphericalPhiM::new(m)?;
        for theta in [0.5 * PI, PI] {
            // normalized so the closed form has no constant in front
            let o = orbital_elliptic(&phi, theta, DEFAULT_THETA_MIN, &tol)?.value * phi.normalization();
            println!(
                "orbital Phi_{m} at theta = {theta:.4}: {:.10}, expected {:.10}",
                o,
                orbital_elliptic_expected(m, theta)
            );
        }
    }
    Ok(())
}
