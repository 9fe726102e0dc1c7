//! Elliptic orbital integrals `int_H f(p_z k_theta p_z^{-1}) dz` and the
//! `Phi_m` mass bound over conjugates of an elliptic element.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{fourier_even, SpectralSamples, SphericalPhiM, WeightFunction};
use crate::error::{Error, Result};
use crate::hyperbolic::{ball_volume, Motion};
use crate::quadrature::{integrate, integrate_nested, integrate_real, Estimate, Tolerance};

/// Angles closer than this to `0 mod 2 pi` are rejected.
pub const DEFAULT_THETA_MIN: f64 = 1e-3;

/// Normalization between the cosine transform of `h` and the elliptic orbital
/// integral of a weight-0 function, fitted once on the bump of radius 1 at
/// `theta = pi/2` and frozen (see the `fourier_calibration` test).
pub const FOURIER_CALIBRATION: f64 = 1.0;

/// `int_H f(p_z k_theta p_z^{-1}) dz`.
///
/// The integrand is invariant under rotating `z` about `i`, so this is
/// `2 pi int_0^inf sinh t f(a_t k_theta a_{-t}) dt`.
pub fn orbital_elliptic<F: WeightFunction + ?Sized>(
    f: &F,
    theta: f64,
    theta_min: f64,
    tol: &Tolerance,
) -> Result<Estimate> {
    let th = theta.rem_euclid(2.0 * PI);
    if th < theta_min || th > 2.0 * PI - theta_min {
        return Err(Error::Domain(format!(
            "theta = {theta} within {theta_min} of 0 mod 2 pi; the orbital integral blows up"
        )));
    }
    let (sn, c) = (0.5 * th).sin_cos();
    // cosh(H/2)^2 = 1 + sin^2(theta/2) sinh^2 t
    let t_max = match f.support() {
        Some(r) => ((0.5 * r).sinh() / sn.abs()).asinh(),
        None => {
            let k = f.weight().unsigned_abs() as f64;
            if k < 1.0 {
                return Err(Error::Precondition("unbounded weight-0 function".into()));
            }
            // tail of 2 pi sinh t (1 + sn^2 sinh^2 t)^{-k}, bounded by pi (2/sn)^{2k} e^{-(2k-1)t} / (2k-1)
            let a = PI * (2.0 / sn.abs()).powf(2.0 * k) * 10.0 / ((2.0 * k - 1.0) * tol.abs);
            (a.ln() / (2.0 * k - 1.0)).max(2.0)
        }
    };
    integrate_nested(
        |t| {
            let (et, emt) = (t.exp(), (-t).exp());
            let g = Matrix2::new(c, sn * et, -sn * emt, c);
            Ok(Estimate::new(f.eval_matrix(&g) * (2.0 * PI * t.sinh()), 0.0))
        },
        0.0,
        t_max,
        tol,
    )
}

/// `e^{i m theta} / (1 - e^{sgn(m) i theta})`, the orbital integral of `(2|m| - 1)/(4 pi) Phi_m`.
pub fn orbital_elliptic_expected(m: i64, theta: f64) -> Complex64 {
    let s = m.signum() as f64;
    Complex64::from_polar(1.0, m as f64 * theta) / (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, s * theta))
}

/// `(1/2) int_R h^(u) cosh(u/2) / (cosh u - cos theta) du`, with `h^` from the
/// spectral samples, times [`FOURIER_CALIBRATION`]. `u_max` is the support radius.
pub fn orbital_elliptic_spectral(samples: &SpectralSamples, theta: f64, u_max: f64, tol: &Tolerance) -> Result<Estimate> {
    let ct = theta.cos();
    // even integrand: (1/2) int_R = int_0^inf
    let mut first_err = None;
    let e = integrate(
        |u| match fourier_even(samples, u) {
            Ok(hh) => hh * ((0.5 * u).cosh() / (u.cosh() - ct)),
            Err(e) => {
                first_err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        u_max,
        tol,
    )?;
    if let Some(e) = first_err {
        return Err(e);
    }
    Ok(Estimate::new(e.value * FOURIER_CALIBRATION, e.error * FOURIER_CALIBRATION))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiMassReport {
    pub m: i64,
    pub rho: f64,
    /// `int_{B_rho} |Phi_m(g^{-1} gamma g)| dg`.
    pub lhs: Estimate,
    /// `log2(m)/sqrt(m) + vol(B_rho)/m`.
    pub rhs: f64,
    pub kappa: f64,
}

/// Mass of `|Phi_m|` over conjugates of an elliptic `gamma` by `g` in the ball `B_rho`.
///
/// Needs `|Tr gamma| < 2 - 1/sqrt(m)`.
pub fn phi_mass_bound_check(m: i64, rho: f64, gamma: &Motion, tol: &Tolerance) -> Result<PhiMassReport> {
    if m < 2 {
        return Err(Error::Precondition(format!("m = {m}, need m >= 2")));
    }
    let tr = gamma.matrix().trace().abs();
    let gap = 2.0 - 1.0 / (m as f64).sqrt();
    if tr >= gap {
        return Err(Error::Precondition(format!("|Tr gamma| = {tr} not below 2 - 1/sqrt(m) = {gap}")));
    }
    let phi = SphericalPhiM::new(m)?;
    let gm = *gamma.matrix();
    let inner_tol = tol.inner(rho);
    // g = k_theta a_t k_theta'; |Phi_m| is K-conjugation invariant so theta' drops out
    let lhs = integrate_nested(
        |t| {
            let a = Matrix2::new((0.5 * t).exp(), 0.0, 0.0, (-0.5 * t).exp());
            let a_inv = Matrix2::new((-0.5 * t).exp(), 0.0, 0.0, (0.5 * t).exp());
            let sh = t.sinh();
            if sh == 0.0 {
                return Ok(Estimate::real(0.0, 0.0));
            }
            let (v, e) = integrate_real(
                |th| {
                    let (s, c) = (0.5 * th).sin_cos();
                    let k = Matrix2::new(c, s, -s, c);
                    let k_inv = Matrix2::new(c, -s, s, c);
                    phi.eval_matrix(&(a_inv * k_inv * gm * k * a)).norm()
                },
                0.0,
                2.0 * PI,
                &Tolerance {
                    abs: inner_tol.abs / sh,
                    ..inner_tol
                },
            )?;
            Ok(Estimate::real(v * sh, e * sh))
        },
        0.0,
        rho,
        tol,
    )?;
    let mf = m as f64;
    let rhs = mf.log2() / mf.sqrt() + ball_volume(rho)? / mf;
    Ok(PhiMassReport {
        m,
        rho,
        kappa: lhs.value.re / rhs,
        lhs,
        rhs,
    })
}

/// `|sin((m - 1/2) theta) / sin(theta/2)| <= 2m - 1` on `points` angles in `(0, 2 pi)`.
pub fn sine_ratio_bound_holds(m: u32, points: usize) -> bool {
    let b = 2.0 * m as f64 - 1.0;
    (1..points).all(|k| {
        let th = 2.0 * PI * k as f64 / points as f64;
        let v = ((m as f64 - 0.5) * th).sin() / (0.5 * th).sin();
        v.abs() <= b * (1.0 + 1e-12)
    })
}
