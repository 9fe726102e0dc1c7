//! Spherical transform `Sf(r) = int_H f(p_z) Im(z)^{1/2 + ir} dz`, its
//! inversion at the identity and the cosine transform of `h`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::WeightFunction;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_nested, integrate_pieces, Estimate, Tolerance};

/// The point `z` at geodesic polar coordinates `(t, phi)` around `i`, as `(x, y)`.
///
/// Via the disk: `z = i(1 + w)/(1 - w)` with `w = tanh(t/2) e^{i phi}`.
#[inline]
pub(crate) fn polar_point(t: f64, phi: f64) -> (f64, f64) {
    let rho = (0.5 * t).tanh();
    let one_minus = 2.0 / (t.exp() + 1.0);
    let s = (0.5 * phi).sin();
    let d = one_minus * one_minus + 4.0 * rho * s * s;
    let sech2 = 1.0 / (0.5 * t).cosh().powi(2);
    (-2.0 * rho * phi.sin() / d, sech2 / d)
}

/// `f(p_z)` for `z` at polar coordinates `(t, phi)`.
#[inline]
fn f_at_pz<F: WeightFunction + ?Sized>(f: &F, t: f64, x: f64, y: f64) -> Complex64 {
    let u = f.radial(t);
    let m = f.weight();
    if m == 0 {
        return u;
    }
    // p_z has alpha + i beta = (y + 1 + i x) / (2 sqrt y)
    let w = Complex64::new(y + 1.0, x);
    (w / w.norm()).powi(2 * m as i32) * u
}

/// `Sf(r)` by nested adaptive quadrature in polar coordinates; the angular
/// integral is split at `pi` where `Im z` is smallest.
pub fn spherical_transform<F: WeightFunction + ?Sized>(f: &F, r: Complex64, tol: &Tolerance) -> Result<Estimate> {
    let t_max = match f.support() {
        Some(rad) => rad,
        None => f.truncation(tol.abs / 10.0)?,
    };
    let s = Complex64::new(0.5, 0.0) + Complex64::i() * r;
    let inner_tol = tol.inner(t_max);
    let outer = |t: f64| -> Result<Estimate> {
        if t == 0.0 {
            return Ok(Estimate::real(0.0, 0.0));
        }
        let sh = t.sinh();
        let e = integrate_pieces(
            |phi| {
                let (x, y) = polar_point(t, phi);
                Ok(Estimate::new(f_at_pz(f, t, x, y) * (s * y.ln()).exp(), 0.0))
            },
            &[0.0, PI, 2.0 * PI],
            &Tolerance {
                abs: inner_tol.abs / sh.max(1e-300),
                ..inner_tol
            },
        )?;
        Ok(Estimate::new(e.value * sh, e.error * sh))
    };
    integrate_nested(outer, 0.0, t_max, tol)
}

/// `int_G f dg = 2 pi int u(t) sinh t dt` for weight 0, and 0 otherwise.
pub fn haar_mass<F: WeightFunction + ?Sized>(f: &F, tol: &Tolerance) -> Result<Estimate> {
    if f.weight() != 0 {
        return Ok(Estimate::real(0.0, 0.0));
    }
    let t_max = match f.support() {
        Some(r) => r,
        None => f.truncation(tol.abs / 10.0)?,
    };
    integrate_nested(
        |t| Ok(Estimate::new(f.radial(t) * (2.0 * PI * t.sinh()), 0.0)),
        0.0,
        t_max,
        tol,
    )
}

/// `h = Sf` on the uniform grid `r_k = k r_max / n`, `k = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSamples {
    pub r: Vec<f64>,
    pub h: Vec<Complex64>,
    /// Largest quadrature error over the grid.
    pub max_error: f64,
}

impl SpectralSamples {
    pub fn step(&self) -> f64 {
        self.r[1] - self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Composite Simpson rule for `int_0^{r_max} g(r, h(r)) dr`.
    pub fn simpson<G: Fn(f64, Complex64) -> Complex64>(&self, g: G) -> Complex64 {
        let n = self.r.len() - 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, (&r, &h)) in self.r.iter().zip(&self.h).enumerate() {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += g(r, h) * w;
        }
        acc * (self.step() / 3.0)
    }
}

pub fn spectral_samples<F: WeightFunction + ?Sized>(
    f: &F,
    r_max: f64,
    n: usize,
    tol: &Tolerance,
) -> Result<SpectralSamples> {
    if n < 2 || n % 2 != 0 || !(r_max > 0.0) {
        return Err(Error::Precondition("spectral grid needs an even n >= 2 and r_max > 0".into()));
    }
    let r: Vec<f64> = (0..=n).map(|k| r_max * k as f64 / n as f64).collect();
    let est: Vec<Estimate> = r
        .par_iter()
        .map(|&rk| spherical_transform(f, Complex64::new(rk, 0.0), tol))
        .collect::<Result<_>>()?;
    Ok(SpectralSamples {
        max_error: est.iter().map(|e| e.error).fold(0.0, f64::max),
        h: est.into_iter().map(|e| e.value).collect(),
        r,
    })
}

/// `h^(u) = (1/2 pi) int_R h(r) e^{-iru} dr = (1/pi) int_0^inf h(r) cos(ru) dr` for even `h`,
/// truncated at the end of the grid.
pub fn fourier_even(samples: &SpectralSamples, u: f64) -> Result<Complex64> {
    // a few points per period of cos(ru)
    if u.abs() * samples.step() > PI / 4.0 {
        return Err(Error::Precondition(format!(
            "r grid step {} too coarse for u = {u}",
            samples.step()
        )));
    }
    Ok(samples.simpson(|r, h| h * (r * u).cos()) / PI)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlancherelReport {
    /// `f(1) = u(0)`.
    pub identity_value: Complex64,
    /// `(1/4 pi) int_R h(r) r tanh(pi r) dr` over the grid.
    pub spectral_value: Complex64,
    pub relative_error: f64,
    /// The same integral over the last tenth of the grid, a proxy for the truncated tail.
    pub tail_estimate: f64,
}

/// Compares `f(1)` with the spectral integral for a weight-0 function.
pub fn plancherel_identity_check<F: WeightFunction + ?Sized>(
    f: &F,
    samples: &SpectralSamples,
    tol: f64,
) -> Result<PlancherelReport> {
    if f.weight() != 0 {
        return Err(Error::Precondition("Plancherel check is for weight 0".into()));
    }
    let identity_value = f.radial(0.0);
    let g = |r: f64, h: Complex64| h * (r * (PI * r).tanh());
    let spectral_value = samples.simpson(g) / (2.0 * PI);
    let cut = samples.r_max() * 0.9;
    let tail_estimate = samples
        .r
        .iter()
        .zip(&samples.h)
        .filter(|(r, _)| **r >= cut)
        .map(|(r, h)| g(*r, *h).norm())
        .sum::<f64>()
        * samples.step()
        / (2.0 * PI);
    let relative_error = (spectral_value - identity_value).norm() / identity_value.norm();
    if tail_estimate > tol * identity_value.norm() {
        return Err(Error::Insufficient(format!(
            "spectral tail {tail_estimate:.3e} exceeds tolerance {tol:.1e}; extend r_max"
        )));
    }
    Ok(PlancherelReport {
        identity_value,
        spectral_value,
        relative_error,
        tail_estimate,
    })
}

/// `int_G f dg` by quadrature over `(x, y)` in the upper half plane, for weight 0.
///
/// Independent of the polar parametrization; used only as a cross-check.
#[cfg(test)]
pub(crate) fn haar_mass_cartesian<F: WeightFunction + ?Sized>(f: &F, tol: &Tolerance) -> Result<f64> {
    use crate::quadrature::integrate_real;
    let r = f
        .support()
        .ok_or_else(|| Error::Precondition("cartesian mass needs compact support".into()))?;
    // the disk d(z, i) <= R is |x|^2 + (y - cosh R)^2 <= sinh^2 R
    let (ch, sh) = (r.cosh(), r.sinh());
    let inner = tol.inner(2.0 * sh);
    let (v, _) = integrate_real(
        |y| {
            let half = (sh * sh - (y - ch).powi(2)).max(0.0).sqrt();
            integrate_real(
                |x| {
                    let cd = (x * x + y * y + 1.0) / (2.0 * y);
                    f.radial(cd.max(1.0).acosh()).re / (y * y)
                },
                -half,
                half,
                &inner,
            )
            .map(|e| e.0)
            .unwrap_or(f64::NAN)
        },
        ch - sh,
        ch + sh,
        tol,
    )?;
    Ok(v)
}
