//! `f1 * f2 (x) = int_G f1(g) f2(g^{-1} x) dg` for two weight-`m` functions.
//!
//! With `g = k_theta a_t k_theta'` the `theta'` dependence cancels, so
//! `f1 * f2 (a_s) = int_0^R1 sinh t u1(t) int e^{i m theta} f2(a_{-t} k_{-theta} a_s) dtheta dt`.

use std::sync::Arc;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{Profile, RadialWeightFunction, WeightFunction};
use crate::error::{Error, Result};
use crate::hyperbolic::{half_entries, Motion};
use crate::quadrature::{integrate, integrate_nested, Chebyshev, Estimate, Tolerance};

fn compact(f: &dyn WeightFunction) -> Result<f64> {
    f.support()
        .ok_or_else(|| Error::Precondition("convolution needs compactly supported functions".into()))
}

/// Largest `theta` in `[0, pi]` with `H(a_{-t} k_{-theta} a_s) <= r2`, or `None` if the set is empty.
///
/// `cosh H = cos^2(theta/2) cosh(t - s) + sin^2(theta/2) cosh(t + s)`.
fn theta_range(t: f64, s: f64, r2: f64) -> Option<f64> {
    let lo = (t - s).cosh();
    let den = 2.0 * t.sinh() * s.sinh();
    let num = r2.cosh() - lo;
    if num < 0.0 {
        return None;
    }
    if den <= num {
        return Some(std::f64::consts::PI);
    }
    Some(2.0 * (num / den).sqrt().asin())
}

/// `f1 * f2 (a_s)`.
pub fn convolve_at(f1: &dyn WeightFunction, f2: &dyn WeightFunction, s: f64, tol: &Tolerance) -> Result<Estimate> {
    if f1.weight() != f2.weight() {
        return Err(Error::Precondition(format!(
            "weights differ: {} and {}",
            f1.weight(),
            f2.weight()
        )));
    }
    let (r1, r2) = (compact(f1)?, compact(f2)?);
    let s = s.abs();
    if s > r1 + r2 {
        return Ok(Estimate::real(0.0, 0.0));
    }
    let m = f1.weight() as i32;
    let t_lo = (s - r2).max(0.0);
    let t_hi = r1.min(s + r2);
    if t_lo >= t_hi {
        return Ok(Estimate::real(0.0, 0.0));
    }
    let inner_tol = tol.inner(t_hi - t_lo);
    let (es, ems) = ((0.5 * s).exp(), (-0.5 * s).exp());
    let outer = |t: f64| -> Result<Estimate> {
        let Some(th) = theta_range(t, s, r2) else {
            return Ok(Estimate::real(0.0, 0.0));
        };
        let sh = t.sinh();
        let u1 = f1.radial(t);
        if sh == 0.0 || u1 == Complex64::new(0.0, 0.0) {
            return Ok(Estimate::real(0.0, 0.0));
        }
        let (et, emt) = ((0.5 * t).exp(), (-0.5 * t).exp());
        let e = integrate(
            |theta| {
                let (sn, c) = (0.5 * theta).sin_cos();
                let g = Matrix2::new(c * es * emt, -sn * ems * emt, sn * es * et, c * ems * et);
                Complex64::from_polar(1.0, m as f64 * theta) * f2.eval_matrix(&g)
            },
            -th,
            th,
            &Tolerance {
                abs: inner_tol.abs / (sh * u1.norm()),
                ..inner_tol
            },
        )?;
        Ok(Estimate::new(e.value * u1 * sh, e.error * u1.norm() * sh))
    };
    // kinks where the theta range opens fully
    let mut breaks = vec![t_lo];
    let full = r2 - s;
    if full > t_lo && full < t_hi {
        breaks.push(full);
    }
    breaks.push(t_hi);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let piece = Tolerance {
        abs: tol.abs / (breaks.len() - 1) as f64,
        ..*tol
    };
    for w in breaks.windows(2) {
        let e = integrate_nested(&outer, w[0], w[1], &piece)?;
        value += e.value;
        error += e.error;
    }
    Ok(Estimate::new(value, error))
}

/// `f1 * f2 (g)`; exactly zero when `H(g) > R1 + R2`.
pub fn convolve(f1: &dyn WeightFunction, f2: &dyn WeightFunction, g: &Motion, tol: &Tolerance) -> Result<Estimate> {
    let (alpha, beta, gamma, delta) = half_entries(g.matrix());
    let s = 2.0 * gamma.hypot(delta).asinh();
    let base = convolve_at(f1, f2, s, tol)?;
    let m = f1.weight();
    if m == 0 {
        return Ok(base);
    }
    let w = Complex64::new(alpha, beta);
    Ok(Estimate::new((w / w.norm()).powi(2 * m as i32) * base.value, base.error))
}

/// `f^vee(g) = conj f(g^{-1})`; for weight `m` this conjugates the profile.
pub fn check(f: &RadialWeightFunction) -> RadialWeightFunction {
    let inner = f.clone();
    RadialWeightFunction::new(
        f.weight(),
        Profile::Custom(Arc::new(move |t| inner.radial(t).conj())),
        f.radius(),
    )
    .expect("radius already validated")
}

/// `f * f^vee (g)`.
pub fn convolve_dagger(f: &RadialWeightFunction, g: &Motion, tol: &Tolerance) -> Result<Estimate> {
    convolve(f, &check(f), g, tol)
}

/// `f1 * f2` as a weight function, its profile interpolated at `nodes`
/// Chebyshev points on `[0, R1 + R2]`. Returns the function and the
/// largest quadrature error at the nodes.
pub fn convolution_function(
    f1: &RadialWeightFunction,
    f2: &RadialWeightFunction,
    nodes: usize,
    tol: &Tolerance,
) -> Result<(RadialWeightFunction, f64)> {
    let r = f1.radius() + f2.radius();
    let xs = Chebyshev::nodes(0.0, r, nodes);
    let est: Vec<Estimate> = xs
        .par_iter()
        .map(|&s| convolve_at(f1, f2, s, tol))
        .collect::<Result<_>>()?;
    let err = est.iter().map(|e| e.error).fold(0.0, f64::max);
    let vals: Vec<Complex64> = est.iter().map(|e| e.value).collect();
    let cheb = Chebyshev::from_values(0.0, r, &vals)?;
    Ok((RadialWeightFunction::new(f1.weight(), Profile::Sampled(cheb), r)?, err))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub radius: f64,
    /// `(t, |f * f^vee (a_t)|, ratio to e^{R - t/2})`.
    pub samples: Vec<(f64, f64, f64)>,
    pub max_ratio: f64,
    pub argmax: f64,
}

/// `max_t |f * f^vee (a_t)| / e^{R - t/2}` over `samples + 1` points of `[0, 2R]`.
pub fn convolution_decay_check(f: &RadialWeightFunction, samples: usize, tol: &Tolerance) -> Result<DecayReport> {
    if f.weight() != 0 {
        return Err(Error::Precondition("decay check is for weight 0".into()));
    }
    let r = f.radius();
    let grid: Vec<f64> = (0..=samples).map(|k| r * k as f64 / samples.max(1) as f64).collect();
    if grid.iter().any(|&t| {
        let v = f.radial(t);
        v.im.abs() > 1e-12 || v.re < -1e-12 || v.re > 1.0 + 1e-12
    }) {
        return Err(Error::Precondition("decay check needs 0 <= f <= 1".into()));
    }
    let fv = check(f);
    let ts: Vec<f64> = (0..=samples).map(|k| 2.0 * r * k as f64 / samples.max(1) as f64).collect();
    let vals: Vec<f64> = ts
        .par_iter()
        .map(|&t| convolve_at(f, &fv, t, tol).map(|e| e.value.norm()))
        .collect::<Result<_>>()?;
    let samples: Vec<(f64, f64, f64)> = ts
        .iter()
        .zip(&vals)
        .map(|(&t, &v)| (t, v, v / (r - 0.5 * t).exp()))
        .collect();
    let (argmax, max_ratio) = samples
        .iter()
        .map(|s| (s.0, s.2))
        .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok(DecayReport {
        radius: r,
        samples,
        max_ratio,
        argmax,
    })
}
