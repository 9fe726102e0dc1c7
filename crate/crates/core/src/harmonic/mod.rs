//! Weight-`m` bi-K-equivariant functions on `PSL(2, R)`: spherical transform,
//! convolution, the functions `Phi_m`, orbital integrals.
//!
//! Coordinates: `g = k_theta a_t k_theta'` with Haar measure
//! `2 pi sinh t dt dtheta/2pi dtheta'/2pi`; on `H`, geodesic polar coordinates
//! around `i` give `dz = sinh t dt dphi`.

mod convolution;
mod orbital;
mod transform;


pub use convolution::{
    check, convolution_decay_check, convolution_function, convolve, convolve_at, convolve_dagger, DecayReport,
};
pub use orbital::{
    orbital_elliptic, orbital_elliptic_expected, orbital_elliptic_spectral, phi_mass_bound_check,
    sine_ratio_bound_holds, PhiMassReport, DEFAULT_THETA_MIN, FOURIER_CALIBRATION,
};
pub use transform::{
    fourier_even, haar_mass, plancherel_identity_check, spectral_samples, spherical_transform, PlancherelReport,
    SpectralSamples,
};

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hyperbolic::{half_entries, Motion};
use crate::quadrature::Chebyshev;

/// A function with `f(k g k') = chi_m(k k') f(g)`, described by its values on `A`.
pub trait WeightFunction: Sync {
    fn weight(&self) -> i64;

    /// `f(a_t)` for `t >= 0`.
    fn radial(&self, t: f64) -> Complex64;

    /// Support radius, `None` for functions that only decay.
    fn support(&self) -> Option<f64>;

    /// Radius beyond which the Haar mass of `|f|` is below `tol`.
    fn truncation(&self, tol: f64) -> Result<f64>;

    /// `f(g)` for a matrix of determinant one.
    fn eval_matrix(&self, g: &Matrix2<f64>) -> Complex64 {
        let (alpha, beta, gamma, delta) = half_entries(g);
        let t = 2.0 * gamma.hypot(delta).asinh();
        if let Some(r) = self.support() {
            if t > r {
                return Complex64::new(0.0, 0.0);
            }
        }
        let u = self.radial(t);
        let m = self.weight();
        if m == 0 {
            return u;
        }
        // alpha + i beta = cosh(t/2) e^{i(theta + theta')/2}
        let w = Complex64::new(alpha, beta);
        (w / w.norm()).powi(2 * m as i32) * u
    }

    fn eval(&self, g: &Motion) -> Complex64 {
        self.eval_matrix(g.matrix())
    }
}

/// Radial profile `u` on `[0, R]`.
#[derive(Clone)]
pub enum Profile {
    /// `exp(1 - 1/(1 - (t/R)^2))`, equal to 1 at the identity.
    Bump,
    /// 1 on `[0, R]`.
    Indicator,
    /// Chebyshev interpolant on `[0, R]`.
    Sampled(Chebyshev),
    Custom(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Bump => write!(f, "Bump"),
            Profile::Indicator => write!(f, "Indicator"),
            Profile::Sampled(c) => write!(f, "Sampled({} coefficients)", c.coeffs().len()),
            Profile::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// `f(k_theta a_t k_theta') = e^{i m (theta + theta')} scale u(t)`, `u = 0` beyond `R`.
#[derive(Clone, Debug)]
pub struct RadialWeightFunction {
    m: i64,
    profile: Profile,
    radius: f64,
    scale: Complex64,
}

impl RadialWeightFunction {
    pub fn new(m: i64, profile: Profile, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("support radius {radius} must be positive")));
        }
        if let Profile::Sampled(c) = &profile {
            let (a, b) = c.interval();
            if a != 0.0 || (b - radius).abs() > 1e-12 * radius {
                return Err(Error::Domain(format!("sampled profile on [{a}, {b}], support {radius}")));
            }
        }
        Ok(RadialWeightFunction {
            m,
            profile,
            radius,
            scale: Complex64::new(1.0, 0.0),
        })
    }

    pub fn bump(m: i64, radius: f64) -> Result<Self> {
        RadialWeightFunction::new(m, Profile::Bump, radius)
    }

    pub fn indicator(m: i64, radius: f64) -> Result<Self> {
        RadialWeightFunction::new(m, Profile::Indicator, radius)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.scale *= c;
        out
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    fn raw(&self, t: f64) -> Complex64 {
        if !(0.0..=self.radius).contains(&t) {
            return Complex64::new(0.0, 0.0);
        }
        match &self.profile {
            Profile::Bump => {
                let x = t / self.radius;
                if x >= 1.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((1.0 - 1.0 / (1.0 - x * x)).exp(), 0.0)
                }
            }
            Profile::Indicator => Complex64::new(1.0, 0.0),
            Profile::Sampled(c) => c.eval(t),
            Profile::Custom(u) => u(t),
        }
    }

    /// Upper bound for `|u|` on `[0, R]`.
    pub fn sup_bound(&self) -> f64 {
        let base = match &self.profile {
            Profile::Bump | Profile::Indicator => 1.0,
            Profile::Sampled(c) => c.coeffs().iter().map(|a| a.norm()).sum(),
            Profile::Custom(_) => (0..=1000)
                .map(|k| self.raw(self.radius * k as f64 / 1000.0).norm())
                .fold(0.0, f64::max),
        };
        base * self.scale.norm()
    }
}

impl WeightFunction for RadialWeightFunction {
    fn weight(&self) -> i64 {
        self.m
    }

    fn radial(&self, t: f64) -> Complex64 {
        self.scale * self.raw(t)
    }

    fn support(&self) -> Option<f64> {
        Some(self.radius)
    }

    fn truncation(&self, _tol: f64) -> Result<f64> {
        Ok(self.radius)
    }
}

/// `Phi_m(k a_t k') = chi_m(k k') / cosh(t/2)^{2|m|}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalPhiM {
    m: i64,
}

impl SphericalPhiM {
    pub fn new(m: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("Phi_m needs |m| >= 1".into()));
        }
        Ok(SphericalPhiM { m })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// `4 pi / (2|m| - 1)`, the transform at `r = +-i(|m| - 1/2)`.
    pub fn transform_peak(&self) -> f64 {
        4.0 * std::f64::consts::PI / (2.0 * self.m.abs() as f64 - 1.0)
    }

    /// The normalized test function `(2|m| - 1)/(4 pi) Phi_m`.
    pub fn normalization(&self) -> f64 {
        1.0 / self.transform_peak()
    }
}

impl WeightFunction for SphericalPhiM {
    fn weight(&self) -> i64 {
        self.m
    }

    fn radial(&self, t: f64) -> Complex64 {
        Complex64::new((0.5 * t).cosh().powi(-2 * self.m.abs() as i32), 0.0)
    }

    fn support(&self) -> Option<f64> {
        None
    }

    /// Solves `2 pi int_T^inf sinh t cosh(t/2)^{-2|m|} dt = 8 pi c^{2 - 2|m|} / (2|m| - 2) = tol`
    /// for `c = cosh(T/2)`.
    fn truncation(&self, tol: f64) -> Result<f64> {
        let k = self.m.abs() as f64;
        if k < 2.0 {
            return Err(Error::Domain("Phi_m with |m| = 1 is not integrable".into()));
        }
        let c = (8.0 * std::f64::consts::PI / ((2.0 * k - 2.0) * tol)).powf(1.0 / (2.0 * k - 2.0));
        Ok(2.0 * c.max(1.0).acosh())
    }

    fn eval_matrix(&self, g: &Matrix2<f64>) -> Complex64 {
        let (alpha, beta, _, _) = half_entries(g);
        let s = self.m.signum() as f64;
        Complex64::new(alpha, -s * beta).powi(-2 * self.m.abs() as i32)
    }
}
