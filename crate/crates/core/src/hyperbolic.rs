//! Geometry of `PSL(2, R)` acting on the upper half plane.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|det g - 1|` accepted by [`Motion::new`].
pub const DET_TOLERANCE: f64 = 1e-9;

/// An element of `PSL(2, R)`, stored with a canonical sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion(Matrix2<f64>);

impl Motion {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::from_matrix(Matrix2::new(a, b, c, d))
    }

    pub fn from_matrix(m: Matrix2<f64>) -> Result<Self> {
        let det = m.determinant();
        if (det - 1.0).abs() > DET_TOLERANCE * (1.0 + m.abs().max().powi(2)) {
            return Err(Error::Domain(format!("determinant {det} is not 1")));
        }
        Ok(Self::canonical(m))
    }

    fn canonical(m: Matrix2<f64>) -> Self {
        let lead = if m[(0, 0)] != 0.0 { m[(0, 0)] } else { m[(0, 1)] };
        Motion(if lead < 0.0 { -m } else { m })
    }

    pub fn identity() -> Self {
        Motion(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let m = &self.0;
        Self::canonical(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    pub fn mul(&self, other: &Motion) -> Self {
        Self::canonical(self.0 * other.0)
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    /// Action `z -> (az + b)/(cz + d)` on the upper half plane.
    pub fn act(&self, z: Complex64) -> Complex64 {
        let m = &self.0;
        (z * m[(0, 0)] + m[(0, 1)]) / (z * m[(1, 0)] + m[(1, 1)])
    }
}

/// `a_t = diag(e^{t/2}, e^{-t/2})`.
pub fn a_t(t: f64) -> Motion {
    Motion::canonical(Matrix2::new((t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()))
}

/// `k_theta`, rotation by `theta` about `i`.
pub fn k_theta(theta: f64) -> Motion {
    let (s, c) = (theta / 2.0).sin_cos();
    Motion::canonical(Matrix2::new(c, s, -s, c))
}

/// `p_z`, the upper triangular element with `p_z i = z`.
pub fn p_z(z: Complex64) -> Result<Motion> {
    if z.im <= 0.0 {
        return Err(Error::Domain(format!("{z} is not in the upper half plane")));
    }
    let r = z.im.sqrt();
    Ok(Motion::canonical(Matrix2::new(r, z.re / r, 0.0, 1.0 / r)))
}

/// `cosh d(z, w)` for `z, w` in the upper half plane.
pub fn cosh_distance(z: Complex64, w: Complex64) -> f64 {
    1.0 + (z - w).norm_sqr() / (2.0 * z.im * w.im)
}

/// `H(g) = d(gi, i) = arccosh(||g||^2 / 2)`, clamped at 0 near the identity.
pub fn displacement(g: &Motion) -> f64 {
    (g.frob_norm_sq() / 2.0).max(1.0).acosh()
}

/// Cartan coordinates `(theta, t, theta')` with `g = k_theta a_t k_theta'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kak {
    pub theta: f64,
    pub t: f64,
    pub theta_prime: f64,
}

/// Half sums and differences of the entries of `g`.
///
/// With `g = k_theta a_t k_theta'`, `(alpha, beta) = cosh(t/2) (cos, sin)((theta + theta')/2)`
/// and `(gamma, delta) = sinh(t/2) (cos, sin)((theta' - theta)/2)`.
#[inline]
pub(crate) fn half_entries(m: &Matrix2<f64>) -> (f64, f64, f64, f64) {
    (
        0.5 * (m[(0, 0)] + m[(1, 1)]),
        0.5 * (m[(0, 1)] - m[(1, 0)]),
        0.5 * (m[(0, 0)] - m[(1, 1)]),
        0.5 * (m[(0, 1)] + m[(1, 0)]),
    )
}

/// KAK decomposition; at `t = 0` the convention is `theta' = 0`.
pub fn kak(g: &Motion) -> Kak {
    let (alpha, beta, gamma, delta) = half_entries(g.matrix());
    let sh = gamma.hypot(delta);
    let t = 2.0 * sh.asinh();
    let sum = beta.atan2(alpha);
    if sh == 0.0 {
        return Kak {
            theta: 2.0 * sum,
            t: 0.0,
            theta_prime: 0.0,
        };
    }
    let diff = delta.atan2(gamma);
    Kak {
        theta: sum - diff,
        t,
        theta_prime: sum + diff,
    }
}

pub fn compose_kak(k: &Kak) -> Motion {
    k_theta(k.theta).mul(&a_t(k.t)).mul(&k_theta(k.theta_prime))
}

/// Haar volume of `{g : H(g) <= r}` with `dg = 2 pi sinh t dt dk dk'`.
pub fn ball_volume(r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    Ok(2.0 * std::f64::consts::PI * (r.cosh() - 1.0))
}

/// `|H(g^-1 gamma g) - H(gamma)|`, which never exceeds `2 H(g)`.
pub fn triangle_defect(g: &Motion, gamma: &Motion) -> f64 {
    let conj = g.inverse().mul(gamma).mul(g);
    (displacement(&conj) - displacement(gamma)).abs()
}
