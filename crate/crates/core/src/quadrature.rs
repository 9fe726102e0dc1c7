//! Adaptive Gauss-Kronrod quadrature for complex integrands, nested rules
//! with error propagation, and Chebyshev interpolation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// 7-point Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: Complex64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn real(value: f64, error: f64) -> Self {
        Estimate::new(Complex64::new(value, 0.0), error)
    }
}

/// Stopping rule: `error <= max(abs, rel * |value|)`, at most `max_evals` integrand calls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-6,
            rel: 1e-9,
            max_evals: 2_000_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Tolerance::default()
        }
    }

    /// Tolerance for an inner integral whose result is integrated over a range of length `len`.
    pub fn inner(&self, len: f64) -> Tolerance {
        Tolerance {
            abs: self.abs / (10.0 * len.max(1.0)),
            rel: self.rel / 10.0,
            max_evals: self.max_evals,
        }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Piece>
where
    F: FnMut(f64) -> Result<Estimate>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = Complex64::new(0.0, 0.0);
    let mut g = Complex64::new(0.0, 0.0);
    let mut inner = 0.0;
    for (i, &x) in XGK.iter().enumerate() {
        let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in pts {
            let e = f(c + s * h * x)?;
            k += e.value * WGK[i];
            inner += e.error * WGK[i];
            if i % 2 == 1 {
                g += e.value * WG[i / 2];
            }
        }
    }
    Ok(Piece {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).norm() + inner * h.abs(),
    })
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Adaptive integration of an integrand that itself returns an estimate
/// (e.g. an inner integral); inner errors are integrated into the total.
pub fn integrate_nested<F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Estimate>,
{
    if a == b {
        return Ok(Estimate::real(0.0, 0.0));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits [{a}, {b}] not finite")));
    }
    let mut heap = BinaryHeap::new();
    let first = gk15(&mut f, a, b)?;
    let mut total = first.value;
    let mut err = first.error;
    let mut evals = 15;
    heap.push(first);
    // pieces too narrow to split further
    let mut done: Vec<Piece> = Vec::new();
    while err > tol.target(total) {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a).abs() < 1e-13 * (b - a).abs() {
            done.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        if evals + 30 > tol.max_evals {
            heap.push(worst);
            return Err(Error::Quadrature {
                achieved: err,
                required: tol.target(total),
            });
        }
        let l = gk15(&mut f, worst.a, mid)?;
        let r = gk15(&mut f, mid, worst.b)?;
        evals += 30;
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.extend(done);
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<Complex64> = pieces.iter().map(|p| p.value).collect();
    let error: f64 = pieces.iter().map(|p| p.error).sum();
    let value = pairwise_sum(&values);
    if error > tol.target(value) {
        return Err(Error::Quadrature {
            achieved: error,
            required: tol.target(value),
        });
    }
    Ok(Estimate::new(value, error))
}

/// Adaptive integration of a complex integrand.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_nested(|x| Ok(Estimate::new(f(x), 0.0)), a, b, tol)
}

/// Adaptive integration of a real integrand.
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let e = integrate(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok((e.value.re, e.error))
}

/// Sum of adaptive integrals over consecutive breakpoints.
pub fn integrate_pieces<F>(mut f: F, breaks: &[f64], tol: &Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Estimate>,
{
    let n = breaks.len().saturating_sub(1).max(1) as f64;
    let piece_tol = Tolerance {
        abs: tol.abs / n,
        ..*tol
    };
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let e = integrate_nested(&mut f, w[0], w[1], &piece_tol)?;
        value += e.value;
        error += e.error;
    }
    Ok(Estimate::new(value, error))
}

/// Chebyshev interpolant of a complex function on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chebyshev {
    a: f64,
    b: f64,
    coeffs: Vec<Complex64>,
}

impl Chebyshev {
    /// Chebyshev points of the first kind, in the order [`Chebyshev::from_values`] expects.
    pub fn nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let x = (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * x
            })
            .collect()
    }

    /// Interpolant through values at [`Chebyshev::nodes`].
    pub fn from_values(a: f64, b: f64, values: &[Complex64]) -> Result<Self> {
        let n = values.len();
        if n == 0 || !(b > a) {
            return Err(Error::Domain("Chebyshev interpolant needs n > 0 and a < b".into()));
        }
        let coeffs = (0..n)
            .map(|j| {
                let s: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (std::f64::consts::PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                s * (if j == 0 { 1.0 } else { 2.0 } / n as f64)
            })
            .collect();
        Ok(Chebyshev { a, b, coeffs })
    }

    pub fn fit<F>(mut f: F, a: f64, b: f64, n: usize) -> Result<Self>
    where
        F: FnMut(f64) -> Result<Complex64>,
    {
        let vals = Chebyshev::nodes(a, b, n)
            .into_iter()
            .map(&mut f)
            .collect::<Result<Vec<_>>>()?;
        Chebyshev::from_values(a, b, &vals)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Size of the last few coefficients; a rough interpolation error.
    pub fn tail(&self) -> f64 {
        self.coeffs.iter().rev().take(3).map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Clenshaw evaluation; the interpolant is clamped to `[a, b]`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let y = ((2.0 * x - self.a - self.b) / (self.b - self.a)).clamp(-1.0, 1.0);
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().skip(1).rev() {
            let t = c + b1 * (2.0 * y) - b2;
            b2 = b1;
            b1 = t;
        }
        self.coeffs[0] + b1 * y - b2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_exact() {
        let tol = Tolerance::new(1e-14, 1e-14);
        let (v, _) = integrate_real(|x| x.powi(20) - 3.0 * x.powi(5), -1.0, 2.0, &tol).unwrap();
        let exact = (2f64.powi(21) + 1.0) / 21.0 - 3.0 * (64.0 - 1.0) / 6.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs());
    }

    #[test]
    fn peaked_and_oscillatory() {
        let tol = Tolerance::new(1e-10, 1e-10);
        // int_0^1 1/sqrt(x) = 2; endpoint singularities only reach ~sqrt(min width)
        let loose = Tolerance::new(1e-6, 0.0);
        let (v, e) = integrate_real(|x| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0, 1.0, &loose).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "{v} {e}");
        // int_0^{2 pi} e^{i 40 x} = 0
        let z = integrate(|x| Complex64::new(0.0, 40.0 * x).exp(), 0.0, 2.0 * PI, &tol).unwrap();
        assert!(z.value.norm() < 1e-9);
        let (g, _) = integrate_real(|x| (-(x - 0.3).powi(2) / 5e-3).exp(), -5.0, 5.0, &tol).unwrap();
        assert!((g - (5e-3 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn nested_area_of_disk() {
        let tol = Tolerance::new(1e-9, 1e-12);
        let inner = tol.inner(2.0);
        let e = integrate_nested(
            |x| {
                let h = (1.0 - x * x).max(0.0).sqrt();
                integrate(|_| Complex64::new(1.0, 0.0), -h, h, &inner)
            },
            -1.0,
            1.0,
            &tol,
        )
        .unwrap();
        assert!((e.value.re - PI).abs() < 1e-8);
    }

    #[test]
    fn budget_reported() {
        let tol = Tolerance {
            abs: 1e-15,
            rel: 0.0,
            max_evals: 100,
        };
        let r = integrate_real(|x| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0, &tol);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn chebyshev_interpolates_smooth_functions() {
        let c = Chebyshev::fit(|x| Ok(Complex64::new(x.exp(), (3.0 * x).sin())), -1.0, 2.0, 32).unwrap();
        for k in 0..50 {
            let x = -1.0 + 3.0 * k as f64 / 49.0;
            assert!((c.eval(x) - Complex64::new(x.exp(), (3.0 * x).sin())).norm() < 1e-12);
        }
        assert!(c.tail() < 1e-12);
    }
}
