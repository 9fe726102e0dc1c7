//! Exponent algebra: `T(pi)`, `p(pi)`, the multiplicity bounds, the
//! corollary exponents and the thresholds `7 + sqrt 17`, `6 + 2 sqrt 2`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// One tensor factor of `pi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    /// `pi_s`, `s` in `(0, 1/2)` (complementary) or `1/2 + i r`, `r >= 0` (tempered).
    Spherical(Complex64),
    /// `D_m`, `m != 0`.
    Discrete(i64),
}

impl Factor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Factor::Spherical(s) => {
                let complementary = s.im == 0.0 && s.re > 0.0 && s.re < 0.5;
                let tempered = s.re == 0.5 && s.im >= 0.0;
                if complementary || tempered {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("s = {s} not in (0, 1/2) or 1/2 + i R+")))
                }
            }
            Factor::Discrete(0) => Err(Error::Domain("discrete series needs m != 0".into())),
            Factor::Discrete(_) => Ok(()),
        }
    }

    /// `s(1 - s)` or `|m|(1 - |m|)`.
    pub fn lambda(&self) -> f64 {
        match *self {
            Factor::Spherical(s) => (s * (Complex64::new(1.0, 0.0) - s)).re,
            Factor::Discrete(m) => {
                let a = m.unsigned_abs() as f64;
                a * (1.0 - a)
            }
        }
    }

    /// `1/s` for complementary `s`, 2 otherwise.
    pub fn p(&self) -> f64 {
        match *self {
            Factor::Spherical(s) if s.im == 0.0 && s.re < 0.5 => 1.0 / s.re,
            _ => 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationParams {
    factors: Vec<Factor>,
}

impl RepresentationParams {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Domain("no factors".into()));
        }
        for f in &factors {
            f.validate()?;
        }
        Ok(RepresentationParams { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.factors.iter().map(Factor::lambda).collect()
    }

    /// `prod (|lambda_j|^{1/2} + 1)`.
    pub fn t_parameter(&self) -> f64 {
        self.factors.iter().map(|f| f.lambda().abs().sqrt() + 1.0).product()
    }

    /// `max_j p(pi_j)`.
    pub fn p_of_pi(&self) -> f64 {
        self.factors.iter().map(Factor::p).fold(2.0, f64::max)
    }
}

fn check_tv(t: f64, v: f64) -> Result<()> {
    if !(t >= 1.0 && v >= 1.0) {
        return Err(Error::Domain(format!("need T, V >= 1, got T = {t}, V = {v}")));
    }
    Ok(())
}

fn check_p_eps(p: f64, eps: f64) -> Result<()> {
    if !(p > 2.0) || !(eps >= 0.0) {
        return Err(Error::Domain(format!("need p > 2 and eps >= 0, got p = {p}, eps = {eps}")));
    }
    Ok(())
}

/// `T^{1/2 + 1/p + eps} V^{2/p + eps}`.
pub fn thm1_rhs(t: f64, v: f64, p: f64, eps: f64) -> Result<f64> {
    check_tv(t, v)?;
    check_p_eps(p, eps)?;
    Ok(t.powf(0.5 + 1.0 / p + eps) * v.powf(2.0 / p + eps))
}

/// `(T V)^{2/p + eps}`, the variant for spherical `pi`.
pub fn thm1_rhs_spherical(t: f64, v: f64, p: f64, eps: f64) -> Result<f64> {
    check_tv(t, v)?;
    check_p_eps(p, eps)?;
    Ok((t * v).powf(2.0 / p + eps))
}

/// `V^{1/3} T^{2 + c(1/p - 1/2)} (V^{2/3} + T^{c/2 - 3 + eps})`.
pub fn thm2_rhs(t: f64, v: f64, p: f64, c: f64, eps: f64) -> Result<f64> {
    check_tv(t, v)?;
    check_p_eps(p, eps)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("need c > 0, got {c}")));
    }
    Ok(v.cbrt() * t.powf(2.0 + c * (1.0 / p - 0.5)) * (v.powf(2.0 / 3.0) + t.powf(c / 2.0 - 3.0 + eps)))
}

/// Log-domain evaluators, kept separate from the direct ones as a cross-check.
pub mod log_form {
    use super::*;

    pub fn thm1_rhs(t: f64, v: f64, p: f64, eps: f64) -> Result<f64> {
        check_tv(t, v)?;
        check_p_eps(p, eps)?;
        let (lt, lv) = (t.ln(), v.ln());
        Ok((lt / 2.0 + (lt + 2.0 * lv) / p + eps * (lt + lv)).exp())
    }

    pub fn thm2_rhs(t: f64, v: f64, p: f64, c: f64, eps: f64) -> Result<f64> {
        check_tv(t, v)?;
        check_p_eps(p, eps)?;
        if !(c > 0.0) {
            return Err(Error::Domain(format!("need c > 0, got {c}")));
        }
        let (lt, lv) = (t.ln(), v.ln());
        // expand the product into its two monomials
        let e1 = lv + lt * (2.0 + c / p - c / 2.0);
        let e2 = lv / 3.0 + lt * (c / p - 1.0 + eps);
        Ok(e1.exp() + e2.exp())
    }
}

/// `(2 alpha / (3 (8 + alpha)), 4 / (3 alpha))`.
pub fn cor_exponents(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("need alpha > 0, got {alpha}")));
    }
    Ok((2.0 * alpha / (3.0 * (8.0 + alpha)), 4.0 / (3.0 * alpha)))
}

/// `lower - upper = (2 alpha^2 - 4 alpha - 32) / (3 alpha (8 + alpha))`.
pub fn combined_exponent(alpha: f64) -> f64 {
    (2.0 * alpha * alpha - 4.0 * alpha - 32.0) / (3.0 * alpha * (8.0 + alpha))
}

/// Exponents of `T` after substituting `c = 6 + alpha - 2 delta - 2 eps` and
/// `p = 6 + alpha` into the second multiplicity bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorUpperInstantiation {
    /// `2 + c (1/p - 1/2)` computed directly.
    pub first: f64,
    /// `((alpha + 4)/(alpha + 6)) delta + eps - alpha/2`, as displayed.
    pub displayed_first: f64,
    /// `c/2 - 3 + eps`.
    pub second: f64,
    /// `alpha/2 - delta`, as displayed.
    pub displayed_second: f64,
}

pub fn cor_upper_instantiation(alpha: f64, delta: f64, eps: f64) -> Result<CorUpperInstantiation> {
    if !(alpha > 0.0 && alpha / 2.0 > delta && delta > eps && eps >= 0.0) {
        return Err(Error::Domain(format!(
            "need alpha/2 > delta > eps >= 0, got alpha = {alpha}, delta = {delta}, eps = {eps}"
        )));
    }
    let c = 6.0 + alpha - 2.0 * delta - 2.0 * eps;
    let p = 6.0 + alpha;
    Ok(CorUpperInstantiation {
        first: 2.0 + c * (1.0 / p - 0.5),
        displayed_first: (alpha + 4.0) / (alpha + 6.0) * delta + eps - alpha / 2.0,
        second: c / 2.0 - 3.0 + eps,
        displayed_second: alpha / 2.0 - delta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General,
    Spherical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Threshold {
    pub mode: Mode,
    pub alpha: f64,
    pub p_star: f64,
    /// Closed form `1 + sqrt 17` or `2 sqrt 2`.
    pub alpha_closed: f64,
    pub iterations: u32,
}

fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> (f64, u32) {
    let mut glo = g(lo);
    assert!(glo * g(hi) < 0.0, "bracket does not change sign");
    let mut it = 0;
    while hi - lo > 1e-14 * hi.abs().max(1.0) && it < 200 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return (mid, it);
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        it += 1;
    }
    (0.5 * (lo + hi), it)
}

/// Crossing of the lower and upper exponents for `T(pi)`.
///
/// General: `2 alpha/(3(8 + alpha)) = 4/(3 alpha)`.
/// Spherical: the first bound becomes `(T V)^{2/p}`; against the lower bound
/// `V^{1/3}` this gives `T >> V^{p/6 - 1} = V^{alpha/6}` with `p = 6 + alpha`,
/// which crosses `4/(3 alpha)` at `alpha^2 = 8`.
pub fn threshold_solver(mode: Mode) -> Threshold {
    let (g, closed): (Box<dyn Fn(f64) -> f64>, f64) = match mode {
        Mode::General => (
            Box::new(|a| {
                let (lo, up) = cor_exponents(a).unwrap();
                lo - up
            }),
            1.0 + 17f64.sqrt(),
        ),
        Mode::Spherical => (Box::new(|a| a / 6.0 - 4.0 / (3.0 * a)), 2.0 * 2f64.sqrt()),
    };
    let (alpha, iterations) = bisect(g, 0.5, 50.0);
    Threshold {
        mode,
        alpha,
        p_star: 6.0 + alpha,
        alpha_closed: closed,
        iterations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenvalueFloor {
    pub p_star: f64,
    pub s_star: f64,
    pub lambda_star: f64,
}

/// `s* = 1/p*` and `lambda* = s*(1 - s*)` for the spherical threshold.
pub fn eigenvalue_floor() -> EigenvalueFloor {
    let p_star = threshold_solver(Mode::Spherical).p_star;
    let s_star = 1.0 / p_star;
    EigenvalueFloor {
        p_star,
        s_star,
        lambda_star: s_star * (1.0 - s_star),
    }
}

/// `8 T vol^{2/p}`.
pub fn appendix_b_bound(t: f64, vol: f64, p: f64) -> Result<f64> {
    check_tv(t, vol)?;
    check_p_eps(p, 0.0)?;
    Ok(8.0 * t * vol.powf(2.0 / p))
}

/// Default `Psi(r) = (sin(r/2) / (r/2))^2`, entire and even.
pub fn default_psi(r: Complex64) -> Complex64 {
    let h = r * 0.5;
    if h.norm() < 1e-6 {
        return Complex64::new(1.0, 0.0) - h * h / 3.0;
    }
    let q = h.sin() / h;
    q * q
}

/// `h_R(r) = sin^2(R r)/r^2 Psi(r)`, with the limit `R^2 Psi(0)` at `r = 0`.
pub fn hr_eval<P: Fn(Complex64) -> Complex64>(big_r: f64, r: Complex64, psi: P) -> Complex64 {
    let x = r * big_r;
    let s = if x.norm() < 1e-6 {
        // sin(x)/x ~ 1 - x^2/6
        (Complex64::new(1.0, 0.0) - x * x / 6.0) * big_r
    } else {
        x.sin() / r
    };
    s * s * psi(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub big_r: f64,
    pub points: usize,
    /// `min / max of Psi(i tau)` over the grid; the window is `[1, 2]`.
    pub psi_range: (f64, f64),
    pub upper_violations: usize,
    /// Grid points with `h_R(i tau) < e^{2 R tau} / (4 tau^2)`.
    pub lower_violations: usize,
    /// Largest violating `tau`, if any.
    pub lower_fails_up_to: Option<f64>,
}

impl SandwichReport {
    pub fn psi_window_ok(&self) -> bool {
        self.psi_range.0 >= 1.0 - 1e-12 && self.psi_range.1 <= 2.0
    }
}

/// Checks `e^{2R tau}/(4 tau^2) <= h_R(i tau) <= 2 e^{2R tau}/(4 tau^2)` on
/// `points` values of `tau` in `(0, 1/2]`.
pub fn sandwich_check<P: Fn(Complex64) -> Complex64>(big_r: f64, points: usize, psi: P) -> Result<SandwichReport> {
    if points == 0 || !(big_r > 0.0) {
        return Err(Error::Domain("need R > 0 and at least one point".into()));
    }
    let mut psi_range = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut up, mut lo, mut last) = (0, 0, None);
    for k in 1..=points {
        let tau = 0.5 * k as f64 / points as f64;
        let ps = psi(Complex64::new(0.0, tau)).re;
        psi_range = (psi_range.0.min(ps), psi_range.1.max(ps));
        let h = hr_eval(big_r, Complex64::new(0.0, tau), &psi).re;
        let base = (2.0 * big_r * tau).exp() / (4.0 * tau * tau);
        if h > 2.0 * base * (1.0 + 1e-12) {
            up += 1;
        }
        if h < base * (1.0 - 1e-12) {
            lo += 1;
            last = Some(tau);
        }
    }
    Ok(SandwichReport {
        big_r,
        points,
        psi_range,
        upper_violations: up,
        lower_violations: lo,
        lower_fails_up_to: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn t_and_p() {
        let temp = Factor::Spherical(Complex64::new(0.5, 0.0));
        let rp = RepresentationParams::new(vec![temp, temp]).unwrap();
        assert_eq!(rp.lambdas(), vec![0.25, 0.25]);
        assert!((rp.t_parameter() - 2.25).abs() < 1e-15);
        assert_eq!(rp.p_of_pi(), 2.0);
        let rp = RepresentationParams::new(vec![Factor::Spherical(Complex64::new(0.5, 3.0)), Factor::Discrete(4)]).unwrap();
        let l = rp.lambdas();
        assert!((l[0] - 9.25).abs() < 1e-12 && l[1] == -12.0);
        assert!((rp.t_parameter() - (9.25f64.sqrt() + 1.0) * (12f64.sqrt() + 1.0)).abs() < 1e-12);
        let rp = RepresentationParams::new(vec![Factor::Spherical(Complex64::new(0.25, 0.0)), temp]).unwrap();
        assert_eq!(rp.p_of_pi(), 4.0);
        assert!(RepresentationParams::new(vec![Factor::Spherical(Complex64::new(0.7, 0.0))]).is_err());
        assert!(RepresentationParams::new(vec![Factor::Discrete(0)]).is_err());
    }

    #[test]
    fn thm_values() {
        assert_eq!(thm1_rhs(1.0, 1.0, 3.0, 0.01).unwrap(), 1.0);
        // p -> infinity
        let t = 7.0;
        assert!((thm1_rhs(t, 5.0, 1e12, 0.0).unwrap() - t.sqrt()).abs() < 1e-9);
        for v in [1.0, 8.0, 100.0] {
            let w = thm2_rhs(1.0, v, 3.0, 2.0, 0.01).unwrap();
            assert!((w - (v + v.cbrt())).abs() < 1e-9 * w);
        }
        assert!(thm2_rhs(2.0, 2.0, 3.0, 0.0, 0.0).is_err());
        assert!(thm1_rhs(0.5, 2.0, 3.0, 0.0).is_err());
        assert!(thm1_rhs(2.0, 2.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn two_evaluators_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let t = rng.gen_range(1.0..1e3);
            let v = rng.gen_range(1.0..1e4);
            let p = rng.gen_range(2.01..20.0);
            let c = rng.gen_range(0.1..15.0);
            let e = rng.gen_range(0.0..0.1);
            let (a, b) = (thm1_rhs(t, v, p, e).unwrap(), log_form::thm1_rhs(t, v, p, e).unwrap());
            assert!((a - b).abs() <= 1e-10 * a);
            let (a, b) = (thm2_rhs(t, v, p, c, e).unwrap(), log_form::thm2_rhs(t, v, p, c, e).unwrap());
            assert!((a - b).abs() <= 1e-10 * a);
        }
    }

    #[test]
    fn first_term_exponent_sign() {
        for p in [2.5, 3.0, 6.0, 11.0] {
            for k in 1..200 {
                let c = 0.1 * k as f64;
                let neg = 2.0 + c * (1.0 / p - 0.5) < 0.0;
                assert_eq!(neg, c > 4.0 * p / (p - 2.0) + 1e-12, "p={p} c={c}");
            }
        }
    }

    #[test]
    fn corollary_instantiation() {
        for alpha in [0.5, 2.0, 5.0, 10.0] {
            let delta = alpha / 5.0;
            let at0 = cor_upper_instantiation(alpha, delta, 0.0).unwrap();
            assert!((at0.first - at0.displayed_first).abs() < 1e-12);
            for eps in [0.001, 0.01, delta / 2.0] {
                let r = cor_upper_instantiation(alpha, delta, eps).unwrap();
                assert!((r.second - r.displayed_second).abs() < 1e-12);
                // eps enters with weight (alpha+4)/(alpha+6) < 1, so the display is an upper bound
                let derived = (alpha + 4.0) / (alpha + 6.0) * (delta + eps) - alpha / 2.0;
                assert!((r.first - derived).abs() < 1e-12);
                assert!(r.first < r.displayed_first);
            }
        }
        assert!(cor_upper_instantiation(1.0, 0.6, 0.1).is_err());
    }

    #[test]
    fn cor_exponent_values() {
        let (lo, _) = cor_exponents(2.0).unwrap();
        assert!((lo - 2.0 / 15.0).abs() < 1e-15);
        assert!((cor_exponents(4.0).unwrap().1 - 1.0 / 3.0).abs() < 1e-15);
        let grid: Vec<(f64, f64)> = (1..1000).map(|k| cor_exponents(0.1 * k as f64).unwrap()).collect();
        for w in grid.windows(2) {
            assert!(w[1].0 > w[0].0 && w[1].1 < w[0].1);
        }
        assert!(cor_exponents(0.0).is_err());
    }

    #[test]
    fn thresholds() {
        let g = threshold_solver(Mode::General);
        assert!((g.alpha - g.alpha_closed).abs() < 1e-9);
        assert!((g.p_star - 11.1231056256).abs() < 1e-9);
        assert!(combined_exponent(g.alpha).abs() < 1e-9);
        assert!(combined_exponent(g.alpha - 0.01) < 0.0 && combined_exponent(g.alpha + 0.01) > 0.0);
        let s = threshold_solver(Mode::Spherical);
        assert!((s.p_star - 8.8284271247).abs() < 1e-9);
        // contradiction mechanism above p*
        for k in 1..100 {
            let p = g.p_star + 0.1 * k as f64;
            let (lo, up) = cor_exponents(p - 6.0).unwrap();
            assert!(lo > up);
        }
    }

    #[test]
    fn floor_above_tenth() {
        let f = eigenvalue_floor();
        assert!((f.s_star - 0.1132704).abs() < 1e-6);
        assert!((f.lambda_star - 0.1004403).abs() < 1e-7);
        assert!(f.lambda_star > 0.1);
        // lambda(s) = s(1 - s) grows with s below 1/2, so lambda* falls as p* grows
        let l = |p: f64| (1.0 / p) * (1.0 - 1.0 / p);
        assert!(l(f.p_star - 1e-4) > f.lambda_star && l(f.p_star + 1e-4) < f.lambda_star);
        assert_eq!(Factor::Spherical(Complex64::new(0.5, 0.0)).lambda(), 0.25);
    }

    #[test]
    fn appendix_b() {
        assert_eq!(appendix_b_bound(1.0, 1.0, 3.0).unwrap(), 8.0);
        let r = 2.5;
        let h0 = hr_eval(r, Complex64::new(0.0, 0.0), default_psi);
        assert!((h0.re - r * r).abs() < 1e-12);
        let h = hr_eval(r, Complex64::new(1e-4, 0.0), default_psi);
        assert!((h.re - r * r).abs() < 1e-6);
    }

    #[test]
    fn sandwich_upper_holds_lower_fails_near_zero() {
        for big_r in [1.0, 5.0] {
            let rep = sandwich_check(big_r, 100, default_psi).unwrap();
            assert!(rep.psi_window_ok(), "{rep:?}");
            assert_eq!(rep.upper_violations, 0);
            // sinh^2(R tau)/tau^2 -> R^2 while e^{2 R tau}/(4 tau^2) blows up
            assert!(rep.lower_violations > 0);
        }
        let r5 = sandwich_check(5.0, 100, default_psi).unwrap();
        assert!(r5.lower_fails_up_to.unwrap() < 0.5);
        assert_eq!(sandwich_check(1.0, 100, default_psi).unwrap().lower_violations, 100);
    }

    proptest! {
        #[test]
        fn thm1_monotone(t in 1.0f64..100.0, v in 1.0f64..100.0, p in 2.1f64..30.0, e in 0.0f64..0.1) {
            let a = thm1_rhs(t, v, p, e).unwrap();
            prop_assert!(thm1_rhs(t * 1.5, v, p, e).unwrap() > a);
            prop_assert!(thm1_rhs(t, v * 1.5, p, e).unwrap() > a);
            prop_assert!(thm1_rhs_spherical(t * 1.5, v, p, e).unwrap() > thm1_rhs_spherical(t, v, p, e).unwrap());
        }

        #[test]
        fn lambda_bounded_by_quarter(s in 0.001f64..0.4999) {
            let f = Factor::Spherical(Complex64::new(s, 0.0));
            prop_assert!(f.lambda() < 0.25 && f.lambda() > 0.0);
            prop_assert!(f.p() > 2.0);
        }
    }
}
