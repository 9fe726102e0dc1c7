//! Prime factorization of ideals via factoring the minimal polynomial mod p.

use super::{FieldInt, IdealZBasis, TotallyRealField};
use crate::error::{Error, Result};

/// Largest ideal norm accepted by [`IdealZBasis::factor`].
pub const FACTOR_BUDGET: i128 = 1_000_000;

/// A prime ideal `(l, g(w))` together with its exponent in a factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactor {
    pub prime: IdealZBasis,
    pub rational_prime: u64,
    pub residue_degree: u32,
    pub exponent: u32,
}

impl PrimeFactor {
    pub fn norm(&self) -> i128 {
        (self.rational_prime as i128).pow(self.residue_degree)
    }
}

// Polynomials over F_l, coefficient vectors low degree first, trimmed.
type Poly = Vec<u64>;

fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn mulmod(a: u64, b: u64, l: u64) -> u64 {
    ((a as u128 * b as u128) % l as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, l: u64) -> u64 {
    let mut r = 1 % l;
    a %= l;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, l);
        }
        a = mulmod(a, a, l);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, l: u64) -> u64 {
    powmod(a, l - 2, l)
}

fn reduce_poly(c: &[i128], l: u64) -> Poly {
    trim(c.iter().map(|&a| a.rem_euclid(l as i128) as u64).collect())
}

/// Division with remainder by a nonzero polynomial.
fn poly_divrem(a: &Poly, b: &Poly, l: u64) -> (Poly, Poly) {
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(*b.last().unwrap(), l);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let coef = mulmod(*r.last().unwrap(), lead_inv, l);
        q[shift] = coef;
        for (i, &bc) in b.iter().enumerate() {
            let sub = mulmod(coef, bc, l);
            r[shift + i] = (r[shift + i] + l - sub) % l;
        }
        r = trim(r);
    }
    (trim(q), r)
}

/// Monic irreducible factors with multiplicity, by exhaustive trial division.
fn factor_mod(f: &Poly, l: u64, budget: u128) -> Result<Vec<(Poly, u32)>> {
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut deg = 1usize;
    let mut work: u128 = 0;
    while rest.len() > 1 {
        if 2 * deg > rest.len() - 1 {
            // remaining factor is irreducible
            let lead_inv = inv_mod(*rest.last().unwrap(), l);
            let monic: Poly = rest.iter().map(|&c| mulmod(c, lead_inv, l)).collect();
            out.push((monic, 1));
            break;
        }
        let count = (l as u128).pow(deg as u32);
        work += count;
        if work > budget {
            return Err(Error::Budget {
                what: "polynomial factorization mod p",
                needed: work,
                budget,
            });
        }
        for idx in 0..count {
            let mut g: Poly = Vec::with_capacity(deg + 1);
            let mut k = idx;
            for _ in 0..deg {
                g.push((k % l as u128) as u64);
                k /= l as u128;
            }
            g.push(1);
            let mut e = 0;
            loop {
                let (q, r) = poly_divrem(&rest, &g, l);
                if !r.is_empty() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.push((g, e));
            }
            if rest.len() <= 1 {
                break;
            }
        }
        deg += 1;
    }
    Ok(out)
}

fn rational_prime_factors(mut n: u128) -> Vec<u64> {
    let mut ps = Vec::new();
    let mut p = 2u128;
    while p * p <= n {
        if n % p == 0 {
            ps.push(p as u64);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n as u64);
    }
    ps
}

/// Dedekind's criterion: is `Z[w]` maximal at `l`?
fn is_l_maximal(min_poly: &[i128], l: u64) -> bool {
    let f = reduce_poly(min_poly, l);
    let factors = match factor_mod(&f, l, 10_000_000) {
        Ok(v) => v,
        Err(_) => return false,
    };
    if factors.iter().all(|(_, e)| *e == 1) {
        return true;
    }
    // F = (f - prod g_i^e_i) / l over Z, with lifted factors
    let mut prod: Vec<i128> = vec![1];
    for (g, e) in &factors {
        for _ in 0..*e {
            let mut next = vec![0i128; prod.len() + g.len() - 1];
            for (i, &a) in prod.iter().enumerate() {
                for (j, &b) in g.iter().enumerate() {
                    next[i + j] += a * b as i128;
                }
            }
            prod = next;
        }
    }
    let len = min_poly.len().max(prod.len());
    let diff: Vec<i128> = (0..len)
        .map(|i| min_poly.get(i).copied().unwrap_or(0) - prod.get(i).copied().unwrap_or(0))
        .collect();
    let big_f: Vec<i128> = diff.iter().map(|c| c / l as i128).collect();
    let fbar = reduce_poly(&big_f, l);
    factors
        .iter()
        .filter(|(_, e)| *e >= 2)
        .all(|(g, _)| {
            if fbar.is_empty() {
                return false;
            }
            let (_, r) = poly_divrem(&fbar, g, l);
            !r.is_empty()
        })
}

/// Primes `l` with `l^2 | disc` at which `Z[w]` is not maximal.
pub(crate) fn index_suspects(min_poly: &[i128], disc: i128) -> Vec<u64> {
    let d = disc.unsigned_abs();
    rational_prime_factors(d)
        .into_iter()
        .filter(|&l| d % (l as u128 * l as u128) == 0)
        .filter(|&l| !is_l_maximal(min_poly, l))
        .collect()
}

impl TotallyRealField {
    fn lift_poly(&self, g: &Poly) -> FieldInt {
        let w = self.generator();
        let mut acc = self.zero();
        let mut wp = self.one();
        for &c in g {
            acc = &acc + &wp.scale(c as i128);
            wp = self.mul(&wp, &w);
        }
        acc
    }

    /// Prime ideals above the rational prime `l`, from the factorization of the
    /// minimal polynomial mod `l`.
    pub fn primes_above(&self, l: u64) -> Result<Vec<(IdealZBasis, u32)>> {
        if self.index_primes().contains(&l) {
            return Err(Error::IndexDivisor(l));
        }
        let f = reduce_poly(self.min_poly(), l);
        let factors = factor_mod(&f, l, FACTOR_BUDGET as u128 * 16)?;
        factors
            .into_iter()
            .map(|(g, _)| {
                let gen = self.lift_poly(&g);
                let ideal = IdealZBasis::generated_by(self, &[self.integer(l as i128), gen])?;
                Ok((ideal, (g.len() - 1) as u32))
            })
            .collect()
    }
}

impl IdealZBasis {
    /// Prime factorization; the empty list for the unit ideal.
    pub fn factor(&self) -> Result<Vec<PrimeFactor>> {
        let norm = self.norm();
        if norm > FACTOR_BUDGET {
            return Err(Error::Budget {
                what: "ideal norm for factorization",
                needed: norm as u128,
                budget: FACTOR_BUDGET as u128,
            });
        }
        let field = self.field().clone();
        let mut out = Vec::new();
        for l in rational_prime_factors(norm as u128) {
            for (prime, f) in field.primes_above(l)? {
                let mut e = 0u32;
                let mut pk = prime.clone();
                while pk.divides(self) {
                    e += 1;
                    pk = pk.mul(&prime)?;
                }
                if e > 0 {
                    out.push(PrimeFactor {
                        prime,
                        rational_prime: l,
                        residue_degree: f,
                        exponent: e,
                    });
                }
            }
        }
        let mut check = IdealZBasis::unit(&field);
        for pf in &out {
            check = check.mul(&pf.prime.power(pf.exponent))?;
        }
        if &check != self {
            return Err(Error::Factorization(format!(
                "product of prime powers {check} differs from {self}"
            )));
        }
        Ok(out)
    }

    /// Largest divisor of `self` coprime to `other`.
    pub fn coprime_part(&self, other: &IdealZBasis) -> Result<IdealZBasis> {
        let mut acc = IdealZBasis::unit(self.field());
        for pf in self.factor()? {
            if !pf.prime.divides(other) {
                acc = acc.mul(&pf.prime.power(pf.exponent))?;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> TotallyRealField {
        TotallyRealField::real_quadratic(2).unwrap()
    }

    #[test]
    fn seven_splits_in_sqrt2() {
        let f = q2();
        let seven = IdealZBasis::principal(&f, &f.integer(7)).unwrap();
        let fac = seven.factor().unwrap();
        assert_eq!(fac.len(), 2);
        let a = IdealZBasis::principal(&f, &f.element(&[3, 1]).unwrap()).unwrap();
        let b = IdealZBasis::principal(&f, &f.element(&[3, -1]).unwrap()).unwrap();
        for pf in &fac {
            assert_eq!(pf.exponent, 1);
            assert_eq!(pf.norm(), 7);
            assert!(pf.prime == a || pf.prime == b);
        }
        assert_ne!(fac[0].prime, fac[1].prime);
    }

    #[test]
    fn five_is_inert() {
        let f = q2();
        let five = IdealZBasis::principal(&f, &f.integer(5)).unwrap();
        let fac = five.factor().unwrap();
        assert_eq!(fac.len(), 1);
        assert_eq!(fac[0].prime, five);
        assert_eq!(fac[0].residue_degree, 2);
        assert_eq!(fac[0].exponent, 1);
    }

    #[test]
    fn unit_ideal_has_empty_factorization() {
        let f = q2();
        assert!(IdealZBasis::unit(&f).factor().unwrap().is_empty());
    }

    #[test]
    fn two_ramifies() {
        let f = q2();
        let two = IdealZBasis::principal(&f, &f.integer(2)).unwrap();
        let fac = two.factor().unwrap();
        assert_eq!(fac.len(), 1);
        assert_eq!(fac[0].exponent, 2);
        let root2 = IdealZBasis::principal(&f, &f.generator()).unwrap();
        assert_eq!(fac[0].prime, root2);
    }

    #[test]
    fn index_divisor_is_reported() {
        let f = TotallyRealField::real_quadratic(5).unwrap();
        assert_eq!(f.index_primes(), &[2]);
        let two = IdealZBasis::principal(&f, &f.integer(2)).unwrap();
        assert!(matches!(two.factor(), Err(Error::IndexDivisor(2))));
        let eleven = IdealZBasis::principal(&f, &f.integer(11)).unwrap();
        assert_eq!(eleven.factor().unwrap().len(), 2);
        assert!(q2().index_primes().is_empty());
    }

    #[test]
    fn coprime_part_drops_shared_primes() {
        let f = q2();
        let a = IdealZBasis::principal(&f, &f.element(&[3, 1]).unwrap()).unwrap();
        let five = IdealZBasis::principal(&f, &f.integer(5)).unwrap();
        let prod = a.power(2).mul(&five).unwrap();
        assert_eq!(prod.coprime_part(&five).unwrap(), a.power(2));
        assert_eq!(prod.coprime_part(&prod).unwrap(), IdealZBasis::unit(&f));
    }

    #[test]
    fn factorization_round_trip() {
        let f = q2();
        for (a, b) in [(3, 1), (5, 2), (11, 0), (6, 3), (13, 4), (9, 0)] {
            let x = f.element(&[a, b]).unwrap();
            let ideal = IdealZBasis::principal(&f, &x).unwrap();
            let mut acc = IdealZBasis::unit(&f);
            for pf in ideal.factor().unwrap() {
                acc = acc.mul(&pf.prime.power(pf.exponent)).unwrap();
            }
            assert_eq!(acc, ideal);
        }
    }
}
