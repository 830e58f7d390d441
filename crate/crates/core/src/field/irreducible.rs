//! Irreducibility testing, enumeration of monic primes, and trial-division factoring.

use std::fmt;

use serde::Serialize;

use super::poly::{Poly, PolyRing};
use crate::arith::prime_factors;
use crate::error::{Error, Result};

/// Rabin's test: `f` of degree `d` is irreducible iff `T^(Q^d) = T mod f` and
/// `gcd(T^(Q^(d/r)) - T, f) = 1` for every prime `r | d`.
pub fn is_irreducible(ring: &PolyRing, f: &Poly) -> bool {
    let d = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(d) => d,
    };
    let q = ring.q();
    let t = ring.rem(&Poly::t(), f);
    // frob[k] = T^(Q^k) mod f
    let mut frob = Vec::with_capacity(d + 1);
    frob.push(t.clone());
    for k in 1..=d {
        let prev: &Poly = &frob[k - 1];
        frob.push(ring.powmod(prev, q, f));
    }
    if frob[d] != t {
        return false;
    }
    prime_factors(d as u64).into_iter().all(|r| {
        let h = ring.sub(&frob[d / r as usize], &t);
        ring.gcd(&h, f).degree() == Some(0)
    })
}

/// All monic irreducibles of degree `d`, lexicographic in `(c_0, ..., c_{d-1})`.
pub fn enumerate_irreducibles(ring: &PolyRing, d: usize) -> Vec<Poly> {
    if d == 0 {
        return Vec::new();
    }
    ring.monics(d).filter(|f| is_irreducible(ring, f)).collect()
}

/// A certified monic irreducible of `F_q[T]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "String")]
pub struct PrimePoly {
    poly: Poly,
}

impl PrimePoly {
    pub fn new(ring: &PolyRing, poly: Poly) -> Result<Self> {
        if !poly.is_monic() || !is_irreducible(ring, &poly) {
            return Err(Error::NotPrime(poly.to_string()));
        }
        Ok(PrimePoly { poly })
    }

    /// Wraps a polynomial already known to be a monic irreducible.
    pub(crate) fn trusted(poly: Poly) -> Self {
        PrimePoly { poly }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().expect("primes are nonzero")
    }
}

impl From<PrimePoly> for String {
    fn from(p: PrimePoly) -> String {
        p.poly.to_string()
    }
}

impl fmt::Display for PrimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// Factorization `lead * prod p_i^e_i` with monic primes in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub lead: u32,
    pub factors: Vec<(PrimePoly, u32)>,
}

/// Trial division by enumerated primes, caching each degree's list.
#[derive(Debug)]
pub struct Factorizer {
    ring: PolyRing,
    by_degree: Vec<Vec<Poly>>,
}

impl Factorizer {
    pub fn new(ring: PolyRing) -> Self {
        Factorizer { ring, by_degree: vec![Vec::new()] }
    }

    fn primes_of_degree(&mut self, d: usize) -> &[Poly] {
        while self.by_degree.len() <= d {
            let k = self.by_degree.len();
            let list = enumerate_irreducibles(&self.ring, k);
            self.by_degree.push(list);
        }
        &self.by_degree[d]
    }

    /// Fills the cache through degree `d`; afterwards `factor_warm` never enumerates
    /// below it.
    pub fn warm(&mut self, d: usize) {
        self.primes_of_degree(d);
    }

    pub fn factor(&mut self, f: &Poly) -> Result<Factorization> {
        self.warm(f.degree().unwrap_or(0) / 2);
        self.factor_warm(f)
    }

    /// Factors using only cached primes; the cache must reach `deg f / 2`.
    pub fn factor_warm(&self, f: &Poly) -> Result<Factorization> {
        if f.is_zero() {
            return Err(Error::Precondition("cannot factor zero".into()));
        }
        let ring = &self.ring;
        let lead = f.lead();
        let mut rest = ring.monic(f);
        let mut factors = Vec::new();
        let mut d = 1;
        while rest.degree().unwrap_or(0) >= 2 * d {
            let primes = self.by_degree.get(d).ok_or_else(|| Error::Precondition("factor cache too small".into()))?;
            for pi in primes {
                let mut e = 0;
                loop {
                    let (quo, r) = ring.divrem(&rest, pi)?;
                    if !r.is_zero() {
                        break;
                    }
                    rest = quo;
                    e += 1;
                }
                if e > 0 {
                    factors.push((PrimePoly::trusted(pi.clone()), e));
                }
            }
            d += 1;
        }
        if rest.degree().unwrap_or(0) >= 1 {
            factors.push((PrimePoly::trusted(rest), 1));
        }
        factors.sort();
        Ok(Factorization { lead, factors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gf::Gf;

    #[test]
    fn degree_two_primes_over_f3() {
        let ring = PolyRing::new(Gf::prime(3).unwrap());
        let list: Vec<String> = enumerate_irreducibles(&ring, 2).iter().map(|p| p.to_string()).collect();
        assert_eq!(list, ["1+T^2", "2+T+T^2", "2+2*T+T^2"]);
    }

    #[test]
    fn factor_recombines() {
        let ring = PolyRing::new(Gf::prime(3).unwrap());
        let f = Poly::parse("2+T^4+2*T^5", ring.field()).unwrap();
        let fac = Factorizer::new(ring.clone()).factor(&f).unwrap();
        let mut prod = Poly::constant(fac.lead);
        for (p, e) in &fac.factors {
            prod = ring.mul(&prod, &ring.pow(p.poly(), *e as u64));
        }
        assert_eq!(prod, f);
    }
}
