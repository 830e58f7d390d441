//! `F_q`, `F_q[T]`, residue fields `F_q[T]/(π)` and the places of `F_q(T)`.

pub mod gf;
pub mod irreducible;
pub mod poly;
pub mod valuation;

use std::sync::Arc;

use serde::Serialize;

pub use gf::{Fe, Gf};
pub use irreducible::{enumerate_irreducibles, is_irreducible, Factorization, Factorizer, PrimePoly};
pub use poly::{Poly, PolyRing};

use crate::arith::{irreducible_count, pow_u64};
use crate::error::{Error, Result};

/// The constant field `F_q`, `q = p^e`, with its polynomial ring.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    ring: PolyRing,
}

impl FieldSpec {
    /// For `e > 1` the modulus is the lexicographically first monic irreducible
    /// of degree `e` over `F_p`, so the field is reproducible.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        let fp = Gf::prime(p)?;
        let fq = if e == 1 {
            fp
        } else {
            let modulus = enumerate_irreducibles(&PolyRing::new(fp.clone()), e as usize)
                .into_iter()
                .next()
                .expect("irreducibles exist in every degree");
            Gf::extension(&fp, modulus.coeffs().to_vec())?
        };
        Ok(FieldSpec { p, e, ring: PolyRing::new(fq) })
    }

    pub fn from_q(q: u64) -> Result<Self> {
        let (p, e) =
            crate::arith::prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Self::new(p as u32, e)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.ring.q()
    }

    pub fn fq(&self) -> &Arc<Gf> {
        self.ring.field()
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn parse_poly(&self, text: &str) -> Result<Poly> {
        Poly::parse(text, self.fq())
    }

    /// Parses and certifies a monic irreducible.
    pub fn parse_prime(&self, text: &str) -> Result<PrimePoly> {
        PrimePoly::new(&self.ring, self.parse_poly(text)?)
    }

    pub fn residue(&self, pi: &PrimePoly) -> Result<Residue> {
        let field = Gf::extension(self.fq(), pi.poly().coeffs().to_vec())?;
        Ok(Residue { prime: pi.clone(), field, ring: self.ring.clone() })
    }

    /// Monic irreducibles of degree `delta` with the prime-count check.
    pub fn primes_of_degree(&self, delta: usize) -> Result<PrimeList> {
        if delta == 0 {
            return Err(Error::Precondition("prime degree must be at least 1".into()));
        }
        let primes: Vec<PrimePoly> =
            enumerate_irreducibles(&self.ring, delta).into_iter().map(PrimePoly::trusted).collect();
        Ok(PrimeList::new(self.q(), delta, primes))
    }
}

/// Enumerated primes of one degree together with the prime-count comparison.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeList {
    pub q: u64,
    pub delta: usize,
    pub primes: Vec<PrimePoly>,
    pub count: u64,
    pub exact_count: u64,
    pub pnt_deviation: f64,
    pub pnt_bound: f64,
    pub pnt_holds: bool,
}

impl PrimeList {
    fn new(q: u64, delta: usize, primes: Vec<PrimePoly>) -> Self {
        let count = primes.len() as u64;
        let (deviation, bound) = pnt_terms(q, delta, count);
        PrimeList {
            q,
            delta,
            count,
            exact_count: irreducible_count(q, delta as u64),
            pnt_deviation: deviation,
            pnt_bound: bound,
            pnt_holds: deviation <= bound,
            primes,
        }
    }
}

/// `(|count - q^Δ/Δ|, q^{Δ/2}/Δ + q^{Δ/3})`.
pub fn pnt_terms(q: u64, delta: usize, count: u64) -> (f64, f64) {
    let d = delta as f64;
    let qf = q as f64;
    let main = pow_u64(q, delta as u64) as f64 / d;
    ((count as f64 - main).abs(), qf.powf(d / 2.0) / d + qf.powf(d / 3.0))
}

/// The residue field `k_π = F_q[T]/(π)` with reduction and lifting.
///
/// A residue class is encoded by the base-`q` digits of its reduced
/// representative, matching the encoding of `field`.
#[derive(Clone, Debug)]
pub struct Residue {
    prime: PrimePoly,
    field: Arc<Gf>,
    ring: PolyRing,
}

impl Residue {
    pub fn prime(&self) -> &PrimePoly {
        &self.prime
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.prime.degree()
    }

    pub fn size(&self) -> u64 {
        self.field.size() as u64
    }

    pub fn reduce(&self, x: &Poly) -> Fe {
        let r = self.ring.rem(x, self.prime.poly());
        let q = self.ring.q() as Fe;
        r.coeffs().iter().rev().fold(0, |acc, &c| acc * q + c)
    }

    pub fn lift(&self, z: Fe) -> Poly {
        self.ring.from_index(z as u64, self.degree())
    }

    /// Coefficient of `T^{Δ-1}` in the reduced representative.
    pub fn top_coeff(&self, z: Fe) -> Fe {
        let q = self.ring.q() as Fe;
        let mut x = z;
        for _ in 1..self.degree() {
            x /= q;
        }
        x % q
    }
}
