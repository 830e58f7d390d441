//! Dense univariate polynomials over a table field.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gf::{Fe, Gf};
use crate::error::{Error, Result};

/// Coefficients low-to-high with no trailing zeros; the zero polynomial is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: Fe) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `T`.
    pub fn t() -> Self {
        Self::from_coeffs(vec![0, 1])
    }

    pub fn monomial(c: Fe, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Degree, with `None` standing for the degree of zero (minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer with `-1` for zero, for size comparisons.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    /// Parses `c0+c1*T+c2*T^2` style text. Terms may come in any order and
    /// repeated powers are added. Coefficients are integer encodings below `q`.
    pub fn parse(text: &str, field: &Gf) -> Result<Poly> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut coeffs: Vec<Fe> = Vec::new();
        for term in s.split('+') {
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in {text:?}")));
            }
            let (c, k) = parse_term(term, field.size())?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0);
            }
            coeffs[k] = field.add(coeffs[k], c);
        }
        Ok(Poly::from_coeffs(coeffs))
    }

    /// Evaluation at a point of any field whose encoding extends the coefficient field.
    pub fn eval(&self, field: &Gf, x: Fe) -> Fe {
        self.coeffs.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c))
    }
}

fn parse_term(term: &str, q: u32) -> Result<(Fe, usize)> {
    let bad = || Error::Parse(format!("cannot parse term {term:?}"));
    let (coef, var) = match term.find('T') {
        None => (term, None),
        Some(i) => {
            let (c, v) = term.split_at(i);
            let c = c.strip_suffix('*').unwrap_or(c);
            if c.is_empty() && i > 0 {
                return Err(bad());
            }
            (c, Some(v))
        }
    };
    let c = if coef.is_empty() { 1u64 } else { coef.parse::<u64>().map_err(|_| bad())? };
    if c >= q as u64 {
        return Err(Error::CoefficientRange { coeff: c, p: q });
    }
    let k = match var {
        None => 0,
        Some("T") => 1,
        Some(v) => v.strip_prefix("T^").and_then(|e| e.parse::<usize>().ok()).ok_or_else(bad)?,
    };
    Ok((c as Fe, k))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, _) => write!(f, "{c}*T")?,
                (_, 1) => write!(f, "T^{k}")?,
                _ => write!(f, "{c}*T^{k}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial arithmetic over a fixed coefficient field.
#[derive(Clone, Debug)]
pub struct PolyRing {
    field: Arc<Gf>,
}

impl PolyRing {
    pub fn new(field: Arc<Gf>) -> Self {
        PolyRing { field }
    }

    pub fn field(&self) -> &Arc<Gf> {
        &self.field
    }

    /// Number of elements of the coefficient field.
    pub fn q(&self) -> u64 {
        self.field.size() as u64
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let f = &self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let f = &self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, c: Fe, a: &Poly) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&x| self.field.mul(c, x)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = &self.field;
        let mut out = vec![0; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut acc = Poly::one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    /// Euclidean division: `a = quo * b + rem` with `deg rem < deg b`.
    pub fn divrem(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let mut r = a.coeffs.clone();
        if r.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let inv_lead = f.inv(b.lead());
        let mut q = vec![0; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv_lead);
            q[k - db] = t;
            for (i, &bc) in b.coeffs.iter().enumerate() {
                r[k - db + i] = f.sub(r[k - db + i], f.mul(t, bc));
            }
        }
        r.truncate(db);
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.divrem(a, b).expect("nonzero modulus").1
    }

    /// Quotient of an exact division; errors if the remainder is nonzero.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(a, b)?;
        if !r.is_zero() {
            return Err(Error::Inexact(format!("{b} does not divide {a}")));
        }
        Ok(q)
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        self.scale(self.field.inv(a.lead()), a)
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// `(g, s, t)` with `s*a + t*b = g` and `g` monic.
    pub fn ext_gcd(&self, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = self.divrem(&r0, &r1).expect("nonzero");
            let s = self.sub(&s0, &self.mul(&q, &s1));
            let t = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let c = self.field.inv(r0.lead());
        (self.scale(c, &r0), self.scale(c, &s0), self.scale(c, &t0))
    }

    /// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
    pub fn inv_mod(&self, a: &Poly, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.ext_gcd(&self.rem(a, m), m);
        (g == Poly::one()).then(|| self.rem(&s, m))
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m)
    }

    pub fn powmod(&self, a: &Poly, mut e: u64, m: &Poly) -> Poly {
        let mut acc = self.rem(&Poly::one(), m);
        let mut b = self.rem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &b, m);
            }
            e >>= 1;
            if e > 0 {
                b = self.mulmod(&b, &b, m);
            }
        }
        acc
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().enumerate().skip(1).map(|(k, &c)| self.field.scale(k as i64, c)).collect())
    }

    /// Composition `a(b)`.
    pub fn compose(&self, a: &Poly, b: &Poly) -> Poly {
        a.coeffs.iter().rev().fold(Poly::zero(), |acc, &c| self.add(&self.mul(&acc, b), &Poly::constant(c)))
    }

    /// Monic polynomials of degree `d` in lexicographic order of the
    /// coefficient vector `(c_0, ..., c_{d-1})`.
    pub fn monics(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.q();
        let total = q.pow(d as u32);
        (0..total).map(move |idx| {
            let mut coeffs = vec![0; d + 1];
            let mut x = idx;
            for i in (0..d).rev() {
                coeffs[i] = (x % q) as Fe;
                x /= q;
            }
            coeffs[d] = 1;
            Poly::from_coeffs(coeffs)
        })
    }

    /// All polynomials of degree `< b`, including zero, indexed by base-`q` digits.
    pub fn below_degree(&self, b: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.q();
        (0..q.pow(b as u32)).map(move |idx| self.from_index(idx, b))
    }

    /// Polynomial whose low `b` coefficients are the base-`q` digits of `idx`.
    pub fn from_index(&self, mut idx: u64, b: usize) -> Poly {
        let q = self.q();
        let mut coeffs = vec![0; b];
        for c in coeffs.iter_mut() {
            *c = (idx % q) as Fe;
            idx /= q;
        }
        Poly::from_coeffs(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PolyRing {
        PolyRing::new(Gf::prime(3).unwrap())
    }

    #[test]
    fn parse_and_display_round_trip() {
        let r = f3();
        let p = Poly::parse("1+2*T^3", r.field()).unwrap();
        assert_eq!(p.coeffs(), &[1, 0, 0, 2]);
        assert_eq!(p.to_string(), "1+2*T^3");
        assert_eq!(Poly::parse(" T^2 + 1 ", r.field()).unwrap().to_string(), "1+T^2");
        assert!(Poly::parse("3+T", r.field()).is_err());
        assert!(Poly::parse("1+", r.field()).is_err());
    }

    #[test]
    fn divrem_worked_example() {
        let r = f3();
        let a = Poly::parse("1+T+T^3", r.field()).unwrap();
        let b = Poly::parse("1+T^2", r.field()).unwrap();
        let (q, rem) = r.divrem(&a, &b).unwrap();
        assert_eq!(q, Poly::t());
        assert_eq!(rem, Poly::one());
    }

    #[test]
    fn zero_divisor_is_an_error() {
        let r = f3();
        assert_eq!(r.divrem(&Poly::one(), &Poly::zero()), Err(Error::DivisionByZero));
    }
}
