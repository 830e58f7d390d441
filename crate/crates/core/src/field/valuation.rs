//! Places of `F_q(T)`, normalized absolute values and heights.

use std::cmp::Ordering;

use serde::Serialize;

use super::irreducible::{Factorizer, PrimePoly};
use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Place {
    Infinity,
    Finite(PrimePoly),
}

/// An element `num/den` of `F_q(T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    pub num: Poly,
    pub den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFn { num, den })
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFn { num, den: Poly::one() }
    }
}

/// An absolute value: zero or an integer power of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AbsValue {
    Zero,
    QPow(i64),
}

impl PartialOrd for AbsValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AbsValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (AbsValue::Zero, AbsValue::Zero) => Ordering::Equal,
            (AbsValue::Zero, _) => Ordering::Less,
            (_, AbsValue::Zero) => Ordering::Greater,
            (AbsValue::QPow(a), AbsValue::QPow(b)) => a.cmp(b),
        }
    }
}

impl AbsValue {
    pub fn to_f64(self, q: u64) -> f64 {
        match self {
            AbsValue::Zero => 0.0,
            AbsValue::QPow(k) => (q as f64).powi(k as i32),
        }
    }
}

/// Multiplicity of `pi` in a nonzero `x`.
pub fn ord(ring: &PolyRing, x: &Poly, pi: &PrimePoly) -> u64 {
    assert!(!x.is_zero(), "ord of zero");
    let mut k = 0;
    let mut rest = x.clone();
    loop {
        let (quo, r) = ring.divrem(&rest, pi.poly()).expect("prime is nonzero");
        if !r.is_zero() {
            return k;
        }
        rest = quo;
        k += 1;
    }
}

/// `|x|_v` normalized for the product formula: `q^{deg num - deg den}` at
/// infinity and `q^{deg π (ord_π den - ord_π num)}` at `π`.
pub fn abs_value(ring: &PolyRing, x: &RatFn, place: &Place) -> AbsValue {
    if x.num.is_zero() {
        return AbsValue::Zero;
    }
    match place {
        Place::Infinity => AbsValue::QPow(x.num.deg_i() - x.den.deg_i()),
        Place::Finite(pi) => {
            let v = ord(ring, &x.den, pi) as i64 - ord(ring, &x.num, pi) as i64;
            AbsValue::QPow(v * pi.degree() as i64)
        }
    }
}

/// Height of an element: its absolute value at infinity.
pub fn height(x: &RatFn) -> AbsValue {
    if x.num.is_zero() {
        AbsValue::Zero
    } else {
        AbsValue::QPow(x.num.deg_i() - x.den.deg_i())
    }
}

/// Height of an affine tuple: the largest coordinate height.
pub fn height_affine(xs: &[RatFn]) -> AbsValue {
    xs.iter().map(height).max().unwrap_or(AbsValue::Zero)
}

/// All places where `x` is not a unit, with the exponent of `q` in `|x|_v`.
pub fn nontrivial_places(factorizer: &mut Factorizer, ring: &PolyRing, x: &RatFn) -> Result<Vec<(Place, i64)>> {
    if x.num.is_zero() {
        return Err(Error::Precondition("the product formula needs a nonzero element".into()));
    }
    let mut primes: Vec<PrimePoly> = Vec::new();
    for part in [&x.num, &x.den] {
        for (p, _) in factorizer.factor(part)?.factors {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    primes.sort();
    let mut out = Vec::with_capacity(primes.len() + 1);
    for place in std::iter::once(Place::Infinity).chain(primes.into_iter().map(Place::Finite)) {
        if let AbsValue::QPow(k) = abs_value(ring, x, &place) {
            out.push((place, k));
        }
    }
    Ok(out)
}

/// Exponent of `q` in the product of all absolute values; zero when the
/// product formula holds.
pub fn product_formula_exponent(factorizer: &mut Factorizer, ring: &PolyRing, x: &RatFn) -> Result<i64> {
    Ok(nontrivial_places(factorizer, ring, x)?.iter().map(|(_, k)| k).sum())
}
