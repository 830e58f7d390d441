//! Table-driven finite fields.
//!
//! Every field is `F_p` or a simple extension of another table field. An
//! element is a `u32` whose base-`p` digits are its coordinates all the way
//! down the tower, so subfield elements embed without conversion and addition
//! is digitwise. Multiplication goes through exp/log tables and addition
//! through Zech logarithms.

use std::sync::Arc;

use crate::arith::prime_factors;
use crate::error::{Error, Result};

/// Field element, encoded as described in the module docs.
pub type Fe = u32;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug)]
pub struct Gf {
    p: u32,
    size: u32,
    prime_degree: u32,
    base: Option<Arc<Gf>>,
    modulus: Vec<Fe>,
    generator: Fe,
    exp: Vec<Fe>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl Gf {
    /// The prime field `F_p`, tabulated with its smallest primitive root.
    pub fn prime(p: u32) -> Result<Arc<Gf>> {
        if p < 3 || !crate::arith::is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not an odd prime")));
        }
        let order = (p - 1) as u64;
        let factors = prime_factors(order);
        let g = (1..p)
            .find(|&g| factors.iter().all(|r| pow_mod(g as u64, order / r, p as u64) != 1))
            .expect("prime field has a primitive root");
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut x = 1u64;
        for _ in 0..order {
            exp.push(x as Fe);
            x = x * g as u64 % p as u64;
        }
        Ok(Arc::new(Self::finish(p, p, 1, None, Vec::new(), g, exp)))
    }

    /// `base[Y]/(modulus)`, with `modulus` monic of degree >= 1 given
    /// low-to-high. Fails if the quotient is not a field.
    pub fn extension(base: &Arc<Gf>, modulus: Vec<Fe>) -> Result<Arc<Gf>> {
        let d = modulus.len().saturating_sub(1);
        if d == 0 || modulus[d] != 1 {
            return Err(Error::InvalidField("extension modulus must be monic of positive degree".into()));
        }
        if d == 1 {
            // A linear modulus gives the base field back.
            return Ok(base.clone());
        }
        let bsize = base.size as u64;
        let size = bsize
            .checked_pow(d as u32)
            .filter(|&s| s <= 1 << 27)
            .ok_or_else(|| Error::InvalidField("extension too large to tabulate".into()))?;
        let order = size - 1;
        let factors = prime_factors(order);
        let ring = Quotient { base, modulus: &modulus };
        let mut found = None;
        for cand in bsize..size {
            let g = ring.unpack(cand as Fe);
            // In a field every nonzero element has order dividing |E| - 1.
            if !ring.is_one(&ring.pow(&g, order)) {
                return Err(Error::InvalidField("extension modulus is reducible".into()));
            }
            if factors.iter().all(|r| !ring.is_one(&ring.pow(&g, order / r))) {
                found = Some(cand as Fe);
                break;
            }
        }
        let g = found.ok_or_else(|| Error::InvalidField("extension modulus is reducible".into()))?;
        let gv = ring.unpack(g);
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut x = ring.unpack(1);
        for _ in 0..order {
            exp.push(ring.pack(&x));
            x = ring.mul(&x, &gv);
        }
        let gf = Self::finish(base.p, size as u32, base.prime_degree * d as u32, Some(base.clone()), modulus, g, exp);
        if gf.log.iter().skip(1).any(|&l| l == NO_LOG) {
            return Err(Error::InvalidField("extension modulus is reducible".into()));
        }
        Ok(Arc::new(gf))
    }

    fn finish(
        p: u32,
        size: u32,
        prime_degree: u32,
        base: Option<Arc<Gf>>,
        modulus: Vec<Fe>,
        generator: Fe,
        mut exp: Vec<Fe>,
    ) -> Gf {
        let order = (size - 1) as usize;
        let mut log = vec![NO_LOG; size as usize];
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        exp.extend_from_within(..order);
        let mut zech = vec![NO_LOG; order];
        for (k, z) in zech.iter_mut().enumerate() {
            let s = digit_add(p, exp[k], 1);
            if s != 0 {
                *z = log[s as usize];
            }
        }
        Gf { p, size, prime_degree, base, modulus, generator, exp, log, zech }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Degree over the prime field.
    pub fn prime_degree(&self) -> u32 {
        self.prime_degree
    }

    pub fn base(&self) -> Option<&Arc<Gf>> {
        self.base.as_ref()
    }

    /// Modulus over the immediate base, low-to-high (empty for `F_p`).
    pub fn modulus(&self) -> &[Fe] {
        &self.modulus
    }

    /// The primitive element behind the log tables (smallest by encoding).
    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn order(&self) -> u32 {
        self.size - 1
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.size
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let (la, lb) = (self.log[a as usize], self.log[b as usize]);
        let order = self.size - 1;
        let d = if lb >= la { lb - la } else { lb + order - la };
        match self.zech[d as usize] {
            NO_LOG => 0,
            z => self.exp[(la + z) as usize],
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + (self.size - 1) / 2) as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize];
        self.exp[((self.size - 1 - l) % (self.size - 1)) as usize]
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as u64;
        let l = self.log[a as usize] as u64 * (e % order) % order;
        self.exp[l as usize]
    }

    /// Discrete log to the table generator, `None` for zero.
    #[inline]
    pub fn log(&self, a: Fe) -> Option<u32> {
        match self.log[a as usize] {
            NO_LOG => None,
            l => Some(l),
        }
    }

    #[inline]
    pub fn exp(&self, k: u64) -> Fe {
        self.exp[(k % (self.size - 1) as u64) as usize]
    }

    /// Integer multiple `k * a` via the prime subfield.
    pub fn scale(&self, k: i64, a: Fe) -> Fe {
        let r = k.rem_euclid(self.p as i64) as Fe;
        self.mul(r, a)
    }

    /// Absolute trace to `F_p`, returned as an integer in `0..p`.
    pub fn trace_to_prime(&self, a: Fe) -> u32 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.prime_degree {
            acc = self.add(acc, x);
            x = self.pow(x, self.p as u64);
        }
        debug_assert!(acc < self.p);
        acc
    }

    /// Whether `a` lies in the immediate base field.
    pub fn in_base(&self, a: Fe) -> bool {
        match &self.base {
            Some(b) => a < b.size,
            None => true,
        }
    }

    /// Coordinates over the immediate base, low-to-high.
    pub fn to_base_digits(&self, a: Fe) -> Vec<Fe> {
        let bs = self.base.as_ref().map_or(self.size, |b| b.size);
        let d = self.modulus.len().saturating_sub(1).max(1);
        let mut out = Vec::with_capacity(d);
        let mut x = a;
        for _ in 0..d {
            out.push(x % bs);
            x /= bs;
        }
        out
    }

    /// Inverse of [`Gf::to_base_digits`]; excess digits must be zero.
    pub fn from_base_digits(&self, digits: &[Fe]) -> Fe {
        let bs = self.base.as_ref().map_or(self.size, |b| b.size);
        digits.iter().rev().fold(0, |acc, &c| acc * bs + c)
    }
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    let mut b = b % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Digitwise base-`p` addition, the ground truth that the Zech tables encode.
pub fn digit_add(p: u32, mut a: Fe, mut b: Fe) -> Fe {
    let mut out = 0;
    let mut place = 1;
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

/// Arithmetic in `base[Y]/(modulus)` on coefficient vectors, used only to
/// build the tables of an extension.
struct Quotient<'a> {
    base: &'a Gf,
    modulus: &'a [Fe],
}

impl Quotient<'_> {
    fn deg(&self) -> usize {
        self.modulus.len() - 1
    }

    fn unpack(&self, mut a: Fe) -> Vec<Fe> {
        let bs = self.base.size;
        (0..self.deg())
            .map(|_| {
                let c = a % bs;
                a /= bs;
                c
            })
            .collect()
    }

    fn pack(&self, v: &[Fe]) -> Fe {
        v.iter().rev().fold(0, |acc, &c| acc * self.base.size + c)
    }

    fn is_one(&self, v: &[Fe]) -> bool {
        v[0] == 1 && v[1..].iter().all(|&c| c == 0)
    }

    fn mul(&self, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let f = self.base;
        let d = self.deg();
        let mut prod = vec![0; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus[..d].iter().enumerate() {
                prod[k - d + i] = f.sub(prod[k - d + i], f.mul(c, m));
            }
            prod[k] = 0;
        }
        prod.truncate(d);
        prod
    }

    fn pow(&self, a: &[Fe], mut e: u64) -> Vec<Fe> {
        let mut acc = self.unpack(1);
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_uses_smallest_primitive_root() {
        assert_eq!(Gf::prime(7).unwrap().generator(), 3);
        assert_eq!(Gf::prime(3).unwrap().generator(), 2);
        assert_eq!(Gf::prime(5).unwrap().generator(), 2);
    }

    #[test]
    fn zech_addition_matches_digits() {
        let f3 = Gf::prime(3).unwrap();
        let f9 = Gf::extension(&f3, vec![1, 0, 1]).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(f9.add(a, b), digit_add(3, a, b));
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        let f3 = Gf::prime(3).unwrap();
        assert!(Gf::extension(&f3, vec![2, 0, 1]).is_err());
    }

    #[test]
    fn trace_lands_in_prime_field() {
        let f3 = Gf::prime(3).unwrap();
        let f9 = Gf::extension(&f3, vec![1, 0, 1]).unwrap();
        let traces: Vec<u32> = f9.elements().map(|a| f9.trace_to_prime(a)).collect();
        for t in 0..3 {
            assert_eq!(traces.iter().filter(|&&x| x == t).count(), 3);
        }
    }
}
