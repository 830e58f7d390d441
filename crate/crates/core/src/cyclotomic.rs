//! Exact values in `Z[ζ_p, ζ_ℓ]`.
//!
//! A value is stored in the basis `ζ_p^i ζ_ℓ^j`, `0 <= i <= p-2`,
//! `0 <= j <= ℓ-2`, which is a `Z`-basis because `p` and `ℓ` are distinct
//! primes. Sums of roots of unity are accumulated in the group ring
//! `Z[Z/p × Z/ℓ]` and reduced to the basis once.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{ExactInt, Real};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cyclotomic<Z> {
    p: u32,
    ell: u32,
    coords: Vec<Z>,
}

impl<Z: ExactInt> Cyclotomic<Z> {
    pub fn zero(p: u32, ell: u32) -> Self {
        assert!(p >= 2 && ell >= 2 && p != ell, "need distinct primes p, ell");
        let n = ((p - 1) * (ell - 1)) as usize;
        Cyclotomic { p, ell, coords: vec![Z::zero(); n] }
    }

    pub fn from_int(p: u32, ell: u32, z: Z) -> Self {
        let mut v = Self::zero(p, ell);
        v.coords[0] = z;
        v
    }

    pub fn one(p: u32, ell: u32) -> Self {
        Self::from_int(p, ell, Z::one())
    }

    /// `ζ_p^i ζ_ℓ^j`.
    pub fn root(p: u32, ell: u32, i: u32, j: u32) -> Self {
        let mut acc = RootCounts::new(p, ell);
        acc.add(i, j, 1);
        acc.finish()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// Coordinates, row-major in `(i, j)`.
    pub fn coords(&self) -> &[Z] {
        &self.coords
    }

    pub fn coord(&self, i: u32, j: u32) -> &Z {
        &self.coords[(i * (self.ell - 1) + j) as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Z::is_zero)
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if (self.p, self.ell) != (other.p, other.ell) {
            return Err(Error::Precondition(format!(
                "cyclotomic rings differ: ({}, {}) vs ({}, {})",
                self.p, self.ell, other.p, other.ell
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Cyclotomic { p: self.p, ell: self.ell, coords })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let (p, ell) = (self.p as usize, self.ell as usize);
        let mut full = vec![Z::zero(); p * ell];
        for i1 in 0..p - 1 {
            for j1 in 0..ell - 1 {
                let a = &self.coords[i1 * (ell - 1) + j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..p - 1 {
                    for j2 in 0..ell - 1 {
                        let b = &other.coords[i2 * (ell - 1) + j2];
                        if b.is_zero() {
                            continue;
                        }
                        let k = ((i1 + i2) % p) * ell + (j1 + j2) % ell;
                        full[k] = full[k].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(reduce_group_ring(self.p, self.ell, full))
    }

    pub fn scale(&self, k: &Z) -> Self {
        Cyclotomic { p: self.p, ell: self.ell, coords: self.coords.iter().map(|c| c.clone() * k.clone()).collect() }
    }

    /// Complex conjugation, sending every root of unity to its inverse.
    pub fn conj(&self) -> Self {
        let (p, ell) = (self.p as usize, self.ell as usize);
        let mut full = vec![Z::zero(); p * ell];
        for i in 0..p - 1 {
            for j in 0..ell - 1 {
                let k = ((p - i) % p) * ell + (ell - j) % ell;
                full[k] = self.coords[i * (ell - 1) + j].clone();
            }
        }
        reduce_group_ring(self.p, self.ell, full)
    }

    /// The rational integer this value equals, if it is one.
    pub fn as_integer(&self) -> Option<Z> {
        self.coords[1..].iter().all(Z::is_zero).then(|| self.coords[0].clone())
    }

    /// Division by an integer, defined only when every coordinate is divisible.
    pub fn exact_div(&self, d: &Z) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for c in &self.coords {
            let (quo, r) = c.div_rem(d);
            if !r.is_zero() {
                return Err(Error::Inexact(format!("coordinate {c} not divisible by {d}")));
            }
            coords.push(quo);
        }
        Ok(Cyclotomic { p: self.p, ell: self.ell, coords })
    }

    /// Image under the embedding `ζ_p -> e^{2πi/p}`, `ζ_ℓ -> e^{2πi/ℓ}`.
    pub fn embed<F: Real>(&self) -> Complex<F> {
        let tau = F::TAU();
        let (p, ell) = (F::from(self.p).unwrap(), F::from(self.ell).unwrap());
        let mut acc = Complex::new(F::zero(), F::zero());
        for i in 0..self.p - 1 {
            for j in 0..self.ell - 1 {
                let c = &self.coords[(i * (self.ell - 1) + j) as usize];
                if c.is_zero() {
                    continue;
                }
                let angle = tau * (F::from(i).unwrap() / p + F::from(j).unwrap() / ell);
                let cf = F::from(c.clone()).unwrap();
                acc = acc + Complex::from_polar(cf, angle);
            }
        }
        acc
    }

    pub fn abs<F: Real>(&self) -> F {
        self.embed::<F>().norm()
    }

    /// Converts the coordinates to another integer type.
    pub fn map_int<W: ExactInt>(&self) -> Cyclotomic<W> {
        Cyclotomic {
            p: self.p,
            ell: self.ell,
            coords: self
                .coords
                .iter()
                .map(|c| W::from_i128(c.to_i128().expect("fits in i128")).expect("fits"))
                .collect(),
        }
    }
}

fn reduce_group_ring<Z: ExactInt>(p: u32, ell: u32, mut full: Vec<Z>) -> Cyclotomic<Z> {
    let (p, ell) = (p as usize, ell as usize);
    // ζ_p^{p-1} = -(1 + ζ_p + ... + ζ_p^{p-2})
    for j in 0..ell {
        let top = full[(p - 1) * ell + j].clone();
        if !top.is_zero() {
            for i in 0..p - 1 {
                full[i * ell + j] = full[i * ell + j].clone() - top.clone();
            }
        }
    }
    // and likewise for ζ_ℓ
    let mut coords = Vec::with_capacity((p - 1) * (ell - 1));
    for i in 0..p - 1 {
        let top = full[i * ell + ell - 1].clone();
        for j in 0..ell - 1 {
            coords.push(full[i * ell + j].clone() - top.clone());
        }
    }
    Cyclotomic { p: p as u32, ell: ell as u32, coords }
}

impl<Z: ExactInt> Add for &Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn add(self, rhs: Self) -> Cyclotomic<Z> {
        self.checked_add(rhs).expect("cyclotomic ring mismatch")
    }
}

impl<Z: ExactInt> Add for Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn add(self, rhs: Self) -> Cyclotomic<Z> {
        &self + &rhs
    }
}

impl<Z: ExactInt> Neg for &Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn neg(self) -> Cyclotomic<Z> {
        Cyclotomic { p: self.p, ell: self.ell, coords: self.coords.iter().map(|c| -c.clone()).collect() }
    }
}

impl<Z: ExactInt> Neg for Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn neg(self) -> Cyclotomic<Z> {
        -&self
    }
}

impl<Z: ExactInt> Sub for &Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn sub(self, rhs: Self) -> Cyclotomic<Z> {
        self + &(-rhs)
    }
}

impl<Z: ExactInt> Sub for Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn sub(self, rhs: Self) -> Cyclotomic<Z> {
        &self - &rhs
    }
}

impl<Z: ExactInt> Mul for &Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn mul(self, rhs: Self) -> Cyclotomic<Z> {
        self.checked_mul(rhs).expect("cyclotomic ring mismatch")
    }
}

impl<Z: ExactInt> Mul for Cyclotomic<Z> {
    type Output = Cyclotomic<Z>;
    fn mul(self, rhs: Self) -> Cyclotomic<Z> {
        &self * &rhs
    }
}

impl<Z: ExactInt> fmt::Display for Cyclotomic<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in 0..self.p - 1 {
            for j in 0..self.ell - 1 {
                let c = self.coord(i, j);
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "{c}")?;
                if i > 0 {
                    write!(f, "*z{}^{i}", self.p)?;
                }
                if j > 0 {
                    write!(f, "*z{}^{j}", self.ell)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Group-ring accumulator for sums of `ζ_p^i ζ_ℓ^j`.
#[derive(Clone, Debug)]
pub struct RootCounts {
    p: u32,
    ell: u32,
    counts: Vec<i64>,
}

impl RootCounts {
    pub fn new(p: u32, ell: u32) -> Self {
        RootCounts { p, ell, counts: vec![0; (p * ell) as usize] }
    }

    #[inline]
    pub fn add(&mut self, i: u32, j: u32, c: i64) {
        self.counts[((i % self.p) * self.ell + j % self.ell) as usize] += c;
    }

    pub fn merge(&mut self, other: &RootCounts) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Raw count attached to `ζ_p^i ζ_ℓ^j`.
    pub fn count(&self, i: u32, j: u32) -> i64 {
        self.counts[((i % self.p) * self.ell + j % self.ell) as usize]
    }

    pub fn finish<Z: ExactInt>(&self) -> Cyclotomic<Z> {
        let full = self.counts.iter().map(|&c| Z::from_i64(c).expect("count fits")).collect();
        reduce_group_ring(self.p, self.ell, full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Cyclotomic<i64>;

    #[test]
    fn roots_sum_to_zero() {
        let mut acc = RootCounts::new(3, 2);
        for i in 0..3 {
            acc.add(i, 0, 1);
        }
        assert!(acc.finish::<i64>().is_zero());
    }

    #[test]
    fn gauss_sum_norm_for_three() {
        // ζ_3 - ζ_3^2 has norm 3
        let g = &C::root(3, 2, 1, 0) - &C::root(3, 2, 2, 0);
        assert_eq!((&g * &g.conj()).as_integer(), Some(3));
        assert!((g.abs::<f64>() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn conj_of_root_is_inverse() {
        for i in 0..5 {
            for j in 0..3 {
                let z = C::root(5, 3, i, j);
                assert_eq!((&z * &z.conj()).as_integer(), Some(1));
            }
        }
    }

    #[test]
    fn mismatched_rings_error() {
        assert!(C::one(3, 2).checked_add(&C::one(5, 2)).is_err());
    }

    #[test]
    fn exact_division() {
        let v = C::from_int(3, 2, 9).scale(&2);
        assert_eq!(v.exact_div(&3).unwrap().as_integer(), Some(6));
        assert!(C::root(3, 2, 1, 0).exact_div(&3).is_err());
    }
}
