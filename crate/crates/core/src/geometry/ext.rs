//! Extensions of a table field and point enumeration over them.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{is_irreducible, Fe, Gf, PolyRing};

/// Largest extension that will be tabulated for point searches.
pub const MAX_EXT_SIZE: u64 = 1 << 22;

/// The degree-`r` extension of `base` cut out by the lexicographically first
/// monic irreducible, so witnesses can be reinterpreted later.
pub fn extension_of_degree(base: &Arc<Gf>, r: u32) -> Result<Arc<Gf>> {
    if r <= 1 {
        return Ok(base.clone());
    }
    let size = (base.size() as u64).checked_pow(r).unwrap_or(u64::MAX);
    if size > MAX_EXT_SIZE {
        return Err(Error::Unsupported(format!("extension of size {size} is too large to tabulate")));
    }
    let ring = PolyRing::new(base.clone());
    let modulus =
        ring.monics(r as usize).find(|f| is_irreducible(&ring, f)).expect("irreducibles exist in every degree");
    Gf::extension(base, modulus.coeffs().to_vec())
}

/// A point over the degree-`ext_degree` extension of the field it was found for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub ext_degree: u32,
    pub coords: Vec<Fe>,
}

/// Normalized representatives of `P^{k-1}(E)` (first nonzero coordinate 1),
/// in a fixed order.
pub fn projective_points(field: &Gf, k: usize) -> impl Iterator<Item = Vec<Fe>> + '_ {
    let n = field.size() as u64;
    (0..k).flat_map(move |lead| {
        let free = k - lead - 1;
        (0..n.pow(free as u32)).map(move |mut idx| {
            let mut v = vec![0; k];
            v[lead] = 1;
            for c in v[lead + 1..].iter_mut() {
                *c = (idx % n) as Fe;
                idx /= n;
            }
            v
        })
    })
}

/// Number of points of `P^{k-1}(E)` for `|E| = n`.
pub fn projective_count(n: u64, k: usize) -> u64 {
    (0..k as u32).map(|i| n.pow(i)).sum()
}

/// All of `E^k` in a fixed order.
pub fn affine_points(field: &Gf, k: usize) -> impl Iterator<Item = Vec<Fe>> + '_ {
    let n = field.size() as u64;
    (0..n.pow(k as u32)).map(move |mut idx| {
        let mut v = vec![0; k];
        for c in v.iter_mut() {
            *c = (idx % n) as Fe;
            idx /= n;
        }
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_plane_over_f3_has_13_points() {
        let f3 = Gf::prime(3).unwrap();
        assert_eq!(projective_points(&f3, 3).count(), 13);
        assert_eq!(projective_count(3, 3), 13);
    }

    #[test]
    fn quadratic_extension_is_reproducible() {
        let f3 = Gf::prime(3).unwrap();
        let a = extension_of_degree(&f3, 2).unwrap();
        let b = extension_of_degree(&f3, 2).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.size(), 9);
    }
}
