//! Exact emptiness certificates for zero sets in at most two affine variables.

use std::sync::Arc;

use crate::field::{Gf, Poly, PolyRing};
use crate::form::MPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroSet {
    /// No common zero over the algebraic closure.
    Empty,
    /// A common zero exists over the algebraic closure.
    NonEmpty,
    /// Elimination was inconclusive.
    Unknown,
}

/// Determinant over `k[x]` by fraction-free (Bareiss) elimination.
pub fn det_poly(ring: &PolyRing, mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut prev = Poly::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Poly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = ring.sub(&ring.mul(&m[k][k], &m[i][j]), &ring.mul(&m[i][k], &m[k][j]));
                m[i][j] = ring.div_exact(&num, &prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        ring.neg(&d)
    } else {
        d
    }
}

/// Resultant in `y` of `a, b ∈ k[x][y]` (coefficient lists low-to-high in `y`).
pub fn resultant_y(ring: &PolyRing, a: &[Poly], b: &[Poly]) -> Poly {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    if n == 0 {
        return Poly::one();
    }
    let mut m = vec![vec![Poly::zero(); n]; n];
    for r in 0..db {
        for (i, c) in a.iter().rev().enumerate() {
            m[r][r + i] = c.clone();
        }
    }
    for r in 0..da {
        for (i, c) in b.iter().rev().enumerate() {
            m[db + r][r + i] = c.clone();
        }
    }
    det_poly(ring, m)
}

fn strip_var_factor(ring: &PolyRing, mut g: Poly) -> Poly {
    while !g.is_zero() && g.coeff(0) == 0 {
        g = ring.div_exact(&g, &Poly::t()).expect("x divides");
    }
    g
}

fn trim(rows: Vec<Poly>) -> Vec<Poly> {
    let mut rows = rows;
    while rows.len() > 1 && rows.last().is_some_and(Poly::is_zero) {
        rows.pop();
    }
    rows
}

/// gcd of all pairwise `y`-eliminants, or `None` if every eliminant vanished.
fn eliminant_gcd(ring: &PolyRing, polys: &[MPoly], x: usize, y: usize) -> Option<Poly> {
    let views: Vec<Vec<Poly>> = polys.iter().map(|f| trim(f.to_bivariate(x, y))).collect();
    let mut g: Option<Poly> = None;
    let mut absorb = |e: Poly| {
        if !e.is_zero() {
            g = Some(match g.take() {
                None => ring.monic(&e),
                Some(h) => ring.gcd(&h, &e),
            });
        }
    };
    for v in &views {
        if v.len() == 1 {
            absorb(v[0].clone());
        }
    }
    for i in 0..views.len() {
        for j in i + 1..views.len() {
            if views[i].len() > 1 && views[j].len() > 1 {
                absorb(resultant_y(ring, &views[i], &views[j]));
            }
        }
    }
    g
}

/// Decides whether the polynomials have a common zero in `k̄^v`, `v <= 2`
/// (or in the torus `(k̄^*)^v` when `torus` is set).
pub fn affine_common_zeros(field: &Arc<Gf>, polys: &[MPoly], torus: bool) -> ZeroSet {
    let polys: Vec<MPoly> = polys.iter().filter(|f| !f.is_zero()).cloned().collect();
    let Some(first) = polys.first() else {
        return ZeroSet::NonEmpty;
    };
    let v = first.nvars();
    if polys.iter().any(|f| f.total_degree() == Some(0)) {
        return ZeroSet::Empty;
    }
    let ring = PolyRing::new(field.clone());
    match v {
        0 => ZeroSet::NonEmpty,
        1 => {
            let mut g = Poly::zero();
            for f in &polys {
                g = ring.gcd(&g, &f.to_univariate(0));
            }
            if torus {
                g = strip_var_factor(&ring, g);
            }
            if g.degree().unwrap_or(0) >= 1 {
                ZeroSet::NonEmpty
            } else {
                ZeroSet::Empty
            }
        }
        2 => {
            if polys.len() == 1 {
                let monomial = polys[0].terms().count() == 1;
                return if torus && monomial { ZeroSet::Empty } else { ZeroSet::NonEmpty };
            }
            for (x, y) in [(0, 1), (1, 0)] {
                if let Some(g) = eliminant_gcd(&ring, &polys, x, y) {
                    let g = if torus { strip_var_factor(&ring, g) } else { g };
                    if g.degree() == Some(0) {
                        return ZeroSet::Empty;
                    }
                }
            }
            ZeroSet::Unknown
        }
        _ => ZeroSet::Unknown,
    }
}

/// Decides whether homogeneous polynomials in `k` variables, `k <= 3`, have a
/// common zero in projective space, chart by chart.
pub fn projective_common_zeros(field: &Arc<Gf>, polys: &[MPoly]) -> ZeroSet {
    let Some(first) = polys.first() else {
        return ZeroSet::NonEmpty;
    };
    let k = first.nvars();
    if k > 3 {
        return ZeroSet::Unknown;
    }
    let mut unknown = false;
    // Chart j: X_0 = .. = X_{j-1} = 0, X_j = 1.
    for j in 0..k {
        let chart: Vec<MPoly> = polys
            .iter()
            .map(|f| {
                let mut g = f.clone();
                for _ in 0..j {
                    g = g.specialize(field, 0, 0);
                }
                g.specialize(field, 0, 1)
            })
            .collect();
        match affine_common_zeros(field, &chart, false) {
            ZeroSet::NonEmpty => return ZeroSet::NonEmpty,
            ZeroSet::Unknown => unknown = true,
            ZeroSet::Empty => {}
        }
    }
    if unknown {
        ZeroSet::Unknown
    } else {
        ZeroSet::Empty
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_of_linear_polys() {
        let f = Gf::prime(5).unwrap();
        let ring = PolyRing::new(f.clone());
        // a = y - x, b = y + x - 2: resultant 2 - 2x up to sign, root x = 1
        let a = vec![Poly::from_coeffs(vec![0, 4]), Poly::one()];
        let b = vec![Poly::from_coeffs(vec![3, 1]), Poly::one()];
        let r = resultant_y(&ring, &a, &b);
        assert_eq!(r.degree(), Some(1));
        assert_eq!(r.eval(&f, 1), 0);
    }

    #[test]
    fn circle_and_line() {
        let f = Gf::prime(7).unwrap();
        // x^2 + y^2 - 1 and x - 3 meet over the closure
        let circle = MPoly::from_terms(&f, 2, [(vec![2, 0], 1), (vec![0, 2], 1), (vec![0, 0], 6)]);
        let line = MPoly::from_terms(&f, 2, [(vec![1, 0], 1), (vec![0, 0], 4)]);
        assert_ne!(affine_common_zeros(&f, &[circle.clone(), line], false), ZeroSet::Empty);
        // x^2 + y^2 - 1 and its partials 2x, 2y have no common zero
        let dx = circle.derivative(&f, 0);
        let dy = circle.derivative(&f, 1);
        assert_eq!(affine_common_zeros(&f, &[circle, dx, dy], false), ZeroSet::Empty);
    }

    #[test]
    fn torus_excludes_axes() {
        let f = Gf::prime(5).unwrap();
        // x*y vanishes only on the axes
        let xy = MPoly::from_terms(&f, 2, [(vec![1, 1], 1)]);
        assert_eq!(affine_common_zeros(&f, std::slice::from_ref(&xy), true), ZeroSet::Empty);
        assert_eq!(affine_common_zeros(&f, &[xy], false), ZeroSet::NonEmpty);
    }
}
