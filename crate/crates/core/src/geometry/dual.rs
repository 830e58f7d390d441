//! Dual varieties: closed form for quadrics, user-supplied duals and a
//! tangency search oracle.

use std::sync::Arc;

use serde::Serialize;

use super::ext::Witness;
use super::regularity::{search_projective, SearchLimits};
use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec, Gf, Poly, PolyRing, Residue};
use crate::form::{MPoly, MultiForm};

/// Symmetric matrix over `F_q[T]`.
pub type PolyMatrix = Vec<Vec<Poly>>;

/// Gram matrix of a quadric: `A_ii = coeff(X_i^2)`, `A_ij = coeff(X_i X_j)/2`.
pub fn gram_matrix(spec: &FieldSpec, f: &MultiForm) -> Result<PolyMatrix> {
    if f.m() != 2 {
        return Err(Error::Precondition("Gram matrices need a quadric".into()));
    }
    let ring = spec.ring();
    let half = spec.fq().inv(2);
    let k = f.nvars();
    let mut a = vec![vec![Poly::zero(); k]; k];
    for (e, c) in f.terms() {
        let idx: Vec<usize> = (0..k).filter(|&i| e[i] > 0).collect();
        match idx.as_slice() {
            [i] => a[*i][*i] = c.clone(),
            [i, j] => {
                let h = ring.scale(half, c);
                a[*i][*j] = h.clone();
                a[*j][*i] = h;
            }
            _ => unreachable!("quadric terms touch one or two variables"),
        }
    }
    Ok(a)
}

fn minor(a: &PolyMatrix, row: usize, col: usize) -> PolyMatrix {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion (matrices here have size at most 4 or 5).
pub fn det(ring: &PolyRing, a: &PolyMatrix) -> Poly {
    match a.len() {
        0 => Poly::one(),
        1 => a[0][0].clone(),
        n => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let term = ring.mul(&a[0][j], &det(ring, &minor(a, 0, j)));
                acc = if j % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
            }
            acc
        }
    }
}

/// Adjugate: `adj(A)_ij = (-1)^{i+j} det(minor(A, j, i))`.
pub fn adjugate(ring: &PolyRing, a: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    if n == 1 {
        return vec![vec![Poly::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = det(ring, &minor(a, j, i));
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        ring.neg(&d)
                    }
                })
                .collect()
        })
        .collect()
}

/// The dual of a nondegenerate quadric `x^T A x`: `w^T adj(A) w`.
pub fn quadric_dual(spec: &FieldSpec, f: &MultiForm) -> Result<MultiForm> {
    let ring = spec.ring();
    let a = gram_matrix(spec, f)?;
    if det(ring, &a).is_zero() {
        return Err(Error::Precondition("degenerate quadric has no dual hypersurface".into()));
    }
    let adj = adjugate(ring, &a);
    let k = f.nvars();
    let mut terms = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let mut e = vec![0; k];
            e[i] += 1;
            e[j] += 1;
            terms.push((e, adj[i][j].clone()));
        }
    }
    MultiForm::new(ring, f.n(), 2, terms)
}

/// Expected degree `m (m-1)^{n-1}` of the dual of a smooth hypersurface of degree `m` in `P^n`.
pub fn expected_dual_degree(n: usize, m: u32) -> u64 {
    m as u64 * (m as u64 - 1).pow(n as u32 - 1)
}

/// Inverse of a square matrix over a field by Gauss–Jordan elimination.
pub fn invert_ff(field: &Gf, a: &[Vec<Fe>]) -> Option<Vec<Vec<Fe>>> {
    let n = a.len();
    let mut m: Vec<Vec<Fe>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| (i == j) as Fe));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| m[r][c] != 0)?;
        m.swap(c, piv);
        let inv = field.inv(m[c][c]);
        for x in m[c].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for r in 0..n {
            if r != c && m[r][c] != 0 {
                let factor = m[r][c];
                let pivot = m[c].clone();
                for (x, &y) in m[r].iter_mut().zip(&pivot) {
                    *x = field.sub(*x, field.mul(factor, y));
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// How membership of `w` in the affine cone over the dual is decided.
#[derive(Clone, Debug)]
pub enum DualSpec {
    UserSupplied(MultiForm),
    QuadricClosedForm,
    TangencySearch { max_ext: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    NonMember,
    /// No tangency point found through extensions of degree `max_ext`.
    NotFound {
        max_ext: u32,
    },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

/// Dual membership tests modulo one prime, with everything precomputed.
#[derive(Clone, Debug)]
pub struct DualOracle {
    field: Arc<Gf>,
    kind: OracleKind,
}

#[derive(Clone, Debug)]
enum OracleKind {
    Equation(MPoly),
    Tangency { form: MPoly, partials: Vec<MPoly>, limits: SearchLimits },
}

impl DualOracle {
    pub fn new(spec: &FieldSpec, f: &MultiForm, dual: &DualSpec, residue: &Residue) -> Result<Self> {
        let field = residue.field().clone();
        let kind = match dual {
            DualSpec::UserSupplied(g) => OracleKind::Equation(g.reduce(residue)),
            DualSpec::QuadricClosedForm => {
                let a = gram_matrix(spec, f)?;
                let d = det(spec.ring(), &a);
                if residue.reduce(&d) == 0 {
                    return Err(Error::Precondition(format!(
                        "the quadric matrix is singular modulo {}",
                        residue.prime()
                    )));
                }
                OracleKind::Equation(quadric_dual(spec, f)?.reduce(residue))
            }
            DualSpec::TangencySearch { max_ext } => {
                let form = f.reduce(residue);
                let partials = (0..form.nvars()).map(|i| form.derivative(&field, i)).collect();
                OracleKind::Tangency { form, partials, limits: SearchLimits { max_ext: *max_ext, budget: u64::MAX } }
            }
        };
        Ok(DualOracle { field, kind })
    }

    /// Whether `w ∈ k_π^{n+1}` lies on the affine cone over the reduced dual.
    pub fn membership(&self, w: &[Fe]) -> Result<Membership> {
        if w.iter().all(|&x| x == 0) {
            return Ok(Membership::Member);
        }
        match &self.kind {
            OracleKind::Equation(g) => {
                Ok(if g.eval(&self.field, w) == 0 { Membership::Member } else { Membership::NonMember })
            }
            OracleKind::Tangency { form, partials, limits } => {
                let found = tangency_point(&self.field, form, partials, w, *limits)?;
                Ok(match found {
                    Some(_) => Membership::Member,
                    None => Membership::NotFound { max_ext: limits.max_ext },
                })
            }
        }
    }
}

/// A point `P` on `F = 0` whose gradient is a nonzero multiple of `w`.
pub fn tangency_point(
    field: &Arc<Gf>,
    form: &MPoly,
    partials: &[MPoly],
    w: &[Fe],
    limits: SearchLimits,
) -> Result<Option<Witness>> {
    let k = form.nvars();
    search_projective(field, k, limits, |ext, pt| {
        if form.eval(ext, pt) != 0 {
            return false;
        }
        let g: Vec<Fe> = partials.iter().map(|d| d.eval(ext, pt)).collect();
        if g.iter().all(|&x| x == 0) {
            return false;
        }
        (0..k).all(|i| (i + 1..k).all(|j| ext.mul(w[i], g[j]) == ext.mul(w[j], g[i])))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermat(spec: &FieldSpec) -> MultiForm {
        let text = r#"{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"1"},{"exps":[0,2,0],"coeff":"1"},{"exps":[0,0,2],"coeff":"1"}]}"#;
        MultiForm::parse_json(spec, text).unwrap()
    }

    #[test]
    fn fermat_quadric_is_self_dual() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let f = fermat(&spec);
        let d = quadric_dual(&spec, &f).unwrap();
        assert_eq!(d, f);
        assert_eq!(expected_dual_degree(2, 2), 2);
    }

    #[test]
    fn cross_term_gram() {
        let spec = FieldSpec::new(5, 1).unwrap();
        let text = r#"{"n":1,"m":2,"terms":[{"exps":[1,1],"coeff":"1"}]}"#;
        let f = MultiForm::parse_json(&spec, text).unwrap();
        let a = gram_matrix(&spec, &f).unwrap();
        // 1/2 = 3 in F_5
        assert_eq!(a[0][1], Poly::constant(3));
        let d = det(spec.ring(), &a);
        assert_eq!(d, Poly::constant(1)); // -9 = 1 mod 5
    }

    #[test]
    fn gauss_jordan_inverse() {
        let f = Gf::prime(7).unwrap();
        let a = vec![vec![2, 1], vec![1, 1]];
        let inv = invert_ff(&f, &a).unwrap();
        assert_eq!(inv, vec![vec![1, 6], vec![6, 2]]);
        assert!(invert_ff(&f, &[vec![1, 2], vec![2, 4]]).is_none());
    }

    #[test]
    fn tangency_agrees_with_equation_mod_t() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let f = fermat(&spec);
        let pi = spec.parse_prime("T").unwrap();
        let res = spec.residue(&pi).unwrap();
        let eq = DualOracle::new(&spec, &f, &DualSpec::QuadricClosedForm, &res).unwrap();
        let tg = DualOracle::new(&spec, &f, &DualSpec::TangencySearch { max_ext: 1 }, &res).unwrap();
        for w in super::super::ext::affine_points(res.field(), 3) {
            assert_eq!(eq.membership(&w).unwrap().is_member(), tg.membership(&w).unwrap().is_member(), "{w:?}");
        }
    }
}
