//! Dwork-regularity, smoothness and the Deligne condition.

use std::sync::Arc;

use serde::Serialize;

use super::elim::{affine_common_zeros, projective_common_zeros, ZeroSet};
use super::ext::{extension_of_degree, projective_count, projective_points, Witness, MAX_EXT_SIZE};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Gf};
use crate::form::{MPoly, MultiForm};

/// Outcome of a geometric condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    /// The condition fails; the witness is a point over an extension when one was found.
    Fails {
        witness: Option<Witness>,
    },
    /// Neither certified nor refuted through extensions of degree `max_ext`.
    Unknown {
        max_ext: u32,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }
}

/// Dwork-regularity verdicts use the same three outcomes.
pub type RegularityVerdict = Verdict;

/// Limits for point searches over extensions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SearchLimits {
    pub max_ext: u32,
    /// Maximum number of point evaluations.
    pub budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_ext: 4, budget: 10_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityStrategy {
    /// `Σ c_i X_i^m` with all `c_i ≠ 0` and `p ∤ m` is regular.
    DiagonalClosedForm,
    ExhaustiveSearch,
    /// Elimination for at most three variables, then a witness search.
    ResultantExact,
}

/// Searches `P^{k-1}` over extensions of degree `1..=max_ext` for a point
/// where `pred` holds. `Ok(None)` means none was found within the limits.
pub fn search_projective<P>(field: &Arc<Gf>, k: usize, limits: SearchLimits, mut pred: P) -> Result<Option<Witness>>
where
    P: FnMut(&Gf, &[u32]) -> bool,
{
    let mut spent: u64 = 0;
    for r in 1..=limits.max_ext {
        let size = (field.size() as u64).checked_pow(r).unwrap_or(u64::MAX);
        if size > MAX_EXT_SIZE {
            break;
        }
        let points = projective_count(size, k);
        if spent.saturating_add(points) > limits.budget {
            break;
        }
        spent += points;
        let ext = extension_of_degree(field, r)?;
        for pt in projective_points(&ext, k) {
            if pred(&ext, &pt) {
                return Ok(Some(Witness { ext_degree: r, coords: pt }));
            }
        }
    }
    Ok(None)
}

/// Dwork system at a point: `H = 0` and `X_i ∂_i H = 0` for every `i`.
fn dwork_system_vanishes(h: &MPoly, partials: &[MPoly], ext: &Gf, pt: &[u32]) -> bool {
    h.eval(ext, pt) == 0 && partials.iter().zip(pt).all(|(d, &x)| x == 0 || d.eval(ext, pt) == 0)
}

fn all_subsets(k: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << k)).map(move |mask| (0..k).filter(|i| mask & (1 << i) != 0).collect())
}

/// Exact Dwork check for at most three variables. A point with support `S`
/// solves the system iff it is a torus zero of all `∂_i H_S`, `i ∈ S`
/// (Euler's identity supplies `H_S = 0` since `p ∤ m`).
fn dwork_exact(field: &Arc<Gf>, h: &MPoly) -> ZeroSet {
    let k = h.nvars();
    let mut unknown = false;
    for s in all_subsets(k) {
        let hs = h.restrict_support(&s).select_vars(&s);
        let system: Vec<MPoly> = (0..s.len()).map(|i| hs.derivative(field, i).specialize(field, 0, 1)).collect();
        match affine_common_zeros(field, &system, true) {
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

fn check_form(field: &Gf, h: &MPoly) -> Result<u32> {
    if h.is_zero() {
        return Err(Error::Precondition("the zero form".into()));
    }
    if !h.is_homogeneous() {
        return Err(Error::Precondition("Dwork-regularity needs a form".into()));
    }
    let m = h.total_degree().unwrap_or(0);
    if m.is_multiple_of(field.characteristic()) {
        return Err(Error::Precondition(format!("p = {} divides the degree {m}", field.characteristic())));
    }
    Ok(m)
}

fn diagonal_verdict(h: &MPoly) -> Result<Verdict> {
    if !h.terms().all(|(e, _)| e.iter().filter(|&&k| k > 0).count() == 1) {
        return Err(Error::Unsupported("the diagonal strategy needs a diagonal form".into()));
    }
    for i in 0..h.nvars() {
        if !h.involves(i) {
            let mut coords = vec![0; h.nvars()];
            coords[i] = 1;
            return Ok(Verdict::Fails { witness: Some(Witness { ext_degree: 1, coords }) });
        }
    }
    Ok(Verdict::Holds)
}

/// Dwork-regularity of a form over a finite field.
pub fn is_dwork_regular_ff(
    field: &Arc<Gf>,
    h: &MPoly,
    strategy: RegularityStrategy,
    limits: SearchLimits,
) -> Result<Verdict> {
    check_form(field, h)?;
    if strategy == RegularityStrategy::DiagonalClosedForm {
        return diagonal_verdict(h);
    }
    let k = h.nvars();
    let partials: Vec<MPoly> = (0..k).map(|i| h.derivative(field, i)).collect();
    let exact =
        if strategy == RegularityStrategy::ResultantExact && k <= 3 { dwork_exact(field, h) } else { ZeroSet::Unknown };
    if exact == ZeroSet::Empty {
        return Ok(Verdict::Holds);
    }
    let witness = search_projective(field, k, limits, |ext, pt| dwork_system_vanishes(h, &partials, ext, pt))?;
    Ok(match (witness, exact) {
        (Some(w), _) => Verdict::Fails { witness: Some(w) },
        (None, ZeroSet::NonEmpty) => Verdict::Fails { witness: None },
        (None, _) => Verdict::Unknown { max_ext: limits.max_ext },
    })
}

/// Dwork-regularity of a form over `F_q(T)`.
///
/// Diagonal forms are decided by their coefficients; forms with constant
/// coefficients are decided over `F_q` (regularity is geometric, so it is
/// unchanged by the constant field extension).
pub fn is_dwork_regular(
    spec: &FieldSpec,
    f: &MultiForm,
    strategy: RegularityStrategy,
    limits: SearchLimits,
) -> Result<Verdict> {
    if f.is_zero() {
        return Err(Error::Precondition("the zero form".into()));
    }
    if f.m().is_multiple_of(spec.p()) {
        return Err(Error::Precondition(format!("p = {} divides the degree {}", spec.p(), f.m())));
    }
    if f.is_diagonal() {
        for i in 0..f.nvars() {
            if f.diagonal_coeff(i).is_zero() {
                let mut coords = vec![0; f.nvars()];
                coords[i] = 1;
                return Ok(Verdict::Fails { witness: Some(Witness { ext_degree: 1, coords }) });
            }
        }
        return Ok(Verdict::Holds);
    }
    if strategy == RegularityStrategy::DiagonalClosedForm {
        return Err(Error::Unsupported("the diagonal strategy needs a diagonal form".into()));
    }
    match f.constant_form(spec) {
        Some(h) => is_dwork_regular_ff(spec.fq(), &h, strategy, limits),
        None => Err(Error::Unsupported(
            "non-diagonal forms with non-constant coefficients are only checked prime by prime".into(),
        )),
    }
}

/// Re-evaluates the Dwork system at a witness, for auditing a verdict.
pub fn witness_solves_dwork(field: &Arc<Gf>, h: &MPoly, w: &Witness) -> Result<bool> {
    let ext = extension_of_degree(field, w.ext_degree)?;
    let partials: Vec<MPoly> = (0..h.nvars()).map(|i| h.derivative(field, i)).collect();
    Ok(w.coords.iter().any(|&c| c != 0) && dwork_system_vanishes(h, &partials, &ext, &w.coords))
}

/// Smoothness of the projective hypersurface `F = 0`: no common zero of `F`
/// and its partials.
pub fn projective_smooth(field: &Arc<Gf>, f: &MPoly, limits: SearchLimits) -> Result<Verdict> {
    if f.is_zero() {
        return Ok(Verdict::Fails { witness: None });
    }
    let k = f.nvars();
    let mut system = vec![f.clone()];
    system.extend((0..k).map(|i| f.derivative(field, i)));
    let exact = projective_common_zeros(field, &system);
    if exact == ZeroSet::Empty {
        return Ok(Verdict::Holds);
    }
    let witness = search_projective(field, k, limits, |ext, pt| system.iter().all(|g| g.eval(ext, pt) == 0))?;
    Ok(match (witness, exact) {
        (Some(w), _) => Verdict::Fails { witness: Some(w) },
        (None, ZeroSet::NonEmpty) => Verdict::Fails { witness: None },
        (None, _) => Verdict::Unknown { max_ext: limits.max_ext },
    })
}

/// Smoothness of the affine hypersurface `g = 0`.
pub fn affine_smooth(field: &Arc<Gf>, g: &MPoly, limits: SearchLimits) -> Result<Verdict> {
    let k = g.nvars();
    let mut system = vec![g.clone()];
    system.extend((0..k).map(|i| g.derivative(field, i)));
    let exact = if k <= 2 { affine_common_zeros(field, &system, false) } else { ZeroSet::Unknown };
    if exact == ZeroSet::Empty {
        return Ok(Verdict::Holds);
    }
    // Affine points are the chart X_0 = 1 of the homogenized search space.
    let witness = search_projective(field, k + 1, limits, |ext, pt| {
        pt[0] == 1 && system.iter().all(|h| h.eval(ext, &pt[1..]) == 0)
    })?
    .map(|w| Witness { ext_degree: w.ext_degree, coords: w.coords[1..].to_vec() });
    Ok(match (witness, exact) {
        (Some(w), _) => Verdict::Fails { witness: Some(w) },
        (None, ZeroSet::NonEmpty) => Verdict::Fails { witness: None },
        (None, _) => Verdict::Unknown { max_ext: limits.max_ext },
    })
}

/// Deligne condition: `p ∤ deg g` and the top form defines a smooth projective
/// hypersurface.
pub fn is_deligne(field: &Arc<Gf>, g: &MPoly, limits: SearchLimits) -> Result<Verdict> {
    let d = g.total_degree().unwrap_or(0);
    if d == 0 || d.is_multiple_of(field.characteristic()) {
        return Ok(Verdict::Fails { witness: None });
    }
    projective_smooth(field, &g.top_form(), limits)
}

/// One slice `g_j = H(0, .., 0, 1, X_{j+1}, .., X_n)` with its checks.
#[derive(Clone, Debug, Serialize)]
pub struct SliceCheck {
    pub j: usize,
    #[serde(serialize_with = "crate::report::display")]
    pub g: MPoly,
    pub deligne: Verdict,
    pub smooth: Verdict,
}

pub fn slice(field: &Gf, h: &MPoly, j: usize) -> MPoly {
    let mut g = h.clone();
    for _ in 0..j {
        g = g.specialize(field, 0, 0);
    }
    g.specialize(field, 0, 1)
}

/// Slices `g_j` for `0 <= j < n` with their Deligne and smoothness verdicts.
pub fn slice_and_check(field: &Arc<Gf>, h: &MPoly, limits: SearchLimits) -> Result<Vec<SliceCheck>> {
    let n = h.nvars() - 1;
    (0..n)
        .map(|j| {
            let g = slice(field, h, j);
            Ok(SliceCheck { j, deligne: is_deligne(field, &g, limits)?, smooth: affine_smooth(field, &g, limits)?, g })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn spec3() -> FieldSpec {
        FieldSpec::new(3, 1).unwrap()
    }

    fn diag(f: &Gf, coeffs: &[u32], m: u32) -> MPoly {
        let k = coeffs.len();
        MPoly::from_terms(
            f,
            k,
            coeffs.iter().enumerate().map(|(i, &c)| {
                let mut e = vec![0; k];
                e[i] = m;
                (e, c)
            }),
        )
    }

    #[test]
    fn fermat_quadric_is_regular_exactly() {
        let s = spec3();
        let h = diag(s.fq(), &[1, 1, 1], 2);
        let v = is_dwork_regular_ff(s.fq(), &h, RegularityStrategy::ResultantExact, SearchLimits::default()).unwrap();
        assert_eq!(v, Verdict::Holds);
    }

    #[test]
    fn missing_variable_gives_witness() {
        let s = spec3();
        let h = diag(s.fq(), &[1, 1, 0], 2);
        for strategy in [
            RegularityStrategy::ResultantExact,
            RegularityStrategy::ExhaustiveSearch,
            RegularityStrategy::DiagonalClosedForm,
        ] {
            let v = is_dwork_regular_ff(s.fq(), &h, strategy, SearchLimits::default()).unwrap();
            match v {
                Verdict::Fails { witness: Some(w) } => {
                    assert!(witness_solves_dwork(s.fq(), &h, &w).unwrap());
                    if strategy != RegularityStrategy::ExhaustiveSearch {
                        assert_eq!(w.coords, vec![0, 0, 1]);
                    }
                }
                other => panic!("{strategy:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn degree_divisible_by_p_rejected() {
        let s = spec3();
        let h = diag(s.fq(), &[1, 1, 1], 3);
        assert!(is_dwork_regular_ff(s.fq(), &h, RegularityStrategy::ResultantExact, SearchLimits::default()).is_err());
    }

    #[test]
    fn cross_term_quadric_irregular() {
        // X0 X1 has the singular point [0:0:1] and misses a variable
        let s = spec3();
        let h = MPoly::from_terms(s.fq(), 3, [(vec![1, 1, 0], 1)]);
        let v = is_dwork_regular_ff(s.fq(), &h, RegularityStrategy::ResultantExact, SearchLimits::default()).unwrap();
        assert!(v.fails());
    }

    #[test]
    fn slices_of_fermat_are_deligne() {
        let s = spec3();
        let h = diag(s.fq(), &[1, 1, 1], 2);
        for sc in slice_and_check(s.fq(), &h, SearchLimits::default()).unwrap() {
            assert!(sc.deligne.holds(), "slice {}", sc.j);
            assert!(sc.smooth.holds(), "slice {}", sc.j);
        }
    }
}
