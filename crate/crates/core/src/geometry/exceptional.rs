//! Scan for primes where the reduction of a form misbehaves.

use serde::Serialize;

use super::dual::{adjugate, det, gram_matrix, invert_ff, DualSpec};
use super::regularity::{is_dwork_regular_ff, projective_smooth, RegularityStrategy, SearchLimits, Verdict};
use crate::error::Result;
use crate::field::{enumerate_irreducibles, Fe, FieldSpec, PrimePoly, Residue};
use crate::form::MultiForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcFlag {
    /// `π` divides some coefficient (or the whole form).
    DegreeDrop,
    SmoothnessFail,
    DworkFail,
    DualMismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcEntry {
    pub pi: PrimePoly,
    pub flags: Vec<ExcFlag>,
    /// Checks that could not be decided for this prime.
    pub unknown: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcReport {
    pub delta_max: usize,
    pub scanned: usize,
    /// Primes carrying at least one flag or an undecided check.
    pub entries: Vec<ExcEntry>,
}

impl ExcReport {
    /// Primes that must be left out of a sieving set: flagged or undecided.
    pub fn excluded(&self) -> impl Iterator<Item = &PrimePoly> {
        self.entries.iter().map(|e| &e.pi)
    }

    pub fn flagged(&self, pi: &PrimePoly) -> Option<&ExcEntry> {
        self.entries.iter().find(|e| &e.pi == pi)
    }
}

fn dual_mismatch(spec: &FieldSpec, f: &MultiForm, dual: &DualSpec, residue: &Residue) -> Result<Option<bool>> {
    match dual {
        DualSpec::QuadricClosedForm => {
            let ring = spec.ring();
            let a = gram_matrix(spec, f)?;
            let d = residue.reduce(&det(ring, &a));
            if d == 0 {
                return Ok(Some(true));
            }
            // Reduction commutes with inversion: compare inv(A mod π) against adj(A) det^{-1}.
            let field = residue.field();
            let a_mod: Vec<Vec<Fe>> = a.iter().map(|r| r.iter().map(|x| residue.reduce(x)).collect()).collect();
            let inv = invert_ff(field, &a_mod);
            let adj = adjugate(ring, &a);
            let dinv = field.inv(d);
            let via_adj: Vec<Vec<Fe>> =
                adj.iter().map(|r| r.iter().map(|x| field.mul(residue.reduce(x), dinv)).collect()).collect();
            Ok(Some(inv.as_ref() != Some(&via_adj)))
        }
        DualSpec::UserSupplied(g) => {
            let reduced = g.reduce(residue);
            Ok(Some(reduced.is_zero() || g.terms().any(|(_, c)| residue.reduce(c) == 0)))
        }
        DualSpec::TangencySearch { .. } => Ok(None),
    }
}

/// Scans every prime of degree `<= delta_max` and flags the bad reductions.
pub fn compute_exceptional_primes(
    spec: &FieldSpec,
    f: &MultiForm,
    delta_max: usize,
    dual: &DualSpec,
    limits: SearchLimits,
) -> Result<ExcReport> {
    let mut entries = Vec::new();
    let mut scanned = 0;
    for d in 1..=delta_max {
        for poly in enumerate_irreducibles(spec.ring(), d) {
            scanned += 1;
            let pi = PrimePoly::new(spec.ring(), poly)?;
            let residue = spec.residue(&pi)?;
            let mut flags = Vec::new();
            let mut unknown = Vec::new();
            let h = f.reduce(&residue);
            let drop = h.is_zero() || f.terms().any(|(_, c)| residue.reduce(c) == 0);
            if drop {
                flags.push(ExcFlag::DegreeDrop);
            }
            if h.is_zero() {
                flags.extend([ExcFlag::SmoothnessFail, ExcFlag::DworkFail]);
            } else {
                match projective_smooth(residue.field(), &h, limits)? {
                    Verdict::Holds => {}
                    Verdict::Fails { .. } => flags.push(ExcFlag::SmoothnessFail),
                    Verdict::Unknown { max_ext } => {
                        unknown.push(format!("smoothness undecided through degree {max_ext}"))
                    }
                }
                match is_dwork_regular_ff(residue.field(), &h, RegularityStrategy::ResultantExact, limits)? {
                    Verdict::Holds => {}
                    Verdict::Fails { .. } => flags.push(ExcFlag::DworkFail),
                    Verdict::Unknown { max_ext } => {
                        unknown.push(format!("Dwork-regularity undecided through degree {max_ext}"))
                    }
                }
            }
            match dual_mismatch(spec, f, dual, &residue)? {
                Some(true) => flags.push(ExcFlag::DualMismatch),
                Some(false) => {}
                None => unknown.push("dual compatibility not checkable with a search oracle".into()),
            }
            if !flags.is_empty() || !unknown.is_empty() {
                entries.push(ExcEntry { pi, flags, unknown });
            }
        }
    }
    Ok(ExcReport { delta_max, scanned, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_is_exceptional_for_t_x0_squared() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let text = r#"{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"T"},{"exps":[0,2,0],"coeff":"1"},{"exps":[0,0,2],"coeff":"1"}]}"#;
        let f = MultiForm::parse_json(&spec, text).unwrap();
        let rep =
            compute_exceptional_primes(&spec, &f, 2, &DualSpec::QuadricClosedForm, SearchLimits::default()).unwrap();
        let t = spec.parse_prime("T").unwrap();
        let entry = rep.flagged(&t).expect("T is flagged");
        assert!(entry.flags.contains(&ExcFlag::DegreeDrop));
        assert!(entry.flags.contains(&ExcFlag::DworkFail));
        assert!(entry.flags.contains(&ExcFlag::DualMismatch));
        assert_eq!(rep.entries.len(), 1);
        assert_eq!(rep.scanned, 6);
    }

    #[test]
    fn fermat_has_no_exceptional_primes_of_small_degree() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let text = r#"{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"1"},{"exps":[0,2,0],"coeff":"1"},{"exps":[0,0,2],"coeff":"1"}]}"#;
        let f = MultiForm::parse_json(&spec, text).unwrap();
        let rep =
            compute_exceptional_primes(&spec, &f, 2, &DualSpec::QuadricClosedForm, SearchLimits::default()).unwrap();
        assert!(rep.entries.is_empty());
    }
}
