//! Zero counts of polynomials on grids.

use serde::Serialize;

use super::ext::affine_points;
use crate::error::{Error, Result};
use crate::field::{Fe, Gf};
use crate::form::MPoly;

#[derive(Clone, Debug, Serialize)]
pub struct SzAudit {
    pub zeros: u64,
    pub bound: u64,
    pub holds: bool,
}

/// Counts zeros of `f` on `S^k` and compares with `deg f · |S|^{k-1}`.
pub fn schwartz_zippel_audit(field: &Gf, f: &MPoly, subset: &[Fe]) -> Result<SzAudit> {
    if f.is_zero() {
        return Err(Error::Precondition("the zero polynomial vanishes everywhere".into()));
    }
    let k = f.nvars();
    let s = subset.len() as u64;
    let mut zeros = 0;
    let total = s.pow(k as u32);
    let mut pt = vec![0; k];
    for mut idx in 0..total {
        for c in pt.iter_mut() {
            *c = subset[(idx % s) as usize];
            idx /= s;
        }
        if f.eval(field, &pt) == 0 {
            zeros += 1;
        }
    }
    let bound = f.total_degree().unwrap_or(0) as u64 * s.pow(k as u32 - 1);
    Ok(SzAudit { zeros, bound, holds: zeros <= bound })
}

/// Zeros of `f` on all of `field^k`.
pub fn count_zeros(field: &Gf, f: &MPoly) -> u64 {
    affine_points(field, f.nvars()).filter(|pt| f.eval(field, pt) == 0).count() as u64
}
