//! Mixed character sums over `k_π^{n+1}` and their bound audits.

use rayon::prelude::*;
use serde::Serialize;

use crate::characters::PrimeContext;
use crate::cyclotomic::RootCounts;
use crate::error::{Error, Result};
use crate::field::{Fe, Gf};
use crate::form::MPoly;
use crate::geometry::regularity::slice;
use crate::geometry::{DualOracle, Membership};
use crate::scalar::{le_tol, lt_tol};
use crate::CycValue;

/// Largest `|k_π|^{n+1}` tabulated by [`SumEngine`].
pub const MAX_POINTS: u64 = 1 << 24;

/// `G` tabulated on `k_π^{n+1}` for repeated sums against one prime.
pub struct SumEngine<'a> {
    ctx: &'a PrimeContext,
    nvars: usize,
    coords: Vec<Fe>,
    values: Vec<Fe>,
}

impl<'a> SumEngine<'a> {
    pub fn new(ctx: &'a PrimeContext, g: &MPoly) -> Result<Self> {
        let nvars = g.nvars();
        let n = ctx.size();
        let total = n
            .checked_pow(nvars as u32)
            .filter(|&t| t <= MAX_POINTS)
            .ok_or(Error::BudgetExceeded { needed: (n as u128).pow(nvars as u32), budget: MAX_POINTS as u128 })?;
        let field = ctx.field();
        let mut coords = Vec::with_capacity(total as usize * nvars);
        let mut values = Vec::with_capacity(total as usize);
        let mut pt = vec![0; nvars];
        for mut idx in 0..total {
            for c in pt.iter_mut() {
                *c = (idx % n) as Fe;
                idx /= n;
            }
            coords.extend_from_slice(&pt);
            values.push(g.eval(field, &pt));
        }
        Ok(SumEngine { ctx, nvars, coords, values })
    }

    pub fn ctx(&self) -> &PrimeContext {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, idx: usize) -> &[Fe] {
        &self.coords[idx * self.nvars..(idx + 1) * self.nvars]
    }

    pub fn value(&self, idx: usize) -> Fe {
        self.values[idx]
    }

    #[inline]
    fn dot(&self, field: &Gf, w: &[Fe], idx: usize) -> Fe {
        self.point(idx).iter().zip(w).fold(0, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
    }

    /// `S_G(w, χ_i) = Σ_a χ_i(G(a)) ψ_∞(-w·a/π)` as group-ring counts.
    pub fn mixed_counts(&self, w: &[Fe], i: u32) -> RootCounts {
        let ctx = self.ctx;
        let field = ctx.field();
        let ell = ctx.ell();
        let mut acc = RootCounts::new(ctx.p(), ell);
        for idx in 0..self.values.len() {
            let k = match ctx.chi_exp(self.values[idx]) {
                Some(k) => k * i % ell,
                None if i.is_multiple_of(ell) => 0,
                None => continue,
            };
            let psi = ctx.psi_exp(field.neg(self.dot(field, w, idx)));
            acc.add(psi, k, 1);
        }
        acc
    }

    pub fn mixed_sum(&self, w: &[Fe], i: u32) -> CycValue {
        self.mixed_counts(w, i).finish()
    }

    /// `Σ_a ψ_∞((β G(a) - w·a)/π)` as counts of powers of `ζ_p`.
    pub fn additive_counts(&self, w: &[Fe], beta: Fe) -> Vec<i64> {
        let ctx = self.ctx;
        let field = ctx.field();
        let mut counts = vec![0i64; ctx.p() as usize];
        for idx in 0..self.values.len() {
            let z = field.sub(field.mul(beta, self.values[idx]), self.dot(field, w, idx));
            counts[ctx.psi_exp(z) as usize] += 1;
        }
        counts
    }
}

/// `S_G(w, χ_{π,i})` for a polynomial already reduced modulo `π`.
pub fn mixed_char_sum(ctx: &PrimeContext, g: &MPoly, w: &[Fe], i: u32) -> Result<CycValue> {
    if w.len() != g.nvars() {
        return Err(Error::Precondition("w must have one entry per variable".into()));
    }
    Ok(SumEngine::new(ctx, g)?.mixed_sum(w, i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WdCase {
    /// `w ≡ 0`.
    Zero,
    /// `w ≢ 0` on the cone over the dual.
    Dual,
    /// `w` off the dual.
    Generic,
    /// Membership undecided.
    Unknown,
}

impl WdCase {
    pub fn label(self) -> &'static str {
        match self {
            WdCase::Zero => "i",
            WdCase::Dual => "ii",
            WdCase::Generic => "iii",
            WdCase::Unknown => "unknown",
        }
    }
}

pub fn wd_classify(oracle: &DualOracle, w: &[Fe]) -> Result<WdCase> {
    if w.iter().all(|&x| x == 0) {
        return Ok(WdCase::Zero);
    }
    Ok(match oracle.membership(w)? {
        Membership::Member => WdCase::Dual,
        Membership::NonMember => WdCase::Generic,
        Membership::NotFound { .. } => WdCase::Unknown,
    })
}

/// One row of a bound audit.
#[derive(Clone, Debug, Serialize)]
pub struct WdRow {
    pub q: u64,
    pub delta: usize,
    pub pi: String,
    pub ell: u32,
    pub chi_index: u32,
    pub w: String,
    pub case: WdCase,
    pub abs_s: f64,
    /// Explicit bound for cases (i) and (ii).
    pub bound: Option<f64>,
    /// `|S|/q^{(n+2)Δ/2}` in cases (i)/(ii), `|S|/q^{(n+1)Δ/2}` otherwise.
    pub ratio: f64,
    pub pass: bool,
}

/// Sliced sums behind case (i), compared with the single-character bound
/// `(m-1)|k|^{r/2}` for `r` variables.
#[derive(Clone, Debug, Serialize)]
pub struct KatzRow {
    pub chi_index: u32,
    pub j: usize,
    pub vars: usize,
    pub abs_t: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WdAudit {
    pub q: u64,
    pub delta: usize,
    pub pi: String,
    pub ell: u32,
    pub n: usize,
    pub m: u32,
    pub rows: Vec<WdRow>,
    pub case_i_pass: bool,
    pub case_ii_pass: bool,
    pub case_iii_max_ratio: Option<f64>,
    pub case_iii_finite: bool,
    pub unknown_count: usize,
    pub katz: Vec<KatzRow>,
    pub katz_pass: bool,
    /// `S_H(0, χ)` equals its slice decomposition exactly.
    pub slicing_identity: bool,
    /// Largest `|Σ_a ψ((βH - w·a)/π)| / ((m-1)^{n+1} |k|^{(n+1)/2})`.
    pub deligne_max_ratio: f64,
    pub deligne_pass: bool,
    /// The Gauss twist expresses every `S_H(w, χ)` exactly.
    pub twist_identity: bool,
}

impl WdAudit {
    pub fn all_pass(&self) -> bool {
        self.case_i_pass
            && self.case_ii_pass
            && self.case_iii_finite
            && self.katz_pass
            && self.slicing_identity
            && self.deligne_pass
            && self.twist_identity
    }
}

pub fn format_w(w: &[Fe]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(";"))
}

/// Checks the twist `N·S_H(w, χ) = χ(-1) τ(χ) Σ_β conj(χ)(β) Σ_a ψ((βH(a) - w·a)/π)`.
/// With `literal` set, `χ(β)` is used in place of `conj(χ)(β)`.
pub fn gauss_twist_identity(engine: &SumEngine, w: &[Fe], i: u32, literal: bool) -> Result<bool> {
    let ctx = engine.ctx();
    let (p, ell) = (ctx.p(), ctx.ell());
    let field = ctx.field();
    let lhs = engine.mixed_sum(w, i).scale(&(ctx.size() as i64));
    let mut acc = RootCounts::new(p, ell);
    for beta in 1..ctx.size() as Fe {
        let kb = ctx.chi_exp(beta).expect("nonzero") * i % ell;
        let j = if literal { kb } else { (ell - kb) % ell };
        for (c, &count) in engine.additive_counts(w, beta).iter().enumerate() {
            acc.add(c as u32, j, count);
        }
    }
    let inner: CycValue = acc.finish();
    let chi_minus_one = ctx.chi_value(i, field.neg(1));
    let rhs = &(&chi_minus_one * &ctx.gauss_sum(i)?) * &inner;
    Ok(lhs == rhs)
}

/// `(j, number of variables, T_j)` for each slice.
type Slices = Vec<(usize, usize, CycValue)>;

/// Exact slice decomposition of `S_H(0, χ)`: with `T_j = Σ_b χ(g_j(b))`,
/// `S_H(0, χ) = [χ^m = 1](|k| - 1)(Σ_{j<n} T_j + χ(H(e_n)))`.
fn slicing_check(ctx: &PrimeContext, h: &MPoly, i: u32) -> Result<(bool, Slices)> {
    let field = ctx.field();
    let n = h.nvars() - 1;
    let m = h.total_degree().unwrap_or(0);
    let zero = vec![0; h.nvars()];
    let s0 = SumEngine::new(ctx, h)?.mixed_sum(&zero, i);
    let mut slices = Vec::new();
    let mut total = CycValue::zero(ctx.p(), ctx.ell());
    for j in 0..n {
        let g = slice(field, h, j);
        let vars = g.nvars();
        let t = SumEngine::new(ctx, &g)?.mixed_sum(&vec![0; vars], i);
        total = &total + &t;
        slices.push((j, vars, t));
    }
    let mut e_n = vec![0; h.nvars()];
    e_n[n] = 1;
    total = &total + &ctx.chi_value(i, h.eval(field, &e_n));
    let expected = if (i as u64 * m as u64).is_multiple_of(ctx.ell() as u64) {
        total.scale(&(ctx.size() as i64 - 1))
    } else {
        CycValue::zero(ctx.p(), ctx.ell())
    };
    Ok((s0 == expected, slices))
}

/// Audits every `w ∈ k_π^{n+1}` and every nontrivial character against
/// the case bounds, with the Katz and Deligne sub-audits.
pub fn wd_audit(ctx: &PrimeContext, h: &MPoly, oracle: &DualOracle) -> Result<WdAudit> {
    let nvars = h.nvars();
    let n = nvars - 1;
    let m = h.total_degree().ok_or_else(|| Error::Precondition("the zero form".into()))?;
    let size = ctx.size() as f64;
    let engine = SumEngine::new(ctx, h)?;
    let ws: Vec<usize> = (0..engine.len()).collect();
    let cases: Vec<WdCase> = ws.iter().map(|&idx| wd_classify(oracle, engine.point(idx))).collect::<Result<_>>()?;
    let bound_i = n as f64 * (m as f64 - 1.0) * size.powf((n as f64 + 2.0) / 2.0) + size;
    let bound_ii = (m as f64 - 1.0).powi(nvars as i32) * size.powf((n as f64 + 2.0) / 2.0);
    let scale_ii = size.powf((n as f64 + 2.0) / 2.0);
    let scale_iii = size.powf((n as f64 + 1.0) / 2.0);
    let pi = ctx.prime().to_string();

    let rows: Vec<WdRow> = ws
        .par_iter()
        .flat_map_iter(|&idx| {
            let w = engine.point(idx);
            let case = cases[idx];
            let pi = pi.clone();
            let engine = &engine;
            (1..ctx.ell()).map(move |i| {
                let abs_s: f64 = engine.mixed_sum(w, i).abs();
                let (bound, ratio, pass) = match case {
                    WdCase::Zero => (Some(bound_i), abs_s / scale_ii, le_tol(abs_s, bound_i)),
                    WdCase::Dual => (Some(bound_ii), abs_s / scale_ii, lt_tol(abs_s, bound_ii)),
                    WdCase::Generic | WdCase::Unknown => (None, abs_s / scale_iii, (abs_s / scale_iii).is_finite()),
                };
                WdRow {
                    q: ctx.q(),
                    delta: ctx.delta(),
                    pi: pi.clone(),
                    ell: ctx.ell(),
                    chi_index: i,
                    w: format_w(w),
                    case,
                    abs_s,
                    bound,
                    ratio,
                    pass,
                }
            })
        })
        .collect();

    let case_i_pass = rows.iter().filter(|r| r.case == WdCase::Zero).all(|r| r.pass);
    let case_ii_pass = rows.iter().filter(|r| r.case == WdCase::Dual).all(|r| r.pass);
    let iii: Vec<f64> = rows.iter().filter(|r| r.case == WdCase::Generic).map(|r| r.ratio).collect();
    let case_iii_max_ratio = iii.iter().copied().fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    let case_iii_finite = iii.iter().all(|r| r.is_finite());
    let unknown_count = rows.iter().filter(|r| r.case == WdCase::Unknown).count();

    let mut katz = Vec::new();
    let mut slicing_identity = true;
    for i in 1..ctx.ell() {
        let (ok, slices) = slicing_check(ctx, h, i)?;
        slicing_identity &= ok;
        for (j, vars, t) in slices {
            let abs_t: f64 = t.abs();
            let bound = (m as f64 - 1.0) * size.powf(vars as f64 / 2.0);
            katz.push(KatzRow { chi_index: i, j, vars, abs_t, bound, pass: le_tol(abs_t, bound) });
        }
    }
    let katz_pass = katz.iter().all(|k| k.pass);

    let deligne_bound = (m as f64 - 1.0).powi(nvars as i32) * size.powf(nvars as f64 / 2.0);
    let (p, ell) = (ctx.p(), ctx.ell());
    let per_w: Vec<Result<(f64, bool)>> = ws
        .par_iter()
        .map(|&idx| {
            let w = engine.point(idx);
            let mut worst: f64 = 0.0;
            for beta in 1..ctx.size() as Fe {
                let mut acc = RootCounts::new(p, ell);
                for (c, &count) in engine.additive_counts(w, beta).iter().enumerate() {
                    acc.add(c as u32, 0, count);
                }
                let v: CycValue = acc.finish();
                worst = worst.max(v.abs::<f64>() / deligne_bound);
            }
            let mut twist = true;
            for i in 1..ell {
                twist &= gauss_twist_identity(&engine, w, i, false)?;
            }
            Ok((worst, twist))
        })
        .collect();
    let mut deligne_max_ratio: f64 = 0.0;
    let mut twist_identity = true;
    for r in per_w {
        let (worst, twist) = r?;
        deligne_max_ratio = deligne_max_ratio.max(worst);
        twist_identity &= twist;
    }

    Ok(WdAudit {
        q: ctx.q(),
        delta: ctx.delta(),
        pi,
        ell: ctx.ell(),
        n,
        m,
        rows,
        case_i_pass,
        case_ii_pass,
        case_iii_max_ratio,
        case_iii_finite,
        unknown_count,
        katz,
        katz_pass,
        slicing_identity,
        deligne_pass: le_tol(deligne_max_ratio, 1.0),
        deligne_max_ratio,
        twist_identity,
    })
}

/// Trivial bound `|S| <= |k|^{n+1}` for spot checks of single sums.
pub fn trivial_bound(ctx: &PrimeContext, nvars: usize) -> f64 {
    (ctx.size() as f64).powi(nvars as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::form::MultiForm;

    const FERMAT: &str = r#"{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"1"},{"exps":[0,2,0],"coeff":"1"},{"exps":[0,0,2],"coeff":"1"}]}"#;

    fn setup(q: u64, pi: &str, ell: u32) -> (FieldSpec, PrimeContext, MPoly) {
        let spec = FieldSpec::from_q(q).unwrap();
        let f = MultiForm::parse_json(&spec, FERMAT).unwrap();
        let pi = spec.parse_prime(pi).unwrap();
        let ctx = PrimeContext::new(&spec, &pi, ell).unwrap();
        let h = f.reduce(ctx.residue());
        (spec, ctx, h)
    }

    #[test]
    fn twist_identity_needs_conjugate_for_cubic_characters() {
        let (_, ctx, h) = setup(7, "T", 3);
        let engine = SumEngine::new(&ctx, &h).unwrap();
        let w = [1, 0, 0];
        assert!(gauss_twist_identity(&engine, &w, 1, false).unwrap());
        assert!(!gauss_twist_identity(&engine, &w, 1, true).unwrap());
    }

    #[test]
    fn twist_forms_coincide_for_quadratic_characters() {
        let (_, ctx, h) = setup(3, "T", 2);
        let engine = SumEngine::new(&ctx, &h).unwrap();
        for w in [[1, 1, 1], [0, 1, 2]] {
            assert!(gauss_twist_identity(&engine, &w, 1, false).unwrap());
            assert!(gauss_twist_identity(&engine, &w, 1, true).unwrap());
        }
    }
}
