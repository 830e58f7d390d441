//! Exact checks of the Fourier identities that turn incomplete sieve sums into
//! complete mixed character sums.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::checked_pow;
use crate::characters::{psi_ratio, CharValue, PrimeContext};
use crate::charsums::SumEngine;
use crate::cyclotomic::RootCounts;
use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec, Poly, PolyRing, PrimePoly};
use crate::form::MultiForm;
use crate::sieve::{fiber_of_residue, SieveParams};
use crate::CycValue;

/// One identity instance: both sides in canonical form and whether they agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

impl IdentityCheck {
    fn new(id: &str, params: &[(&str, String)], lhs: String, rhs: String, equal: bool) -> Self {
        IdentityCheck {
            id: id.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            lhs,
            rhs,
            equal,
        }
    }
}

/// `π̄` with `π π̄ ≡ 1 (mod π′)`, reduced below `deg π′`.
pub fn crt_inverse(ring: &PolyRing, pi: &Poly, modulus: &Poly) -> Result<Poly> {
    ring.inv_mod(pi, modulus).ok_or_else(|| Error::Precondition(format!("{pi} is not invertible modulo {modulus}")))
}

fn tuples(ring: &PolyRing, b: usize, k: usize) -> impl Iterator<Item = Vec<Poly>> + '_ {
    let block = ring.q().pow(b as u32);
    (0..block.pow(k as u32)).map(move |idx| {
        let mut rest = idx;
        (0..k)
            .map(|_| {
                let x = ring.from_index(rest % block, b);
                rest /= block;
                x
            })
            .collect()
    })
}

fn guard(q: u64, exp: usize, factor: u128, budget: u128) -> Result<u64> {
    let n = checked_pow(q, exp as u64).ok_or(Error::BudgetExceeded { needed: u128::MAX, budget })?;
    let needed = n as u128 * factor.max(1);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(n)
}

fn show_tuple(x: &[Poly]) -> String {
    let parts: Vec<String> = x.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(";"))
}

/// Detecting `x ≡ a (mod u)` among tuples of degree `< b` with `ψ_∞`:
/// `#{x ≡ a} = q^{(n+1)(b - deg u)} Σ_{deg y < deg u - b} ψ_∞(-y·a/u)`.
pub fn verify_count_mod(spec: &FieldSpec, u: &Poly, a: &[Poly], b: usize, budget: u128) -> Result<IdentityCheck> {
    let ring = spec.ring();
    let du = u.degree().unwrap_or(0);
    if b == 0 || b >= du {
        return Err(Error::Precondition(format!("need 0 < b < deg u, got b = {b}, deg u = {du}")));
    }
    let k = a.len();
    guard(spec.q(), b * k, 1, budget)?;
    guard(spec.q(), (du - b) * k, 1, budget)?;
    let p = spec.p();
    let lhs = tuples(ring, b, k)
        .filter(|x| x.iter().zip(a).all(|(xi, ai)| ring.rem(&ring.sub(xi, ai), u).is_zero()))
        .count() as i64;
    let mut acc = RootCounts::new(p, aux_ell(p));
    for y in tuples(ring, du - b, k) {
        let dot = y.iter().zip(a).fold(Poly::zero(), |s, (yi, ai)| ring.add(&s, &ring.mul(yi, ai)));
        acc.add(psi_ratio(ring, &ring.neg(&dot), u)?, 0, 1);
    }
    let sum: CycValue = acc.finish();
    let scale = (spec.q() as i64).pow(((du - b) * k) as u32);
    let (rhs, equal) = match sum.exact_div(&scale) {
        Ok(v) => (v.to_string(), v == CycValue::from_int(p, aux_ell(p), lhs)),
        Err(_) => (format!("({sum})/{scale}"), false),
    };
    Ok(IdentityCheck::new(
        "count_mod",
        &[("q", spec.q().to_string()), ("u", u.to_string()), ("a", show_tuple(a)), ("b", b.to_string())],
        lhs.to_string(),
        rhs,
        equal,
    ))
}

/// An auxiliary prime `≠ p` for values that involve only `ζ_p`.
fn aux_ell(p: u32) -> u32 {
    if p == 2 {
        3
    } else {
        2
    }
}

fn check_nonprincipal(ctx: &PrimeContext, i: u32) -> Result<()> {
    if i.is_multiple_of(ctx.ell()) {
        return Err(Error::Precondition(format!("χ_{{{},{i}}} is principal", ctx.prime())));
    }
    Ok(())
}

/// Reduces each coordinate of `c·x` modulo the context prime.
fn twisted(ctx: &PrimeContext, c: &Poly, x: &[Poly]) -> Vec<Fe> {
    let ring = ctx.residue().ring();
    x.iter().map(|xi| ctx.residue().reduce(&ring.mul(c, xi))).collect()
}

/// Completion of `Σ_{deg x < b} χ_π(G(x)) χ_π′(G(x))` into products of
/// `S_G(π̄′x, χ_π) S_G(π̄x, χ_π′)` over `deg x < deg ππ′ - b`.
#[allow(clippy::too_many_arguments)]
pub fn verify_completion(
    spec: &FieldSpec,
    pi: &PrimePoly,
    pi2: &PrimePoly,
    ell: u32,
    i: u32,
    j: u32,
    g: &MultiForm,
    b: usize,
    budget: u128,
) -> Result<IdentityCheck> {
    if pi == pi2 {
        return Err(Error::Precondition("the two primes must differ".into()));
    }
    let ring = spec.ring();
    let c1 = PrimeContext::new(spec, pi, ell)?;
    let c2 = PrimeContext::new(spec, pi2, ell)?;
    check_nonprincipal(&c1, i)?;
    check_nonprincipal(&c2, j)?;
    let d = pi.degree() + pi2.degree();
    if b == 0 || b >= d {
        return Err(Error::Precondition(format!("need 0 < b < deg ππ′ = {d}, got {b}")));
    }
    let k = g.nvars();
    let engine_cost = (c1.size() + c2.size()).pow(k as u32) as u128;
    guard(spec.q(), b * k, 1, budget)?;
    guard(spec.q(), (d - b) * k, engine_cost, budget)?;
    let (p, l) = (spec.p(), ell);

    let mut lhs = RootCounts::new(p, l);
    for x in tuples(ring, b, k) {
        let gx = g.eval(ring, &x);
        if let (CharValue::Root(e1), CharValue::Root(e2)) =
            (c1.chi(i, c1.residue().reduce(&gx)), c2.chi(j, c2.residue().reduce(&gx)))
        {
            lhs.add(0, (e1 + e2) % l, 1);
        }
    }
    let lhs: CycValue = lhs.finish();

    let bar1 = crt_inverse(ring, pi.poly(), pi2.poly())?;
    let bar2 = crt_inverse(ring, pi2.poly(), pi.poly())?;
    let e1 = SumEngine::new(&c1, &g.reduce(c1.residue()))?;
    let e2 = SumEngine::new(&c2, &g.reduce(c2.residue()))?;
    let mut sum = CycValue::zero(p, l);
    for x in tuples(ring, d - b, k) {
        let s1 = e1.mixed_sum(&twisted(&c1, &bar2, &x), i);
        let s2 = e2.mixed_sum(&twisted(&c2, &bar1, &x), j);
        sum = sum.checked_add(&s1.checked_mul(&s2)?)?;
    }
    let scale = (spec.q() as i64).pow(((d - b) * k) as u32);
    let (rhs, equal) = match sum.exact_div(&scale) {
        Ok(v) => (v.to_string(), v == lhs),
        Err(_) => (format!("({sum})/{scale}"), false),
    };
    Ok(IdentityCheck::new(
        "completion",
        &[
            ("q", spec.q().to_string()),
            ("ell", ell.to_string()),
            ("pi", pi.to_string()),
            ("pi_prime", pi2.to_string()),
            ("chi_index", i.to_string()),
            ("chi_prime_index", j.to_string()),
            ("form", g.to_string()),
            ("b", b.to_string()),
        ],
        lhs.to_string(),
        rhs,
        equal,
    ))
}

/// The unramified pair sum `Σ Ψ_{π1}Ψ_{π2}` against its expansion into complete sums,
/// plus the vanishing of the part where `π1` or `π2` divides `F(x)` and the pointwise
/// identity `|fiber| - 1 = Σ_{χ ≠ χ0} χ(F(x))`.
pub fn verify_unramified_expansion(
    params: &SieveParams,
    pi1: &PrimePoly,
    pi2: &PrimePoly,
    budget: u128,
) -> Result<Vec<IdentityCheck>> {
    if pi1 == pi2 {
        return Err(Error::Precondition("the two primes must differ".into()));
    }
    let delta = params.delta;
    if pi1.degree() != delta || pi2.degree() != delta {
        return Err(Error::Precondition(format!("both primes must have degree Δ = {delta}")));
    }
    if params.b >= 2 * delta {
        return Err(Error::Precondition(format!("need b < 2Δ, got b = {}, Δ = {delta}", params.b)));
    }
    let spec = &params.spec;
    let ring = spec.ring();
    let ell = params.ell;
    let (p, k) = (spec.p(), params.n() + 1);
    let c1 = PrimeContext::new(spec, pi1, ell)?;
    let c2 = PrimeContext::new(spec, pi2, ell)?;
    let engine_cost = (c1.size() + c2.size()).pow(k as u32) as u128;
    let a = guard(spec.q(), params.b * k, 2 * ell as u128, budget)?;
    guard(spec.q(), (2 * delta - params.b) * k, engine_cost * ell as u128, budget)?;

    let mut lhs = 0i64;
    let mut zero_part = RootCounts::new(p, ell);
    let mut pointwise = true;
    for idx in 0..a {
        let fx = params.form.eval(ring, &params.point(idx));
        let z1 = c1.residue().reduce(&fx);
        let z2 = c2.residue().reduce(&fx);
        for (c, z) in [(&c1, z1), (&c2, z2)] {
            let mut chars = RootCounts::new(p, ell);
            for i in 1..ell {
                if let CharValue::Root(e) = c.chi(i, z) {
                    chars.add(0, e, 1);
                }
            }
            let expected = CycValue::from_int(p, ell, fiber_of_residue(c, z) as i64 - 1);
            pointwise &= chars.finish::<i64>() == expected;
        }
        if z1 == 0 || z2 == 0 {
            for i in 1..ell {
                for j in 1..ell {
                    if let (CharValue::Root(e1), CharValue::Root(e2)) = (c1.chi(i, z1), c2.chi(j, z2)) {
                        zero_part.add(0, (e1 + e2) % ell, 1);
                    }
                }
            }
            continue;
        }
        lhs += (fiber_of_residue(&c1, z1) as i64 - 1) * (fiber_of_residue(&c2, z2) as i64 - 1);
    }

    let bar1 = crt_inverse(ring, pi1.poly(), pi2.poly())?;
    let bar2 = crt_inverse(ring, pi2.poly(), pi1.poly())?;
    let e1 = SumEngine::new(&c1, &params.form.reduce(c1.residue()))?;
    let e2 = SumEngine::new(&c2, &params.form.reduce(c2.residue()))?;
    let mut sum = CycValue::zero(p, ell);
    for x in tuples(ring, 2 * delta - params.b, k) {
        let w1 = twisted(&c1, &bar2, &x);
        let w2 = twisted(&c2, &bar1, &x);
        let s1: Vec<CycValue> = (1..ell).map(|i| e1.mixed_sum(&w1, i)).collect();
        let s2: Vec<CycValue> = (1..ell).map(|j| e2.mixed_sum(&w2, j)).collect();
        for a1 in &s1 {
            for a2 in &s2 {
                sum = sum.checked_add(&a1.checked_mul(a2)?)?;
            }
        }
    }
    let scale = (spec.q() as i64).pow(((2 * delta - params.b) * k) as u32);
    let (rhs, equal) = match sum.exact_div(&scale) {
        Ok(v) => (v.to_string(), v == CycValue::from_int(p, ell, lhs)),
        Err(_) => (format!("({sum})/{scale}"), false),
    };
    let base = [
        ("q", spec.q().to_string()),
        ("n", params.n().to_string()),
        ("ell", ell.to_string()),
        ("b", params.b.to_string()),
        ("delta", delta.to_string()),
        ("pi1", pi1.to_string()),
        ("pi2", pi2.to_string()),
        ("form", params.form.to_string()),
    ];
    let zero: CycValue = zero_part.finish();
    Ok(vec![
        IdentityCheck::new("unramified_expansion", &base, lhs.to_string(), rhs, equal),
        IdentityCheck::new("unramified_zero_portion", &base, zero.to_string(), "0".into(), zero.is_zero()),
        IdentityCheck::new("fiber_character_sum", &base, "pointwise".into(), "pointwise".into(), pointwise),
    ])
}

/// `#{y : y^ℓ = a} = Σ_χ χ(a)` for every `a ∈ k_π`, with `χ_0(0) = 1`.
pub fn verify_root_count(spec: &FieldSpec, pi: &PrimePoly, ell: u32) -> Result<IdentityCheck> {
    let ctx = PrimeContext::new(spec, pi, ell)?;
    let mut counts = Vec::new();
    let mut sums = Vec::new();
    let mut equal = true;
    for z in 0..ctx.size() as Fe {
        let (chars, roots) = ctx.root_count_pair(z);
        equal &= chars == CycValue::from_int(ctx.p(), ell, roots as i64);
        counts.push(roots.to_string());
        sums.push(chars.to_string());
    }
    Ok(IdentityCheck::new(
        "root_count",
        &[("q", spec.q().to_string()), ("ell", ell.to_string()), ("pi", pi.to_string())],
        format!("[{}]", counts.join(",")),
        format!("[{}]", sums.join(",")),
        equal,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadric(spec: &FieldSpec) -> MultiForm {
        let text = r#"{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"1"},{"exps":[0,2,0],"coeff":"1"},{"exps":[0,0,2],"coeff":"1"}]}"#;
        MultiForm::parse_json(spec, text).unwrap()
    }

    #[test]
    fn count_mod_examples() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let u = spec.parse_poly("T+T^2").unwrap();
        let zero = vec![Poly::zero(); 3];
        let c = verify_count_mod(&spec, &u, &zero, 1, 1 << 30).unwrap();
        assert_eq!(c.lhs, "1");
        assert!(c.equal, "{c:?}");
        let u = spec.parse_poly("T^2").unwrap();
        let c = verify_count_mod(&spec, &u, &[Poly::t()], 1, 1 << 30).unwrap();
        assert_eq!(c.lhs, "0");
        assert!(c.equal, "{c:?}");
        assert!(verify_count_mod(&spec, &u, &[Poly::t()], 2, 1 << 30).is_err());
    }

    #[test]
    fn crt_inverse_of_t_mod_t_plus_one() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let inv = crt_inverse(spec.ring(), &Poly::t(), &spec.parse_poly("1+T").unwrap()).unwrap();
        assert_eq!(inv, Poly::constant(2));
    }

    #[test]
    fn completion_linear_primes() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let g = quadric(&spec);
        let t = spec.parse_prime("T").unwrap();
        let t1 = spec.parse_prime("1+T").unwrap();
        let c = verify_completion(&spec, &t, &t1, 2, 1, 1, &g, 1, 1 << 30).unwrap();
        assert!(c.equal, "{c:?}");
        let swapped = verify_completion(&spec, &t1, &t, 2, 1, 1, &g, 1, 1 << 30).unwrap();
        assert_eq!(swapped.lhs, c.lhs);
        assert!(verify_completion(&spec, &t, &t, 2, 1, 1, &g, 1, 1 << 30).is_err());
        assert!(verify_completion(&spec, &t, &t1, 2, 0, 1, &g, 1, 1 << 30).is_err());
    }

    #[test]
    fn unramified_expansion_on_quadric() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let params = SieveParams::new(spec.clone(), quadric(&spec), 2, 3, 2).unwrap();
        let p1 = spec.parse_prime("1+T^2").unwrap();
        let p2 = spec.parse_prime("2+T+T^2").unwrap();
        for c in verify_unramified_expansion(&params, &p1, &p2, 1 << 34).unwrap() {
            assert!(c.equal, "{c:?}");
        }
    }

    #[test]
    fn root_counts_mod_quadratic() {
        let spec = FieldSpec::new(7, 1).unwrap();
        let pi = spec.parse_prime("1+T^2").unwrap();
        assert!(verify_root_count(&spec, &pi, 3).unwrap().equal);
    }
}
