//! One function per subcommand, each producing a report value, optional CSV rows and a verdict.

use anyhow::{bail, Context, Result};
use cycsieve_core::characters::{gauss_check, PrimeContext};
use cycsieve_core::charsums::{mixed_char_sum, trivial_bound, wd_audit, WdAudit};
use cycsieve_core::field::{enumerate_irreducibles, Fe, Poly, PrimePoly};
use cycsieve_core::geometry::dual::expected_dual_degree;
use cycsieve_core::geometry::ext::affine_points;
use cycsieve_core::geometry::{
    compute_exceptional_primes, is_dwork_regular, quadric_dual, DualOracle, DualSpec, RegularityStrategy,
};
use cycsieve_core::identities::{
    verify_completion, verify_count_mod, verify_root_count, verify_unramified_expansion, IdentityCheck,
};
use cycsieve_core::scalar::sig12;
use cycsieve_core::sieve::{brute_force_count, choose_delta, min_b, sieve_terms, SieveParams, SievingSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Setup;

/// What a command hands back for emission.
pub struct Outcome {
    pub report: Value,
    pub csv: Option<Table>,
    pub pass: bool,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn float(x: f64) -> String {
    format!("{}", sig12(x))
}

fn primes_up_to(setup: &Setup, dmax: usize) -> Vec<PrimePoly> {
    let ring = setup.spec.ring();
    (1..=dmax)
        .flat_map(|d| enumerate_irreducibles(ring, d))
        .map(|p| PrimePoly::new(ring, p).expect("enumerated primes are irreducible"))
        .collect()
}

/// The primes named on the command line, or `T` and the first quadratic prime.
fn default_primes(setup: &Setup) -> Vec<PrimePoly> {
    if !setup.primes.is_empty() {
        return setup.primes.clone();
    }
    let ring = setup.spec.ring();
    let mut out = vec![PrimePoly::new(ring, Poly::t()).expect("T is prime")];
    if let Some(p) = enumerate_irreducibles(ring, 2).into_iter().next() {
        out.push(PrimePoly::new(ring, p).expect("enumerated primes are irreducible"));
    }
    out
}

pub fn primes(setup: &Setup) -> Result<Outcome> {
    let delta = setup.delta()?;
    let list = setup.spec.primes_of_degree(delta)?;
    let mut table = Table::new(&["q", "delta", "index", "pi"]);
    for (i, p) in list.primes.iter().enumerate() {
        table.rows.push(vec![list.q.to_string(), delta.to_string(), i.to_string(), p.to_string()]);
    }
    Ok(Outcome { pass: list.pnt_holds && list.count == list.exact_count, report: to_value(&list)?, csv: Some(table) })
}

fn parse_w(text: &str, size: u64, k: usize) -> Result<Vec<Fe>> {
    let w = text
        .split([',', ';'])
        .map(|s| s.trim().parse::<Fe>().with_context(|| format!("bad entry {s:?} in w")))
        .collect::<Result<Vec<_>>>()?;
    if w.len() != k {
        bail!("w needs {k} entries, got {}", w.len());
    }
    if let Some(x) = w.iter().find(|&&x| x as u64 >= size) {
        bail!("entry {x} of w is not an element of a field of size {size}");
    }
    Ok(w)
}

pub fn charsum(setup: &Setup, w: Option<&str>, chi: u32) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut pass = true;
    let pis = if setup.primes.is_empty() { vec![default_primes(setup)[0].clone()] } else { setup.primes.clone() };
    let k = setup.form.nvars();
    for pi in pis {
        let ctx = PrimeContext::new(&setup.spec, &pi, setup.resolved.ell)?;
        let h = setup.form.reduce(ctx.residue());
        let w = match w {
            Some(t) => parse_w(t, ctx.size(), k)?,
            None => vec![0; k],
        };
        let s = mixed_char_sum(&ctx, &h, &w, chi)?;
        let abs: f64 = s.abs();
        let bound = trivial_bound(&ctx, k);
        pass &= abs <= bound;
        rows.push(json!({
            "pi": pi.to_string(),
            "w": cycsieve_core::charsums::format_w(&w),
            "chi_index": chi,
            "value": s.to_string(),
            "abs_s": abs,
            "trivial_bound": bound,
            "within_trivial": abs <= bound,
        }));
    }
    Ok(Outcome { report: Value::Array(rows), csv: None, pass })
}

pub fn gauss(setup: &Setup) -> Result<Outcome> {
    let pis =
        if setup.primes.is_empty() { primes_up_to(setup, setup.resolved.delta_max) } else { setup.primes.clone() };
    let ell = setup.resolved.ell;
    let mut checks = Vec::new();
    let mut table = Table::new(&["q", "pi", "ell", "chi_index", "tau", "norm", "q_delta", "equal"]);
    for pi in &pis {
        let ctx = PrimeContext::new(&setup.spec, pi, ell)?;
        for i in 1..ell {
            let c = gauss_check(&ctx, i)?;
            table.rows.push(vec![
                setup.spec.q().to_string(),
                pi.to_string(),
                ell.to_string(),
                i.to_string(),
                c.tau.to_string(),
                c.norm.map(|x| x.to_string()).unwrap_or_default(),
                c.q_delta.to_string(),
                c.equal.to_string(),
            ]);
            checks.push(c);
        }
    }
    let pass = checks.iter().all(|c| c.equal);
    Ok(Outcome { report: to_value(&checks)?, csv: Some(table), pass })
}

/// A deterministic tuple for the congruence checks. Even instances take residues of
/// degree `< b` shifted by multiples of `u`, so the count is nonzero.
fn sample_tuple(setup: &Setup, idx: u64, k: usize, u: &Poly, b: usize) -> Vec<Poly> {
    let ring = setup.spec.ring();
    let deg = u.degree().unwrap_or(0);
    let q = setup.spec.q();
    (0..k as u64)
        .map(|i| {
            let seed = idx * 7 + i * 5 + 1;
            if idx.is_multiple_of(2) {
                let r = ring.from_index(seed % q.pow(b as u32), b);
                ring.add(&r, &ring.mul(u, &ring.from_index(seed % q, 1)))
            } else {
                ring.from_index(seed % q.pow(deg as u32), deg)
            }
        })
        .collect()
}

/// Runs the standard identity instances for the configuration. Instances over the
/// budget are listed as skipped rather than failing the run.
pub fn identity_suite(setup: &Setup) -> Result<(Vec<IdentityCheck>, Vec<String>)> {
    let spec = &setup.spec;
    let ring = spec.ring();
    let ell = setup.resolved.ell;
    let budget = setup.budget();
    let k = setup.form.nvars();
    let mut checks = Vec::new();
    let mut skipped = Vec::new();

    for pi in primes_up_to(setup, setup.resolved.delta_max) {
        checks.push(verify_root_count(spec, &pi, ell)?);
    }

    let mut idx = 0;
    for (deg, bs) in [(2usize, 1..2usize), (3, 1..3)] {
        for u in ring.monics(deg).take(8) {
            for b in bs.clone() {
                checks.push(verify_count_mod(spec, &u, &sample_tuple(setup, idx, k, &u, b), b, budget)?);
                idx += 1;
            }
        }
    }

    let linear = primes_up_to(setup, 1);
    let quadratic: Vec<PrimePoly> = primes_up_to(setup, 2).into_iter().filter(|p| p.degree() == 2).collect();
    let mut pairs = Vec::new();
    for (i, a) in linear.iter().enumerate().take(3) {
        for c in linear.iter().skip(i + 1).take(3) {
            pairs.push((a.clone(), c.clone()));
        }
    }
    if let (Some(a), Some(c)) = (linear.first(), quadratic.first()) {
        pairs.push((a.clone(), c.clone()));
    }
    for (a, c) in &pairs {
        for b in 1..a.degree() + c.degree() {
            for i in 1..ell {
                for j in 1..ell {
                    match verify_completion(spec, a, c, ell, i, j, &setup.form, b, budget) {
                        Ok(check) => checks.push(check),
                        Err(cycsieve_core::Error::BudgetExceeded { needed, .. }) => {
                            skipped.push(format!("completion pi={a} pi_prime={c} b={b} chi=({i},{j}) needs {needed}"))
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
    }

    if let Some(delta) = setup.resolved.delta {
        let n = setup.resolved.n;
        let b = setup.resolved.b;
        if n >= 2 && delta < b && b < 2 * delta {
            let params = SieveParams::new(spec.clone(), setup.form.clone(), ell, b, delta)?;
            let pool: Vec<PrimePoly> =
                if setup.primes.len() >= 2 { setup.primes.clone() } else { spec.primes_of_degree(delta)?.primes };
            if pool.len() >= 2 {
                match verify_unramified_expansion(&params, &pool[0], &pool[1], budget) {
                    Ok(c) => checks.extend(c),
                    Err(cycsieve_core::Error::BudgetExceeded { needed, .. }) => {
                        skipped.push(format!("unramified_expansion pi1={} pi2={} needs {needed}", pool[0], pool[1]))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok((checks, skipped))
}

pub fn identity_check(setup: &Setup) -> Result<Outcome> {
    let (checks, skipped) = identity_suite(setup)?;
    let mut table = Table::new(&["id", "params", "lhs", "rhs", "equal"]);
    for c in &checks {
        table.rows.push(vec![
            c.id.clone(),
            serde_json::to_string(&c.params)?,
            c.lhs.clone(),
            c.rhs.clone(),
            c.equal.to_string(),
        ]);
    }
    let pass = checks.iter().all(|c| c.equal);
    let report = json!({ "checks": to_value(&checks)?, "skipped": skipped });
    Ok(Outcome { report, csv: Some(table), pass })
}

pub fn wd_audits(setup: &Setup) -> Result<Vec<WdAudit>> {
    default_primes(setup)
        .iter()
        .map(|pi| {
            let ctx = PrimeContext::new(&setup.spec, pi, setup.resolved.ell)?;
            let h = setup.form.reduce(ctx.residue());
            let oracle = DualOracle::new(&setup.spec, &setup.form, &setup.dual, ctx.residue())?;
            Ok(wd_audit(&ctx, &h, &oracle)?)
        })
        .collect()
}

pub fn wd(setup: &Setup) -> Result<Outcome> {
    let audits = wd_audits(setup)?;
    let mut table =
        Table::new(&["q", "Delta", "pi", "ell", "chi_index", "w", "case", "abs_S", "bound", "ratio", "pass"]);
    for a in &audits {
        for r in &a.rows {
            table.rows.push(vec![
                r.q.to_string(),
                r.delta.to_string(),
                r.pi.clone(),
                r.ell.to_string(),
                r.chi_index.to_string(),
                r.w.clone(),
                r.case.label().to_string(),
                float(r.abs_s),
                r.bound.map(float).unwrap_or_default(),
                float(r.ratio),
                r.pass.to_string(),
            ]);
        }
    }
    let pass = audits.iter().all(WdAudit::all_pass);
    Ok(Outcome { report: to_value(&audits)?, csv: Some(table), pass })
}

pub fn dual_check(setup: &Setup) -> Result<Outcome> {
    let spec = &setup.spec;
    let equation = match &setup.dual {
        DualSpec::TangencySearch { .. } if setup.form.m() == 2 => DualSpec::QuadricClosedForm,
        DualSpec::TangencySearch { .. } => bail!("dual-check needs a quadric or an explicit dual form"),
        d => d.clone(),
    };
    let degree = match &equation {
        DualSpec::QuadricClosedForm => Some(quadric_dual(spec, &setup.form)?.m() as u64),
        DualSpec::UserSupplied(g) => Some(g.m() as u64),
        DualSpec::TangencySearch { .. } => None,
    };
    let expected = expected_dual_degree(setup.form.n(), setup.form.m());
    let search = DualSpec::TangencySearch { max_ext: setup.resolved.tangency_ext };
    let mut per_prime = Vec::new();
    let mut pass = degree == Some(expected);
    for pi in default_primes(setup) {
        let res = spec.residue(&pi)?;
        let eq = DualOracle::new(spec, &setup.form, &equation, &res)?;
        let tg = DualOracle::new(spec, &setup.form, &search, &res)?;
        let mut points = 0u64;
        let mut members = 0u64;
        let mut mismatches = Vec::new();
        for w in affine_points(res.field(), setup.form.nvars()) {
            points += 1;
            let a = eq.membership(&w)?.is_member();
            let b = tg.membership(&w)?.is_member();
            members += a as u64;
            if a != b {
                mismatches.push(cycsieve_core::charsums::format_w(&w));
            }
        }
        pass &= mismatches.is_empty();
        per_prime.push(json!({
            "pi": pi.to_string(),
            "points": points,
            "members": members,
            "mismatches": mismatches.len(),
            "first_mismatches": mismatches.iter().take(10).collect::<Vec<_>>(),
            "agree": mismatches.is_empty(),
        }));
    }
    let report = json!({
        "dual_degree": degree,
        "expected_dual_degree": expected,
        "degree_matches": degree == Some(expected),
        "primes": per_prime,
    });
    Ok(Outcome { report, csv: None, pass })
}

pub fn exc_primes(setup: &Setup) -> Result<Outcome> {
    let rep =
        compute_exceptional_primes(&setup.spec, &setup.form, setup.resolved.delta_max, &setup.dual, setup.limits())?;
    let global = match is_dwork_regular(&setup.spec, &setup.form, RegularityStrategy::ResultantExact, setup.limits()) {
        Ok(v) => to_value(&v)?,
        Err(cycsieve_core::Error::Unsupported(msg)) => json!({ "verdict": "unsupported", "reason": msg }),
        Err(e) => return Err(e.into()),
    };
    let mut table = Table::new(&["pi", "flags", "unknown"]);
    for e in &rep.entries {
        let flags: Vec<String> = e
            .flags
            .iter()
            .map(|f| serde_json::to_value(f).map(|v| v.as_str().unwrap_or("").to_string()))
            .collect::<serde_json::Result<_>>()?;
        table.rows.push(vec![e.pi.to_string(), flags.join("|"), e.unknown.join("|")]);
    }
    let report = json!({ "scan": to_value(&rep)?, "dwork_regular_over_k": global });
    Ok(Outcome { report, csv: Some(table), pass: true })
}

pub fn sieve_run(setup: &Setup) -> Result<Outcome> {
    let spec = &setup.spec;
    let delta = setup.delta()?;
    let exc = compute_exceptional_primes(spec, &setup.form, delta, &setup.dual, setup.limits())?;
    let set = SievingSet::from_report(spec, delta, &exc)?;
    let params = SieveParams::new(spec.clone(), setup.form.clone(), setup.resolved.ell, setup.resolved.b, delta)?;
    let report = sieve_terms(&params, &set, Some(&setup.alphas), setup.budget())?;
    let search = match min_b(spec, setup.resolved.n, exc.entries.len()) {
        Ok(mb) => to_value(&mb)?,
        Err(e) => json!({ "error": e.to_string() }),
    };
    let (header, values) = report.csv_row();
    let table = Table { header: header.into_iter().map(String::from).collect(), rows: vec![values] };
    let out = json!({
        "exceptional": to_value(&exc)?,
        "sieving_set": to_value(&set)?,
        "sieve": to_value(&report)?,
        "parameters": {
            "choose_delta": choose_delta(setup.resolved.n, setup.resolved.b)?,
            "delta_window": params.delta_window(),
            "min_b": search,
        },
    });
    Ok(Outcome { pass: report.all_pass(), report: out, csv: Some(table) })
}

pub fn count(setup: &Setup) -> Result<Outcome> {
    let params = SieveParams::new(
        setup.spec.clone(),
        setup.form.clone(),
        setup.resolved.ell,
        setup.resolved.b,
        setup.resolved.delta.unwrap_or(1).max(1),
    )?;
    let rep = brute_force_count(&params, setup.budget())?;
    let mut table = Table::new(&["q", "n", "ell", "b", "a_size", "count", "oracle_count", "trivial_bound", "pass"]);
    let pass = rep.agree && rep.within_trivial;
    table.rows.push(vec![
        rep.q.to_string(),
        rep.n.to_string(),
        rep.ell.to_string(),
        rep.b.to_string(),
        rep.a_size.to_string(),
        rep.count.to_string(),
        rep.oracle_count.to_string(),
        rep.trivial_bound.to_string(),
        pass.to_string(),
    ]);
    Ok(Outcome { report: to_value(&rep)?, csv: Some(table), pass })
}
