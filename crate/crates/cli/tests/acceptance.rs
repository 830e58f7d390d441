//! Acceptance gate: one line per criterion, exit status 1 if any fails.
//!
//! Reference instance I0: q = 3, n = 2, ell = 2, F = X0^2 + X1^2 + X2^2, b = 3,
//! delta = 2, sieving set = the three monic irreducible quadratics over F_3.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use cycsieve_core::characters::{gauss_check, PrimeContext};
use cycsieve_core::charsums::{wd_audit, WdCase};
use cycsieve_core::field::valuation::{product_formula_exponent, RatFn};
use cycsieve_core::field::{enumerate_irreducibles, Factorizer, FieldSpec, Poly, PrimePoly};
use cycsieve_core::form::{MPoly, MultiForm};
use cycsieve_core::geometry::dual::expected_dual_degree;
use cycsieve_core::geometry::ext::affine_points;
use cycsieve_core::geometry::regularity::witness_solves_dwork;
use cycsieve_core::geometry::{
    compute_exceptional_primes, is_dwork_regular, quadric_dual, schwartz_zippel_audit, DualOracle, DualSpec, ExcFlag,
    RegularityStrategy, SearchLimits, Verdict,
};
use cycsieve_core::identities::{verify_completion, verify_count_mod, verify_root_count, verify_unramified_expansion};
use cycsieve_core::sieve::{brute_force_count, choose_delta, min_b, sieve_terms, SieveParams, SievingSet};
use cycsieve_core::{Error, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Relative tolerance for float bound comparisons; everything else is exact.
const REL_TOL: f64 = 1e-9;
const BUDGET: u128 = 1 << 32;
const SEED: u64 = 0x5eed_2024;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

fn le_rel(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + REL_TOL)
}

fn spec(q: u64) -> FieldSpec {
    FieldSpec::from_q(q).expect("prime q")
}

fn i0_form(spec: &FieldSpec) -> MultiForm {
    MultiForm::parse_text(spec, 2, "X0^2 + X1^2 + X2^2").expect("I0 form")
}

fn primes_through(spec: &FieldSpec, d: usize) -> Vec<PrimePoly> {
    (1..=d).flat_map(|k| spec.primes_of_degree(k).expect("degree >= 1").primes).collect()
}

fn prime(spec: &FieldSpec, text: &str) -> PrimePoly {
    spec.parse_prime(text).expect("prime")
}

fn identities() -> Check {
    let mut roots = 0;
    for (q, ells) in [(3, &[2u32][..]), (7, &[2, 3][..])] {
        let s = spec(q);
        for &ell in ells {
            for pi in primes_through(&s, 2) {
                let c = verify_root_count(&s, &pi, ell).map_err(e2s)?;
                ensure(c.equal, format!("root count q={q} ell={ell} pi={pi}"))?;
                roots += 1;
            }
        }
    }

    let s = spec(3);
    let ring = s.ring();
    let mut count_mod = 0;
    let mut nonzero = 0;
    let mut idx = 0u64;
    for deg in [2usize, 3] {
        for u in ring.monics(deg).take(8) {
            for b in 1..deg {
                // Even instances lie in the box, so their count is positive.
                let a: Vec<Poly> = (0..3u64)
                    .map(|i| {
                        let seed = idx * 11 + i * 5 + 2;
                        if idx.is_multiple_of(2) {
                            ring.from_index(seed % 3u64.pow(b as u32), b)
                        } else {
                            ring.from_index(seed % 3u64.pow(deg as u32), deg)
                        }
                    })
                    .collect();
                let c = verify_count_mod(&s, &u, &a, b, BUDGET).map_err(e2s)?;
                ensure(c.equal, format!("count_mod u={u} b={b}: {} vs {}", c.lhs, c.rhs))?;
                nonzero += (c.lhs != "0") as usize;
                count_mod += 1;
                idx += 1;
            }
        }
    }
    ensure(count_mod >= 20 && nonzero > 0, format!("{count_mod} congruence instances, {nonzero} nonzero"))?;

    let f = i0_form(&s);
    let pairs = [("T", "1+T"), ("T", "2+T"), ("1+T", "2+T"), ("T", "1+T^2"), ("2+T", "2+T+T^2")];
    let mut completion = 0;
    for (a, c) in pairs {
        let (a, c) = (prime(&s, a), prime(&s, c));
        for b in 1..a.degree() + c.degree() {
            let chk = verify_completion(&s, &a, &c, 2, 1, 1, &f, b, BUDGET).map_err(e2s)?;
            ensure(chk.equal, format!("completion {a}, {c}, b={b}"))?;
            completion += 1;
        }
    }
    ensure(completion >= 5, "fewer than 5 completion instances")?;

    let params = SieveParams::new(s.clone(), f, 2, 3, 2).map_err(e2s)?;
    let expansion =
        verify_unramified_expansion(&params, &prime(&s, "1+T^2"), &prime(&s, "2+T+T^2"), BUDGET).map_err(e2s)?;
    for c in &expansion {
        ensure(c.equal, format!("{}: {} vs {}", c.id, c.lhs, c.rhs))?;
    }
    Ok(format!(
        "{roots} root counts, {count_mod} congruences ({nonzero} nonzero), {completion} completions, {} expansion checks",
        expansion.len()
    ))
}

fn gauss_rh() -> Check {
    let mut checked = 0;
    for q in [3u64, 7] {
        let s = spec(q);
        for ell in [2u32, 3].into_iter().filter(|l| (q - 1) % *l as u64 == 0) {
            for pi in primes_through(&s, 2) {
                let ctx = PrimeContext::new(&s, &pi, ell).map_err(e2s)?;
                for i in 1..ell {
                    let g = gauss_check(&ctx, i).map_err(e2s)?;
                    let expected = q.pow(pi.degree() as u32) as i64;
                    ensure(
                        g.norm == Some(expected),
                        format!("q={q} ell={ell} pi={pi} i={i}: {:?} != {expected}", g.norm),
                    )?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} characters"))
}

fn weil_deligne() -> Check {
    let s = spec(3);
    let f = i0_form(&s);
    let (n, m) = (2f64, 2f64);
    let mut notes = Vec::new();
    for name in ["T", "1+T^2"] {
        let pi = prime(&s, name);
        let res = s.residue(&pi).map_err(e2s)?;
        let ctx = PrimeContext::new(&s, &pi, 2).map_err(e2s)?;
        let oracle = DualOracle::new(&s, &f, &DualSpec::QuadricClosedForm, &res).map_err(e2s)?;
        let audit = wd_audit(&ctx, &f.reduce(&res), &oracle).map_err(e2s)?;
        let qd = res.size() as f64;
        let bound_i = n * (m - 1.0) * qd.powf((n + 2.0) / 2.0) + qd;
        let bound_ii = (m - 1.0).powf(n + 1.0) * qd.powf((n + 2.0) / 2.0);
        let mut iii_max: f64 = 0.0;
        for r in &audit.rows {
            match r.case {
                WdCase::Zero => ensure(le_rel(r.abs_s, bound_i), format!("case i at {} w={}: {}", name, r.w, r.abs_s))?,
                WdCase::Dual => {
                    ensure(le_rel(r.abs_s, bound_ii), format!("case ii at {} w={}: {}", name, r.w, r.abs_s))?
                }
                WdCase::Generic => iii_max = iii_max.max(r.abs_s / qd.powf((n + 1.0) / 2.0)),
                WdCase::Unknown => return Err(format!("undecided dual membership at {} w={}", name, r.w)),
            }
        }
        ensure(audit.rows.len() == res.size().pow(3) as usize, "not every w was audited")?;
        ensure(audit.case_i_pass && audit.case_ii_pass && audit.case_iii_finite, format!("audit flags at {name}"))?;
        ensure(iii_max.is_finite(), "case iii ratio not finite")?;
        notes.push(format!("pi={name} rows={} iii_max={iii_max:.6}", audit.rows.len()));
    }
    Ok(notes.join(", "))
}

fn sieve_inequalities() -> Check {
    let s = spec(3);
    let f = i0_form(&s);
    let exc =
        compute_exceptional_primes(&s, &f, 2, &DualSpec::QuadricClosedForm, SearchLimits::default()).map_err(e2s)?;
    ensure(exc.entries.is_empty(), "I0 has exceptional primes of degree <= 2")?;
    let set = SievingSet::from_report(&s, 2, &exc).map_err(e2s)?;
    ensure(set.primes.len() == 3, "sieving set is not the three quadratics")?;
    let params = SieveParams::new(s.clone(), f, 2, 3, 2).map_err(e2s)?;
    let alphas: Vec<Rational> = (1..=4).map(Rational::from_integer).collect();
    let rep = sieve_terms(&params, &set, Some(&alphas), BUDGET).map_err(e2s)?;
    let general = rep.general.as_ref().ok_or("no alpha table")?;
    for row in &general.rows {
        ensure(row.expansion_equal, format!("expansion differs at alpha={}", row.alpha))?;
        ensure(row.holds, format!("alpha={}: {} > {}", row.alpha, row.sum_i_squared, row.rhs))?;
    }
    ensure(general.argmin_alpha == Rational::from_integer(1), format!("argmin {}", general.argmin_alpha))?;
    ensure(rep.pass_global && rep.pass_local, "count exceeds the sieve bound")?;
    // The global count from an independent enumeration of l-th powers.
    let oracle = brute_force_count(&params, BUDGET).map_err(e2s)?;
    ensure(
        oracle.agree && oracle.oracle_count as i128 == rep.global_count as i128,
        "global count disagrees with the power oracle",
    )?;
    Ok(format!(
        "count {} local {} <= {:.3}; argmin alpha = {}",
        rep.global_count, rep.local_count, rep.rhs_float, general.argmin_alpha
    ))
}

fn counting() -> Check {
    let s = spec(3);
    let mut notes = Vec::new();
    for b in [1usize, 2] {
        let params = SieveParams::new(s.clone(), i0_form(&s), 2, b, 1).map_err(e2s)?;
        let c = brute_force_count(&params, BUDGET).map_err(e2s)?;
        ensure(c.agree, format!("b={b}: {} vs oracle {}", c.count, c.oracle_count))?;
        ensure(c.count as u128 <= 3u128.pow(3 * b as u32), format!("b={b}: above the trivial bound"))?;
        notes.push(format!("M(b={b})={}", c.count));
    }
    let field = s.fq();
    let g = MPoly::from_terms(field, 3, [(vec![1, 1, 0], 1), (vec![0, 0, 2], field.neg(1))]);
    let all: Vec<u32> = field.elements().collect();
    let sz = schwartz_zippel_audit(field, &g, &all).map_err(e2s)?;
    ensure(sz.zeros == 9 && sz.bound == 18 && sz.holds, format!("Schwartz-Zippel {} <= {}", sz.zeros, sz.bound))?;
    notes.push(format!("SZ {} <= {}", sz.zeros, sz.bound));
    Ok(notes.join(", "))
}

fn prime_infrastructure() -> Check {
    for q in [3u64, 5, 7] {
        let s = spec(q);
        for d in 1..=6 {
            let list = s.primes_of_degree(d).map_err(e2s)?;
            let main = (q as f64).powi(d as i32) / d as f64;
            let bound = (q as f64).powf(d as f64 / 2.0) / d as f64 + (q as f64).powf(d as f64 / 3.0);
            ensure((list.count as f64 - main).abs() <= bound, format!("q={q} d={d}: count {}", list.count))?;
            ensure(
                list.count == list.exact_count,
                format!("q={q} d={d}: {} vs Moebius {}", list.count, list.exact_count),
            )?;
        }
    }
    let s = spec(3);
    let ring = s.ring();
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut factorizer = Factorizer::new(ring.clone());
    let random_poly = |rng: &mut StdRng| loop {
        let deg = rng.gen_range(0..=6);
        let p = Poly::from_coeffs((0..=deg).map(|_| rng.gen_range(0..3)).collect());
        if !p.is_zero() {
            return p;
        }
    };
    for _ in 0..200 {
        let x = RatFn::new(random_poly(&mut rng), random_poly(&mut rng)).map_err(e2s)?;
        let e = product_formula_exponent(&mut factorizer, ring, &x).map_err(e2s)?;
        ensure(e == 0, format!("product of absolute values is q^{e} for {}/{}", x.num, x.den))?;
    }
    Ok("PNT for q in {3,5,7}, deg <= 6; 200 product formulas".into())
}

fn geometry() -> Check {
    let s = spec(3);
    let limits = SearchLimits::default();
    let f = i0_form(&s);
    ensure(
        is_dwork_regular(&s, &f, RegularityStrategy::DiagonalClosedForm, limits).map_err(e2s)? == Verdict::Holds,
        "unit diagonal form not regular",
    )?;
    let g = MultiForm::parse_text(&s, 2, "X0^2 + X1^2").map_err(e2s)?;
    match is_dwork_regular(&s, &g, RegularityStrategy::ResultantExact, limits).map_err(e2s)? {
        Verdict::Fails { witness: Some(w) } => {
            let h = g.constant_form(&s).ok_or("constant form")?;
            ensure(witness_solves_dwork(s.fq(), &h, &w).map_err(e2s)?, "witness does not solve the system")?;
        }
        v => return Err(format!("X0^2 + X1^2 verdict {v:?}")),
    }
    let dual = quadric_dual(&s, &f).map_err(e2s)?;
    ensure(dual.m() as u64 == expected_dual_degree(2, 2) && dual.m() == 2, "dual degree")?;
    let mut points = 0;
    for name in ["T", "1+T^2"] {
        let res = s.residue(&prime(&s, name)).map_err(e2s)?;
        let eq = DualOracle::new(&s, &f, &DualSpec::QuadricClosedForm, &res).map_err(e2s)?;
        let tg = DualOracle::new(&s, &f, &DualSpec::TangencySearch { max_ext: 1 }, &res).map_err(e2s)?;
        for w in affine_points(res.field(), 3) {
            let a = eq.membership(&w).map_err(e2s)?.is_member();
            let b = tg.membership(&w).map_err(e2s)?.is_member();
            ensure(a == b, format!("dual membership differs at {name}, w={w:?}"))?;
            points += 1;
        }
    }
    let bad = MultiForm::parse_text(&s, 2, "T*X0^2 + X1^2 + X2^2").map_err(e2s)?;
    let rep = compute_exceptional_primes(&s, &bad, 2, &DualSpec::QuadricClosedForm, limits).map_err(e2s)?;
    let t = prime(&s, "T");
    let entry = rep.flagged(&t).ok_or("T not flagged")?;
    ensure(entry.flags.contains(&ExcFlag::DegreeDrop), "T lacks the degree-drop flag")?;
    Ok(format!("dual/tangency agree on {points} points; T flagged {:?}", entry.flags))
}

fn parameters() -> Check {
    let delta = choose_delta(2, 3).map_err(e2s)?;
    ensure(delta == 2 && delta < 3 && 3 < 2 * delta, format!("choose_delta(2,3) = {delta}"))?;
    let s = spec(3);
    let mb = min_b(&s, 2, 0).map_err(e2s)?;
    let enumerated = enumerate_irreducibles(s.ring(), mb.delta).len() as u64;
    let qd = 3u64.pow(mb.delta as u32);
    ensure(mb.card_p_holds && 2 * mb.delta as u64 * enumerated >= qd, format!("card-P fails at b={}", mb.b))?;
    ensure(mb.prime_count == enumerated, "min_b prime count differs from enumeration")?;
    ensure(choose_delta(1, 3).is_err(), "n = 1 accepted by choose_delta")?;
    ensure(
        SieveParams::new(s.clone(), MultiForm::parse_text(&s, 1, "X0^2 + X1^2").map_err(e2s)?, 2, 3, 2).is_err(),
        "n = 1 accepted",
    )?;
    Ok(format!("min_b = {} with delta {} and {enumerated} primes", mb.b, mb.delta))
}

fn run_sieve(dir: &Path, workers: u32) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_cycsieve"))
        .args(["--workers", &workers.to_string(), "--out"])
        .arg(dir)
        .arg("sieve-run")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), format!("sieve-run exited with {:?}", status.status.code()))
}

fn determinism() -> Check {
    let root = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-determinism");
    let _ = std::fs::remove_dir_all(&root);
    let (one, four) = (root.join("w1"), root.join("w4"));
    run_sieve(&one, 1)?;
    run_sieve(&four, 4)?;
    let mut files = 0;
    for name in ["sieve-run.json", "sieve-run.csv"] {
        let a = std::fs::read(one.join(name)).map_err(|e| format!("{name}: {e}"))?;
        let b = std::fs::read(four.join(name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(a == b, format!("{name} differs between 1 and 4 workers"))?;
        files += 1;
    }
    Ok(format!("{files} artifacts byte-identical across 1 and 4 workers"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("identity suite", identities),
        ("Gauss sum modulus", gauss_rh),
        ("Weil-Deligne audits", weil_deligne),
        ("sieve inequalities", sieve_inequalities),
        ("counting cross-checks", counting),
        ("prime infrastructure", prime_infrastructure),
        ("geometry", geometry),
        ("parameter selection", parameters),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.2}s) {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2}s) {why}", k + 1);
            }
        }
    }
    println!("acceptance: {}/9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
