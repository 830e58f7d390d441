//! The geometric sieve for `x_{n+1}^ℓ = F(x_0, ..., x_n)` over boxes of `F_q[T]^{n+1}`.

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{checked_pow, irreducible_count};
use crate::characters::{check_ell, PrimeContext};
use crate::error::{Error, Result};
use crate::field::{Factorizer, FieldSpec, Poly, PrimePoly};
use crate::form::MultiForm;
use crate::geometry::ExcReport;
use crate::scalar::ExactInt;
use crate::Rational;

/// Everything fixed before sieving: the field, the form, `ℓ`, the box size `b` and `Δ`.
#[derive(Clone, Debug)]
pub struct SieveParams {
    pub spec: FieldSpec,
    pub form: MultiForm,
    pub ell: u32,
    pub b: usize,
    pub delta: usize,
}

impl SieveParams {
    pub fn new(spec: FieldSpec, form: MultiForm, ell: u32, b: usize, delta: usize) -> Result<Self> {
        if form.n() < 2 {
            return Err(Error::Precondition(format!("n = {} but the sieve needs n >= 2", form.n())));
        }
        check_ell(spec.q(), ell)?;
        let m = form.m();
        if !m.is_multiple_of(ell) {
            return Err(Error::Precondition(format!("ℓ = {ell} does not divide m = {m}")));
        }
        if m.is_multiple_of(spec.p()) {
            return Err(Error::Precondition(format!("the characteristic {} divides m = {m}", spec.p())));
        }
        if b == 0 || delta == 0 {
            return Err(Error::Precondition("b and Δ must be positive".into()));
        }
        Ok(SieveParams { spec, form, ell, b, delta })
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn q(&self) -> u64 {
        self.spec.q()
    }

    /// `|A| = q^{b(n+1)}`, or `None` on overflow.
    pub fn a_size(&self) -> Option<u64> {
        checked_pow(self.q(), (self.b * (self.n() + 1)) as u64)
    }

    /// Whether `Δ < b < 2Δ`.
    pub fn delta_window(&self) -> bool {
        self.delta < self.b && self.b < 2 * self.delta
    }

    /// Largest possible `deg_T F(x)` on `A`.
    pub fn max_value_degree(&self) -> usize {
        self.form.deg_t() + self.form.m() as usize * (self.b - 1)
    }

    /// The tuple of `A` with index `idx`; each coordinate takes `b` base-`q` digits.
    pub fn point(&self, idx: u64) -> Vec<Poly> {
        let ring = self.spec.ring();
        let block = self.q().pow(self.b as u32);
        let mut rest = idx;
        (0..=self.n())
            .map(|_| {
                let x = ring.from_index(rest % block, self.b);
                rest /= block;
                x
            })
            .collect()
    }

    fn check_budget(&self, per_point: u128, budget: u128) -> Result<u64> {
        let a = self.a_size().ok_or(Error::BudgetExceeded { needed: u128::MAX, budget })?;
        let needed = a as u128 * per_point.max(1);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok(a)
    }
}

/// Primes of degree exactly `Δ` that are not exceptional.
#[derive(Clone, Debug, Serialize)]
pub struct SievingSet {
    pub delta: usize,
    pub primes: Vec<PrimePoly>,
    pub excluded: Vec<PrimePoly>,
    pub card: usize,
    /// `|P| >= q^Δ/(2Δ)`.
    pub card_p_holds: bool,
}

impl SievingSet {
    pub fn new(spec: &FieldSpec, delta: usize, exceptional: &[PrimePoly]) -> Result<Self> {
        let all = spec.primes_of_degree(delta)?.primes;
        let (excluded, primes): (Vec<_>, Vec<_>) = all.into_iter().partition(|p| exceptional.contains(p));
        let card = primes.len();
        let q_delta = checked_pow(spec.q(), delta as u64).map_or(u128::MAX, u128::from);
        Ok(SievingSet { delta, card, card_p_holds: 2 * delta as u128 * card as u128 >= q_delta, primes, excluded })
    }

    pub fn from_report(spec: &FieldSpec, delta: usize, exc: &ExcReport) -> Result<Self> {
        if exc.delta_max < delta {
            return Err(Error::Precondition(format!(
                "exceptional primes were scanned only through degree {}, need {delta}",
                exc.delta_max
            )));
        }
        let list: Vec<PrimePoly> = exc.excluded().cloned().collect();
        Self::new(spec, delta, &list)
    }
}

/// Number of `y ∈ k_π` with `y^ℓ = z`, read off the residue symbol: `1` at zero,
/// `ℓ` on `ℓ`-th powers, `0` otherwise.
pub fn fiber_of_residue(ctx: &PrimeContext, z: u32) -> u32 {
    match ctx.chi_exp(z) {
        None => 1,
        Some(0) => ctx.ell(),
        Some(_) => 0,
    }
}

/// `#{y ∈ k_π : y^ℓ = F(x) mod π}`.
pub fn fiber_count(ctx: &PrimeContext, form: &MultiForm, x: &[Poly]) -> u32 {
    let fx = form.eval(ctx.residue().ring(), x);
    fiber_of_residue(ctx, ctx.residue().reduce(&fx))
}

/// `{π ∈ P : π | F(x)}`.
pub fn ramified_set(params: &SieveParams, set: &SievingSet, x: &[Poly]) -> Vec<PrimePoly> {
    let ring = params.spec.ring();
    let fx = params.form.eval(ring, x);
    set.primes.iter().filter(|pi| ring.rem(&fx, pi.poly()).is_zero()).cloned().collect()
}

/// Whether `c·y^ℓ` with `c ∈ F_q^{×ℓ}` equals `f`, by factoring `f`.
/// The cache of `factorizer` must reach `deg f / 2`.
pub fn is_global_power(spec: &FieldSpec, factorizer: &Factorizer, ell: u32, f: &Poly) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let fac = factorizer.factor_warm(f)?;
    if fac.factors.iter().any(|(_, e)| e % ell != 0) {
        return Ok(false);
    }
    let fq = spec.fq();
    Ok(fq.pow(fac.lead, (spec.q() - 1) / ell as u64) == 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub q: u64,
    pub n: usize,
    pub ell: u32,
    pub b: usize,
    pub a_size: u64,
    /// `M_n(F; b)` by factorization.
    pub count: u64,
    /// The same count by lookup in the set of all `y^ℓ`.
    pub oracle_count: u64,
    pub agree: bool,
    pub trivial_bound: u64,
    pub within_trivial: bool,
}

/// `M_n(F; b)`: tuples of degree `< b` with `F(x)` an `ℓ`-th power in `F_q[T]`.
pub fn brute_force_count(params: &SieveParams, budget: u128) -> Result<CountReport> {
    let ring = params.spec.ring();
    let dmax = params.max_value_degree();
    let roots = checked_pow(params.q(), (dmax / params.ell as usize + 1) as u64)
        .ok_or(Error::BudgetExceeded { needed: u128::MAX, budget })?;
    let a = params.check_budget(1 + (dmax * dmax) as u128, u128::MAX)?;
    let needed = a as u128 * (1 + (dmax * dmax) as u128) + roots as u128;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut factorizer = Factorizer::new(ring.clone());
    factorizer.warm(dmax / 2);
    let powers: HashSet<Poly> =
        ring.below_degree(dmax / params.ell as usize + 1).map(|y| ring.pow(&y, params.ell as u64)).collect();
    let (count, oracle) = (0..a)
        .into_par_iter()
        .map(|idx| -> Result<(u64, u64)> {
            let fx = params.form.eval(ring, &params.point(idx));
            let by_factor = is_global_power(&params.spec, &factorizer, params.ell, &fx)?;
            Ok((by_factor as u64, powers.contains(&fx) as u64))
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))?;
    Ok(CountReport {
        q: params.q(),
        n: params.n(),
        ell: params.ell,
        b: params.b,
        a_size: a,
        count,
        oracle_count: oracle,
        agree: count == oracle,
        trivial_bound: a,
        within_trivial: count <= a,
    })
}

/// Integer aggregates over `A` from which every sieve term is assembled.
#[derive(Clone, Debug, Default)]
struct Tally {
    points: u64,
    globally_solvable: u64,
    locally_solvable: u64,
    zero_values: u64,
    ramified_total: u64,
    /// Largest `|V^ram(x)|` over `F(x) != 0`.
    ramified_max: u64,
    /// `|V^ram(x)| Δ <= deg F(x)` whenever `F(x) != 0`.
    divisor_degree_ok: bool,
    /// `Ψ² = (ℓ-1) + (ℓ-2)Ψ` at every unramified `(x, π)`.
    psi_square_ok: bool,
    fiber_values_ok: bool,
    /// `(#{v unramified, f_v = 0}, #{v unramified, f_v = ℓ})` histogram.
    hist: BTreeMap<(u32, u32), u64>,
    /// Per ordered pair `(v1, v2)`: counts of `(f1, f2)` in `{0,ℓ}²` off both ramified loci,
    /// indexed `2·[f1 = ℓ] + [f2 = ℓ]`.
    pairs: Vec<[u64; 4]>,
}

impl Tally {
    fn new(np: usize) -> Self {
        Tally {
            divisor_degree_ok: true,
            psi_square_ok: true,
            fiber_values_ok: true,
            pairs: vec![[0; 4]; np * np],
            ..Default::default()
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.points += other.points;
        self.globally_solvable += other.globally_solvable;
        self.locally_solvable += other.locally_solvable;
        self.zero_values += other.zero_values;
        self.ramified_total += other.ramified_total;
        self.ramified_max = self.ramified_max.max(other.ramified_max);
        self.divisor_degree_ok &= other.divisor_degree_ok;
        self.psi_square_ok &= other.psi_square_ok;
        self.fiber_values_ok &= other.fiber_values_ok;
        for (k, v) in other.hist {
            *self.hist.entry(k).or_default() += v;
        }
        for (a, b) in self.pairs.iter_mut().zip(other.pairs) {
            for i in 0..4 {
                a[i] += b[i];
            }
        }
        self
    }
}

struct Sieve<'a> {
    params: &'a SieveParams,
    contexts: Vec<PrimeContext>,
    factorizer: Factorizer,
}

impl<'a> Sieve<'a> {
    fn new(params: &'a SieveParams, set: &SievingSet) -> Result<Self> {
        if set.delta != params.delta {
            return Err(Error::Precondition(format!(
                "sieving set has Δ = {}, params have {}",
                set.delta, params.delta
            )));
        }
        let contexts =
            set.primes.iter().map(|pi| PrimeContext::new(&params.spec, pi, params.ell)).collect::<Result<Vec<_>>>()?;
        let mut factorizer = Factorizer::new(params.spec.ring().clone());
        factorizer.warm(params.max_value_degree() / 2);
        Ok(Sieve { params, contexts, factorizer })
    }

    fn visit(&self, t: &mut Tally, idx: u64) -> Result<()> {
        let p = self.params;
        let ell = p.ell;
        let fx = p.form.eval(p.spec.ring(), &p.point(idx));
        let np = self.contexts.len();
        let fibers: Vec<u32> = self.contexts.iter().map(|c| fiber_of_residue(c, c.residue().reduce(&fx))).collect();
        t.points += 1;
        t.globally_solvable += is_global_power(&p.spec, &self.factorizer, ell, &fx)? as u64;
        t.locally_solvable += fibers.iter().all(|&f| f > 0) as u64;
        let ram = fibers.iter().filter(|&&f| f == 1).count() as u64;
        t.ramified_total += ram;
        if fx.is_zero() {
            t.zero_values += 1;
        } else {
            t.ramified_max = t.ramified_max.max(ram);
            t.divisor_degree_ok &= ram as usize * p.delta <= fx.degree().unwrap_or(0);
        }
        let (mut u0, mut ul) = (0, 0);
        for &f in &fibers {
            t.fiber_values_ok &= f == 0 || f == 1 || f == ell;
            if f == 1 {
                continue;
            }
            let psi = f as i64 - 1;
            t.psi_square_ok &= psi * psi == (ell as i64 - 1) + (ell as i64 - 2) * psi;
            if f == 0 {
                u0 += 1;
            } else {
                ul += 1;
            }
        }
        *t.hist.entry((u0, ul)).or_default() += 1;
        for (i, &f1) in fibers.iter().enumerate() {
            if f1 == 1 {
                continue;
            }
            for (j, &f2) in fibers.iter().enumerate() {
                if f2 != 1 {
                    t.pairs[i * np + j][2 * (f1 == ell) as usize + (f2 == ell) as usize] += 1;
                }
            }
        }
        Ok(())
    }

    fn run(&self, a: u64) -> Result<Tally> {
        let np = self.contexts.len();
        (0..a)
            .into_par_iter()
            .try_fold(
                || Tally::new(np),
                |mut t, idx| {
                    self.visit(&mut t, idx)?;
                    Ok(t)
                },
            )
            .try_reduce(|| Tally::new(np), |x, y| Ok(x.merge(y)))
    }
}

/// `Σ_x Ψ_{v1}(x)Ψ_{v2}(x)` off both ramified loci, from the pair counts.
fn pair_psi_sum(counts: &[u64; 4], ell: u32) -> i128 {
    let psi = [-1i128, ell as i128 - 1];
    (0..4).map(|k| counts[k] as i128 * psi[k >> 1] * psi[k & 1]).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct PairSum {
    pub pi1: PrimePoly,
    pub pi2: PrimePoly,
    pub sum: i128,
}

/// One row of the general inequality for a single `α`.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaRow {
    #[serde(serialize_with = "crate::report::display")]
    pub alpha: Rational,
    /// `Σ_x I_α(x)²`.
    #[serde(serialize_with = "crate::report::display")]
    pub sum_i_squared: Rational,
    /// `Σ_{v1,v2} Σ_{i,j} c_{i,j}(α) S_{i,j}(v1, v2)`.
    #[serde(serialize_with = "crate::report::display")]
    pub expansion: Rational,
    pub expansion_equal: bool,
    /// `Σ_x I_α(x)²/|P|² + (2/|P|)Σ_x |V^ram(x)|`.
    #[serde(serialize_with = "crate::report::display")]
    pub rhs: Rational,
    /// Same with `|Σ_{i,j} c_{i,j} S_{i,j}|` summed over pairs.
    #[serde(serialize_with = "crate::report::display")]
    pub rhs_abs: Rational,
    pub holds: bool,
    pub holds_abs: bool,
    pub abs_dominates: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralTable {
    pub rows: Vec<AlphaRow>,
    /// Smallest grid `α` minimizing `Σ_x I_α(x)²`.
    #[serde(serialize_with = "crate::report::display")]
    pub argmin_alpha: Rational,
    /// Whether the argmin is `ℓ - 1`; observed, not a theorem off `S(A)`.
    pub argmin_is_ell_minus_one: bool,
    pub all_pass: bool,
}

/// `c_{i,j}(α)` for a cover of degree `ℓ`, indexed `[i][j]`.
pub fn c_table<Z: ExactInt>(alpha: &Ratio<Z>, ell: u32) -> [[Ratio<Z>; 3]; 3] {
    let l = Ratio::from_integer(Z::from_u32(ell).expect("ℓ fits"));
    let one = Ratio::from_integer(Z::one());
    let a = alpha.clone() - l.clone();
    let c = one.clone() + l;
    [
        [a.clone() * a.clone(), a.clone() * c.clone(), -a.clone()],
        [a.clone() * c.clone(), c.clone() * c.clone(), -c.clone()],
        [-a, -c, one],
    ]
}

fn general_row<Z: ExactInt>(alpha: &Ratio<Z>, ell: u32, tally: &Tally, np: usize, ram: &Ratio<Z>) -> [Ratio<Z>; 4] {
    let z = |x: u64| Ratio::from_integer(Z::from_u64(x).expect("count fits"));
    let l = z(ell as u64);
    let mut direct = Ratio::zero();
    for (&(u0, ul), &cnt) in &tally.hist {
        let i = z(u0 as u64) * (alpha.clone() - l.clone()) + z(ul as u64) * alpha.clone();
        direct = direct + z(cnt) * i.clone() * i;
    }
    let c = c_table(alpha, ell);
    let f = [Z::zero(), Z::from_u32(ell).expect("ℓ fits")];
    let mut expansion = Ratio::zero();
    let mut abs_sum = Ratio::zero();
    for counts in &tally.pairs {
        let mut inner = Ratio::zero();
        for (i, ci) in c.iter().enumerate() {
            for (j, cij) in ci.iter().enumerate() {
                // S_{i,j} = Σ_x f1^i f2^j over the pair's unramified points
                let mut s = Z::zero();
                for (k, &n) in counts.iter().enumerate() {
                    let f1 = num_traits::pow(f[k >> 1].clone(), i);
                    let f2 = num_traits::pow(f[k & 1].clone(), j);
                    s = s + Z::from_u64(n).expect("count fits") * f1 * f2;
                }
                inner = inner + cij.clone() * Ratio::from_integer(s);
            }
        }
        abs_sum = abs_sum + inner.abs();
        expansion = expansion + inner;
    }
    let p2 = z((np * np) as u64);
    let rhs = direct.clone() / p2.clone() + ram.clone();
    let rhs_abs = abs_sum / p2 + ram.clone();
    [direct, expansion, rhs, rhs_abs]
}

/// Rows `[α, Σ I_α², expansion, rhs, rhs_abs]` over a grid, exact in `Z`.
fn general_table<Z: ExactInt>(alphas: &[Ratio<Z>], ell: u32, tally: &Tally, np: usize) -> Result<Vec<[Ratio<Z>; 5]>> {
    let one = Ratio::from_integer(Z::one());
    let z = |x: u64| Ratio::from_integer(Z::from_u64(x).expect("count fits"));
    let ram = z(2 * tally.ramified_total) / z(np as u64);
    alphas
        .iter()
        .map(|alpha| {
            if *alpha < one {
                return Err(Error::Precondition(format!("α = {alpha} is below 1")));
            }
            let [d, e, r, ra] = general_row(alpha, ell, tally, np, &ram);
            Ok([alpha.clone(), d, e, r, ra])
        })
        .collect()
}

fn to_general(rows: Vec<[Rational; 5]>, ell: u32, count: u64) -> GeneralTable {
    let c = Rational::from_integer(count as i128);
    let rows: Vec<AlphaRow> = rows
        .into_iter()
        .map(|[alpha, d, e, r, ra]| AlphaRow {
            expansion_equal: d == e,
            holds: c <= r,
            holds_abs: c <= ra,
            abs_dominates: ra >= r,
            alpha,
            sum_i_squared: d,
            expansion: e,
            rhs: r,
            rhs_abs: ra,
        })
        .collect();
    let best = rows.iter().fold(None::<&AlphaRow>, |acc, r| match acc {
        Some(a) if a.sum_i_squared <= r.sum_i_squared => Some(a),
        _ => Some(r),
    });
    let argmin_alpha = best.map(|r| r.alpha).unwrap_or_default();
    GeneralTable {
        argmin_is_ell_minus_one: argmin_alpha == Rational::from_integer(ell as i128 - 1),
        all_pass: rows.iter().all(|r| r.expansion_equal && r.holds && r.holds_abs && r.abs_dominates),
        argmin_alpha,
        rows,
    }
}

/// Full sieve report: the three terms of the cyclic-cover sieve plus consistency checks.
#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub q: u64,
    pub n: usize,
    pub m: u32,
    pub ell: u32,
    pub b: usize,
    pub delta: usize,
    pub num_primes: usize,
    pub primes: Vec<PrimePoly>,
    pub a_size: u64,
    /// `|S_F(A)| = M_n(F; b)`, tuples with a global `ℓ`-th root.
    pub global_count: u64,
    /// Tuples locally solvable at every sieving prime.
    pub local_count: u64,
    #[serde(serialize_with = "crate::report::display")]
    pub main_term: Rational,
    #[serde(serialize_with = "crate::report::display")]
    pub ramified_term: Rational,
    pub unramified_term: i128,
    pub unramified_pair: Option<PairSum>,
    #[serde(serialize_with = "crate::report::display")]
    pub rhs: Rational,
    pub rhs_float: f64,
    pub trivial_bound: u64,
    pub pass_global: bool,
    pub pass_local: bool,
    /// `(2/|P|)(|A|(deg_T F + mb) + |P| m q^{bn})`.
    #[serde(serialize_with = "crate::report::display")]
    pub ramified_majorant: Rational,
    pub ramified_majorant_pass: bool,
    pub ramified_size_pass: bool,
    pub psi_square_pass: bool,
    pub fiber_values_pass: bool,
    pub pair_symmetry_pass: bool,
    pub card_p_holds: bool,
    pub general: Option<GeneralTable>,
}

impl SieveReport {
    pub fn all_pass(&self) -> bool {
        self.pass_global
            && self.pass_local
            && self.ramified_majorant_pass
            && self.ramified_size_pass
            && self.psi_square_pass
            && self.fiber_values_pass
            && self.pair_symmetry_pass
            && self.general.as_ref().is_none_or(|g| g.all_pass)
    }

    /// Header and values for a one-row CSV.
    pub fn csv_row(&self) -> (Vec<&'static str>, Vec<String>) {
        let pair = self.unramified_pair.as_ref();
        let cols: Vec<(&'static str, String)> = vec![
            ("q", self.q.to_string()),
            ("delta", self.delta.to_string()),
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("ell", self.ell.to_string()),
            ("b", self.b.to_string()),
            ("num_primes", self.num_primes.to_string()),
            ("a_size", self.a_size.to_string()),
            ("global_count", self.global_count.to_string()),
            ("local_count", self.local_count.to_string()),
            ("main_term", self.main_term.to_string()),
            ("ramified_term", self.ramified_term.to_string()),
            ("unramified_term", self.unramified_term.to_string()),
            ("unramified_pi1", pair.map(|p| p.pi1.to_string()).unwrap_or_default()),
            ("unramified_pi2", pair.map(|p| p.pi2.to_string()).unwrap_or_default()),
            ("rhs", self.rhs.to_string()),
            ("trivial_bound", self.trivial_bound.to_string()),
            ("pass_global", self.pass_global.to_string()),
            ("pass_local", self.pass_local.to_string()),
            ("pass_all", self.all_pass().to_string()),
        ];
        cols.into_iter().unzip()
    }
}

/// All sieve terms for `params` over `set`, optionally with the general table for `alphas`.
pub fn sieve_terms(
    params: &SieveParams,
    set: &SievingSet,
    alphas: Option<&[Rational]>,
    budget: u128,
) -> Result<SieveReport> {
    let np = set.primes.len();
    if np < 2 {
        return Err(Error::Precondition(format!("the sieving set has {np} primes, need at least 2")));
    }
    let dmax = params.max_value_degree() as u128;
    let a = params.check_budget(np as u128 * np as u128 + dmax * dmax, budget)?;
    let sieve = Sieve::new(params, set)?;
    let t = sieve.run(a)?;
    let ell = params.ell;
    let rat = |x: u128| Rational::from_integer(x as i128);
    let npr = rat(np as u128);

    let main_term = rat(((ell - 1) * (ell - 1)) as u128) * rat(a as u128) / npr;
    let ramified_term = rat(2 * t.ramified_total as u128) / npr;

    let mut best: Option<PairSum> = None;
    let mut symmetric = true;
    for i in 0..np {
        for j in 0..np {
            if i == j {
                continue;
            }
            let s = pair_psi_sum(&t.pairs[i * np + j], ell);
            symmetric &= s == pair_psi_sum(&t.pairs[j * np + i], ell);
            if best.as_ref().is_none_or(|b| s.abs() > b.sum.abs()) {
                best = Some(PairSum { pi1: set.primes[i].clone(), pi2: set.primes[j].clone(), sum: s });
            }
        }
    }
    let unramified_term = best.as_ref().map_or(0, |b| b.sum.abs());
    let rhs = main_term + ramified_term + rat(unramified_term as u128);

    let m = params.form.m() as u128;
    let bn = checked_pow(params.q(), (params.b * params.n()) as u64).ok_or(Error::Inexact("q^{bn} overflows".into()))?
        as u128;
    let size_bound = params.form.deg_t() as u128 + m * params.b as u128;
    let ramified_majorant = rat(2) / npr * rat(a as u128 * size_bound + np as u128 * m * bn);

    let general = match alphas {
        Some(grid) => Some(to_general(general_table(grid, ell, &t, np)?, ell, t.locally_solvable)),
        None => None,
    };

    Ok(SieveReport {
        q: params.q(),
        n: params.n(),
        m: params.form.m(),
        ell,
        b: params.b,
        delta: params.delta,
        num_primes: np,
        primes: set.primes.clone(),
        a_size: a,
        global_count: t.globally_solvable,
        local_count: t.locally_solvable,
        main_term,
        ramified_term,
        unramified_term,
        unramified_pair: best,
        rhs,
        rhs_float: crate::scalar::sig12(*rhs.numer() as f64 / *rhs.denom() as f64),
        trivial_bound: a,
        pass_global: rat(t.globally_solvable as u128) <= rhs,
        pass_local: rat(t.locally_solvable as u128) <= rhs && t.globally_solvable <= t.locally_solvable,
        ramified_majorant_pass: ramified_term <= ramified_majorant,
        ramified_majorant,
        ramified_size_pass: t.divisor_degree_ok && t.ramified_max as u128 <= size_bound,
        psi_square_pass: t.psi_square_ok,
        fiber_values_pass: t.fiber_values_ok,
        pair_symmetry_pass: symmetric,
        card_p_holds: set.card_p_holds,
        general,
    })
}

/// The general inequality alone, with exact arithmetic in any integer type.
pub fn sieve_inequality_general<Z: ExactInt>(
    params: &SieveParams,
    set: &SievingSet,
    alphas: &[Ratio<Z>],
    budget: u128,
) -> Result<Vec<[Ratio<Z>; 5]>> {
    let np = set.primes.len();
    if np == 0 {
        return Err(Error::Precondition("empty sieving set".into()));
    }
    let a = params.check_budget((np * np) as u128, budget)?;
    let t = Sieve::new(params, set)?.run(a)?;
    general_table(alphas, params.ell, &t, np)
}

/// `Δ(n, b) = ⌊nb/(n+1)⌋`.
pub fn choose_delta(n: usize, b: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::Precondition(format!("n = {n}: Δ < b < 2Δ has no solution unless n >= 2")));
    }
    Ok(n * b / (n + 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct MinB {
    pub n: usize,
    pub q: u64,
    pub exc_size: usize,
    pub b: usize,
    pub delta: usize,
    /// Degree-`Δ` primes counted by enumeration, or by the Möbius formula above the enumeration cap.
    pub prime_count: u64,
    pub enumerated: bool,
    pub card_p_holds: bool,
}

/// Above this many monics the prime count switches from enumeration to the exact formula.
pub const ENUMERATION_CAP: u64 = 2_000_000;

/// The smallest `b` meeting every parameter constraint, found by increasing search.
pub fn min_b(spec: &FieldSpec, n: usize, exc_size: usize) -> Result<MinB> {
    let q = spec.q();
    for b in 1..=100_000usize {
        let delta = choose_delta(n, b)?;
        if delta == 0 || !(delta < b && b < 2 * delta) {
            continue;
        }
        let Some(qd) = checked_pow(q, delta as u64) else {
            return Err(Error::Inexact("q^Δ overflows".into()));
        };
        let qd = qd as u128;
        if 4 * delta as u128 * exc_size as u128 > qd {
            continue;
        }
        // 4(b+1) <= q^{Δ/2}
        let lhs = 4 * (b as u128 + 1);
        if lhs * lhs > qd {
            continue;
        }
        let enumerated = qd <= ENUMERATION_CAP as u128;
        let prime_count =
            if enumerated { spec.primes_of_degree(delta)?.count } else { irreducible_count(q, delta as u64) };
        let remaining = prime_count.saturating_sub(exc_size as u64) as u128;
        return Ok(MinB {
            n,
            q,
            exc_size,
            b,
            delta,
            prime_count,
            enumerated,
            card_p_holds: 2 * delta as u128 * remaining >= qd,
        });
    }
    Err(Error::Precondition("no admissible b below 100000".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadric(spec: &FieldSpec) -> MultiForm {
        let text = r#"{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"1"},{"exps":[0,2,0],"coeff":"1"},{"exps":[0,0,2],"coeff":"1"}]}"#;
        MultiForm::parse_json(spec, text).unwrap()
    }

    #[test]
    fn fibers_mod_t() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let f = quadric(&spec);
        let ctx = PrimeContext::new(&spec, &spec.parse_prime("T").unwrap(), 2).unwrap();
        let c = |v: [u32; 3]| v.map(Poly::constant).to_vec();
        assert_eq!(fiber_count(&ctx, &f, &c([1, 0, 0])), 2);
        assert_eq!(fiber_count(&ctx, &f, &c([1, 1, 1])), 1);
        assert_eq!(fiber_count(&ctx, &f, &c([1, 1, 0])), 0);
    }

    #[test]
    fn delta_choice() {
        assert_eq!(choose_delta(2, 3).unwrap(), 2);
        assert!(choose_delta(1, 3).is_err());
        let spec = FieldSpec::new(3, 1).unwrap();
        let mb = min_b(&spec, 2, 0).unwrap();
        assert_eq!((mb.b, mb.delta), (12, 8));
        assert_eq!(mb.prime_count, 810);
        assert!(mb.card_p_holds);
    }

    #[test]
    fn c_table_corners() {
        let c = c_table(&Ratio::from_integer(3i64), 2);
        assert_eq!(c[2][2], Ratio::from_integer(1));
        assert_eq!(c[1][1], Ratio::from_integer(9));
        assert_eq!(c[0][0], Ratio::from_integer(1));
    }

    #[test]
    fn quadric_instance() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let params = SieveParams::new(spec.clone(), quadric(&spec), 2, 3, 2).unwrap();
        let set = SievingSet::new(&spec, 2, &[]).unwrap();
        let grid: Vec<Rational> = (1..=4).map(Rational::from_integer).collect();
        let rep = sieve_terms(&params, &set, Some(&grid), 1 << 40).unwrap();
        assert_eq!(rep.a_size, 19683);
        assert!(rep.all_pass(), "{rep:#?}");
        let g = rep.general.as_ref().unwrap();
        assert_eq!(g.argmin_alpha, Rational::from_integer(1));
        let count = brute_force_count(&params, 1 << 40).unwrap();
        assert_eq!(count.count, rep.global_count);
        assert!(count.agree);
    }

    #[test]
    fn constant_box_count() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let params = SieveParams::new(spec.clone(), quadric(&spec), 2, 1, 1).unwrap();
        let rep = brute_force_count(&params, 1 << 20).unwrap();
        let expected = (0..27u32)
            .filter(|i| {
                let s = (i % 3).pow(2) + (i / 3 % 3).pow(2) + (i / 9).pow(2);
                s % 3 != 2
            })
            .count() as u64;
        assert_eq!(rep.count, expected);
        assert!(rep.agree);
    }
}
