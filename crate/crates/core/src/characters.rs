//! Power-residue characters, the additive character at infinity and Gauss sums.

use serde::Serialize;

use crate::arith::is_prime;
use crate::cyclotomic::RootCounts;
use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec, Poly, PolyRing, PrimePoly, Residue};
use crate::CycValue;

/// Value of a multiplicative character: `0` or `ζ_ℓ^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CharValue {
    Zero,
    Root(u32),
}

/// Checks that `ℓ` is a prime dividing `q - 1`.
pub fn check_ell(q: u64, ell: u32) -> Result<()> {
    if ell < 2 || !is_prime(ell as u64) {
        return Err(Error::Precondition(format!("ℓ = {ell} is not a prime")));
    }
    if !(q - 1).is_multiple_of(ell as u64) {
        return Err(Error::Precondition(format!("ℓ = {ell} does not divide q - 1 = {}", q - 1)));
    }
    Ok(())
}

/// Exponent `c` with `ψ_∞(num/den) = ζ_p^c`, where `ψ_∞` is `ζ_p` raised to the
/// trace of the `T^{-1}` coefficient of the Laurent expansion at infinity.
/// Only the proper part `r/den`, `r = num mod den`, contributes.
pub fn psi_ratio(ring: &PolyRing, num: &Poly, den: &Poly) -> Result<u32> {
    let d = den.degree().ok_or(Error::DivisionByZero)?;
    let r = ring.divrem(num, den)?.1;
    if d == 0 || r.degree() != Some(d - 1) {
        return Ok(0);
    }
    let f = ring.field();
    Ok(f.trace_to_prime(f.div(r.lead(), den.lead())))
}

/// Characters attached to one prime `π` and one `ℓ | q - 1`.
///
/// `χ_{π,i}(a) = θ((a/π)_ℓ)^i`, where the residue symbol `a^{(q^Δ-1)/ℓ}` lies
/// in `μ_ℓ(F_q)` and `θ` sends `g^{(q-1)/ℓ}` to `ζ_ℓ` for the smallest
/// primitive root `g` of `F_q`.
#[derive(Clone, Debug)]
pub struct PrimeContext {
    residue: Residue,
    p: u32,
    q: u64,
    ell: u32,
    /// `k` with `χ_{π,1}(z) = ζ_ℓ^k`; `u32::MAX` at zero.
    chi_exp: Vec<u32>,
    /// `c` with `ψ_∞(z/π) = ζ_p^c`.
    psi_exp: Vec<u32>,
}

impl PrimeContext {
    pub fn new(spec: &FieldSpec, pi: &PrimePoly, ell: u32) -> Result<Self> {
        check_ell(spec.q(), ell)?;
        let residue = spec.residue(pi)?;
        let kf = residue.field().clone();
        let fq = spec.fq();
        let n = kf.size() as u64;
        let step = (spec.q() - 1) / ell as u64;
        // θ of the symbol of the table generator of k_π
        let sym_gen = kf.pow(kf.generator(), (n - 1) / ell as u64);
        let s = fq.log(sym_gen).expect("nonzero") as u64 / step;
        let mut chi_exp = vec![u32::MAX; n as usize];
        let mut psi_exp = vec![0; n as usize];
        for z in 0..n as Fe {
            if let Some(l) = kf.log(z) {
                chi_exp[z as usize] = ((s * l as u64) % ell as u64) as u32;
            }
            psi_exp[z as usize] = fq.trace_to_prime(residue.top_coeff(z));
        }
        Ok(PrimeContext { residue, p: spec.p(), q: spec.q(), ell, chi_exp, psi_exp })
    }

    pub fn residue(&self) -> &Residue {
        &self.residue
    }

    pub fn prime(&self) -> &PrimePoly {
        self.residue.prime()
    }

    pub fn field(&self) -> &crate::field::Gf {
        self.residue.field()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn delta(&self) -> usize {
        self.residue.degree()
    }

    /// `|k_π| = q^Δ`.
    pub fn size(&self) -> u64 {
        self.residue.size()
    }

    /// `(z/π)_ℓ = z^{(q^Δ-1)/ℓ}`, an element of `μ_ℓ(F_q) ∪ {0}`.
    pub fn residue_symbol(&self, z: Fe) -> Fe {
        let kf = self.residue.field();
        kf.pow(z, (self.size() - 1) / self.ell as u64)
    }

    /// Exponent of `χ_{π,1}(z)`, `None` when `z = 0`.
    #[inline]
    pub fn chi_exp(&self, z: Fe) -> Option<u32> {
        match self.chi_exp[z as usize] {
            u32::MAX => None,
            k => Some(k),
        }
    }

    /// `χ_{π,i}(z)`, with `χ_{π,0}(0) = 1` so that the characters sum to root counts.
    pub fn chi(&self, i: u32, z: Fe) -> CharValue {
        match self.chi_exp(z) {
            Some(k) => CharValue::Root((i * k) % self.ell),
            None if i.is_multiple_of(self.ell) => CharValue::Root(0),
            None => CharValue::Zero,
        }
    }

    pub fn chi_value(&self, i: u32, z: Fe) -> CycValue {
        match self.chi(i, z) {
            CharValue::Zero => CycValue::zero(self.p, self.ell),
            CharValue::Root(k) => CycValue::root(self.p, self.ell, 0, k),
        }
    }

    /// Exponent of `ψ_∞(z/π)`.
    #[inline]
    pub fn psi_exp(&self, z: Fe) -> u32 {
        self.psi_exp[z as usize]
    }

    pub fn psi_value(&self, z: Fe) -> CycValue {
        CycValue::root(self.p, self.ell, self.psi_exp(z), 0)
    }

    /// `τ(χ_{π,i}) = Σ_α χ_{π,i}(α) ψ_∞(α/π)` for a nontrivial character.
    pub fn gauss_sum(&self, i: u32) -> Result<CycValue> {
        if i.is_multiple_of(self.ell) {
            return Err(Error::Precondition("Gauss sums need a nontrivial character".into()));
        }
        let mut acc = RootCounts::new(self.p, self.ell);
        for z in 1..self.size() as Fe {
            let k = self.chi_exp[z as usize];
            acc.add(self.psi_exp[z as usize], i * k, 1);
        }
        Ok(acc.finish())
    }

    /// `Σ_{i<ℓ} χ_{π,i}(z)` next to the number of `ℓ`-th roots of `z` in `k_π`.
    pub fn root_count_pair(&self, z: Fe) -> (CycValue, u64) {
        let mut acc = RootCounts::new(self.p, self.ell);
        for i in 0..self.ell {
            if let CharValue::Root(k) = self.chi(i, z) {
                acc.add(0, k, 1);
            }
        }
        let kf = self.residue.field();
        let roots = (0..self.size() as Fe).filter(|&y| kf.pow(y, self.ell as u64) == z).count() as u64;
        (acc.finish(), roots)
    }
}

/// `τ·conj(τ)` next to `q^Δ`.
#[derive(Clone, Debug, Serialize)]
pub struct GaussCheck {
    pub pi: PrimePoly,
    pub ell: u32,
    pub chi_index: u32,
    pub tau: CycValue,
    pub norm: Option<i64>,
    pub q_delta: u64,
    pub equal: bool,
}

pub fn gauss_check(ctx: &PrimeContext, i: u32) -> Result<GaussCheck> {
    let tau = ctx.gauss_sum(i)?;
    let norm = (&tau * &tau.conj()).as_integer();
    Ok(GaussCheck {
        pi: ctx.prime().clone(),
        ell: ctx.ell(),
        chi_index: i,
        equal: norm == Some(ctx.size() as i64),
        norm,
        q_delta: ctx.size(),
        tau,
    })
}
