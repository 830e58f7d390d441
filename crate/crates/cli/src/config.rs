//! Experiment configuration: a JSON file, overridden by command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use cycsieve_core::field::{FieldSpec, PrimePoly};
use cycsieve_core::form::{FormJson, MultiForm};
use cycsieve_core::geometry::{DualSpec, SearchLimits};
use cycsieve_core::sieve::choose_delta;
use cycsieve_core::Rational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FormInput {
    Text(String),
    Json(FormJson),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualInput {
    Quadric,
    Tangency,
    Form(FormInput),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DeltaInput {
    Fixed(usize),
    Named(String),
}

/// Raw configuration; every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: Option<u32>,
    pub e: Option<u32>,
    pub q: Option<u64>,
    pub n: Option<usize>,
    pub ell: Option<u32>,
    pub form: Option<FormInput>,
    pub dual: Option<DualInput>,
    pub b: Option<usize>,
    pub delta: Option<DeltaInput>,
    pub delta_max: Option<usize>,
    pub search_bound: Option<u32>,
    pub tangency_ext: Option<u32>,
    pub budget: Option<f64>,
    pub alphas: Option<Vec<String>>,
    pub primes: Option<Vec<String>>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub q: Option<u64>,
    pub n: Option<usize>,
    pub ell: Option<u32>,
    pub b: Option<usize>,
    pub delta: Option<String>,
    pub budget: Option<f64>,
    pub form: Option<String>,
    pub primes: Vec<String>,
}

/// The fully resolved configuration embedded in every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved {
    pub p: u32,
    pub e: u32,
    pub q: u64,
    pub n: usize,
    pub ell: u32,
    pub m: u32,
    pub form: String,
    pub dual: String,
    pub b: usize,
    pub delta: Option<usize>,
    pub delta_max: usize,
    pub search_bound: u32,
    pub tangency_ext: u32,
    pub budget: u128,
    pub alphas: Vec<String>,
    pub primes: Vec<String>,
}

/// Resolved configuration together with the parsed objects it describes.
pub struct Setup {
    pub resolved: Resolved,
    pub spec: FieldSpec,
    pub form: MultiForm,
    pub dual: DualSpec,
    pub alphas: Vec<Rational>,
    pub primes: Vec<PrimePoly>,
}

impl Setup {
    pub fn limits(&self) -> SearchLimits {
        SearchLimits { max_ext: self.resolved.search_bound, budget: SearchLimits::default().budget }
    }

    pub fn budget(&self) -> u128 {
        self.resolved.budget
    }

    pub fn delta(&self) -> Result<usize> {
        self.resolved.delta.context("Δ is undefined: set --delta or use n >= 2 with --delta auto")
    }
}

fn parse_form(spec: &FieldSpec, n: usize, input: &FormInput) -> Result<MultiForm> {
    Ok(match input {
        FormInput::Text(t) => MultiForm::parse_text(spec, n, t)?,
        FormInput::Json(j) => {
            if j.n != n {
                bail!("the form has n = {} but the configuration has n = {n}", j.n);
            }
            MultiForm::from_json(spec, j)?
        }
    })
}

fn field_spec(cfg: &ExperimentConfig, q_flag: Option<u64>) -> Result<FieldSpec> {
    if let Some(q) = q_flag.or(cfg.q) {
        return Ok(FieldSpec::from_q(q)?);
    }
    Ok(FieldSpec::new(cfg.p.unwrap_or(3), cfg.e.unwrap_or(1))?)
}

pub fn resolve(cfg: &ExperimentConfig, ov: &Overrides) -> Result<Setup> {
    let spec = field_spec(cfg, ov.q)?;
    let n = ov.n.or(cfg.n).unwrap_or(2);
    let ell = ov.ell.or(cfg.ell).unwrap_or(2);
    cycsieve_core::characters::check_ell(spec.q(), ell)?;

    let form = match (&ov.form, &cfg.form) {
        (Some(t), _) => MultiForm::parse_text(&spec, n, t)?,
        (None, Some(f)) => parse_form(&spec, n, f)?,
        (None, None) => {
            let text: Vec<String> = (0..=n).map(|i| format!("X{i}^{ell}")).collect();
            MultiForm::parse_text(&spec, n, &text.join("+"))?
        }
    };
    let m = form.m();
    if m % ell != 0 {
        bail!("ℓ = {ell} does not divide m = {m}");
    }
    if m % spec.p() == 0 {
        bail!("the characteristic {} divides m = {m}", spec.p());
    }

    let (dual, dual_text) = match &cfg.dual {
        Some(DualInput::Quadric) => (DualSpec::QuadricClosedForm, "quadric".to_string()),
        Some(DualInput::Tangency) => (DualSpec::TangencySearch { max_ext: 0 }, "tangency".to_string()),
        Some(DualInput::Form(f)) => {
            let g = parse_form(&spec, n, f)?;
            let text = g.to_string();
            (DualSpec::UserSupplied(g), text)
        }
        None if m == 2 => (DualSpec::QuadricClosedForm, "quadric".to_string()),
        None => (DualSpec::TangencySearch { max_ext: 0 }, "tangency".to_string()),
    };
    let search_bound = cfg.search_bound.unwrap_or(SearchLimits::default().max_ext);
    let tangency_ext = cfg.tangency_ext.unwrap_or(1);
    let dual = match dual {
        DualSpec::TangencySearch { .. } => DualSpec::TangencySearch { max_ext: tangency_ext },
        d => d,
    };

    let b = ov.b.or(cfg.b).unwrap_or(3);
    let delta_text = ov.delta.clone().or(match &cfg.delta {
        Some(DeltaInput::Fixed(d)) => Some(d.to_string()),
        Some(DeltaInput::Named(s)) => Some(s.clone()),
        None => None,
    });
    let delta = match delta_text.as_deref() {
        None | Some("auto") => {
            if n >= 2 {
                Some(choose_delta(n, b)?)
            } else {
                None
            }
        }
        Some(s) => Some(s.parse().with_context(|| format!("--delta expects auto or an integer, got {s:?}"))?),
    };
    let delta_max = cfg.delta_max.or(delta).unwrap_or(2);

    let budget = ov.budget.or(cfg.budget).unwrap_or(1e8);
    if !(budget >= 1.0 && budget.is_finite()) {
        bail!("the budget must be a positive number");
    }
    let alpha_text = cfg.alphas.clone().unwrap_or_else(|| (1..=2 * ell).map(|a| a.to_string()).collect());
    let alphas = alpha_text
        .iter()
        .map(|a| a.parse::<Rational>().with_context(|| format!("bad α {a:?}")))
        .collect::<Result<Vec<_>>>()?;

    let prime_text = if ov.primes.is_empty() { cfg.primes.clone().unwrap_or_default() } else { ov.primes.clone() };
    let primes = prime_text.iter().map(|t| spec.parse_prime(t)).collect::<cycsieve_core::Result<Vec<_>>>()?;

    let resolved = Resolved {
        p: spec.p(),
        e: spec.e(),
        q: spec.q(),
        n,
        ell,
        m,
        form: form.to_string(),
        dual: dual_text,
        b,
        delta,
        delta_max,
        search_bound,
        tangency_ext,
        budget: budget as u128,
        alphas: alphas.iter().map(|a| a.to_string()).collect(),
        primes: primes.iter().map(|p| p.to_string()).collect(),
    };
    Ok(Setup { resolved, spec, form, dual, alphas, primes })
}
