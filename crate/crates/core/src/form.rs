//! Multivariate polynomials: forms over `F_q[T]` and polynomials over table fields.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec, Gf, Poly, PolyRing, Residue};

/// Polynomial in `nvars` variables over a table field, keyed by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Fe>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Fe) -> Self {
        let mut f = Self::zero(nvars);
        f.add_term(vec![0; nvars], c, None);
        f
    }

    /// Builds from `(exponents, coefficient)` pairs; repeated exponents are added.
    pub fn from_terms(field: &Gf, nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Fe)>) -> Self {
        let mut f = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            f.add_term(e, c, Some(field));
        }
        f
    }

    fn add_term(&mut self, e: Vec<u32>, c: Fe, field: Option<&Gf>) {
        let entry = self.terms.entry(e).or_insert(0);
        *entry = match field {
            Some(f) => f.add(*entry, c),
            None => c,
        };
        self.terms.retain(|_, c| *c != 0);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, Fe)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Degree in one variable.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn add(&self, field: &Gf, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c, Some(field));
        }
        out
    }

    pub fn scale(&self, field: &Gf, c: Fe) -> MPoly {
        MPoly::from_terms(field, self.nvars, self.terms.iter().map(|(e, &x)| (e.clone(), field.mul(c, x))))
    }

    pub fn sub(&self, field: &Gf, other: &MPoly) -> MPoly {
        self.add(field, &other.scale(field, field.neg(1)))
    }

    pub fn mul(&self, field: &Gf, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, field.mul(c1, c2), Some(field));
            }
        }
        out
    }

    /// Partial derivative in `var`.
    pub fn derivative(&self, field: &Gf, var: usize) -> MPoly {
        MPoly::from_terms(
            field,
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, &c)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (e2, field.scale(e[var] as i64, c))
            }),
        )
    }

    /// Evaluation at a point whose coordinates live in `field` (any field
    /// whose encoding extends the coefficient field).
    pub fn eval(&self, field: &Gf, point: &[Fe]) -> Fe {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = 0;
        'terms: for (e, &c) in &self.terms {
            let mut lg = field.log(c).expect("stored coefficients are nonzero") as u64;
            for (&x, &k) in point.iter().zip(e) {
                if k == 0 {
                    continue;
                }
                match field.log(x) {
                    None => continue 'terms,
                    Some(l) => lg += l as u64 * k as u64,
                }
            }
            acc = field.add(acc, field.exp(lg));
        }
        acc
    }

    /// The terms only involving variables of `support` (the others set to zero).
    pub fn restrict_support(&self, support: &[usize]) -> MPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().enumerate().all(|(i, &k)| k == 0 || support.contains(&i)))
            .map(|(e, &c)| (e.clone(), c))
            .collect();
        MPoly { nvars: self.nvars, terms }
    }

    /// Substitutes `value` for `var` and drops that variable.
    pub fn specialize(&self, field: &Gf, var: usize, value: Fe) -> MPoly {
        MPoly::from_terms(
            field,
            self.nvars - 1,
            self.terms.iter().filter_map(|(e, &c)| {
                let k = e[var];
                let factor = field.pow(value, k as u64);
                if factor == 0 {
                    return None;
                }
                let mut e2 = e.clone();
                e2.remove(var);
                Some((e2, field.mul(c, factor)))
            }),
        )
    }

    /// Keeps only the listed variables, which must carry every exponent.
    pub fn select_vars(&self, keep: &[usize]) -> MPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                debug_assert!(e.iter().enumerate().all(|(i, &k)| k == 0 || keep.contains(&i)));
                (keep.iter().map(|&i| e[i]).collect(), c)
            })
            .collect();
        MPoly { nvars: keep.len(), terms }
    }

    /// Homogeneous part of top degree.
    pub fn top_form(&self) -> MPoly {
        let d = self.total_degree().unwrap_or(0);
        let terms =
            self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, &c)| (e.clone(), c)).collect();
        MPoly { nvars: self.nvars, terms }
    }

    /// Univariate view in variable `var`; other variables must be absent.
    pub fn to_univariate(&self, var: usize) -> Poly {
        let d = self.degree_in(var).unwrap_or(0) as usize;
        let mut c = vec![0; d + 1];
        for (e, &x) in &self.terms {
            c[e[var] as usize] = x;
        }
        Poly::from_coeffs(c)
    }

    /// View as a polynomial in `y` with coefficients in `k[x]`, low-to-high in `y`.
    pub fn to_bivariate(&self, x: usize, y: usize) -> Vec<Poly> {
        let dy = self.degree_in(y).unwrap_or(0) as usize;
        let mut rows: Vec<Vec<Fe>> = vec![Vec::new(); dy + 1];
        for (e, &c) in &self.terms {
            let row = &mut rows[e[y] as usize];
            let k = e[x] as usize;
            if row.len() <= k {
                row.resize(k + 1, 0);
            }
            row[k] = c;
        }
        rows.into_iter().map(Poly::from_coeffs).collect()
    }

    pub fn display_with(&self, var_names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut s = c.to_string();
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => s.push_str(&format!("*{}", var_names[i])),
                    _ => s.push_str(&format!("*{}^{k}", var_names[i])),
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("X{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

/// A form of degree `m` in `X_0..X_n` with coefficients in `F_q[T]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiForm {
    n: usize,
    m: u32,
    terms: BTreeMap<Vec<u32>, Poly>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coeff: String,
}

/// Serialized form: `{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"1"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub m: u32,
    pub terms: Vec<TermJson>,
}

impl MultiForm {
    pub fn new(ring: &PolyRing, n: usize, m: u32, terms: impl IntoIterator<Item = (Vec<u32>, Poly)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != n + 1 {
                return Err(Error::Parse(format!("exponent vector {e:?} needs {} entries", n + 1)));
            }
            if e.iter().sum::<u32>() != m {
                return Err(Error::Parse(format!("term {e:?} is not of degree {m}")));
            }
            let entry = map.entry(e).or_default();
            *entry = ring.add(entry, &c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(MultiForm { n, m, terms: map })
    }

    pub fn from_json(spec: &FieldSpec, json: &FormJson) -> Result<Self> {
        let terms =
            json.terms.iter().map(|t| Ok((t.exps.clone(), spec.parse_poly(&t.coeff)?))).collect::<Result<Vec<_>>>()?;
        Self::new(spec.ring(), json.n, json.m, terms)
    }

    pub fn parse_json(spec: &FieldSpec, text: &str) -> Result<Self> {
        let json: FormJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(spec, &json)
    }

    /// Parses text such as `X0^2 + (1+T)*X1*X2 + 2*X2^2` in `X_0..X_n`.
    /// Coefficients are products of bare `F_q[T]` factors or parenthesized polynomials.
    pub fn parse_text(spec: &FieldSpec, n: usize, text: &str) -> Result<Self> {
        let ring = spec.ring();
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut terms = Vec::new();
        for term in split_top(&s, '+')? {
            let mut exps = vec![0u32; n + 1];
            let mut coeff = Poly::one();
            for factor in split_top(term, '*')? {
                if let Some(var) = factor.strip_prefix('X') {
                    let (idx, pow) = var.split_once('^').unwrap_or((var, "1"));
                    let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad variable {factor:?}")))?;
                    let pow: u32 = pow.parse().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
                    if idx > n {
                        return Err(Error::Parse(format!("variable X{idx} beyond X{n}")));
                    }
                    exps[idx] += pow;
                } else {
                    let inner = factor.strip_prefix('(').and_then(|f| f.strip_suffix(')')).unwrap_or(factor);
                    coeff = ring.mul(&coeff, &spec.parse_poly(inner)?);
                }
            }
            terms.push((exps, coeff));
        }
        let m = terms.first().map(|(e, _)| e.iter().sum()).unwrap_or(0);
        if m == 0 {
            return Err(Error::Parse(format!("{text:?} is not a form of positive degree")));
        }
        Self::new(ring, n, m, terms)
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            n: self.n,
            m: self.m,
            terms: self.terms.iter().map(|(e, c)| TermJson { exps: e.clone(), coeff: c.to_string() }).collect(),
        }
    }

    /// Number of variables minus one.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Poly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `T`-degree of a coefficient.
    pub fn deg_t(&self) -> usize {
        self.terms.values().filter_map(Poly::degree).max().unwrap_or(0)
    }

    /// Every term a pure power `c_i X_i^m`.
    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|e| e.iter().filter(|&&k| k > 0).count() == 1)
    }

    /// Coefficient of `X_i^m`.
    pub fn diagonal_coeff(&self, i: usize) -> Poly {
        let mut e = vec![0; self.n + 1];
        e[i] = self.m;
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, e: &[u32]) -> Poly {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// `F(x)` for `x ∈ F_q[T]^{n+1}`.
    pub fn eval(&self, ring: &PolyRing, x: &[Poly]) -> Poly {
        let mut acc = Poly::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = ring.mul(&t, &ring.pow(xi, k as u64));
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    /// Reduction modulo `π`, as a polynomial over `k_π`.
    pub fn reduce(&self, residue: &Residue) -> MPoly {
        MPoly::from_terms(residue.field(), self.n + 1, self.terms.iter().map(|(e, c)| (e.clone(), residue.reduce(c))))
    }

    /// The same form over `F_q` when every coefficient is constant.
    pub fn constant_form(&self, spec: &FieldSpec) -> Option<MPoly> {
        self.terms
            .values()
            .all(Poly::is_constant)
            .then(|| MPoly::from_terms(spec.fq(), self.n + 1, self.terms.iter().map(|(e, c)| (e.clone(), c.coeff(0)))))
    }
}

impl fmt::Display for MultiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            if *c != Poly::one() {
                factors.push(if c.is_constant() { c.to_string() } else { format!("({c})") });
            }
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(format!("X{i}")),
                    _ => factors.push(format!("X{i}^{k}")),
                }
            }
            parts.push(factors.join("*"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
    }
    parts.push(&s[start..]);
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Parse(format!("empty term in {s:?}")));
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let text = r#"{"n":2,"m":2,"terms":[{"exps":[2,0,0],"coeff":"1"},{"exps":[0,2,0],"coeff":"T"},{"exps":[0,0,2],"coeff":"1"}]}"#;
        let f = MultiForm::parse_json(&spec, text).unwrap();
        assert_eq!(f.deg_t(), 1);
        assert!(f.is_diagonal());
        let back = MultiForm::from_json(&spec, &f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn inhomogeneous_term_rejected() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let text = r#"{"n":1,"m":2,"terms":[{"exps":[1,0],"coeff":"1"}]}"#;
        assert!(MultiForm::parse_json(&spec, text).is_err());
    }

    #[test]
    fn mpoly_derivative_and_eval() {
        let f3 = Gf::prime(3).unwrap();
        // X0^2 + 2 X0 X1
        let f = MPoly::from_terms(&f3, 2, [(vec![2, 0], 1), (vec![1, 1], 2)]);
        let d0 = f.derivative(&f3, 0);
        // 2 X0 + 2 X1
        assert_eq!(d0.eval(&f3, &[1, 1]), 1);
        assert_eq!(f.eval(&f3, &[2, 1]), (4 + 4) % 3);
    }

    #[test]
    fn text_round_trip() {
        let spec = FieldSpec::new(3, 1).unwrap();
        let f = MultiForm::parse_text(&spec, 2, "T*X0^2 + X1^2 + (2+T^2)*X1*X2").unwrap();
        assert_eq!(f.m(), 2);
        assert_eq!(f.coeff(&[0, 1, 1]), spec.parse_poly("2+T^2").unwrap());
        let back = MultiForm::parse_text(&spec, 2, &f.to_string()).unwrap();
        assert_eq!(back, f);
        assert!(MultiForm::parse_text(&spec, 2, "X0^2 + X1").is_err());
        assert!(MultiForm::parse_text(&spec, 1, "X2^2").is_err());
    }
}
