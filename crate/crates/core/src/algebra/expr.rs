use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt::Write as _;

use super::tpoly::TPoly;
use crate::error::{Error, Result};

/// Coordinates an expression is written in.
///
/// In complex mode the first two monomial slots hold the exponents of `z` and
/// `zbar`, the remaining slots those of `x_3 .. x_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Real,
    Complex,
}

/// Differentiation variable in complex mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wirtinger {
    Z,
    ZBar,
    /// Real coordinate `x_{j+1}`, 0-based, `j >= 2`.
    X(usize),
}

/// `coeff(t) * eta^(a)(|x|) * monomial * |x|^(mu + nu t) * phi^(m)(-ln|x|^2)`.
///
/// `eta` and `phi` are `None` when the factor is absent altogether (the bare
/// block `v` carries no cutoff, polynomials carry no profile).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: TPoly,
    pub eta: Option<u32>,
    pub mono: Vec<u32>,
    pub radial: (i32, i32),
    pub phi: Option<u32>,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.mono.iter().sum()
    }

    /// `deg + mu + nu t`, the homogeneity of the term up to the slowly
    /// varying `phi` factor.
    pub fn net_degree(&self, t: f64) -> f64 {
        (self.degree() as i64 + self.radial.0 as i64) as f64 + self.radial.1 as f64 * t
    }

    fn key_cmp(&self, other: &Term) -> Ordering {
        (self.eta, &self.mono, self.radial, self.phi).cmp(&(other.eta, &other.mono, other.radial, other.phi))
    }

    fn same_shape(&self, other: &Term) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }

    fn with(&self, coeff: TPoly) -> Term {
        Term { coeff, ..self.clone() }
    }

    fn bump_mono(mut self, i: usize, by: i32) -> Term {
        self.mono[i] = (self.mono[i] as i32 + by) as u32;
        self
    }

    fn bump_radial(mut self, dmu: i32) -> Term {
        self.radial.0 += dmu;
        self
    }

    fn radial_poly(&self) -> TPoly {
        TPoly::affine(self.radial.0 as f64, self.radial.1 as f64)
    }
}

/// A finite sum of [`Term`]s in canonical form: sorted by shape, like terms
/// merged, zero terms dropped. The empty sum is the zero function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expression {
    mode: Mode,
    n: usize,
    terms: Vec<Term>,
}

impl Expression {
    pub fn from_terms(mode: Mode, n: usize, terms: Vec<Term>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
        }
        if let Some(bad) = terms.iter().find(|t| t.mono.len() != n) {
            return Err(Error::Domain(format!(
                "monomial has {} exponents in dimension {n}",
                bad.mono.len()
            )));
        }
        Ok(Self::canonical(mode, n, terms))
    }

    pub fn zero(mode: Mode, n: usize) -> Self {
        Expression { mode, n, terms: Vec::new() }
    }

    pub fn constant(mode: Mode, n: usize, c: f64) -> Self {
        let term = Term { coeff: TPoly::constant(c), eta: None, mono: vec![0; n], radial: (0, 0), phi: None };
        Self::canonical(mode, n, vec![term])
    }

    fn canonical(mode: Mode, n: usize, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| a.key_cmp(b));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.same_shape(&t) => last.coeff = last.coeff.add(&t.coeff),
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        match absorb_radial(mode, n, &merged) {
            Some(smaller) => Self::canonical(mode, n, smaller),
            None => Expression { mode, n, terms: merged },
        }
    }

    /// Re-sorts and merges; expressions built through this API are always
    /// canonical already, so this is the identity on them.
    pub fn canonicalize(&self) -> Self {
        Self::canonical(self.mode, self.n, self.terms.clone())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_phi_order(&self) -> Option<u32> {
        self.terms.iter().filter_map(|t| t.phi).max()
    }

    pub fn max_eta_order(&self) -> Option<u32> {
        self.terms.iter().filter_map(|t| t.eta).max()
    }

    fn compatible(&self, other: &Expression) -> Result<()> {
        if self.mode != other.mode || self.n != other.n {
            return Err(Error::Mode(format!(
                "cannot combine {:?}/n={} with {:?}/n={}",
                self.mode, self.n, other.mode, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Expression) -> Result<Self> {
        self.compatible(other)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Ok(Self::canonical(self.mode, self.n, terms))
    }

    pub fn sub(&self, other: &Expression) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.scale_poly(&TPoly::constant(c))
    }

    pub fn scale_poly(&self, p: &TPoly) -> Self {
        let terms = self.terms.iter().map(|t| t.with(t.coeff.mul(p))).collect();
        Self::canonical(self.mode, self.n, terms)
    }

    /// Multiplies every term by `x_{axis+1}` (real mode or `axis >= 2`).
    pub fn times_coordinate(&self, axis: usize) -> Self {
        let terms = self.terms.iter().map(|t| t.clone().bump_mono(axis, 1)).collect();
        Self::canonical(self.mode, self.n, terms)
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.n {
            return Err(Error::Domain(format!("axis {axis} out of range for n = {}", self.n)));
        }
        if self.mode == Mode::Complex && axis < 2 {
            return Err(Error::Mode(format!(
                "x{} derivative of a complex-mode expression; use the z/zbar derivatives or to_real_parts",
                axis + 1
            )));
        }
        Ok(())
    }

    /// `d/dx_{axis+1}`, `axis` 0-based.
    pub fn differentiate(&self, axis: usize) -> Result<Self> {
        self.check_axis(axis)?;
        let mut out = Vec::with_capacity(4 * self.terms.len());
        for t in &self.terms {
            if let Some(a) = t.eta {
                out.push(Term { eta: Some(a + 1), ..t.clone() }.bump_mono(axis, 1).bump_radial(-1));
            }
            let e = t.mono[axis];
            if e > 0 {
                out.push(t.with(t.coeff.scale(e as f64)).bump_mono(axis, -1));
            }
            if t.radial != (0, 0) {
                out.push(t.with(t.coeff.mul(&t.radial_poly())).bump_mono(axis, 1).bump_radial(-2));
            }
            if let Some(m) = t.phi {
                out.push(Term { phi: Some(m + 1), ..t.with(t.coeff.scale(-2.0)) }.bump_mono(axis, 1).bump_radial(-2));
            }
        }
        Ok(Self::canonical(self.mode, self.n, out))
    }

    /// Wirtinger derivative `d/dz`, `d/dzbar`, or a real derivative in
    /// `x_3 .. x_n`, all in complex mode.
    pub fn wirtinger_differentiate(&self, var: Wirtinger) -> Result<Self> {
        if self.mode != Mode::Complex {
            return Err(Error::Mode("Wirtinger derivative of a real-mode expression".into()));
        }
        let (own, conj) = match var {
            Wirtinger::Z => (0, 1),
            Wirtinger::ZBar => (1, 0),
            Wirtinger::X(j) => return self.differentiate(j),
        };
        let mut out = Vec::with_capacity(4 * self.terms.len());
        for t in &self.terms {
            if let Some(a) = t.eta {
                let term = Term { eta: Some(a + 1), ..t.with(t.coeff.scale(0.5)) };
                out.push(term.bump_mono(conj, 1).bump_radial(-1));
            }
            let e = t.mono[own];
            if e > 0 {
                out.push(t.with(t.coeff.scale(e as f64)).bump_mono(own, -1));
            }
            if t.radial != (0, 0) {
                let c = t.coeff.mul(&t.radial_poly()).scale(0.5);
                out.push(t.with(c).bump_mono(conj, 1).bump_radial(-2));
            }
            if let Some(m) = t.phi {
                let term = Term { phi: Some(m + 1), ..t.with(t.coeff.scale(-1.0)) };
                out.push(term.bump_mono(conj, 1).bump_radial(-2));
            }
        }
        Ok(Self::canonical(self.mode, self.n, out))
    }

    /// Applies `d^{deriv[j]}/dx_j^{deriv[j]}` for every axis in turn.
    pub fn derivative(&self, deriv: &[u32]) -> Result<Self> {
        if deriv.len() != self.n {
            return Err(Error::Domain(format!(
                "multi-index has {} entries in dimension {}",
                deriv.len(),
                self.n
            )));
        }
        let mut e = self.clone();
        for (axis, &d) in deriv.iter().enumerate() {
            for _ in 0..d {
                e = e.differentiate(axis)?;
            }
        }
        Ok(e)
    }

    pub fn laplacian(&self) -> Self {
        let first = match self.mode {
            Mode::Real => 0,
            Mode::Complex => 2,
        };
        let mut acc = match self.mode {
            Mode::Real => Expression::zero(Mode::Real, self.n),
            Mode::Complex => self
                .wirtinger_differentiate(Wirtinger::Z)
                .and_then(|e| e.wirtinger_differentiate(Wirtinger::ZBar))
                .expect("complex mode")
                .scale(4.0),
        };
        for j in first..self.n {
            let d2 = self.differentiate(j).and_then(|e| e.differentiate(j)).expect("axis in range");
            acc = acc.add(&d2).expect("same mode");
        }
        acc
    }

    /// Splits a complex-mode expression into real-mode expressions for its
    /// real and imaginary parts by expanding `z^p zbar^q` binomially.
    pub fn to_real_parts(&self) -> Result<(Expression, Expression)> {
        if self.mode != Mode::Complex {
            return Err(Error::Mode("to_real_parts on a real-mode expression".into()));
        }
        let mut re = Vec::new();
        let mut im = Vec::new();
        for t in &self.terms {
            let (p, q) = (t.mono[0], t.mono[1]);
            for a in 0..=p {
                for b in 0..=q {
                    // (x1 + i x2)^p (x1 - i x2)^q picks i^a (-i)^b = i^{a+b} (-1)^b
                    let mut c = binomial(p, a) * binomial(q, b);
                    if b % 2 == 1 {
                        c = -c;
                    }
                    let k = (a + b) % 4;
                    if k >= 2 {
                        c = -c;
                    }
                    let mut mono = t.mono.clone();
                    mono[0] = p - a + q - b;
                    mono[1] = a + b;
                    let term = Term { coeff: t.coeff.scale(c), mono, ..t.clone() };
                    if k % 2 == 0 {
                        re.push(term);
                    } else {
                        im.push(term);
                    }
                }
            }
        }
        Ok((Self::canonical(Mode::Real, self.n, re), Self::canonical(Mode::Real, self.n, im)))
    }

    /// Human-readable rendering, e.g. `x1*x2*phi(-ln|x|^2)`.
    pub fn to_display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let (neg, body) = self.term_display(t);
            match (i, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(&body);
        }
        s
    }

    fn term_display(&self, t: &Term) -> (bool, String) {
        let mut factors = Vec::new();
        let c = t.coeff.coeffs();
        let neg = c.len() == 1 && c[0] < 0.0;
        match c {
            [x] if x.abs() == 1.0 => {}
            [x] => factors.push(format!("{}", x.abs())),
            _ => factors.push(format!("({})", t.coeff)),
        }
        if let Some(a) = t.eta {
            factors.push(format!("eta{}(|x|)", primes(a)));
        }
        for (i, &e) in t.mono.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = match (self.mode, i) {
                (Mode::Complex, 0) => "z".to_string(),
                (Mode::Complex, 1) => "zbar".to_string(),
                _ => format!("x{}", i + 1),
            };
            factors.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
        let (mu, nu) = t.radial;
        if (mu, nu) != (0, 0) {
            let exp = match (mu, nu) {
                (m, 0) => format!("{m}"),
                (0, v) => format!("{}t", coef_prefix(v)),
                (m, v) => format!("{}t{}{}", coef_prefix(v), if m < 0 { "-" } else { "+" }, m.abs()),
            };
            let wrapped = if exp.starts_with('-') || exp.contains(['+', 't']) || exp.len() > 1 {
                format!("({exp})")
            } else {
                exp
            };
            factors.push(format!("|x|^{wrapped}"));
        }
        if let Some(m) = t.phi {
            factors.push(format!("phi{}(-ln|x|^2)", primes(m)));
        }
        if factors.is_empty() {
            factors.push("1".into());
        }
        (neg, factors.join("*"))
    }

    /// JSON debug dump: an array of
    /// `{coeff: [c0, ..], eta, mono: [..], radial: [mu, nu], phi}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.terms).expect("terms serialize")
    }
}

/// Finds one family of terms `c * B * x_j^2`, one per `j` (with `z zbar` in
/// place of `x_1^2, x_2^2` in complex mode), all with the same coefficient,
/// and replaces it by `c * B * |x|^2`. Returns `None` when there is none.
fn absorb_radial(mode: Mode, n: usize, terms: &[Term]) -> Option<Vec<Term>> {
    let members = |base: &Term| -> Vec<Term> {
        let mut out = Vec::with_capacity(n);
        let first_real = match mode {
            Mode::Real => 0,
            Mode::Complex => {
                out.push(base.clone().bump_mono(0, 1).bump_mono(1, 1));
                2
            }
        };
        for j in first_real..n {
            out.push(base.clone().bump_mono(j, 2));
        }
        out
    };
    for t in terms {
        let base = match mode {
            Mode::Real if t.mono[0] >= 2 => t.clone().bump_mono(0, -2),
            Mode::Complex if t.mono[0] >= 1 && t.mono[1] >= 1 => t.clone().bump_mono(0, -1).bump_mono(1, -1),
            _ => continue,
        };
        let family = members(&base);
        let idx: Option<Vec<usize>> = family
            .iter()
            .map(|m| terms.binary_search_by(|x| x.key_cmp(m)).ok().filter(|&i| terms[i].coeff == t.coeff))
            .collect();
        if let Some(idx) = idx {
            let mut out: Vec<Term> =
                terms.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, x)| x.clone()).collect();
            out.push(base.bump_radial(2));
            return Some(out);
        }
    }
    None
}

fn primes(order: u32) -> String {
    match order {
        0 => String::new(),
        1..=3 => "'".repeat(order as usize),
        m => format!("^({m})"),
    }
}

fn coef_prefix(v: i32) -> String {
    let mut s = String::new();
    match v {
        1 => {}
        -1 => s.push('-'),
        v => {
            let _ = write!(s, "{v}");
        }
    }
    s
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
