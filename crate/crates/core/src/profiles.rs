//! Scalar profiles: the slowly diverging `phi` and the cutoff bump `eta`.
//!
//! Every function in the crate is assembled from products of these two
//! profiles with monomials and radial powers, so both must supply exact
//! derivatives of every order the constructions differentiate to.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::report::ReportTable;

const DEFAULT_MAX_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum PhiKind {
    /// `s^alpha`, admissible for `0 < alpha < 1`.
    Power { alpha: f64 },
    /// `ln s`.
    Log,
    /// `ln ln ... ln (s + shift)` with `depth` logarithms.
    IterLog { depth: u32, shift: f64 },
}

/// An admissible profile `phi`: unbounded, with every derivative up to
/// `max_order` decaying to zero at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    pub kind: PhiKind,
    pub max_order: usize,
}

impl PhiProfile {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("power profile needs 0 < alpha < 1, got {alpha}")));
        }
        Ok(Self::unchecked(PhiKind::Power { alpha }))
    }

    pub fn log() -> Self {
        Self::unchecked(PhiKind::Log)
    }

    /// Iterated logarithm with the default shift, which places `s_min` at 0.
    pub fn iter_log(depth: u32) -> Result<Self> {
        Self::iter_log_shifted(depth, log_tower(depth.saturating_sub(2)))
    }

    pub fn iter_log_shifted(depth: u32, shift: f64) -> Result<Self> {
        if depth < 2 {
            return Err(Error::Domain(format!("iterated log needs depth >= 2, got {depth}")));
        }
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::Domain(format!("iterated log shift must be >= 0, got {shift}")));
        }
        Ok(Self::unchecked(PhiKind::IterLog { depth, shift }))
    }

    /// Builds a profile without admissibility checks. Only meant for
    /// exercising the admissibility report on deliberately bad inputs.
    pub fn unchecked(kind: PhiKind) -> Self {
        PhiProfile { kind, max_order: DEFAULT_MAX_ORDER }
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    /// Lower end of the open domain `(s_min, inf)`.
    pub fn s_min(&self) -> f64 {
        match self.kind {
            PhiKind::Power { .. } | PhiKind::Log => 0.0,
            PhiKind::IterLog { depth, shift } => log_tower(depth - 2) - shift,
        }
    }

    fn check(&self, m: usize, s: f64) -> Result<()> {
        if m > self.max_order {
            return Err(Error::Order { requested: m, max: self.max_order });
        }
        if !(s > self.s_min()) || !s.is_finite() {
            return Err(Error::Domain(format!(
                "phi evaluated at s = {s}, outside ({}, inf)",
                self.s_min()
            )));
        }
        Ok(())
    }

    /// `phi^(m)(s)`.
    pub fn eval(&self, m: usize, s: f64) -> Result<f64> {
        self.check(m, s)?;
        Ok(match self.kind {
            PhiKind::Power { alpha } => {
                let falling: f64 = (0..m).map(|i| alpha - i as f64).product();
                falling * s.powf(alpha - m as f64)
            }
            PhiKind::Log => {
                if m == 0 {
                    s.ln()
                } else {
                    let fact: f64 = (1..m).map(|i| i as f64).product();
                    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                    sign * fact / s.powi(m as i32)
                }
            }
            PhiKind::IterLog { .. } => self.iter_log_jet(s, m).derivative(m),
        })
    }

    /// `[phi(s), phi'(s), ..., phi^(upto)(s)]`.
    pub fn eval_all(&self, upto: usize, s: f64) -> Result<Vec<f64>> {
        self.check(upto, s)?;
        match self.kind {
            PhiKind::IterLog { .. } => Ok(self.iter_log_jet(s, upto).derivatives()),
            _ => (0..=upto).map(|m| self.eval(m, s)).collect(),
        }
    }

    fn iter_log_jet(&self, s: f64, order: usize) -> Jet {
        let PhiKind::IterLog { depth, shift } = self.kind else {
            unreachable!("iter_log_jet on a non-iterated profile")
        };
        let mut j = Jet::variable(s + shift, order);
        for _ in 0..depth {
            j = j.ln();
        }
        j
    }

    /// Canonical CLI spelling, e.g. `power:0.9`, `log`, `iterlog:2:1`.
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PhiProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PhiKind::Power { alpha } => write!(f, "power:{alpha}"),
            PhiKind::Log => write!(f, "log"),
            PhiKind::IterLog { depth, shift } => write!(f, "iterlog:{depth}:{shift}"),
        }
    }
}

impl FromStr for PhiProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str, what: &str| -> Result<f64> {
            p.parse::<f64>().map_err(|_| Error::Parse(format!("bad {what} `{p}` in phi spec `{s}`")))
        };
        match parts.as_slice() {
            ["power", a] => PhiProfile::power(num(a, "exponent")?),
            ["log"] => Ok(PhiProfile::log()),
            ["iterlog", d] => PhiProfile::iter_log(parse_depth(d, s)?),
            ["iterlog", d, sh] => PhiProfile::iter_log_shifted(parse_depth(d, s)?, num(sh, "shift")?),
            _ => Err(Error::Parse(format!(
                "unknown phi spec `{s}` (expected power:A | log | iterlog:D[:SHIFT])"
            ))),
        }
    }
}

fn parse_depth(d: &str, spec: &str) -> Result<u32> {
    d.parse::<u32>().map_err(|_| Error::Parse(format!("bad depth `{d}` in phi spec `{spec}`")))
}

/// `1, e, e^e, ...`: the value an argument must exceed for `j` nested logs
/// to stay positive after one more log.
fn log_tower(j: u32) -> f64 {
    (0..j).fold(1.0, |acc, _| f64::exp(acc))
}

/// Half-width of the band next to each plateau edge (in ramp units) where the
/// bump is pinned to its exact plateau value.
const PLATEAU_CLAMP: f64 = 1e-3;

/// The cutoff `eta`: exactly 1 on `[0, 1/2]`, exactly 0 on `[2/3, inf)`, and
/// the exp-based smoothstep `g(tau) = sigma(1-tau) / (sigma(tau) + sigma(1-tau))`
/// with `tau = 6 (s - 1/2)` in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaProfile {
    pub max_order: usize,
}

impl Default for EtaProfile {
    fn default() -> Self {
        EtaProfile { max_order: DEFAULT_MAX_ORDER }
    }
}

impl EtaProfile {
    pub fn new(max_order: usize) -> Self {
        EtaProfile { max_order }
    }

    pub fn eval(&self, a: usize, s: f64) -> Result<f64> {
        if a > self.max_order {
            return Err(Error::Order { requested: a, max: self.max_order });
        }
        Ok(self.eval_all_unchecked(a, s)[a])
    }

    /// `[eta(s), eta'(s), ..., eta^(upto)(s)]`.
    pub fn eval_all(&self, upto: usize, s: f64) -> Result<Vec<f64>> {
        if upto > self.max_order {
            return Err(Error::Order { requested: upto, max: self.max_order });
        }
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("eta evaluated at negative radius {s}")));
        }
        Ok(self.eval_all_unchecked(upto, s))
    }

    fn eval_all_unchecked(&self, upto: usize, s: f64) -> Vec<f64> {
        let tau = 6.0 * (s - 0.5);
        let mut out = vec![0.0; upto + 1];
        if tau <= PLATEAU_CLAMP {
            out[0] = 1.0;
            return out;
        }
        if tau >= 1.0 - PLATEAU_CLAMP {
            return out;
        }
        let g = ramp_jet(tau, upto).derivatives();
        let mut scale = 1.0;
        for (a, o) in out.iter_mut().enumerate() {
            *o = g[a] * scale;
            scale *= 6.0;
        }
        out
    }
}

/// Jet of `g(tau) = 1 / (1 + exp(q))` with `q = 1/(1-tau) - 1/tau`, which is
/// the smoothstep rewritten in log domain so neither `sigma` underflows.
fn ramp_jet(tau: f64, order: usize) -> Jet {
    let x = Jet::variable(tau, order);
    let one_minus = (-&x).add_scalar(1.0);
    let q = &one_minus.recip() - &x.recip();
    if q.value() <= 0.0 {
        q.exp().add_scalar(1.0).recip()
    } else {
        // 1/(1+e^q) = e^{-q} / (1 + e^{-q})
        let e = (-&q).exp();
        &e * &e.add_scalar(1.0).recip()
    }
}

/// Tabulates `phi` and its derivatives on `s_grid` and flags violations of the
/// admissibility conditions: `phi` must increase across the grid and every
/// `|phi^(m)|`, `m >= 1`, must decrease across the top two decades.
pub fn phi_admissibility_report(profile: &PhiProfile, s_grid: &[f64]) -> Result<ReportTable> {
    let max_m = profile.max_order;
    let mut columns = vec!["s".to_string(), "phi".to_string()];
    columns.extend((1..=max_m).map(|m| format!("phi_d{m}")));
    let col_refs: Vec<&str> = columns.iter().map(|c| c.as_str()).collect();
    let mut table = ReportTable::new("phi_admissibility", &col_refs)
        .with_meta("phi", profile.spec())
        .with_meta("max_order", max_m);

    let mut values = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let d = profile.eval_all(max_m, s)?;
        let mut row = vec![s];
        row.extend_from_slice(&d);
        table.push_row(row);
        values.push(d);
    }

    let increasing = values.windows(2).all(|w| w[1][0] > w[0][0]);
    table.check("phi_increasing", increasing, "phi(s) strictly increases over the grid");

    let s_top = s_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<&Vec<f64>> = s_grid
        .iter()
        .zip(&values)
        .filter(|(&s, _)| s >= s_top / 100.0 * (1.0 - 1e-12))
        .map(|(_, v)| v)
        .collect();
    for m in 1..=max_m {
        let ok = top.windows(2).all(|w| w[1][m].abs() < w[0][m].abs());
        table.check(
            format!("phi_d{m}_decreasing"),
            ok,
            format!("|phi^({m})| strictly decreases over the top two decades"),
        );
    }
    Ok(table)
}

/// `per_decade` geometrically spaced points covering `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round().max(1.0) as usize;
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}
