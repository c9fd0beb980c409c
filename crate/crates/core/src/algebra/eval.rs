use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expr::{Expression, Mode};
use crate::error::{Error, Result};
use crate::profiles::{EtaProfile, PhiProfile};

/// Everything an [`Expression`] needs besides the point: the two profiles and
/// the value of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalContext {
    pub phi: PhiProfile,
    pub eta: EtaProfile,
    pub t: f64,
    pub n: usize,
}

impl EvalContext {
    pub fn new(phi: PhiProfile, eta: EtaProfile, t: f64, n: usize) -> Self {
        EvalContext { phi, eta, t, n }
    }
}

/// A nonzero point in polar form: `ln |x|` and the unit vector `x / |x|`.
///
/// Keeping the logarithm rather than `|x|` lets points as small as
/// `e^{-2500}` be evaluated without underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedPoint {
    ln_r: f64,
    unit: Vec<f64>,
}

impl PreparedPoint {
    pub fn new(x: &[f64]) -> Result<Self> {
        let m = x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if m == 0.0 {
            return Err(Error::Domain("expression evaluated at the origin; use evaluate_at_origin".into()));
        }
        if !m.is_finite() {
            return Err(Error::Domain(format!("non-finite point {x:?}")));
        }
        let s: f64 = x.iter().map(|v| (v / m) * (v / m)).sum();
        let norm = s.sqrt();
        Ok(PreparedPoint { ln_r: m.ln() + 0.5 * s.ln(), unit: x.iter().map(|v| v / m / norm).collect() })
    }

    /// The point `exp(ln_r) * dir / |dir|`.
    pub fn from_polar(ln_r: f64, dir: &[f64]) -> Result<Self> {
        let d = PreparedPoint::new(dir)?;
        Ok(PreparedPoint { ln_r, unit: d.unit })
    }

    pub fn ln_r(&self) -> f64 {
        self.ln_r
    }

    pub fn r(&self) -> f64 {
        self.ln_r.exp()
    }

    pub fn unit(&self) -> &[f64] {
        &self.unit
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }
}

impl Expression {
    /// Value of a real-mode expression at `x != 0`.
    pub fn evaluate(&self, ctx: &EvalContext, x: &[f64]) -> Result<f64> {
        self.evaluate_real_at(ctx, &PreparedPoint::new(x)?)
    }

    /// Value at `x != 0`; for real-mode expressions the imaginary part is 0.
    pub fn evaluate_complex(&self, ctx: &EvalContext, x: &[f64]) -> Result<Complex64> {
        self.evaluate_at(ctx, &PreparedPoint::new(x)?)
    }

    pub fn evaluate_real_at(&self, ctx: &EvalContext, p: &PreparedPoint) -> Result<f64> {
        if self.mode() != Mode::Real {
            return Err(Error::Mode("real evaluation of a complex-mode expression".into()));
        }
        Ok(self.evaluate_at(ctx, p)?.re)
    }

    pub fn evaluate_at(&self, ctx: &EvalContext, p: &PreparedPoint) -> Result<Complex64> {
        if p.dim() != self.n() {
            return Err(Error::Domain(format!("point has {} coordinates, expression n = {}", p.dim(), self.n())));
        }
        let eta_vals = match self.max_eta_order() {
            Some(a) => ctx.eta.eval_all(a as usize, p.r())?,
            None => Vec::new(),
        };
        let mut phi_vals: Option<Vec<f64>> = None;
        let u = p.unit();
        let w = Complex64::new(u[0], u[1]);
        let mut sum = Complex64::new(0.0, 0.0);
        for term in self.terms() {
            let angular = match self.mode() {
                Mode::Real => Complex64::new(real_monomial(&term.mono, u), 0.0),
                Mode::Complex => {
                    let (pz, qz) = (term.mono[0], term.mono[1]);
                    let zpart = if pz + qz > 0 && u[0] == 0.0 && u[1] == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        w.powu(pz) * w.conj().powu(qz)
                    };
                    zpart * real_monomial(&term.mono[2..], &u[2..])
                }
            };
            if angular == Complex64::new(0.0, 0.0) {
                continue;
            }
            let eta = match term.eta {
                Some(a) => eta_vals[a as usize],
                None => 1.0,
            };
            if eta == 0.0 {
                continue;
            }
            let phi = match term.phi {
                Some(m) => {
                    if phi_vals.is_none() {
                        let upto = self.max_phi_order().unwrap_or(0) as usize;
                        phi_vals = Some(ctx.phi.eval_all(upto, -2.0 * p.ln_r())?);
                    }
                    phi_vals.as_ref().unwrap()[m as usize]
                }
                None => 1.0,
            };
            let magnitude = term.coeff.eval(ctx.t) * eta * (term.net_degree(ctx.t) * p.ln_r()).exp() * phi;
            sum += angular * magnitude;
        }
        Ok(sum)
    }

    /// Limit at the origin: 0 when every term that does not vanish near the
    /// origin has positive net degree, an error otherwise. Terms carrying a
    /// derivative of the cutoff vanish identically on `|x| < 1/2`.
    pub fn evaluate_at_origin(&self, ctx: &EvalContext) -> Result<f64> {
        for term in self.terms() {
            if matches!(term.eta, Some(a) if a >= 1) {
                continue;
            }
            let deg = term.net_degree(ctx.t);
            if deg <= 0.0 {
                return Err(Error::Indeterminate(format!(
                    "term with net degree {deg} has no limit guarantee at the origin"
                )));
            }
        }
        Ok(0.0)
    }
}

fn real_monomial(mono: &[u32], u: &[f64]) -> f64 {
    mono.iter().zip(u).fold(1.0, |acc, (&e, &ui)| if e == 0 { acc } else { acc * ui.powi(e as i32) })
}
