use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::schedule::{BallParams, Schedule};
use super::{build_u_t, local_support_radius};
use crate::algebra::{EvalContext, Expression, PreparedPoint, Wirtinger};
use crate::error::{Error, Result};
use crate::profiles::{EtaProfile, PhiProfile};

/// Plain-data description of a composite construction; serialized into every
/// output header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n: usize,
    pub phi: PhiProfile,
    pub eta: EtaProfile,
    /// 0 for the `x1 x2` blocks, `k >= 1` for the `z^(k+2)` blocks.
    pub order: u32,
    pub schedule: Schedule,
    /// Number of balls covered by tables and by schedule validation.
    pub k_table: usize,
    /// Largest ball index accepted for points given in global coordinates.
    pub k_global_max: usize,
}

impl ConstructionParams {
    pub fn new(n: usize, phi: PhiProfile, order: u32) -> Self {
        ConstructionParams {
            n,
            phi,
            eta: EtaProfile::default(),
            order,
            schedule: Schedule::default(),
            k_table: 40,
            k_global_max: 30,
        }
    }
}

/// A point addressed by ball index and local offset,
/// `x = R_k zeta0 + r_k y` with `zeta0 = (1/sqrt 2, .., 1/sqrt 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPoint {
    pub k: usize,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Real(Vec<u32>),
    Laplacian,
    Wirtinger(u32, u32),
}

/// Derivative of `u_t`: real-mode parts for `x` derivatives, or a single
/// complex-mode expression.
#[derive(Debug)]
enum Cached {
    Parts(Expression, Option<Expression>),
    Complex(Expression),
}

/// The composite `u = sum_k eps_k r_k^(order+2) u_{t_k}((x - R_k zeta0) / r_k)`.
#[derive(Debug)]
pub struct Construction {
    params: ConstructionParams,
    base: Expression,
    real_parts: Option<(Expression, Expression)>,
    cache: RwLock<HashMap<Key, Arc<Cached>>>,
}

impl Construction {
    pub fn new(params: ConstructionParams) -> Result<Self> {
        if params.n < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {}", params.n)));
        }
        params.schedule.validate(&params.phi, params.k_table.max(params.k_global_max + 1))?;
        let base = build_u_t(params.n, params.order)?;
        let real_parts = if params.order > 0 { Some(base.to_real_parts()?) } else { None };
        Ok(Construction { params, base, real_parts, cache: RwLock::new(HashMap::new()) })
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn order(&self) -> u32 {
        self.params.order
    }

    /// The single block `u_t` in local coordinates.
    pub fn block(&self) -> &Expression {
        &self.base
    }

    pub fn ball(&self, k: usize) -> Result<BallParams> {
        self.params.schedule.ball(&self.params.phi, k)
    }

    pub fn context(&self, k: usize) -> EvalContext {
        EvalContext::new(self.params.phi, self.params.eta, self.params.schedule.t(k), self.params.n)
    }

    /// `|zeta0| = sqrt(n / 2)`.
    fn zeta_norm(&self) -> f64 {
        (self.params.n as f64 / 2.0).sqrt()
    }

    pub fn center_point(&self, k: usize) -> Vec<f64> {
        vec![self.params.schedule.center(k) / std::f64::consts::SQRT_2; self.params.n]
    }

    pub fn to_global(&self, p: &LocalPoint) -> Vec<f64> {
        let r = self.params.schedule.radius(p.k);
        self.center_point(p.k).iter().zip(&p.y).map(|(c, y)| c + r * y).collect()
    }

    /// Ball `k` whose support `|x - R_k zeta0| <= (2/3) r_k` contains `x`.
    pub fn locate_ball(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.params.n || x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return None;
        }
        let m = x.iter().cloned().fold(0.0, f64::max);
        let norm = m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt();
        let s = &self.params.schedule;
        let est = ((norm / (s.center_scale * self.zeta_norm())).ln() / s.ratio.ln()).round();
        if !(est > -2.0 && est < 1e6) {
            return None;
        }
        let est = est as i64;
        (est - 1..=est + 1).filter(|&k| k >= 1).map(|k| k as usize).find(|&k| {
            let r = s.radius(k);
            let c = s.center(k) / std::f64::consts::SQRT_2;
            let d2: f64 = x.iter().map(|v| ((v - c) / r).powi(2)).sum();
            d2 <= local_support_radius().powi(2)
        })
    }

    pub fn to_local(&self, x: &[f64]) -> Result<Option<LocalPoint>> {
        let Some(k) = self.locate_ball(x) else { return Ok(None) };
        if k > self.params.k_global_max {
            return Err(Error::Precision(format!(
                "point lies in ball {k} > {}: global coordinates cancel catastrophically, pass a LocalPoint",
                self.params.k_global_max
            )));
        }
        let r = self.params.schedule.radius(k);
        let c = self.params.schedule.center(k) / std::f64::consts::SQRT_2;
        Ok(Some(LocalPoint { k, y: x.iter().map(|v| (v - c) / r).collect() }))
    }

    /// `x^(k)` in local form: `y = (e^{-1/(4 t_k)}, 0, .., 0)`, so that
    /// `-ln|y|^2 = 1 / (2 t_k)`.
    pub fn sample_point(&self, k: usize) -> LocalPoint {
        let mut y = vec![0.0; self.params.n];
        y[0] = (-0.25 / self.params.schedule.t(k)).exp();
        LocalPoint { k, y }
    }

    fn cached(&self, key: Key) -> Result<Arc<Cached>> {
        if let Some(c) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(c.clone());
        }
        let value = Arc::new(match &key {
            Key::Real(d) => match &self.real_parts {
                None => Cached::Parts(self.base.derivative(d)?, None),
                Some((re, im)) => Cached::Parts(re.derivative(d)?, Some(im.derivative(d)?)),
            },
            Key::Laplacian => match &self.real_parts {
                None => Cached::Parts(self.base.laplacian(), None),
                Some(_) => Cached::Complex(self.base.laplacian()),
            },
            Key::Wirtinger(p, q) => {
                let mut e = self.base.clone();
                for _ in 0..*p {
                    e = e.wirtinger_differentiate(Wirtinger::Z)?;
                }
                for _ in 0..*q {
                    e = e.wirtinger_differentiate(Wirtinger::ZBar)?;
                }
                Cached::Complex(e)
            }
        });
        Ok(self.cache.write().expect("cache lock").entry(key).or_insert(value).clone())
    }

    /// The symbolic `d^deriv u_t` as real-mode `(re, im)`; `im` is `None` for
    /// order 0.
    pub fn block_derivative(&self, deriv: &[u32]) -> Result<(Expression, Option<Expression>)> {
        match &*self.cached(Key::Real(deriv.to_vec()))? {
            Cached::Parts(re, im) => Ok((re.clone(), im.clone())),
            Cached::Complex(_) => unreachable!("real key maps to parts"),
        }
    }

    fn check_deriv(&self, deriv: &[u32]) -> Result<u32> {
        if deriv.len() != self.params.n {
            return Err(Error::Domain(format!(
                "multi-index has {} entries, n = {}",
                deriv.len(),
                self.params.n
            )));
        }
        Ok(deriv.iter().sum())
    }

    fn eval_cached(&self, cached: &Cached, p: &LocalPoint, scale_order: i32) -> Result<Complex64> {
        let ball = self.ball(p.k)?;
        let ctx = self.context(p.k);
        let y_norm = p.y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if y_norm >= local_support_radius() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let factor = ball.eps * ball.radius.powi(self.params.order as i32 + 2 - scale_order);
        let value = if y_norm == 0.0 {
            let origin = |e: &Expression| e.evaluate_at_origin(&ctx);
            match cached {
                Cached::Parts(re, im) => {
                    Complex64::new(origin(re)?, im.as_ref().map(origin).transpose()?.unwrap_or(0.0))
                }
                Cached::Complex(e) => Complex64::new(origin(e)?, 0.0),
            }
        } else {
            let pt = PreparedPoint::new(&p.y)?;
            match cached {
                Cached::Parts(re, im) => Complex64::new(
                    re.evaluate_real_at(&ctx, &pt)?,
                    im.as_ref().map(|e| e.evaluate_real_at(&ctx, &pt)).transpose()?.unwrap_or(0.0),
                ),
                Cached::Complex(e) => e.evaluate_at(&ctx, &pt)?,
            }
        };
        Ok(value * factor)
    }

    /// `d^deriv u` at a local point; complex-valued (imaginary part 0 for
    /// order 0).
    pub fn eval_local(&self, p: &LocalPoint, deriv: &[u32]) -> Result<Complex64> {
        let d = self.check_deriv(deriv)?;
        let cached = self.cached(Key::Real(deriv.to_vec()))?;
        self.eval_cached(&cached, p, d as i32)
    }

    /// `d^deriv u` at a global point: exact 0 outside every ball and at the
    /// origin (up to order `order + 2`).
    pub fn eval_global(&self, x: &[f64], deriv: &[u32]) -> Result<Complex64> {
        let d = self.check_deriv(deriv)?;
        if x.len() != self.params.n {
            return Err(Error::Domain(format!("point has {} coordinates, n = {}", x.len(), self.params.n)));
        }
        if x.iter().all(|&v| v == 0.0) {
            if d > self.params.order + 2 {
                return Err(Error::Indeterminate(format!(
                    "order-{d} derivative at the origin exceeds the guaranteed order {}",
                    self.params.order + 2
                )));
            }
            return Ok(Complex64::new(0.0, 0.0));
        }
        match self.to_local(x)? {
            Some(p) => self.eval_local(&p, deriv),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// Real-valued `d^deriv u`; order 0 only.
    pub fn eval_real(&self, x: &[f64], deriv: &[u32]) -> Result<f64> {
        self.require_real()?;
        Ok(self.eval_global(x, deriv)?.re)
    }

    pub fn eval_real_local(&self, p: &LocalPoint, deriv: &[u32]) -> Result<f64> {
        self.require_real()?;
        Ok(self.eval_local(p, deriv)?.re)
    }

    fn require_real(&self) -> Result<()> {
        if self.params.order > 0 {
            return Err(Error::Mode(format!(
                "order {} composite is complex-valued; use eval_global or its real/imaginary parts",
                self.params.order
            )));
        }
        Ok(())
    }

    pub fn laplacian_local(&self, p: &LocalPoint) -> Result<Complex64> {
        let cached = self.cached(Key::Laplacian)?;
        self.eval_cached(&cached, p, 2)
    }

    pub fn laplacian_global(&self, x: &[f64]) -> Result<Complex64> {
        if x.iter().all(|&v| v == 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match self.to_local(x)? {
            Some(p) => self.laplacian_local(&p),
            None => Ok(Complex64::new(0.0, 0.0)),
        }
    }

    /// `d^p/dz^p d^q/dzbar^q u` at a local point.
    pub fn eval_wirtinger_local(&self, p: &LocalPoint, dz: u32, dzbar: u32) -> Result<Complex64> {
        if self.params.order == 0 {
            return Err(Error::Mode("Wirtinger derivatives need a complex-mode (order >= 1) construction".into()));
        }
        let cached = self.cached(Key::Wirtinger(dz, dzbar))?;
        self.eval_cached(&cached, p, (dz + dzbar) as i32)
    }

    /// Every ball index whose support can meet the closed box
    /// `[lo, hi]^n`, for callers that sweep regions.
    pub fn balls_meeting(&self, lo: f64, hi: f64) -> Vec<usize> {
        let s = &self.params.schedule;
        (1..=self.params.k_table)
            .filter(|&k| {
                let c = s.center(k) / std::f64::consts::SQRT_2;
                let r = local_support_radius() * s.radius(k);
                c + r >= lo && c - r <= hi
            })
            .collect()
    }
}
