use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Central-difference scheme with Richardson extrapolation.
///
/// The base step is `max(rel_step * scale, min_step)`, where `scale` is the
/// distance from the evaluation point to the nearest singularity of the
/// function (the origin for `v` and `u_t`, the ball centre for the
/// composite). `max_reach` caps the Euclidean reach of the stencil, so it
/// never crosses a ball boundary.
///
/// `candidates` base steps are tried, each `sqrt(10)` times the previous,
/// and the estimate with the smallest Richardson error is kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FDScheme {
    pub rel_step: f64,
    pub min_step: f64,
    pub levels: usize,
    pub candidates: usize,
    pub max_order: u32,
}

impl Default for FDScheme {
    fn default() -> Self {
        FDScheme { rel_step: 3e-4, min_step: 1e-9, levels: 3, candidates: 4, max_order: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    pub value: f64,
    /// Difference between the two finest extrapolated levels.
    pub error: f64,
    pub step: f64,
}

impl FDScheme {
    pub fn step(&self, scale: f64) -> f64 {
        (self.rel_step * scale).max(self.min_step)
    }
}

/// Euclidean distance from the stencil centre to its farthest node, per unit
/// step.
fn reach(deriv: &[u32]) -> f64 {
    deriv.iter().map(|&d| (d as f64 / 2.0).powi(2)).sum::<f64>().sqrt()
}

/// Single-step tensor-product central difference: the order-`m` stencil on
/// each axis samples offsets `(m/2 - j) h` with weights `(-1)^j C(m, j)`.
fn central<F>(f: &F, p: &[f64], deriv: &[u32], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let axes: Vec<(usize, u32)> = deriv.iter().enumerate().filter(|(_, &d)| d > 0).map(|(i, &d)| (i, d)).collect();
    let total: u32 = deriv.iter().sum();
    let mut counters = vec![0u32; axes.len()];
    let mut x = p.to_vec();
    let mut sum = 0.0;
    loop {
        let mut w = 1.0;
        for (&(axis, m), &j) in axes.iter().zip(&counters) {
            x[axis] = p[axis] + (m as f64 / 2.0 - j as f64) * h;
            w *= binom(m, j) * if j % 2 == 1 { -1.0 } else { 1.0 };
        }
        let v = f(&x).map_err(|e| match e {
            Error::Domain(msg) | Error::Precision(msg) => Error::Stencil(format!("stencil node {x:?}: {msg}")),
            other => other,
        })?;
        if !v.is_finite() {
            return Err(Error::Stencil(format!("non-finite value at stencil node {x:?}")));
        }
        sum += w * v;
        let mut i = 0;
        loop {
            if i == axes.len() {
                return Ok(sum / h.powi(total as i32));
            }
            counters[i] += 1;
            if counters[i] <= axes[i].1 {
                break;
            }
            counters[i] = 0;
            i += 1;
        }
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `d^deriv f(p)` by Richardson-extrapolated central differences.
///
/// `scale` sets the base step (see [`FDScheme`]); `max_reach`, when given,
/// bounds the distance of every stencil node from `p`.
pub fn fd_derivative<F>(f: F, p: &[f64], deriv: &[u32], scheme: &FDScheme, scale: f64, max_reach: Option<f64>) -> Result<FdEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if deriv.len() != p.len() {
        return Err(Error::Domain(format!("multi-index has {} entries for a {}-d point", deriv.len(), p.len())));
    }
    let order: u32 = deriv.iter().sum();
    if order > scheme.max_order {
        return Err(Error::Order { requested: order as usize, max: scheme.max_order as usize });
    }
    if order == 0 {
        return Ok(FdEstimate { value: f(p)?, error: 0.0, step: 0.0 });
    }
    let limit = max_reach.map_or(f64::INFINITY, |l| l / reach(deriv));
    let levels = scheme.levels.max(1);
    let mut chosen: Option<FdEstimate> = None;
    let mut last = f64::NAN;
    for j in 0..scheme.candidates.max(1) {
        let h = (scheme.step(scale) * 10f64.powf(j as f64 / 2.0)).min(limit);
        if !(h > 0.0) {
            return Err(Error::Stencil(format!("no admissible step at {p:?}")));
        }
        if h == last {
            break;
        }
        last = h;
        let est = richardson(&f, p, deriv, h, levels)?;
        if chosen.is_none_or(|c| est.error < c.error) {
            chosen = Some(est);
        }
    }
    Ok(chosen.expect("at least one candidate step"))
}

fn richardson<F>(f: &F, p: &[f64], deriv: &[u32], h: f64, levels: usize) -> Result<FdEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let mut row = vec![central(f, p, deriv, h / 2f64.powi(i as i32))?];
        for j in 1..=i {
            let factor = 4f64.powi(j as i32);
            let prev = table[i - 1][j - 1];
            row.push(row[j - 1] + (row[j - 1] - prev) / (factor - 1.0));
        }
        table.push(row);
    }
    let best = table[levels - 1][levels - 1];
    let error = if levels > 1 { (best - table[levels - 2][levels - 2]).abs() } else { 0.0 };
    Ok(FdEstimate { value: best, error, step: h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_mixed_derivative() {
        let f = |x: &[f64]| Ok(x[0] * x[0] * x[1]);
        let e = fd_derivative(f, &[1.0, 1.0], &[1, 1], &FDScheme::default(), 1.0, None).unwrap();
        assert!((e.value - 2.0).abs() < 1e-5, "{e:?}");
        assert!(e.error < 1e-5);
    }

    #[test]
    fn constant_has_zero_derivatives() {
        let f = |_: &[f64]| Ok(3.5);
        for d in [[1, 0], [0, 2], [1, 1]] {
            let e = fd_derivative(f, &[0.3, -0.2], &d, &FDScheme::default(), 0.36, None).unwrap();
            assert!(e.value.abs() < 1e-12);
        }
    }

    #[test]
    fn third_order_and_reach() {
        let f = |x: &[f64]| Ok((2.0 * x[0]).sin() * x[1].exp());
        let scheme = FDScheme { rel_step: 0.1, ..Default::default() };
        let e = fd_derivative(f, &[0.4, 0.1], &[2, 1], &scheme, 1.0, Some(1e-2)).unwrap();
        let exact = -4.0 * (0.8f64).sin() * 0.1f64.exp();
        assert!((e.value - exact).abs() < 1e-6 * exact.abs(), "{e:?}");
        assert!(e.step * reach(&[2, 1]) <= 1e-2 * (1.0 + 1e-12));
    }

    #[test]
    fn leaving_the_domain_is_a_stencil_error() {
        let f = |x: &[f64]| if x[0] > 0.0 { Ok(x[0].ln()) } else { Err(Error::Domain("x <= 0".into())) };
        let scheme = FDScheme { rel_step: 1.0, min_step: 0.5, ..Default::default() };
        assert!(matches!(fd_derivative(f, &[0.1], &[1], &scheme, 1.0, None), Err(Error::Stencil(_))));
    }
}
