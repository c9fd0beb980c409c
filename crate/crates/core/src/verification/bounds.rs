use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{EvalContext, Expression, PreparedPoint};
use crate::constructions::build_u_t;
use crate::error::Result;
use crate::profiles::{EtaProfile, PhiProfile};
use crate::report::ReportTable;

/// A supremum measured on a grid and on its 2x refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundScan {
    pub value: f64,
    pub refined: f64,
    /// Grid coordinates of the maximizer on the refined grid.
    pub argmax: Vec<f64>,
}

impl BoundScan {
    pub fn rel_change(&self) -> f64 {
        (self.refined - self.value).abs() / self.refined.abs()
    }

    pub fn stable(&self, tol: f64) -> bool {
        self.value.is_finite() && self.refined.is_finite() && self.value > 0.0 && self.rel_change() < tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimates {
    pub b1: BoundScan,
    pub b2: BoundScan,
    pub b3: BoundScan,
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
fn geom(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![hi];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn lin(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![hi];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Max with a deterministic tie-break on the lower index.
fn argmax<T: Clone>(items: impl IntoIterator<Item = (f64, T)>) -> Option<(f64, T)> {
    items.into_iter().fold(None, |best, (v, t)| match best {
        Some((bv, _)) if !(v > bv) => best,
        _ => Some((v, t)),
    })
}

/// Grid for the `beta |x|^beta |phi(-ln|x|^2)|` supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma22Grid {
    pub n_beta: usize,
    /// Points per decade of `s = -ln|x|^2`.
    pub per_decade: usize,
    /// Smallest radius, reached through `ln|x|` directly.
    pub r_min: f64,
}

impl Default for Lemma22Grid {
    fn default() -> Self {
        Lemma22Grid { n_beta: 200, per_decade: 100, r_min: 1e-30 }
    }
}

impl Lemma22Grid {
    pub fn refined(&self) -> Self {
        Lemma22Grid { n_beta: 2 * self.n_beta, per_decade: 2 * self.per_decade, r_min: self.r_min }
    }

    fn s_grid(&self) -> Vec<f64> {
        let lo = -2.0 * (2.0f64 / 3.0).ln();
        let hi = -2.0 * self.r_min.ln();
        let n = ((hi / lo).log10() * self.per_decade as f64).ceil() as usize + 1;
        geom(lo, hi, n)
    }
}

/// `beta |x|^beta |phi(-ln|x|^2)|` with `|x| = e^{-s/2}`.
pub fn lemma_2_2_quantity(phi: &PhiProfile, beta: f64, s: f64) -> Result<f64> {
    Ok(beta * (-0.5 * beta * s).exp() * phi.eval(0, s)?.abs())
}

fn lemma_2_2_sup(phi: &PhiProfile, grid: &Lemma22Grid) -> Result<(f64, Vec<f64>)> {
    let s = grid.s_grid();
    let phis: Vec<f64> = s.iter().map(|&s| phi.eval(0, s).map(f64::abs)).collect::<Result<_>>()?;
    let betas: Vec<f64> = (1..=grid.n_beta).map(|i| i as f64 / grid.n_beta as f64).collect();
    let best = argmax(betas.iter().flat_map(|&b| {
        s.iter().zip(&phis).map(move |(&s, &p)| (b * (-0.5 * b * s).exp() * p, vec![b, -0.5 * s]))
    }))
    .expect("non-empty grid");
    Ok(best)
}

/// Supremum over `0 < beta <= 1`, `|x| <= 2/3` of `beta |x|^beta |phi|`, on
/// `grid` and on its refinement. `argmax` is `[beta, ln|x|]`.
pub fn scan_lemma_2_2(phi: &PhiProfile, grid: &Lemma22Grid) -> Result<BoundScan> {
    let (value, _) = lemma_2_2_sup(phi, grid)?;
    let (refined, argmax) = lemma_2_2_sup(phi, &grid.refined())?;
    Ok(BoundScan { value, refined, argmax })
}

/// Rows `|x_k| = e^{-2^k}`, `beta_k = 2^{-k}`, where `|x_k|^{beta_k} phi`
/// equals `e^{-1} phi(2^{k+1})` and diverges: the supremum needs the factor
/// `beta`.
pub fn lemma_2_2_counterexample(phi: &PhiProfile, k_max: u32) -> Result<ReportTable> {
    let mut table = ReportTable::new(
        "lemma22_counterexample",
        &["k", "ln_abs_x", "beta", "measured", "closed_form"],
    )
    .with_meta("phi", phi.spec());
    for k in 1..=k_max {
        let ln_x = -(2f64.powi(k as i32));
        let beta = 2f64.powi(-(k as i32));
        let measured = (beta * ln_x).exp() * phi.eval(0, -2.0 * ln_x)?;
        let closed = (-1.0f64).exp() * phi.eval(0, 2f64.powi(k as i32 + 1))?;
        table.push_row(vec![k as f64, ln_x, beta, measured, closed]);
    }
    let vals = table.column("measured").unwrap();
    table.check(
        "counterexample_increasing",
        vals.windows(2).all(|w| w[1] > w[0]),
        "e^{-1} phi(2^{k+1}) strictly increases",
    );
    Ok(table)
}

/// Grid for the first- and second-derivative suprema of `u_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Grid {
    pub n_t: usize,
    pub t_min: f64,
    /// Points per decade of `s = -ln|x|^2` inside the plateau.
    pub per_decade: usize,
    /// Uniform points in `|x|` across the cutoff ramp.
    pub n_ramp: usize,
    /// Angles in `[0, pi/2]` within the `x1 x2` plane.
    pub n_theta: usize,
    /// Tilts out of the `x1 x2` plane (used when `n >= 3`).
    pub n_psi: usize,
}

impl Default for Lemma31Grid {
    fn default() -> Self {
        Lemma31Grid { n_t: 13, t_min: 1e-4, per_decade: 24, n_ramp: 33, n_theta: 17, n_psi: 5 }
    }
}

impl Lemma31Grid {
    pub fn refined(&self) -> Self {
        Lemma31Grid {
            n_t: 2 * self.n_t - 1,
            t_min: self.t_min,
            per_decade: 2 * self.per_decade,
            n_ramp: 2 * self.n_ramp - 1,
            n_theta: 2 * self.n_theta - 1,
            n_psi: 2 * self.n_psi - 1,
        }
    }

    pub fn t_grid(&self) -> Vec<f64> {
        geom(self.t_min, 0.5, self.n_t)
    }

    /// `ln|x|` values: the ramp `[0.45, 2/3]` uniformly in `|x|`, then the
    /// plateau down to `|x| = e^{-s_max/2}` uniformly in `ln s`.
    pub fn ln_r_grid(&self) -> Vec<f64> {
        let mut out: Vec<f64> = lin(0.45, 2.0 / 3.0, self.n_ramp).iter().map(|r| r.ln()).collect();
        let s_lo = -2.0 * 0.45f64.ln();
        let s_hi = 40.0 / self.t_min;
        let n = ((s_hi / s_lo).log10() * self.per_decade as f64).ceil() as usize + 1;
        out.extend(geom(s_lo, s_hi, n).iter().skip(1).map(|s| -0.5 * s));
        out
    }

    fn directions(&self, n: usize) -> Vec<Vec<f64>> {
        let thetas = lin(0.0, std::f64::consts::FRAC_PI_2, self.n_theta);
        let psis = if n >= 3 { lin(0.0, std::f64::consts::FRAC_PI_2, self.n_psi) } else { vec![0.0] };
        let mut out = Vec::new();
        for &psi in &psis {
            for &theta in &thetas {
                let mut d = vec![0.0; n];
                d[0] = psi.cos() * theta.cos();
                d[1] = psi.cos() * theta.sin();
                if n >= 3 {
                    d[2] = psi.sin();
                }
                if d.iter().any(|v| *v != 0.0) {
                    out.push(d);
                }
            }
        }
        out
    }
}

/// Derivatives scanned for the bounds: `d/dx_j` and `d^2/dx_j^2` for
/// `j = 1, 2` and, when `n >= 3`, `j = 3` (the block depends on
/// `x_3 .. x_n` only through `|x|`, so `x_3` stands for all of them).
struct Lemma31Exprs {
    grad: Vec<Expression>,
    diag: Vec<Expression>,
    mixed: Expression,
}

fn lemma_3_1_exprs(n: usize) -> Result<Lemma31Exprs> {
    let u = build_u_t(n, 0)?;
    let axes = n.min(3);
    let grad: Vec<Expression> = (0..axes).map(|j| u.differentiate(j)).collect::<Result<_>>()?;
    let diag = (0..axes).map(|j| grad[j].differentiate(j)).collect::<Result<_>>()?;
    let mixed = grad[0].differentiate(1)?;
    Ok(Lemma31Exprs { grad, diag, mixed })
}

/// Per-`t` suprema of `|d u_t/dx_j|`, `|d^2 u_t/dx_j^2|`, `|d^2 u_t/dx1 dx2|`.
struct TRow {
    t: f64,
    grad: (f64, Vec<f64>),
    diag: (f64, Vec<f64>),
    mixed: f64,
}

fn lemma_3_1_rows(n: usize, phi: &PhiProfile, eta: &EtaProfile, grid: &Lemma31Grid) -> Result<Vec<TRow>> {
    let exprs = lemma_3_1_exprs(n)?;
    let ln_rs = grid.ln_r_grid();
    let dirs = grid.directions(n);
    let points: Vec<(f64, usize, PreparedPoint)> = ln_rs
        .iter()
        .flat_map(|&l| dirs.iter().enumerate().map(move |(i, d)| (l, i, d)))
        .map(|(l, i, d)| PreparedPoint::from_polar(l, d).map(|p| (l, i, p)))
        .collect::<Result<_>>()?;
    grid.t_grid()
        .into_par_iter()
        .map(|t| {
            let ctx = EvalContext::new(*phi, *eta, t, n);
            let mut grad = (0.0, vec![t, 0.0, 0.0]);
            let mut diag = (0.0, vec![t, 0.0, 0.0]);
            let mut mixed: f64 = 0.0;
            for (l, i, p) in &points {
                for e in &exprs.grad {
                    let v = e.evaluate_real_at(&ctx, p)?.abs();
                    if v > grad.0 {
                        grad = (v, vec![t, *l, *i as f64]);
                    }
                }
                for e in &exprs.diag {
                    let v = e.evaluate_real_at(&ctx, p)?.abs();
                    if v > diag.0 {
                        diag = (v, vec![t, *l, *i as f64]);
                    }
                }
                mixed = mixed.max(exprs.mixed.evaluate_real_at(&ctx, p)?.abs());
            }
            Ok(TRow { t, grad, diag, mixed })
        })
        .collect()
}

/// Suprema over `t`, `x` and `j` of `|d u_t/dx_j|` (B2) and
/// `|d^2 u_t/dx_j^2|` (B3) on `grid` and its refinement. `argmax` is
/// `[t, ln|x|, direction index]`.
pub fn scan_lemma_3_1(n: usize, phi: &PhiProfile, eta: &EtaProfile, grid: &Lemma31Grid) -> Result<(BoundScan, BoundScan)> {
    let coarse = lemma_3_1_rows(n, phi, eta, grid)?;
    let fine = lemma_3_1_rows(n, phi, eta, &grid.refined())?;
    let pick = |rows: &[TRow], f: fn(&TRow) -> &(f64, Vec<f64>)| {
        argmax(rows.iter().map(|r| f(r).clone())).expect("non-empty t grid")
    };
    let (g0, _) = pick(&coarse, |r| &r.grad);
    let (g1, ga) = pick(&fine, |r| &r.grad);
    let (d0, _) = pick(&coarse, |r| &r.diag);
    let (d1, da) = pick(&fine, |r| &r.diag);
    Ok((BoundScan { value: g0, refined: g1, argmax: ga }, BoundScan { value: d0, refined: d1, argmax: da }))
}

/// Per-`t` table: suprema of the gradient, the diagonal Hessian and the mixed
/// derivative, and the mixed derivative on the curve `|x| = e^{-1/(4t)}`
/// along `x_1`, where it equals `e^{-1/2}[(1+2t) phi(1/(2t)) - 2 phi'(1/(2t))]`.
pub fn lemma_3_1_table(n: usize, phi: &PhiProfile, eta: &EtaProfile, grid: &Lemma31Grid) -> Result<ReportTable> {
    let rows = lemma_3_1_rows(n, phi, eta, grid)?;
    let exprs = lemma_3_1_exprs(n)?;
    let mut table = ReportTable::new(
        "lemma31",
        &["t", "sup_grad", "sup_diag_hessian", "sup_mixed", "mixed_on_curve", "mixed_closed_form"],
    )
    .with_meta("phi", phi.spec())
    .with_meta("n", n)
    .with_meta("grid", grid);
    let mut dir = vec![0.0; n];
    dir[0] = 1.0;
    for r in &rows {
        let ctx = EvalContext::new(*phi, *eta, r.t, n);
        let s = 0.5 / r.t;
        let p = PreparedPoint::from_polar(-0.25 / r.t, &dir)?;
        let on_curve = exprs.mixed.evaluate_real_at(&ctx, &p)?;
        let closed = (-0.5f64).exp() * ((1.0 + 2.0 * r.t) * phi.eval(0, s)? - 2.0 * phi.eval(1, s)?);
        table.push_row(vec![r.t, r.grad.0, r.diag.0, r.mixed, on_curve, closed]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_profile_sup_matches_calculus() {
        // beta e^{-beta s/2} ln s peaks at beta = 2/e, s = e: value 2/e^2.
        let scan = scan_lemma_2_2(&PhiProfile::log(), &Lemma22Grid::default()).unwrap();
        let exact = 2.0 * (-2.0f64).exp();
        assert!((scan.refined - exact).abs() < 1e-4, "{scan:?}");
        assert!(scan.stable(0.05));
    }

    #[test]
    fn boundary_value() {
        let q = lemma_2_2_quantity(&PhiProfile::log(), 1.0, -2.0 * (2.0f64 / 3.0).ln()).unwrap();
        assert!((q - 2.0 / 3.0 * (2.25f64).ln().ln().abs()).abs() < 1e-15);
    }

    #[test]
    fn fixed_beta_decays_to_zero() {
        let phi = PhiProfile::power(0.9).unwrap();
        let vals: Vec<f64> = [1e2, 1e3, 1e4, 1e5].iter().map(|&s| lemma_2_2_quantity(&phi, 0.1, s).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(vals[3] < 1e-15);
    }

    #[test]
    fn grids_nest() {
        let g = Lemma31Grid::default();
        let t = g.t_grid();
        let tf = g.refined().t_grid();
        for (i, v) in t.iter().enumerate() {
            assert!((tf[2 * i] - v).abs() <= 1e-15 * v);
        }
        assert_eq!(*t.last().unwrap(), 0.5);
    }
}
