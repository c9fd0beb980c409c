use rand::Rng;
use rayon::prelude::*;

use super::fd::{fd_derivative, FDScheme};
use super::sampling::{stream_rng, unit_vector};
use crate::algebra::{EvalContext, Expression};
use crate::constructions::{build_u_t, build_v, Construction, LocalPoint};
use crate::error::{Error, Result};
use crate::report::ReportTable;

/// Where the finite-difference comparison is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    V,
    BlockPlateau,
    BlockRamp,
    CompositePlateau,
    CompositeRamp,
}

impl Zone {
    pub const ALL: [Zone; 5] =
        [Zone::V, Zone::BlockPlateau, Zone::BlockRamp, Zone::CompositePlateau, Zone::CompositeRamp];

    pub fn name(self) -> &'static str {
        match self {
            Zone::V => "v",
            Zone::BlockPlateau => "u_t_plateau",
            Zone::BlockRamp => "u_t_ramp",
            Zone::CompositePlateau => "u_plateau",
            Zone::CompositeRamp => "u_ramp",
        }
    }

    fn ramp(self) -> bool {
        matches!(self, Zone::BlockRamp | Zone::CompositeRamp)
    }

    /// Radial range of the sample points, in local units for the composite.
    fn radii(self) -> (f64, f64) {
        if self.ramp() {
            (0.5, 0.66)
        } else {
            (1e-3, 0.45)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub points: usize,
    pub seed: u64,
    /// `t` used for the bare block `u_t`.
    pub t: f64,
    /// Composite points cycle through balls `1..=balls`.
    pub balls: usize,
    pub plateau_tol: f64,
    pub ramp_tol: f64,
    pub scheme: FDScheme,
}

impl Default for DerivativeCheck {
    fn default() -> Self {
        DerivativeCheck {
            points: 100,
            seed: 2,
            t: 0.1,
            balls: 8,
            plateau_tol: 1e-5,
            ramp_tol: 1e-4,
            scheme: FDScheme::default(),
        }
    }
}

/// Gradient, Hessian and Laplacian mismatches at one point: gradient entries
/// relative to `|grad|`, Hessian entries relative to the largest entry, the
/// Laplacian relative to the sum of the absolute diagonal entries.
fn mismatch<F, A>(f: F, analytic: A, lap: f64, x: &[f64], scheme: &FDScheme, scale: f64, reach: Option<f64>) -> Result<[f64; 3]>
where
    F: Fn(&[f64]) -> Result<f64>,
    A: Fn(&[u32]) -> Result<f64>,
{
    let n = x.len();
    let unit = |pairs: &[usize]| {
        let mut d = vec![0u32; n];
        for &i in pairs {
            d[i] += 1;
        }
        d
    };
    let mut grad = Vec::with_capacity(n);
    for j in 0..n {
        let d = unit(&[j]);
        grad.push((analytic(&d)?, fd_derivative(&f, x, &d, scheme, scale, reach)?.value));
    }
    let gnorm = grad.iter().map(|g| g.0 * g.0).sum::<f64>().sqrt();
    let g_err = grad.iter().map(|(a, e)| (a - e).abs()).fold(0.0, f64::max) / gnorm;
    let mut hess = Vec::new();
    for i in 0..n {
        for j in i..n {
            let d = unit(&[i, j]);
            hess.push((i == j, analytic(&d)?, fd_derivative(&f, x, &d, scheme, scale, reach)?.value));
        }
    }
    let hmax = hess.iter().map(|h| h.1.abs()).fold(0.0, f64::max);
    let h_err = hess.iter().map(|(_, a, e)| (a - e).abs()).fold(0.0, f64::max) / hmax;
    let fd_lap: f64 = hess.iter().filter(|h| h.0).map(|h| h.2).sum();
    let diag: f64 = hess.iter().filter(|h| h.0).map(|h| h.1.abs()).sum();
    Ok([g_err, h_err, (lap - fd_lap).abs() / diag])
}

fn radius_point(rng: &mut impl Rng, n: usize, lo: f64, hi: f64, log: bool) -> Vec<f64> {
    let dir = unit_vector(rng, n);
    let u: f64 = rng.random();
    let r = if log { (lo.ln() + u * (hi / lo).ln()).exp() } else { lo + u * (hi - lo) };
    dir.iter().map(|d| d * r).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct Blocks {
    v: Expression,
    v_lap: Expression,
    ut: Expression,
    ut_lap: Expression,
}

fn check_point(c: &Construction, b: &Blocks, ctx: &EvalContext, cfg: &DerivativeCheck, zone: Zone, i: usize) -> Result<Vec<f64>> {
    let n = c.n();
    let mut rng = stream_rng(cfg.seed, (zone as u64) << 32 | i as u64);
    let (lo, hi) = zone.radii();
    let y = radius_point(&mut rng, n, lo, hi, !zone.ramp());
    let ry = norm(&y);
    let scheme = &cfg.scheme;
    let (k, errs) = match zone {
        Zone::V | Zone::BlockPlateau | Zone::BlockRamp => {
            let (e, lap) = if zone == Zone::V { (&b.v, &b.v_lap) } else { (&b.ut, &b.ut_lap) };
            let errs = mismatch(
                |p: &[f64]| e.evaluate(ctx, p),
                |d: &[u32]| e.derivative(d)?.evaluate(ctx, &y),
                lap.evaluate(ctx, &y)?,
                &y,
                scheme,
                ry,
                None,
            )?;
            (0, errs)
        }
        Zone::CompositePlateau | Zone::CompositeRamp => {
            let k = 1 + i % cfg.balls;
            let rk = c.ball(k)?.radius;
            let x = c.to_global(&LocalPoint { k, y });
            let local = FDScheme { min_step: scheme.min_step * rk, ..*scheme };
            let zero = vec![0u32; n];
            let errs = mismatch(
                |p: &[f64]| c.eval_real(p, &zero),
                |d: &[u32]| c.eval_real(&x, d),
                c.laplacian_global(&x)?.re,
                &x,
                &local,
                rk * ry,
                Some(rk * (1.0 - ry)),
            )?;
            (k, errs)
        }
    };
    let tol = if zone.ramp() { cfg.ramp_tol } else { cfg.plateau_tol };
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    Ok(vec![zone as usize as f64, i as f64, k as f64, ry, errs[0], errs[1], errs[2], worst, tol])
}

/// Analytic gradient, Hessian and Laplacian of `v`, of `u_t` and of the
/// order-0 composite against Richardson central differences, `cfg.points`
/// random points per zone. Plateau points are log-uniform in `|y|` over
/// `[1e-3, 0.45]`, ramp points uniform over `[0.5, 0.66]`.
pub fn derivative_check(c: &Construction, cfg: &DerivativeCheck) -> Result<ReportTable> {
    if c.order() != 0 {
        return Err(Error::Mode("the finite-difference check runs on the order-0 construction".into()));
    }
    if cfg.balls == 0 || cfg.balls > c.params().k_global_max {
        return Err(Error::Domain(format!(
            "composite points need 1 <= balls <= {} (global coordinates)",
            c.params().k_global_max
        )));
    }
    let n = c.n();
    let v = build_v(n)?;
    let ut = build_u_t(n, 0)?;
    let blocks = Blocks { v_lap: v.laplacian(), ut_lap: ut.laplacian(), v, ut };
    let ctx = EvalContext::new(c.params().phi, c.params().eta, cfg.t, n);
    let jobs: Vec<(Zone, usize)> = Zone::ALL.iter().flat_map(|&z| (0..cfg.points).map(move |i| (z, i))).collect();
    let rows: Vec<Vec<f64>> =
        jobs.par_iter().map(|&(z, i)| check_point(c, &blocks, &ctx, cfg, z, i)).collect::<Result<_>>()?;
    let mut table = ReportTable::new(
        "derivatives",
        &["zone", "i", "k", "abs_y", "grad_err", "hess_err", "lap_err", "max_err", "tol"],
    )
    .with_meta("params", c.params())
    .with_meta("zones", Zone::ALL.iter().map(|z| z.name()).collect::<Vec<_>>())
    .with_meta("t", cfg.t)
    .with_meta("seed", cfg.seed)
    .with_meta("scheme", cfg.scheme);
    for r in rows {
        table.push_row(r);
    }
    for z in Zone::ALL {
        let zone_rows: Vec<&Vec<f64>> = table.rows.iter().filter(|r| r[0] == z as usize as f64).collect();
        let worst = zone_rows.iter().map(|r| r[7]).fold(0.0, f64::max);
        let tol = if z.ramp() { cfg.ramp_tol } else { cfg.plateau_tol };
        table.check(z.name(), worst <= tol, format!("max relative mismatch {worst:.3e} <= {tol:e}"));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::ConstructionParams;
    use crate::profiles::PhiProfile;

    #[test]
    fn small_run_passes_and_is_reproducible() {
        let c = Construction::new(ConstructionParams::new(2, PhiProfile::log(), 0)).unwrap();
        let cfg = DerivativeCheck { points: 6, balls: 3, ..Default::default() };
        let a = derivative_check(&c, &cfg).unwrap();
        assert_eq!(a.rows.len(), 30);
        assert!(a.all_passed(), "{:?}", a.checks);
        assert_eq!(a.to_csv(), derivative_check(&c, &cfg).unwrap().to_csv());
    }

    #[test]
    fn higher_order_rejected() {
        let c = Construction::new(ConstructionParams::new(2, PhiProfile::log(), 1)).unwrap();
        assert!(matches!(derivative_check(&c, &DerivativeCheck::default()), Err(Error::Mode(_))));
    }
}
