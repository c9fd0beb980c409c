use num_complex::Complex64;
use rayon::prelude::*;

use super::sampling::{in_ball, stream_rng};
use crate::algebra::{EvalContext, Expression, PreparedPoint};
use crate::constructions::{build_v, local_support_radius, Construction, LocalPoint};
use crate::error::Result;
use crate::profiles::{EtaProfile, PhiProfile};
use crate::report::ReportTable;

fn global_norm(c: &Construction, p: &LocalPoint) -> f64 {
    let x = c.to_global(p);
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn unit(n: usize, j: usize, order: u32) -> Vec<u32> {
    let mut d = vec![0; n];
    d[j] = order;
    d
}

/// `|Du(x)| / |x|` at a local point.
pub fn gradient_quotient(c: &Construction, p: &LocalPoint) -> Result<f64> {
    let mut sq = 0.0;
    for j in 0..c.n() {
        sq += c.eval_local(p, &unit(c.n(), j, 1))?.norm_sqr();
    }
    Ok(sq.sqrt() / global_norm(c, p))
}

struct BallStats {
    lap: f64,
    quotient: f64,
    diag: f64,
}

fn ball_stats(c: &Construction, k: usize, samples: usize, seed: u64) -> Result<BallStats> {
    let mut rng = stream_rng(seed, k as u64);
    let mut s = BallStats { lap: 0.0, quotient: 0.0, diag: 0.0 };
    for _ in 0..samples {
        let p = LocalPoint { k, y: in_ball(&mut rng, c.n(), local_support_radius()) };
        s.lap = s.lap.max(c.laplacian_local(&p)?.norm());
        s.quotient = s.quotient.max(gradient_quotient(c, &p)?);
        for j in 0..c.n() {
            s.diag = s.diag.max(c.eval_local(&p, &unit(c.n(), j, 2))?.norm());
        }
    }
    Ok(s)
}

/// Per ball: sup of `|Delta u|`, of `|Du(x)|/|x|` and of the diagonal
/// Hessian entries over `samples` random local points, plus `|Du|/|x|` at the
/// sample point `x^(k)`. When `bounds = Some((b2, b3))` the rows are checked
/// against `n eps_k b3` and `3 eps_k b2`.
pub fn continuity_table(
    c: &Construction,
    k_lo: usize,
    k_hi: usize,
    samples: usize,
    seed: u64,
    bounds: Option<(f64, f64)>,
) -> Result<ReportTable> {
    let rows: Vec<Vec<f64>> = (k_lo..=k_hi)
        .into_par_iter()
        .map(|k| {
            let b = c.ball(k)?;
            let s = ball_stats(c, k, samples, seed)?;
            let q_sample = gradient_quotient(c, &c.sample_point(k))?;
            let (lap_bound, q_bound) = match bounds {
                Some((b2, b3)) => (c.n() as f64 * b.eps * b3, 3.0 * b.eps * b2),
                None => (f64::NAN, f64::NAN),
            };
            Ok(vec![k as f64, b.eps, s.lap, q_sample, s.quotient, s.diag, lap_bound, q_bound])
        })
        .collect::<Result<_>>()?;
    let mut table = ReportTable::new(
        "continuity",
        &[
            "k",
            "eps_k",
            "sup_laplacian",
            "grad_quotient_sample",
            "sup_grad_quotient",
            "sup_diag_hessian",
            "laplacian_bound",
            "grad_quotient_bound",
        ],
    )
    .with_meta("params", c.params())
    .with_meta("samples_per_ball", samples)
    .with_meta("seed", seed);
    for r in rows {
        table.push_row(r);
    }
    if let Some((b2, b3)) = bounds {
        table.set_meta("b2", b2);
        table.set_meta("b3", b3);
        let ok_lap = table.rows.iter().all(|r| r[2] <= r[6]);
        let ok_q = table.rows.iter().all(|r| r[4] <= r[7]);
        table.check("laplacian_within_bound", ok_lap, "sup |Delta u| <= n eps_k B3 on every ball");
        table.check("quotient_within_bound", ok_q, "sup |Du|/|x| <= 3 eps_k B2 on every ball");
    }
    let origin_ok = origin_derivatives_vanish(c)?;
    table.check("origin_derivatives_zero", origin_ok, "every derivative through the top order is exactly 0 at the origin");
    Ok(table)
}

/// Ratio of a column at ball `k_late` to its value at ball `k_early`.
pub fn decay_ratio(table: &ReportTable, column: &str, k_early: usize, k_late: usize) -> Option<f64> {
    let ks = table.column("k")?;
    let col = table.column(column)?;
    let at = |k: usize| ks.iter().position(|&v| v == k as f64).map(|i| col[i]);
    Some(at(k_late)? / at(k_early)?)
}

/// Adds one check per decaying column: its value at `k_late` is below
/// `ratio` times its value at `k_early`.
pub fn check_decay(table: &mut ReportTable, k_early: usize, k_late: usize, ratio: f64) {
    for col in ["sup_laplacian", "grad_quotient_sample", "sup_diag_hessian"] {
        let (ok, detail) = match decay_ratio(table, col, k_early, k_late) {
            Some(r) => (r < ratio, format!("k{k_late}/k{k_early} = {r:.4} < {ratio}")),
            None => (false, format!("rows k = {k_early} and k = {k_late} not both present")),
        };
        table.check(format!("{col}_decays"), ok, detail);
    }
}

/// All multi-indices of total order `<= order + 2` evaluate to exactly 0 at
/// the origin, as does the Laplacian.
pub fn origin_derivatives_vanish(c: &Construction) -> Result<bool> {
    let n = c.n();
    let top = c.order() + 2;
    let origin = vec![0.0; n];
    let mut ok = c.laplacian_global(&origin)? == Complex64::new(0.0, 0.0);
    for d in multi_indices(n, top) {
        ok &= c.eval_global(&origin, &d)? == Complex64::new(0.0, 0.0);
    }
    Ok(ok)
}

/// Every multi-index in `n` variables of total order `<= max`, sorted.
pub fn multi_indices(n: usize, max: u32) -> Vec<Vec<u32>> {
    fn fill(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            fill(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    fill(0, max, &mut vec![0; n], &mut out);
    out.sort();
    out
}

/// The bare block `v` on spheres of shrinking radius: the mixed second
/// derivative grows without bound while every diagonal entry tends to 0.
pub fn v_contrast_table(phi: &PhiProfile, n: usize, radii: &[f64], n_theta: usize) -> Result<ReportTable> {
    let v = build_v(n)?;
    let mixed = v.differentiate(0)?.differentiate(1)?;
    let diag: Vec<Expression> =
        (0..n).map(|j| v.differentiate(j).and_then(|e| e.differentiate(j))).collect::<Result<_>>()?;
    let ctx = EvalContext::new(*phi, EtaProfile::default(), 0.0, n);
    let mut table = ReportTable::new("v_contrast", &["radius", "sup_mixed", "sup_diag_hessian"])
        .with_meta("phi", phi.spec())
        .with_meta("n", n);
    for &r in radii {
        let (mut m, mut d) = (0.0f64, 0.0f64);
        for i in 0..n_theta {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (n_theta - 1).max(1) as f64;
            let mut dir = vec![0.0; n];
            dir[0] = theta.cos();
            dir[1] = theta.sin();
            let p = PreparedPoint::from_polar(r.ln(), &dir)?;
            m = m.max(mixed.evaluate_real_at(&ctx, &p)?.abs());
            for e in &diag {
                d = d.max(e.evaluate_real_at(&ctx, &p)?.abs());
            }
        }
        table.push_row(vec![r, m, d]);
    }
    let m = table.column("sup_mixed").unwrap();
    let d = table.column("sup_diag_hessian").unwrap();
    table.check("mixed_grows", m.windows(2).all(|w| w[1] > w[0]), "sup |d^2 v/dx1 dx2| grows as the radius shrinks");
    table.check("diagonal_decays", d.windows(2).all(|w| w[1] < w[0]), "sup |d^2 v/dx_j^2| decays as the radius shrinks");
    Ok(table)
}

/// Side-by-side difference quotients of the first derivatives at 0.
///
/// Row `i` uses `x2 = 10^{-i}` for the block `v`: `|dv/dx1(0, x2, 0..)|/|x2|`
/// equals `|phi(-ln x2^2)|` and diverges, while for `i >= 3` the quotient of
/// `dv/dx_i` at `|x| = 10^{-i}` on the diagonal stays below `2|phi'|`. The
/// same row reports `|Du(x^(i))|/|x^(i)|` for the composite, which decays.
pub fn differentiability_witness(c: &Construction, rows: usize) -> Result<ReportTable> {
    let n = c.n();
    let phi = c.params().phi;
    let v = build_v(n)?;
    let dv1 = v.differentiate(0)?;
    let dv3 = if n >= 3 { Some(v.differentiate(2)?) } else { None };
    let ctx = EvalContext::new(phi, c.params().eta, 0.0, n);
    let mut table = ReportTable::new(
        "witness",
        &[
            "i",
            "x2",
            "v_quotient",
            "v_closed_form",
            "v_xi_quotient",
            "v_xi_bound",
            "u_abs_x",
            "u_quotient",
            "u_bound_shape",
        ],
    )
    .with_meta("params", c.params());
    for i in 1..=rows {
        let x2 = 10f64.powi(-(i as i32));
        let mut x = vec![0.0; n];
        x[1] = x2;
        let vq = dv1.evaluate(&ctx, &x)?.abs() / x2;
        let closed = phi.eval(0, -(x2 * x2).ln())?.abs();
        let (xi_q, xi_bound) = match &dv3 {
            Some(e) => {
                let p = PreparedPoint::from_polar(x2.ln(), &vec![1.0; n])?;
                (e.evaluate_real_at(&ctx, &p)?.abs() / x2, 2.0 * phi.eval(1, -2.0 * x2.ln())?.abs())
            }
            None => (f64::NAN, f64::NAN),
        };
        let sp = c.sample_point(i);
        let uq = gradient_quotient(c, &sp)?;
        let eps = c.ball(i)?.eps;
        table.push_row(vec![i as f64, x2, vq, closed, xi_q, xi_bound, global_norm(c, &sp), uq, eps]);
    }
    let vq = table.column("v_quotient").unwrap();
    let closed = table.column("v_closed_form").unwrap();
    let max_rel = vq.iter().zip(&closed).map(|(a, b)| (a - b).abs() / b.abs()).fold(0.0, f64::max);
    table.check("v_quotient_closed_form", max_rel <= 1e-12, format!("max relative mismatch {max_rel:.3e}"));
    table.check("v_quotient_diverges", vq.windows(2).all(|w| w[1] > w[0]), "|phi(-ln x2^2)| grows as x2 -> 0");
    let uq = table.column("u_quotient").unwrap();
    table.check("u_quotient_decays", uq.windows(2).all(|w| w[1] < w[0]), "|Du(x^(k))|/|x^(k)| decreases in k");
    if n >= 3 {
        let ok = table.rows.iter().all(|r| r[4] <= r[5]);
        table.check("v_xi_quotient_bounded", ok, "|dv/dx_i|/|x| <= 2|phi'| for i >= 3");
    }
    Ok(table)
}
