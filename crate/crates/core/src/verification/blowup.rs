use rayon::prelude::*;

use crate::constructions::Construction;
use crate::error::Result;
use crate::profiles::PhiProfile;
use crate::report::ReportTable;

/// `eps e^{-1/2} [(1 + 2t) phi(s) - 2 phi'(s)]` at `s = 1/(2t)`: the mixed
/// second derivative of the order-0 composite at the sample point of a ball.
pub fn mixed_reference(phi: &PhiProfile, t: f64, eps: f64) -> Result<f64> {
    let s = 0.5 / t;
    Ok(eps * (-0.5f64).exp() * ((1.0 + 2.0 * t) * phi.eval(0, s)? - 2.0 * phi.eval(1, s)?))
}

/// `d^p/dz^p u` at the sample point of a ball for the order `p - 2`
/// composite:
/// `eps e^{-1/2} sum_j C(p,j) p!/j! [prod_{i<j} (t - i - D)] phi (s)`
/// with `D = d/ds` and `s = 1/(2t)`.
///
/// On the plateau `u_t = z^p g(|z|^2)` with `g(rho) = rho^t phi(-ln rho)`,
/// Leibniz gives `sum_j C(p,j) p!/j! rho^j g^(j)(rho)`, and
/// `rho^j g^(j) = theta (theta - 1) .. (theta - j + 1) g` for
/// `theta = rho d/drho`, which acts as `t - D` after factoring out
/// `rho^t = e^{-ts}`.
pub fn wirtinger_reference(phi: &PhiProfile, p: u32, t: f64, eps: f64) -> Result<f64> {
    let s = 0.5 / t;
    let derivs = phi.eval_all(p as usize, s)?;
    let p_fact: f64 = (1..=p).map(f64::from).product();
    let mut op = vec![1.0];
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut j_fact = 1.0;
    for j in 0..=p {
        if j > 0 {
            let shift = t - (j - 1) as f64;
            let mut next = vec![0.0; op.len() + 1];
            for (m, &c) in op.iter().enumerate() {
                next[m] += shift * c;
                next[m + 1] -= c;
            }
            op = next;
            binom *= (p - j + 1) as f64 / j as f64;
            j_fact *= j as f64;
        }
        let applied: f64 = op.iter().zip(&derivs).map(|(c, d)| c * d).sum();
        sum += binom * p_fact / j_fact * applied;
    }
    Ok(eps * (-0.5f64).exp() * sum)
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

/// Blow-up of the top-order derivative at the sample points `x^(k)`,
/// `k in k_range`, measured through the algebra in local coordinates and
/// compared with the closed form.
///
/// Order 0: the mixed derivative `d^2 u / dx1 dx2`. Order `k >= 1`:
/// `d^{k+2} u / dz^{k+2}`, plus the largest `(k+2)`-th `x1, x2` partial of
/// the real and imaginary parts separately.
pub fn blowup_table(c: &Construction, k_lo: usize, k_hi: usize, tol: f64) -> Result<ReportTable> {
    if c.order() == 0 {
        blowup_order0(c, k_lo, k_hi, tol)
    } else {
        blowup_higher(c, k_lo, k_hi, tol)
    }
}

fn blowup_order0(c: &Construction, k_lo: usize, k_hi: usize, tol: f64) -> Result<ReportTable> {
    let phi = c.params().phi;
    let mut mixed = vec![0u32; c.n()];
    mixed[0] = 1;
    mixed[1] = 1;
    let rows: Vec<Vec<f64>> = (k_lo..=k_hi)
        .into_par_iter()
        .map(|k| {
            let b = c.ball(k)?;
            let measured = c.eval_real_local(&c.sample_point(k), &mixed)?;
            let reference = mixed_reference(&phi, b.t, b.eps)?;
            let s = 0.5 / b.t;
            let e = (-0.5f64).exp();
            let leading = e * phi.eval(0, s)?.sqrt();
            let second = b.eps * 2.0 * b.t * e * phi.eval(0, s)?;
            let third = -2.0 * b.eps * e * phi.eval(1, s)?;
            let abs_diff = (measured - reference).abs();
            Ok(vec![k as f64, b.t, b.eps, measured, reference, abs_diff, abs_diff / reference.abs(), leading, second, third])
        })
        .collect::<Result<_>>()?;
    let mut table = ReportTable::new(
        "blowup",
        &["k", "t_k", "eps_k", "measured", "reference", "abs_diff", "rel_diff", "leading", "second", "third"],
    )
    .with_meta("params", c.params())
    .with_meta("tol", tol);
    for r in rows {
        table.push_row(r);
    }
    let rel = table.column("rel_diff").unwrap();
    let max_rel = rel.iter().cloned().fold(0.0, f64::max);
    table.check("matches_closed_form", max_rel <= tol, format!("max relative mismatch {max_rel:.3e} <= {tol:e}"));
    let ks = table.column("k").unwrap();
    let measured = table.column("measured").unwrap();
    let tail: Vec<f64> = ks.iter().zip(&measured).filter(|(k, _)| **k >= 3.0).map(|(_, m)| *m).collect();
    table.check("increasing_from_k3", strictly_increasing(&tail), "measured strictly increases for k >= 3");
    table.check(
        "leading_diverges",
        strictly_increasing(&table.column("leading").unwrap()),
        "e^{-1/2} sqrt(phi(1/(2 t_k))) strictly increases",
    );
    Ok(table)
}

fn blowup_higher(c: &Construction, k_lo: usize, k_hi: usize, tol: f64) -> Result<ReportTable> {
    let phi = c.params().phi;
    let p = c.order() + 2;
    let n = c.n();
    let p_fact: f64 = (1..=p).map(f64::from).product();
    let rows: Vec<Vec<f64>> = (k_lo..=k_hi)
        .into_par_iter()
        .map(|k| {
            let b = c.ball(k)?;
            let pt = c.sample_point(k);
            let measured = c.eval_wirtinger_local(&pt, p, 0)?;
            let reference = wirtinger_reference(&phi, p, b.t, b.eps)?;
            let leading = p_fact * (-0.5f64).exp() * c.params().schedule.phi_at_sample(&phi, k)?.sqrt();
            let (mut re_max, mut im_max) = (0.0f64, 0.0f64);
            for a in 0..=p {
                let mut d = vec![0u32; n];
                d[0] = a;
                d[1] = p - a;
                let v = c.eval_local(&pt, &d)?;
                re_max = re_max.max(v.re.abs());
                im_max = im_max.max(v.im.abs());
            }
            let rel = (measured.re - reference).hypot(measured.im) / reference.abs();
            Ok(vec![k as f64, b.t, b.eps, measured.re, measured.im, reference, leading, rel, re_max, im_max])
        })
        .collect::<Result<_>>()?;
    let mut table = ReportTable::new(
        "blowup",
        &["k", "t_k", "eps_k", "re_measured", "im_measured", "reference", "leading", "rel_diff", "re_dmax", "im_dmax"],
    )
    .with_meta("params", c.params())
    .with_meta("tol", tol);
    for r in rows {
        table.push_row(r);
    }
    let max_rel = table.column("rel_diff").unwrap().iter().cloned().fold(0.0, f64::max);
    table.check("matches_closed_form", max_rel <= tol, format!("max relative mismatch {max_rel:.3e} <= {tol:e}"));
    let ks = table.column("k").unwrap();
    let measured: Vec<f64> = table.column("re_measured").unwrap();
    let tail: Vec<f64> = ks.iter().zip(&measured).filter(|(k, _)| **k >= 3.0).map(|(_, m)| m.abs()).collect();
    table.check("increasing_from_k3", strictly_increasing(&tail), "|d^p u/dz^p| strictly increases for k >= 3");
    table.check(
        "leading_diverges",
        strictly_increasing(&table.column("leading").unwrap()),
        "p! e^{-1/2} sqrt(phi(1/(2 t_k))) strictly increases",
    );
    Ok(table)
}
