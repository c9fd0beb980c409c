use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{stream_rng, unit_vector};
use crate::error::Result;
use crate::report::ReportTable;

/// Empirical modulus of continuity `omega(r) = sup_{|x-y|<r} |f(x) - f(y)|`
/// on a geometric radius grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub radii: Vec<f64>,
    /// Largest difference seen among pairs with `|x - y|` in
    /// `[radii[i-1], radii[i])`.
    pub shell_max: Vec<f64>,
    /// Running maximum of `shell_max`.
    pub omega: Vec<f64>,
    pub budget: usize,
    pub seed: u64,
}

/// Points per decade used by [`ModulusTable::dini_integral`].
pub const DINI_POINTS_PER_DECADE: usize = 64;

impl ModulusTable {
    /// `omega` between grid radii, interpolated linearly in `ln r`; constant
    /// beyond either end of the grid.
    pub fn omega_at(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.omega[0];
        }
        if r >= self.radii[n - 1] {
            return self.omega[n - 1];
        }
        let i = self.radii.partition_point(|&x| x <= r);
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        let w = (r / r0).ln() / (r1 / r0).ln();
        self.omega[i - 1] + w * (self.omega[i] - self.omega[i - 1])
    }

    /// `int_d^1 omega(r) / r dr` by the trapezoid rule in `ln r`.
    pub fn dini_integral(&self, d: f64) -> f64 {
        if d >= 1.0 {
            return 0.0;
        }
        let span = -d.ln();
        let m = ((span / std::f64::consts::LN_10) * DINI_POINTS_PER_DECADE as f64).ceil().max(1.0) as usize;
        let h = span / m as f64;
        let g = |i: usize| self.omega_at((d.ln() + i as f64 * h).exp());
        let inner: f64 = (1..m).map(g).sum();
        h * (0.5 * (g(0) + g(m)) + inner)
    }

    /// `rho(d) = d int_d^1 omega/r dr / (d |ln d|)`, which tends to 0 for
    /// every continuous `f`.
    pub fn rho(&self, d: f64) -> f64 {
        self.dini_integral(d) / d.ln().abs()
    }

    pub fn to_report(&self) -> ReportTable {
        let mut t = ReportTable::new("modulus", &["r", "omega", "shell_max", "dini_integral", "rho"])
            .with_meta("budget", self.budget)
            .with_meta("seed", self.seed);
        for (i, &r) in self.radii.iter().enumerate() {
            let rho = if r < 1.0 { self.rho(r) } else { f64::NAN };
            t.push_row(vec![r, self.omega[i], self.shell_max[i], self.dini_integral(r), rho]);
        }
        t.check(
            "omega_nondecreasing",
            self.omega.windows(2).all(|w| w[1] >= w[0]),
            "omega is non-decreasing in r",
        );
        if let (Some(lo), Some(hi)) = (self.omega.first(), self.omega.last()) {
            t.check(
                "omega_vanishes",
                *lo <= 0.1 * *hi,
                format!("omega(r_min) = {lo:.3e} <= 0.1 omega(r_max) = {:.3e}", 0.1 * hi),
            );
        }
        t
    }

    fn rho_decades(&self, j_lo: i32, j_hi: i32) -> Vec<f64> {
        (j_lo..=j_hi).map(|j| self.rho(10f64.powi(-j))).collect()
    }

    /// `rho(10^-(j+1)) <= rho(10^-j)` for `j` in `j_lo..j_hi`, up to rounding.
    /// Equality is expected where `omega` has saturated on `[d, 1]`.
    pub fn rho_nonincreasing(&self, j_lo: i32, j_hi: i32) -> bool {
        self.rho_decades(j_lo, j_hi).windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    }

    /// Strict decrease across every decade from `10^-j_lo` to `10^-j_hi`;
    /// an identically zero `rho` also counts.
    pub fn rho_strictly_decreasing(&self, j_lo: i32, j_hi: i32) -> bool {
        self.rho_decades(j_lo, j_hi).windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
    }
}

/// Estimates `omega` with `budget` random pairs split evenly across the radius
/// shells. Base points come from `sampler`; the partner lies at a uniformly
/// random distance inside the shell in a uniformly random direction.
pub fn modulus_of_continuity<F, S>(f: F, sampler: S, radii: &[f64], budget: usize, seed: u64) -> Result<ModulusTable>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let per_shell = budget.div_ceil(radii.len().max(1));
    let shell_max: Vec<f64> = (0..radii.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let lo = if i == 0 { 0.0 } else { radii[i - 1] };
            let hi = radii[i];
            let mut best: f64 = 0.0;
            for _ in 0..per_shell {
                let x = sampler(&mut rng);
                let dir = unit_vector(&mut rng, x.len());
                let len = lo + (hi - lo) * rng.random::<f64>();
                let y: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + len * d).collect();
                best = best.max((f(&x)? - f(&y)?).abs());
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let mut omega = shell_max.clone();
    for i in 1..omega.len() {
        omega[i] = omega[i].max(omega[i - 1]);
    }
    Ok(ModulusTable { radii: radii.to_vec(), shell_max, omega, budget, seed })
}

/// `per_decade` geometric radii from `r_min` to 1.
pub fn radius_grid(r_min: f64, per_decade: usize) -> Vec<f64> {
    let n = ((-r_min.log10()) * per_decade as f64).round() as usize;
    (0..=n).map(|i| r_min.powf(1.0 - i as f64 / n as f64)).collect()
}
