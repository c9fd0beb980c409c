use rand_chacha::ChaCha8Rng;
use rand::Rng;

use super::modulus::{modulus_of_continuity, radius_grid, ModulusTable};
use super::sampling::{in_ball, stream_rng};
use crate::constructions::{local_support_radius, Construction, LocalPoint};
use crate::error::{Error, Result};
use crate::report::ReportTable;

/// A solution `u` of `Delta u = f` on `B_1` as seen by the gradient-modulus
/// estimate `|Du(z) - Du(0)| <= C |z| (sup|u| + sup|f| + int_{|z|}^1 omega/r)`.
pub trait Prop1Problem: Sync {
    fn dim(&self) -> usize;
    fn u(&self, x: &[f64]) -> Result<f64>;
    fn grad(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn f(&self, x: &[f64]) -> Result<f64>;
    /// Random `z` in `B_{1/16}`.
    fn sample_z(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    /// Random point of `B_1`, concentrated where `u` and `f` vary.
    fn sample_domain(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// The order-0 composite. `z` samples are drawn ball by ball (uniform ball
/// index, uniform local point in the support) because uniform samples of
/// `B_{1/16}` almost never land on a support; domain samples do the same over
/// a slightly enlarged support so that pairs straddle ball boundaries.
pub struct CompositeProblem<'a> {
    pub c: &'a Construction,
    /// Balls `z_balls.0 ..= z_balls.1` lie inside `B_{1/16}`.
    pub z_balls: (usize, usize),
    pub domain_balls: usize,
}

impl<'a> CompositeProblem<'a> {
    /// `r_min` is the smallest radius the modulus must resolve; domain
    /// sampling reaches the first ball whose radius is below `r_min / 10`.
    pub fn new(c: &'a Construction, r_min: f64) -> Result<Self> {
        if c.order() != 0 {
            return Err(Error::Mode("the gradient-modulus check runs on the order-0 composite".into()));
        }
        let s = &c.params().schedule;
        let zeta = (c.n() as f64 / 2.0).sqrt();
        let limit = c.params().k_global_max.min(c.params().k_table);
        let first_inside = (1..=limit)
            .find(|&k| s.center(k) * zeta + local_support_radius() * s.radius(k) < 1.0 / 16.0)
            .ok_or_else(|| Error::Schedule("no ball lies inside B_{1/16}".into()))?;
        let deepest = (1..=limit).find(|&k| s.radius(k) < r_min / 10.0).unwrap_or(limit);
        Ok(CompositeProblem { c, z_balls: (first_inside, deepest.max(first_inside)), domain_balls: deepest })
    }

    fn ball_point(&self, rng: &mut ChaCha8Rng, lo: usize, hi: usize, radius: f64) -> Vec<f64> {
        let k = rng.random_range(lo..=hi);
        self.c.to_global(&LocalPoint { k, y: in_ball(rng, self.c.n(), radius) })
    }
}

impl Prop1Problem for CompositeProblem<'_> {
    fn dim(&self) -> usize {
        self.c.n()
    }

    fn u(&self, x: &[f64]) -> Result<f64> {
        self.c.eval_real(x, &vec![0; self.c.n()])
    }

    fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        (0..self.c.n())
            .map(|j| {
                let mut d = vec![0; self.c.n()];
                d[j] = 1;
                self.c.eval_real(x, &d)
            })
            .collect()
    }

    fn f(&self, x: &[f64]) -> Result<f64> {
        Ok(self.c.laplacian_global(x)?.re)
    }

    fn sample_z(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.ball_point(rng, self.z_balls.0, self.z_balls.1, local_support_radius())
    }

    fn sample_domain(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.ball_point(rng, 1, self.domain_balls, 0.8)
    }
}

/// `u = c |x|^2 / (2n)`, so `f = c` is constant and `omega = 0`.
pub struct QuadraticProblem {
    pub n: usize,
    pub c: f64,
}

impl Prop1Problem for QuadraticProblem {
    fn dim(&self) -> usize {
        self.n
    }

    fn u(&self, x: &[f64]) -> Result<f64> {
        Ok(self.c * x.iter().map(|v| v * v).sum::<f64>() / (2.0 * self.n as f64))
    }

    fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.iter().map(|v| self.c * v / self.n as f64).collect())
    }

    fn f(&self, _: &[f64]) -> Result<f64> {
        Ok(self.c)
    }

    fn sample_z(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        in_ball(rng, self.n, 1.0 / 16.0)
    }

    fn sample_domain(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        in_ball(rng, self.n, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Config {
    pub samples: usize,
    pub budget: usize,
    pub seed: u64,
    pub r_min: f64,
    pub per_decade: usize,
}

impl Default for Prop1Config {
    fn default() -> Self {
        Prop1Config { samples: 1000, budget: 200_000, seed: 1, r_min: 1e-7, per_decade: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct Prop1Report {
    pub table: ReportTable,
    pub modulus: ModulusTable,
    pub sup_u: f64,
    pub sup_f: f64,
    pub max_ratio: f64,
}

/// Per-sample ratio `|Du(z) - Du(0)| / [|z| (sup|u| + sup|f| + int_{|z|}^1
/// omega/r dr)]` and its running maximum. The suprema are taken over the `z`
/// samples together with `samples` domain samples; `omega` comes from
/// [`modulus_of_continuity`] with the configured budget.
pub fn prop1_check(problem: &dyn Prop1Problem, cfg: &Prop1Config) -> Result<Prop1Report> {
    let n = problem.dim();
    let radii = radius_grid(cfg.r_min, cfg.per_decade);
    let modulus = modulus_of_continuity(
        |x: &[f64]| problem.f(x),
        |r: &mut ChaCha8Rng| problem.sample_domain(r),
        &radii,
        cfg.budget,
        cfg.seed,
    )?;
    let grad0 = problem.grad(&vec![0.0; n])?;
    let mut z_rng = stream_rng(cfg.seed, u64::MAX);
    let zs: Vec<Vec<f64>> = (0..cfg.samples).map(|_| problem.sample_z(&mut z_rng)).collect();
    let mut d_rng = stream_rng(cfg.seed, u64::MAX - 1);
    let domain: Vec<Vec<f64>> = (0..cfg.samples).map(|_| problem.sample_domain(&mut d_rng)).collect();
    let (mut sup_u, mut sup_f) = (0.0f64, 0.0f64);
    for x in zs.iter().chain(&domain) {
        sup_u = sup_u.max(problem.u(x)?.abs());
        sup_f = sup_f.max(problem.f(x)?.abs());
    }
    let mut table = ReportTable::new("prop1", &["i", "abs_z", "lhs", "rhs_kernel", "ratio", "running_max"])
        .with_meta("samples", cfg.samples)
        .with_meta("budget", cfg.budget)
        .with_meta("seed", cfg.seed)
        .with_meta("r_min", cfg.r_min);
    let mut running: f64 = 0.0;
    for (i, z) in zs.iter().enumerate() {
        let abs_z = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let g = problem.grad(z)?;
        let lhs = g.iter().zip(&grad0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let rhs = abs_z * (sup_u + sup_f + modulus.dini_integral(abs_z));
        let ratio = lhs / rhs;
        running = running.max(ratio);
        table.push_row(vec![i as f64, abs_z, lhs, rhs, ratio, running]);
    }
    table.set_meta("sup_u", sup_u);
    table.set_meta("sup_f", sup_f);
    let rho: Vec<(f64, f64)> = (1..=6).map(|j| 10f64.powi(-j)).map(|d| (d, modulus.rho(d))).collect();
    table.set_meta("rho", &rho);
    table.check("ratio_finite", running.is_finite(), format!("running max ratio {running:.6e}"));
    table.check(
        "rho_nonincreasing",
        modulus.rho_nonincreasing(1, 6),
        "rho(d) does not increase across any decade of [1e-6, 1e-1]",
    );
    table.check(
        "rho_decreasing_tail",
        modulus.rho_strictly_decreasing(4, 6),
        "rho(d) strictly decreases over the last two decades [1e-6, 1e-4]",
    );
    Ok(Prop1Report { table, modulus, sup_u, sup_f, max_ratio: running })
}
