use schauder_core::poisson::{
    construction_probe, oracle_table, polynomial_probe, refinement_slope, refinement_table, OraclePoints,
};
use schauder_core::profiles::{geometric_grid, phi_admissibility_report};
use schauder_core::verification::{
    blowup_table, check_decay, continuity_table, derivative_check, differentiability_witness, lemma_2_2_counterexample,
    lemma_3_1_table, modulus_of_continuity, prop1_check, radius_grid, scan_lemma_2_2, scan_lemma_3_1, CompositeProblem,
    DerivativeCheck, Lemma22Grid, Lemma31Grid, Prop1Config, Prop1Problem,
};
use schauder_core::{Construction, Grid2D, ReportTable, Result};

use crate::args::{Probe, Suite};
use crate::config::{Command, OracleSource, RunConfig};

/// Smallest radius resolved by the modulus of continuity.
const MODULUS_R_MIN: f64 = 1e-7;
const MODULUS_PER_DECADE: usize = 10;

/// Runs the configured command; the returned table carries the config in its
/// metadata.
pub fn execute(cfg: &RunConfig) -> Result<ReportTable> {
    let c = Construction::new(cfg.params.clone())?;
    let mut table = match &cfg.command {
        Command::Verify { suite } => verify(cfg, &c, *suite)?,
        Command::Eval { point, local, deriv } => {
            let v = match (local, point) {
                (Some(p), _) => c.eval_local(p, deriv)?,
                (None, Some(x)) => c.eval_global(x, deriv)?,
                (None, None) => unreachable!("validated: eval has a point"),
            };
            let mut t = if c.order() == 0 {
                let mut t = ReportTable::new("eval", &["value"]);
                t.push_row(vec![v.re]);
                t
            } else {
                let mut t = ReportTable::new("eval", &["re", "im"]);
                t.push_row(vec![v.re, v.im]);
                t
            };
            if let Some(p) = local {
                t.set_meta("global_point", c.to_global(p));
            }
            t
        }
        Command::GridExport { grid, half_width } => {
            let n = c.n();
            let line = |i: usize| -half_width + 2.0 * half_width * i as f64 / (*grid - 1) as f64;
            let mut points = Vec::with_capacity(grid * grid);
            for j in 0..*grid {
                for i in 0..*grid {
                    let mut x = vec![0.0; n];
                    x[0] = line(i);
                    x[1] = line(j);
                    points.push(x);
                }
            }
            oracle_table(&c, &OraclePoints::List(points))?
        }
        Command::ExportOracle { source } => match source {
            OracleSource::Grid { grid, half_width } => {
                oracle_table(&c, &OraclePoints::Grid(Grid2D::new(*half_width, *grid)?))?
            }
            OracleSource::Points { points } => oracle_table(&c, &OraclePoints::List(points.clone()))?,
        },
        Command::Solve2d { grids, half_width, probe } => {
            let tol = cfg.tol.expect("solve2d has a default tolerance");
            let max_iter = cfg.budget.expect("solve2d has a default budget");
            let mut reports = Vec::with_capacity(grids.len());
            for &n in grids {
                let grid = Grid2D::new(*half_width, n)?;
                let (_, report) = match probe {
                    Probe::Construction => construction_probe(&c, &grid, tol, max_iter)?,
                    Probe::Polynomial => polynomial_probe(&grid, tol, max_iter)?,
                };
                reports.push(report);
            }
            let name = match probe {
                Probe::Construction => "construction",
                Probe::Polynomial => "polynomial",
            };
            let mut t = refinement_table(name, &reports);
            let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
            t.check("residual", worst <= tol, format!("max relative residual {worst:.3e} <= {tol:e}"));
            if *probe == Probe::Polynomial && reports.len() >= 2 {
                let slope = refinement_slope(&reports);
                t.check("slope_near_2", (slope - 2.0).abs() <= 0.2, format!("refinement slope {slope:.4} within 2 +- 0.2"));
            }
            t
        }
        Command::Profile { s_lo, s_hi, per_decade } => {
            phi_admissibility_report(&c.params().phi, &geometric_grid(*s_lo, *s_hi, *per_decade))?
        }
    };
    table.set_meta("config", cfg);
    Ok(table)
}

fn verify(cfg: &RunConfig, c: &Construction, suite: Suite) -> Result<ReportTable> {
    let p = c.params();
    let kmax = cfg.kmax.unwrap_or(1);
    let budget = cfg.budget.unwrap_or(1);
    Ok(match suite {
        Suite::Derivatives => {
            let tol = cfg.tol.expect("default tolerance");
            let check = DerivativeCheck {
                points: budget,
                seed: cfg.seed,
                balls: kmax,
                plateau_tol: tol,
                ramp_tol: 10.0 * tol,
                ..Default::default()
            };
            derivative_check(c, &check)?
        }
        Suite::Bounds => {
            let tol = cfg.tol.expect("default tolerance");
            let b1 = scan_lemma_2_2(&p.phi, &Lemma22Grid::default())?;
            let (b2, b3) = scan_lemma_3_1(p.n, &p.phi, &p.eta, &Lemma31Grid::default())?;
            let lemma31 = lemma_3_1_table(p.n, &p.phi, &p.eta, &Lemma31Grid::default())?;
            let mut t = lemma_2_2_counterexample(&p.phi, kmax as u32)?;
            for (name, scan) in [("b1", &b1), ("b2", &b2), ("b3", &b3)] {
                t.check(
                    format!("{name}_stable"),
                    scan.stable(tol),
                    format!("{:.6e} -> {:.6e} under refinement ({:.2e} < {tol})", scan.value, scan.refined, scan.rel_change()),
                );
            }
            if let Some(i) = t.rows.iter().position(|r| r[0] == 10.0) {
                let v = t.rows[i][3];
                t.check("counterexample_exceeds_b1", v > b1.refined, format!("row k = 10: {v:.6e} > B1 = {:.6e}", b1.refined));
            }
            let mixed = lemma31.column("sup_mixed").expect("lemma31 column");
            let (first, last) = (mixed[0], mixed[mixed.len() - 1]);
            t.check(
                "mixed_t_dependent",
                first > last,
                format!("sup |d^2 u_t/dx1 dx2| at the smallest t ({first:.4e}) exceeds the value at t = 1/2 ({last:.4e})"),
            );
            t.set_meta("b1", &b1);
            t.set_meta("b2", &b2);
            t.set_meta("b3", &b3);
            t.set_meta("lemma31_t", lemma31.column("t").expect("lemma31 column"));
            t.set_meta("lemma31_sup_mixed", mixed);
            t
        }
        Suite::Blowup => blowup_table(c, 1, kmax, cfg.tol.expect("default tolerance"))?,
        Suite::Continuity => {
            let bounds = if p.order == 0 {
                let (b2, b3) = scan_lemma_3_1(p.n, &p.phi, &p.eta, &Lemma31Grid::default())?;
                Some((b2.refined, b3.refined))
            } else {
                None
            };
            let mut t = continuity_table(c, 1, kmax, budget, cfg.seed, bounds)?;
            check_decay(&mut t, 2, kmax, cfg.tol.expect("default tolerance"));
            t
        }
        Suite::Modulus => {
            let problem = CompositeProblem::new(c, MODULUS_R_MIN)?;
            let m = modulus_of_continuity(
                |x: &[f64]| problem.f(x),
                |r: &mut rand_chacha::ChaCha8Rng| problem.sample_domain(r),
                &radius_grid(MODULUS_R_MIN, MODULUS_PER_DECADE),
                budget,
                cfg.seed,
            )?;
            let mut t = m.to_report();
            t.set_meta("params", p);
            t
        }
        Suite::Prop1 => {
            let problem = CompositeProblem::new(c, MODULUS_R_MIN)?;
            let pc = Prop1Config {
                budget,
                seed: cfg.seed,
                r_min: MODULUS_R_MIN,
                per_decade: MODULUS_PER_DECADE,
                ..Default::default()
            };
            let mut t = prop1_check(&problem, &pc)?.table;
            t.set_meta("params", p);
            t
        }
        Suite::Witness => differentiability_witness(c, kmax)?,
    })
}
