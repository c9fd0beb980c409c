//! Zero-boundary Dirichlet problem on a square: five-point Laplacian solved by
//! unpreconditioned conjugate gradients, plus manufactured-solution export.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{Construction, ConstructionParams};
use crate::error::{Error, Result};
use crate::report::{Format, ReportTable};
use crate::verification::multi_indices;

/// `N x N` interior nodes of `[-L, L]^2` with spacing `h = 2L / (N + 1)`.
/// Node `(i, j)` sits at `(-L + (i + 1) h, -L + (j + 1) h)` and is stored at
/// index `i * N + j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub half_width: f64,
    pub n: usize,
}

impl Grid2D {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || n == 0 {
            return Err(Error::Domain(format!("grid needs L > 0 and N >= 1, got L = {half_width}, N = {n}")));
        }
        Ok(Grid2D { half_width, n })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n + 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Coordinate of grid line `i` in `0..=N+1`; lines 0 and `N+1` are the
    /// boundary.
    pub fn line(&self, i: usize) -> f64 {
        if i == self.n + 1 {
            self.half_width
        } else {
            -self.half_width + i as f64 * self.h()
        }
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.line(i + 1), self.line(j + 1)]
    }

    /// Evaluates `g` at every interior node.
    pub fn sample<F>(&self, g: F) -> Result<Vec<f64>>
    where
        F: Fn([f64; 2]) -> Result<f64> + Sync,
    {
        (0..self.len()).into_par_iter().map(|idx| g(self.node(idx / self.n, idx % self.n))).collect()
    }

    /// Swaps the roles of `x1` and `x2`.
    pub fn transpose(&self, field: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n * n).map(|idx| field[(idx % n) * n + idx / n]).collect()
    }

    /// The interior field padded with its zero boundary, `(N+2)^2` values.
    pub fn with_boundary(&self, field: &[f64]) -> Vec<f64> {
        let m = self.n + 2;
        let mut out = vec![0.0; m * m];
        for i in 0..self.n {
            out[(i + 1) * m + 1..(i + 1) * m + 1 + self.n].copy_from_slice(&field[i * self.n..(i + 1) * self.n]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    pub h: f64,
    pub iterations: usize,
    /// Final `||b - A w|| / ||b||` (0 when `b = 0`).
    pub residual: f64,
    pub max_error: Option<f64>,
    pub l2_error: Option<f64>,
}

/// `A w = -Delta_h w` with zero boundary: `(4 w_ij - ((E + W) + (N + S))) / h^2`.
/// The grouping makes `A` commute exactly with [`Grid2D::transpose`].
fn apply(grid: &Grid2D, w: &[f64], out: &mut [f64]) {
    let n = grid.n;
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, o) in row.iter_mut().enumerate() {
            let at = |a: usize, b: usize| w[a * n + b];
            let e = if j + 1 < n { at(i, j + 1) } else { 0.0 };
            let we = if j > 0 { at(i, j - 1) } else { 0.0 };
            let no = if i + 1 < n { at(i + 1, j) } else { 0.0 };
            let so = if i > 0 { at(i - 1, j) } else { 0.0 };
            *o = (4.0 * at(i, j) - ((e + we) + (no + so))) * inv_h2;
        }
    });
}

/// Inner product summed as diagonal terms followed by the pairs
/// `a_ij b_ij + a_ji b_ji` for `i < j`, so that it is bit-identical for a field
/// and its transpose.
fn dot(n: usize, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        s += a[i * n + i] * b[i * n + i];
    }
    for i in 0..n {
        for j in i + 1..n {
            s += a[i * n + j] * b[i * n + j] + a[j * n + i] * b[j * n + i];
        }
    }
    s
}

/// Solves `Delta_h w = f` with `w = 0` on the boundary. Convergence is declared
/// once the relative residual drops to `tol`.
pub fn solve_dirichlet(grid: &Grid2D, f: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveReport)> {
    if f.len() != grid.len() {
        return Err(Error::Domain(format!("right-hand side has {} values for {} nodes", f.len(), grid.len())));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let n = grid.n;
    let mut w = vec![0.0; grid.len()];
    let mut r: Vec<f64> = f.iter().map(|v| -v).collect();
    let b_norm = dot(n, &r, &r).sqrt();
    let mut report = SolveReport { n, h: grid.h(), iterations: 0, residual: 0.0, max_error: None, l2_error: None };
    if b_norm == 0.0 {
        return Ok((w, report));
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; grid.len()];
    let mut rr = dot(n, &r, &r);
    for it in 1..=max_iter {
        apply(grid, &p, &mut ap);
        let alpha = rr / dot(n, &p, &ap);
        for k in 0..w.len() {
            w[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(n, &r, &r);
        report.iterations = it;
        report.residual = rr_new.sqrt() / b_norm;
        if report.residual <= tol {
            return Ok((w, report));
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..p.len() {
            p[k] = r[k] + beta * p[k];
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: report.residual })
}

/// Fills the error fields of `report` against the exact interior values.
pub fn compare(grid: &Grid2D, w: &[f64], exact: &[f64], report: &mut SolveReport) {
    let (mut max, mut sq) = (0.0f64, 0.0);
    for (a, b) in w.iter().zip(exact) {
        max = max.max((a - b).abs());
        sq += (a - b) * (a - b);
    }
    report.max_error = Some(max);
    report.l2_error = Some((sq * grid.h() * grid.h()).sqrt());
}

/// `f = Delta u` at every node, from the algebra; exact 0 off the supports.
pub fn assemble_rhs(c: &Construction, grid: &Grid2D) -> Result<Vec<f64>> {
    check_planar_real(c)?;
    grid.sample(|x| Ok(c.laplacian_global(&x)?.re))
}

fn check_planar_real(c: &Construction) -> Result<()> {
    if c.n() != 2 || c.order() != 0 {
        return Err(Error::Domain(format!("the 2-d solve needs n = 2, order 0 (got n = {}, order {})", c.n(), c.order())));
    }
    Ok(())
}

/// Default half-width for the construction probe: the whole support
/// (`|x| <= 0.11`) fits, and the first ball spans several nodes at `N = 129`.
pub const PROBE_HALF_WIDTH: f64 = 0.125;

/// Solves with `f = Delta u` and compares against `u` at the nodes.
pub fn construction_probe(c: &Construction, grid: &Grid2D, tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveReport)> {
    let f = assemble_rhs(c, grid)?;
    let exact = grid.sample(|x| c.eval_real(&x, &[0, 0]))?;
    let (w, mut report) = solve_dirichlet(grid, &f, tol, max_iter)?;
    compare(grid, &w, &exact, &mut report);
    Ok((w, report))
}

/// Smooth manufactured solution `x1 x2 (L^4 - x1^4)(L^4 - x2^4)`, zero on the
/// boundary of `[-L, L]^2`. Quintic in each variable: the cubic version is
/// reproduced exactly by the five-point stencil.
pub fn polynomial_solution(l: f64, x: [f64; 2]) -> f64 {
    let l4 = l.powi(4);
    x[0] * x[1] * (l4 - x[0].powi(4)) * (l4 - x[1].powi(4))
}

pub fn polynomial_laplacian(l: f64, x: [f64; 2]) -> f64 {
    let l4 = l.powi(4);
    -20.0 * (x[0].powi(3) * x[1] * (l4 - x[1].powi(4)) + x[1].powi(3) * x[0] * (l4 - x[0].powi(4)))
}

pub fn polynomial_probe(grid: &Grid2D, tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveReport)> {
    let l = grid.half_width;
    let f = grid.sample(|x| Ok(polynomial_laplacian(l, x)))?;
    let exact = grid.sample(|x| Ok(polynomial_solution(l, x)))?;
    let (w, mut report) = solve_dirichlet(grid, &f, tol, max_iter)?;
    compare(grid, &w, &exact, &mut report);
    Ok((w, report))
}

/// Least-squares slope of `ln max_error` against `ln h`.
pub fn refinement_slope(reports: &[SolveReport]) -> f64 {
    let pts: Vec<(f64, f64)> =
        reports.iter().filter_map(|r| r.max_error.map(|e| (r.h.ln(), e.ln()))).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    num / den
}

pub fn refinement_table(which: &str, reports: &[SolveReport]) -> ReportTable {
    let mut t = ReportTable::new("refinement", &["N", "h", "iterations", "residual", "max_error", "l2_error"])
        .with_meta("problem", which);
    for r in reports {
        t.push_row(vec![
            r.n as f64,
            r.h,
            r.iterations as f64,
            r.residual,
            r.max_error.unwrap_or(f64::NAN),
            r.l2_error.unwrap_or(f64::NAN),
        ]);
    }
    t.set_meta("slope", refinement_slope(reports));
    let errs: Vec<f64> = reports.iter().filter_map(|r| r.max_error).collect();
    t.check("error_decreasing", errs.windows(2).all(|w| w[1] < w[0]), "max error strictly decreases with N");
    t
}

/// Where [`export_oracle`] evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum OraclePoints {
    /// All `(N+2)^2` nodes of the grid, boundary included.
    Grid(Grid2D),
    List(Vec<Vec<f64>>),
}

impl OraclePoints {
    fn points(&self) -> Vec<Vec<f64>> {
        match self {
            OraclePoints::Grid(g) => {
                let m = g.n + 2;
                (0..m * m).map(|idx| vec![g.line(idx / m), g.line(idx % m)]).collect()
            }
            OraclePoints::List(v) => v.clone(),
        }
    }
}

/// Column names of an oracle table: coordinates, `u`, gradient, upper
/// triangle of the Hessian and the Laplacian; complex constructions get
/// `re_`/`im_` pairs for every value column.
pub fn oracle_columns(n: usize, order: u32) -> Vec<String> {
    let mut values = vec!["u".to_string()];
    values.extend((1..=n).map(|i| format!("d_x{i}")));
    for i in 1..=n {
        for j in i..=n {
            values.push(format!("d_x{i}x{j}"));
        }
    }
    values.push("laplacian".into());
    let mut cols: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    if order == 0 {
        cols.extend(values);
    } else {
        for v in values {
            cols.push(format!("re_{v}"));
            cols.push(format!("im_{v}"));
        }
    }
    cols
}

fn oracle_derivs(n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n]];
    for i in 0..n {
        let mut d = vec![0; n];
        d[i] = 1;
        out.push(d);
    }
    for i in 0..n {
        for j in i..n {
            let mut d = vec![0; n];
            d[i] += 1;
            d[j] += 1;
            out.push(d);
        }
    }
    debug_assert_eq!(out.len(), multi_indices(n, 2).len());
    out
}

/// The oracle rows for `c` at the requested points, with the construction
/// parameters in the metadata under `"params"`.
pub fn oracle_table(c: &Construction, points: &OraclePoints) -> Result<ReportTable> {
    let n = c.n();
    let cols = oracle_columns(n, c.order());
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut table = ReportTable::new("oracle", &col_refs).with_meta("params", c.params());
    if let OraclePoints::Grid(g) = points {
        table.set_meta("grid", g);
    }
    let derivs = oracle_derivs(n);
    let pts = points.points();
    let rows: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|x| {
            if x.len() != n {
                return Err(Error::Domain(format!("oracle point has {} coordinates, n = {n}", x.len())));
            }
            let mut row = x.clone();
            let mut push = |v: num_complex::Complex64| {
                row.push(v.re);
                if c.order() > 0 {
                    row.push(v.im);
                }
            };
            for d in &derivs {
                push(c.eval_global(x, d)?);
            }
            push(c.laplacian_global(x)?);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    for r in rows {
        table.push_row(r);
    }
    Ok(table)
}

pub fn export_oracle(c: &Construction, points: &OraclePoints, format: Format, out: &mut impl Write) -> Result<()> {
    oracle_table(c, points)?.write_to(out, format)
}

/// Recovers the construction parameters stored in an oracle header.
pub fn oracle_params(table: &ReportTable) -> Result<ConstructionParams> {
    let v = table.meta.get("params").ok_or_else(|| Error::Parse("oracle header has no params".into()))?;
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("bad params in oracle header: {e}")))
}
