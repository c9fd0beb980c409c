use std::fs;

use serde::{Deserialize, Serialize};

use crate::args::{Cli, CommandArgs, FormatArg, Probe, Suite};
use schauder_core::poisson::PROBE_HALF_WIDTH;
use schauder_core::{Construction, ConstructionParams, EtaProfile, LocalPoint, PhiProfile};

/// A resolved command with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Verify { suite: Suite },
    Eval { point: Option<Vec<f64>>, local: Option<LocalPoint>, deriv: Vec<u32> },
    GridExport { grid: usize, half_width: f64 },
    Solve2d { grids: Vec<usize>, half_width: f64, probe: Probe },
    ExportOracle { source: OracleSource },
    Profile { s_lo: f64, s_hi: f64, per_decade: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleSource {
    Grid { grid: usize, half_width: f64 },
    /// The points themselves, so the header alone reproduces the run.
    Points { points: Vec<Vec<f64>> },
}

/// Everything a run depends on. Echoed into the `config` entry of every
/// output header; `replay` rebuilds the run from it. The output path is not
/// part of it: where the bytes go does not change them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: ConstructionParams,
    pub kmax: Option<usize>,
    pub seed: u64,
    pub budget: Option<usize>,
    pub tol: Option<f64>,
    pub format: FormatArg,
}

/// `(kmax, budget, tol)` defaults; `None` where the command ignores the flag.
fn defaults(cmd: &Command) -> (Option<usize>, Option<usize>, Option<f64>) {
    match cmd {
        Command::Verify { suite } => match suite {
            Suite::Derivatives => (Some(8), Some(100), Some(1e-5)),
            Suite::Bounds => (Some(20), None, Some(0.05)),
            Suite::Blowup => (Some(40), None, Some(1e-9)),
            Suite::Continuity => (Some(25), Some(2000), Some(0.2)),
            Suite::Modulus => (None, Some(200_000), None),
            Suite::Prop1 => (None, Some(200_000), None),
            Suite::Witness => (Some(6), None, None),
        },
        Command::Solve2d { .. } => (None, Some(20_000), Some(1e-10)),
        _ => (None, None, None),
    }
}

pub fn parse_local(s: &str, n: usize) -> Result<LocalPoint, String> {
    let (k, y) = s.split_once(':').ok_or_else(|| format!("--local expects K:y1,y2,..., got `{s}`"))?;
    let k: usize = k.trim().parse().map_err(|_| format!("bad ball index `{k}` in --local"))?;
    let y = parse_point(y, n).map_err(|e| format!("--local: {e}"))?;
    if k == 0 {
        return Err("ball indices start at 1".into());
    }
    Ok(LocalPoint { k, y })
}

fn parse_point(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let p: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad coordinate `{}`", v.trim())))
        .collect::<Result<_, _>>()?;
    check_len(&p, n, "point")?;
    Ok(p)
}

fn check_len<T>(v: &[T], n: usize, what: &str) -> Result<(), String> {
    if v.len() != n {
        return Err(format!("{what} has {} entries, expected n = {n}", v.len()));
    }
    Ok(())
}

fn read_points(path: &std::path::Path, n: usize) -> Result<Vec<Vec<f64>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let pts: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| parse_point(l, n).map_err(|e| format!("{}: line {}: {e}", path.display(), i + 1)))
        .collect::<Result<_, _>>()?;
    if pts.is_empty() {
        return Err(format!("{} contains no points", path.display()));
    }
    Ok(pts)
}

impl RunConfig {
    /// Builds and validates the configuration of a parsed command line.
    /// `replay` is handled by the caller.
    pub fn from_cli(cli: &Cli) -> Result<Self, String> {
        let g = &cli.global;
        let phi: PhiProfile = g.phi.parse().map_err(|e| format!("--phi: {e}"))?;
        let mut params = ConstructionParams::new(g.n, phi, g.order);
        if let Some(a) = g.eta_order {
            params.eta = EtaProfile::new(a);
        }
        let s = &mut params.schedule;
        s.center_scale = g.center_scale.unwrap_or(s.center_scale);
        s.radius_scale = g.radius_scale.unwrap_or(s.radius_scale);
        s.ratio = g.ratio.unwrap_or(s.ratio);
        s.t_offset = g.t_offset.unwrap_or(s.t_offset);
        let n = g.n;
        let command = match &cli.command {
            CommandArgs::Verify { suite } => Command::Verify { suite: *suite },
            CommandArgs::Eval { point, local, deriv } => {
                let local = local.as_deref().map(|l| parse_local(l, n)).transpose()?;
                if point.is_none() && local.is_none() {
                    return Err("eval needs --point or --local".into());
                }
                if let Some(p) = point {
                    check_len(p, n, "--point")?;
                }
                let deriv = deriv.clone().unwrap_or_else(|| vec![0; n]);
                check_len(&deriv, n, "--deriv")?;
                Command::Eval { point: point.clone(), local, deriv }
            }
            CommandArgs::GridExport { grid, half_width } => Command::GridExport { grid: *grid, half_width: *half_width },
            CommandArgs::Solve2d { grids, half_width, probe } => {
                let default_width = match probe {
                    Probe::Construction => PROBE_HALF_WIDTH,
                    Probe::Polynomial => 1.0,
                };
                Command::Solve2d { grids: grids.clone(), half_width: half_width.unwrap_or(default_width), probe: *probe }
            }
            CommandArgs::ExportOracle { grid, points, half_width } => {
                let source = match (grid, points) {
                    (Some(grid), _) => OracleSource::Grid { grid: *grid, half_width: *half_width },
                    (None, Some(path)) => OracleSource::Points { points: read_points(path, n)? },
                    (None, None) => return Err("export-oracle needs --grid or --points".into()),
                };
                Command::ExportOracle { source }
            }
            CommandArgs::Profile { s_lo, s_hi, per_decade } => {
                Command::Profile { s_lo: *s_lo, s_hi: *s_hi, per_decade: *per_decade }
            }
            CommandArgs::Replay { .. } => return Err("replay carries its own configuration".into()),
        };
        let (kmax, budget, tol) = defaults(&command);
        let cfg = RunConfig {
            command,
            params,
            kmax: g.kmax.or(kmax),
            seed: g.seed,
            budget: g.budget.or(budget),
            tol: g.tol.or(tol),
            format: g.format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        let p = &self.params;
        if p.n < 2 {
            return Err(format!("--n must be >= 2, got {}", p.n));
        }
        if p.eta.max_order < 2 {
            return Err(format!("--eta-order must be >= 2, got {}", p.eta.max_order));
        }
        Construction::new(p.clone()).map_err(|e| e.to_string())?;
        if self.kmax == Some(0) {
            return Err("--kmax must be >= 1".into());
        }
        if self.budget == Some(0) {
            return Err("--budget must be >= 1".into());
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--tol must be positive and finite, got {t}"));
            }
        }
        let real_only = |what: &str| {
            if p.order != 0 {
                Err(format!("{what} runs on the order-0 construction (got --order {})", p.order))
            } else {
                Ok(())
            }
        };
        let plane = |what: &str| {
            if p.n != 2 {
                Err(format!("{what} needs --n 2 (got {})", p.n))
            } else {
                Ok(())
            }
        };
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{what} must be positive and finite, got {v}"))
            }
        };
        match &self.command {
            Command::Verify { suite } => {
                let kmax = self.kmax.unwrap_or(1);
                match suite {
                    Suite::Derivatives => {
                        real_only("verify derivatives")?;
                        if kmax > p.k_global_max {
                            return Err(format!("--kmax {kmax} exceeds the global-coordinate limit {}", p.k_global_max));
                        }
                    }
                    Suite::Modulus => real_only("verify modulus")?,
                    Suite::Prop1 => real_only("verify prop1")?,
                    Suite::Blowup | Suite::Continuity | Suite::Witness if kmax > p.k_table => {
                        return Err(format!("--kmax {kmax} exceeds the table size {}", p.k_table));
                    }
                    _ => {}
                }
            }
            Command::Eval { local, .. } => {
                if let Some(l) = local {
                    if l.k > p.k_table {
                        return Err(format!("ball {} exceeds the table size {}", l.k, p.k_table));
                    }
                }
            }
            Command::GridExport { grid, half_width } => {
                if *grid < 2 {
                    return Err("--N must be >= 2".into());
                }
                positive(*half_width, "--half-width")?;
            }
            Command::Solve2d { grids, half_width, probe } => {
                if grids.is_empty() || grids.contains(&0) {
                    return Err("--N needs one or more positive resolutions".into());
                }
                positive(*half_width, "--half-width")?;
                if *probe == Probe::Construction {
                    plane("solve2d")?;
                    real_only("solve2d")?;
                }
            }
            Command::ExportOracle { source } => match source {
                OracleSource::Grid { grid, half_width } => {
                    plane("export-oracle --grid")?;
                    if *grid == 0 {
                        return Err("--grid must be >= 1".into());
                    }
                    positive(*half_width, "--half-width")?;
                }
                OracleSource::Points { points } => {
                    for pt in points {
                        check_len(pt, p.n, "oracle point")?;
                    }
                }
            },
            Command::Profile { s_lo, s_hi, per_decade } => {
                if !(*s_lo > p.phi.s_min() && s_hi > s_lo && s_hi.is_finite()) {
                    return Err(format!(
                        "profile range needs {} < s_lo < s_hi < inf, got [{s_lo}, {s_hi}]",
                        p.phi.s_min()
                    ));
                }
                if *per_decade == 0 {
                    return Err("--per-decade must be >= 1".into());
                }
            }
        }
        Ok(())
    }
}
