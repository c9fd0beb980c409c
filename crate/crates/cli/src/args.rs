use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Verification laboratory for twice-differentiable functions with
/// continuous Laplacian and unbounded Hessian.
///
/// Exit status: 0 when every check passes, 1 when a check fails or a
/// computation errors, 2 on invalid usage.
#[derive(Debug, Parser)]
#[command(name = "schauder", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Profile phi: power:ALPHA | log | iterlog:DEPTH[:SHIFT].
    #[arg(long, global = true, default_value = "log")]
    pub phi: String,
    /// Highest derivative order supplied by the cutoff eta.
    #[arg(long, global = true)]
    pub eta_order: Option<usize>,
    /// Dimension.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    /// 0 for the x1 x2 blocks, k >= 1 for the z^(k+2) blocks.
    #[arg(long, global = true, default_value_t = 0)]
    pub order: u32,
    /// Largest ball index (or row count) of a table; default depends on the command.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Sample budget; meaning and default depend on the command.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Tolerance; meaning and default depend on the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Suppress the check summary on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Schedule override: R_k = center_scale * ratio^k.
    #[arg(long, global = true)]
    pub center_scale: Option<f64>,
    /// Schedule override: r_k = radius_scale * ratio^k.
    #[arg(long, global = true)]
    pub radius_scale: Option<f64>,
    #[arg(long, global = true)]
    pub ratio: Option<f64>,
    /// Schedule override: t_k = 1 / (4 (k + t_offset)).
    #[arg(long, global = true)]
    pub t_offset: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Analytic derivatives of v, u_t and u against finite differences.
    Derivatives,
    /// B1, B2, B3 scans and the non-uniformity rows.
    Bounds,
    /// Top-order derivative at the sample points against its closed form.
    Blowup,
    /// Per-ball Laplacian, gradient quotient and diagonal Hessian decay.
    Continuity,
    /// Modulus of continuity of f = Delta u.
    Modulus,
    /// Gradient-modulus estimate for u.
    Prop1,
    /// Difference quotients of the first derivatives at the origin.
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Probe {
    /// f = Delta u of the order-0 composite.
    Construction,
    /// Manufactured polynomial solution.
    Polynomial,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Evaluate a derivative of u at one point.
    Eval {
        /// Global coordinates x1,x2,...
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "local")]
        point: Option<Vec<f64>>,
        /// Local coordinates K:y1,y2,... (ball K, x = R_K zeta0 + r_K y).
        #[arg(long, allow_hyphen_values = true)]
        local: Option<String>,
        /// Multi-index d1,d2,... (all zeros when absent).
        #[arg(long, value_delimiter = ',')]
        deriv: Option<Vec<u32>>,
    },
    /// Oracle rows on an N x N grid of the x1 x2 plane (other coordinates 0).
    GridExport {
        #[arg(long = "N", default_value_t = 33)]
        grid: usize,
        #[arg(long, default_value_t = 0.125)]
        half_width: f64,
    },
    /// Solve the 2-d Dirichlet problem with zero boundary data.
    Solve2d {
        /// Interior resolutions, comma separated.
        #[arg(long = "N", value_delimiter = ',', default_value = "257")]
        grids: Vec<usize>,
        /// Half-width of the square (default 0.125 for the construction, 1 for the polynomial).
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long, value_enum, default_value_t = Probe::Construction)]
        probe: Probe,
    },
    /// Manufactured-solution oracle for external solvers.
    ExportOracle {
        /// Grid2D resolution; rows cover every node including the boundary (n = 2).
        #[arg(long, conflicts_with = "points", required_unless_present = "points")]
        grid: Option<usize>,
        /// File of comma-separated points, one per line.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 0.125)]
        half_width: f64,
    },
    /// Tabulate phi and its derivatives and check admissibility.
    Profile {
        #[arg(long, default_value_t = 1.0)]
        s_lo: f64,
        #[arg(long, default_value_t = 1e8)]
        s_hi: f64,
        #[arg(long, default_value_t = 10)]
        per_decade: usize,
    },
    /// Re-run the command recorded in an output file's header.
    Replay { file: PathBuf },
}
