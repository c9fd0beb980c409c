//! Counterexample functions with continuous Laplacian and unbounded Hessian.
//!
//! The crate builds the functions symbolically ([`algebra`]), assembles the
//! composite constructions over disjoint shrinking balls ([`constructions`]),
//! certifies their limits and blow-ups numerically ([`verification`]) and
//! feeds them to a small Dirichlet solver ([`poisson`]).

pub mod algebra;
pub mod constructions;
pub mod error;
pub mod jet;
pub mod poisson;
pub mod profiles;
pub mod report;
pub mod verification;

pub use algebra::{EvalContext, Expression, Mode, PreparedPoint, TPoly, Term, Wirtinger};
pub use constructions::{build_u_t, build_v, Construction, ConstructionParams, LocalPoint, Schedule};
pub use error::{Error, Result};
pub use jet::Jet;
pub use poisson::{Grid2D, SolveReport};
pub use profiles::{EtaProfile, PhiKind, PhiProfile};
pub use report::{Check, Format, ReportTable};
