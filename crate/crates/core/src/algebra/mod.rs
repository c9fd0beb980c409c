//! Symbolic algebra of sums of terms
//! `c(t) * eta^(a)(|x|) * x^alpha * |x|^(mu + nu t) * phi^(m)(-ln|x|^2)`,
//! closed under partial and Wirtinger differentiation.

mod eval;
mod expr;
mod tpoly;

pub use eval::{EvalContext, PreparedPoint};
pub use expr::{Expression, Mode, Term, Wirtinger};
pub use tpoly::TPoly;
