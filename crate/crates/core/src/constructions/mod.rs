//! The named functions: the bare block `v`, the smoothed blocks `u_t`, the
//! composites over disjoint balls and the two planar classic examples.

mod classic;
mod composite;
mod schedule;

pub use classic::{classic_example_eval, classic_example_laplacian, ClassicExample};
pub use composite::{Construction, ConstructionParams, LocalPoint};
pub use schedule::{BallParams, Schedule};

use crate::algebra::{Expression, Mode, TPoly, Term};
use crate::error::Result;

/// `u_t` vanishes for `|y| >= 2/3`.
pub const fn local_support_radius() -> f64 {
    2.0 / 3.0
}

/// `v = x1 x2 phi(-ln|x|^2)`.
pub fn build_v(n: usize) -> Result<Expression> {
    let mut mono = vec![0; n.max(2)];
    mono[0] = 1;
    mono[1] = 1;
    Expression::from_terms(
        Mode::Real,
        n,
        vec![Term { coeff: TPoly::constant(1.0), eta: None, mono, radial: (0, 0), phi: Some(0) }],
    )
}

/// `u_t = eta(|x|) x1 x2 |x|^{2t} phi(-ln|x|^2)` for `order = 0`, and
/// `eta(|x|) z^{order+2} |x|^{2t} phi(-ln|x|^2)` in complex mode otherwise.
pub fn build_u_t(n: usize, order: u32) -> Result<Expression> {
    let mut mono = vec![0; n.max(2)];
    let mode = if order == 0 {
        mono[0] = 1;
        mono[1] = 1;
        Mode::Real
    } else {
        mono[0] = order + 2;
        Mode::Complex
    };
    Expression::from_terms(
        mode,
        n,
        vec![Term { coeff: TPoly::constant(1.0), eta: Some(0), mono, radial: (0, 2), phi: Some(0) }],
    )
}
