use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};

/// The two planar examples `(x^2 - y^2) G(ln(-ln(x^2 + y^2)))` with
/// `G = id` (unbounded Hessian) or `G = sin` (bounded Hessian).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicExample {
    LogLog,
    SinLogLog,
}

impl FromStr for ClassicExample {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log_log" => Ok(ClassicExample::LogLog),
            "sin_log_log" => Ok(ClassicExample::SinLogLog),
            other => Err(Error::Parse(format!("unknown classic example `{other}`"))),
        }
    }
}

impl ClassicExample {
    /// `G(l), G'(l), G''(l)`.
    fn outer(self, l: f64) -> [f64; 3] {
        match self {
            ClassicExample::LogLog => [l, 1.0, 0.0],
            ClassicExample::SinLogLog => [l.sin(), l.cos(), -l.sin()],
        }
    }

    /// `h(s) = G(ln(-ln s))` and its first two `s`-derivatives.
    fn radial(self, s: f64) -> [f64; 3] {
        let sigma = -s.ln();
        let [g, g1, g2] = self.outer(sigma.ln());
        let ss = s * sigma;
        [g, -g1 / ss, (g2 + g1 * (sigma - 1.0)) / (ss * ss)]
    }
}

/// Value or partial derivative (`deriv = [d1, d2]`, `d1 + d2 <= 2`) of a
/// classic example on the punctured disk `0 < x^2 + y^2 <= 1/4`.
pub fn classic_example_eval(which: ClassicExample, p: [f64; 2], deriv: [u32; 2]) -> Result<f64> {
    let [x, y] = p;
    let s = x * x + y * y;
    if !(s <= 0.25) {
        return Err(Error::Domain(format!("classic example needs x^2 + y^2 <= 1/4, got {s}")));
    }
    let order = deriv[0] + deriv[1];
    if order > 2 {
        return Err(Error::Order { requested: order as usize, max: 2 });
    }
    if s == 0.0 {
        return match order {
            0 | 1 => Ok(0.0),
            _ => Err(Error::Indeterminate("second derivatives of the classic examples at the origin".into())),
        };
    }
    let [h, h1, h2] = which.radial(s);
    let poly = x * x - y * y;
    Ok(match deriv {
        [0, 0] => poly * h,
        [1, 0] => 2.0 * x * h + poly * h1 * 2.0 * x,
        [0, 1] => -2.0 * y * h + poly * h1 * 2.0 * y,
        [2, 0] => 2.0 * h + 8.0 * x * x * h1 + poly * (4.0 * x * x * h2 + 2.0 * h1),
        [0, 2] => -2.0 * h - 8.0 * y * y * h1 + poly * (4.0 * y * y * h2 + 2.0 * h1),
        [1, 1] => poly * 4.0 * x * y * h2,
        _ => unreachable!("order checked above"),
    })
}

pub fn classic_example_laplacian(which: ClassicExample, p: [f64; 2]) -> Result<f64> {
    Ok(classic_example_eval(which, p, [2, 0])? + classic_example_eval(which, p, [0, 2])?)
}
