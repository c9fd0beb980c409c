use serde::{Deserialize, Serialize};
use std::fmt;

/// Polynomial in the smoothing parameter `t`, coefficients in ascending order.
///
/// Every coefficient produced by differentiation is a small dyadic rational,
/// so additions and products are exact in `f64` and cancellation to zero is
/// detected exactly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TPoly(Vec<f64>);

impl TPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        TPoly(coeffs)
    }

    pub fn zero() -> Self {
        TPoly(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        TPoly::new(vec![c])
    }

    /// `mu + nu t`.
    pub fn affine(mu: f64, nu: f64) -> Self {
        TPoly::new(vec![mu, nu])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let len = self.0.len().max(other.0.len());
        let c = (0..len)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
            .collect();
        TPoly::new(c)
    }

    pub fn mul(&self, other: &TPoly) -> TPoly {
        if self.is_zero() || other.is_zero() {
            return TPoly::zero();
        }
        let mut c = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        TPoly::new(c)
    }

    pub fn scale(&self, a: f64) -> TPoly {
        TPoly::new(self.0.iter().map(|c| c * a).collect())
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c < 0.0 { "-" } else { "+" })?;
            }
            first = false;
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag == 1.0 {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}
