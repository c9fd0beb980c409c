//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] stores normalized Taylor coefficients `c[i] = f^(i)(x0) / i!` up to a
//! fixed order. Arithmetic propagates all coefficients at once, so composing a few
//! elementary functions yields every derivative of the composite without hand
//! written chain rules.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// The independent variable `x` expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// The `m`-th derivative, `m! * c[m]`.
    pub fn derivative(&self, m: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=m {
            fact *= i as f64;
        }
        self.c[m] * fact
    }

    /// All derivatives `f, f', ..., f^(order)`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.c
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if i >= 2 {
                    fact *= i as f64;
                }
                c * fact
            })
            .collect()
    }

    pub fn scale(&self, a: f64) -> Self {
        Jet { c: self.c.iter().map(|x| x * a).collect() }
    }

    pub fn add_scalar(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += a;
        out
    }

    pub fn recip(&self) -> Self {
        let n = self.c.len();
        let a = &self.c;
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Jet { c: b }
    }

    pub fn exp(&self) -> Self {
        let n = self.c.len();
        let a = &self.c;
        let mut b = vec![0.0; n];
        b[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            b[k] = s / k as f64;
        }
        Jet { c: b }
    }

    /// Natural logarithm; requires a positive constant term.
    pub fn ln(&self) -> Self {
        let n = self.c.len();
        let a = &self.c;
        let mut b = vec![0.0; n];
        b[0] = a[0].ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * b[j] * a[k - j]).sum();
            b[k] = (a[k] - s / k as f64) / a[0];
        }
        Jet { c: b }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        let mut c = vec![0.0; n];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = (0..=i).map(|j| self.c[j] * rhs.c[i - j]).sum();
        }
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
