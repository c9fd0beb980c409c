//! Derivative formulas typed in by hand, term by term, from the printed
//! displays. They use the profiles for eta and phi values but nothing from the
//! term algebra.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use schauder_core::verification::sampling::unit_vector;
use schauder_core::{EtaProfile, PhiProfile, PreparedPoint};

/// Point data shared by every display: `|x|`, `eta^(a)(|x|)` and
/// `phi^(m)(-ln|x|^2)`.
pub struct At {
    pub x: Vec<f64>,
    pub r: f64,
    pub eta: [f64; 3],
    pub phi: [f64; 3],
    pub t: f64,
}

impl At {
    /// `|x|` comes from the evaluator's point preparation: near the plateau
    /// edges `eta^(a)` amplifies a one-ulp difference in `|x|` by ~1e6.
    pub fn new(x: &[f64], phi: &PhiProfile, t: f64) -> At {
        let r = PreparedPoint::new(x).unwrap().r();
        let s = -(r * r).ln();
        let eta = EtaProfile::default();
        At {
            x: x.to_vec(),
            r,
            eta: [eta.eval(0, r).unwrap(), eta.eval(1, r).unwrap(), eta.eval(2, r).unwrap()],
            phi: [phi.eval(0, s).unwrap(), phi.eval(1, s).unwrap(), phi.eval(2, s).unwrap()],
            t,
        }
    }

    fn rp(&self, p: f64) -> f64 {
        self.r.powf(p)
    }

    fn z(&self) -> Complex64 {
        Complex64::new(self.x[0], self.x[1])
    }
}

/// Running sum that also tracks the total magnitude of its terms, used as the
/// scale of the relative comparison.
#[derive(Default, Clone, Copy)]
pub struct Sum {
    pub value: f64,
    pub magnitude: f64,
}

impl Sum {
    fn add(&mut self, term: f64) {
        self.value += term;
        self.magnitude += term.abs();
    }
}

#[derive(Default, Clone, Copy)]
pub struct CSum {
    pub value: Complex64,
    pub magnitude: f64,
}

impl CSum {
    fn add(&mut self, term: Complex64) {
        self.value += term;
        self.magnitude += term.norm();
    }
}

fn sum(terms: &[f64]) -> Sum {
    let mut s = Sum::default();
    for &t in terms {
        s.add(t);
    }
    s
}

fn csum(terms: &[Complex64]) -> CSum {
    let mut s = CSum::default();
    for &t in terms {
        s.add(t);
    }
    s
}

// ---- v = x1 x2 phi(-ln|x|^2) ----

pub fn v_x1(a: &At) -> Sum {
    let (x1, x2, r2) = (a.x[0], a.x[1], a.r * a.r);
    sum(&[x2 * a.phi[0], -2.0 * x1 * x1 * x2 / r2 * a.phi[1]])
}

pub fn v_x2(a: &At) -> Sum {
    let (x1, x2, r2) = (a.x[0], a.x[1], a.r * a.r);
    sum(&[x1 * a.phi[0], -2.0 * x1 * x2 * x2 / r2 * a.phi[1]])
}

pub fn v_xi(a: &At, i: usize) -> Sum {
    let (x1, x2, xi, r2) = (a.x[0], a.x[1], a.x[i], a.r * a.r);
    sum(&[-2.0 * x1 * x2 * xi / r2 * a.phi[1]])
}

pub fn v_x1x1(a: &At) -> Sum {
    let (x1, x2, r2) = (a.x[0], a.x[1], a.r * a.r);
    let r4 = r2 * r2;
    sum(&[
        -6.0 * x1 * x2 / r2 * a.phi[1],
        4.0 * x1.powi(3) * x2 / r4 * a.phi[1],
        4.0 * x1.powi(3) * x2 / r4 * a.phi[2],
    ])
}

pub fn v_x2x2(a: &At) -> Sum {
    let (x1, x2, r2) = (a.x[0], a.x[1], a.r * a.r);
    let r4 = r2 * r2;
    sum(&[
        -6.0 * x1 * x2 / r2 * a.phi[1],
        4.0 * x1 * x2.powi(3) / r4 * a.phi[1],
        4.0 * x1 * x2.powi(3) / r4 * a.phi[2],
    ])
}

pub fn v_xixi(a: &At, i: usize) -> Sum {
    let (x1, x2, xi, r2) = (a.x[0], a.x[1], a.x[i], a.r * a.r);
    let r4 = r2 * r2;
    sum(&[
        -2.0 * x1 * x2 / r2 * a.phi[1],
        4.0 * x1 * x2 * xi * xi / r4 * a.phi[1],
        4.0 * x1 * x2 * xi * xi / r4 * a.phi[2],
    ])
}

pub fn v_x1x2(a: &At) -> Sum {
    let (x1, x2, r2) = (a.x[0], a.x[1], a.r * a.r);
    let r4 = r2 * r2;
    sum(&[
        a.phi[0],
        -2.0 * (x1 * x1 + x2 * x2) / r2 * a.phi[1],
        4.0 * x1 * x1 * x2 * x2 / r4 * a.phi[1],
        4.0 * x1 * x1 * x2 * x2 / r4 * a.phi[2],
    ])
}

pub fn v_x1xi(a: &At, i: usize) -> Sum {
    let (x1, x2, xi, r2) = (a.x[0], a.x[1], a.x[i], a.r * a.r);
    let r4 = r2 * r2;
    sum(&[
        -2.0 * x2 * xi / r2 * a.phi[1],
        4.0 * x1 * x1 * x2 * xi / r4 * a.phi[1],
        4.0 * x1 * x1 * x2 * xi / r4 * a.phi[2],
    ])
}

pub fn v_x2xi(a: &At, i: usize) -> Sum {
    let (x1, x2, xi, r2) = (a.x[0], a.x[1], a.x[i], a.r * a.r);
    let r4 = r2 * r2;
    sum(&[
        -2.0 * x1 * xi / r2 * a.phi[1],
        4.0 * x1 * x2 * x2 * xi / r4 * a.phi[1],
        4.0 * x1 * x2 * x2 * xi / r4 * a.phi[2],
    ])
}

pub fn v_xjxi(a: &At, i: usize, j: usize) -> Sum {
    let (x1, x2, xi, xj, r2) = (a.x[0], a.x[1], a.x[i], a.x[j], a.r * a.r);
    let r4 = r2 * r2;
    let delta = if i == j { 1.0 } else { 0.0 };
    sum(&[
        -2.0 * x1 * x2 / r2 * delta * a.phi[1],
        4.0 * x1 * x2 * xi * xj / r4 * a.phi[1],
        4.0 * x1 * x2 * xi * xj / r4 * a.phi[2],
    ])
}

// ---- u_t = eta(|x|) x1 x2 |x|^{2t} phi(-ln|x|^2) ----

pub fn ut_x1(a: &At) -> Sum {
    let (x1, x2, t) = (a.x[0], a.x[1], a.t);
    let [e0, e1, _] = a.eta;
    let [p0, p1, _] = a.phi;
    sum(&[
        e1 * x1 * x1 * x2 * a.rp(2.0 * t - 1.0) * p0,
        e0 * x2 * a.rp(2.0 * t) * p0,
        2.0 * t * e0 * x1 * x1 * x2 * a.rp(2.0 * t - 2.0) * p0,
        -2.0 * e0 * x1 * x1 * x2 * a.rp(2.0 * t - 2.0) * p1,
    ])
}

pub fn ut_x2(a: &At) -> Sum {
    let (x1, x2, t) = (a.x[0], a.x[1], a.t);
    let [e0, e1, _] = a.eta;
    let [p0, p1, _] = a.phi;
    sum(&[
        e1 * x1 * x2 * x2 * a.rp(2.0 * t - 1.0) * p0,
        e0 * x1 * a.rp(2.0 * t) * p0,
        2.0 * t * e0 * x1 * x2 * x2 * a.rp(2.0 * t - 2.0) * p0,
        -2.0 * e0 * x1 * x2 * x2 * a.rp(2.0 * t - 2.0) * p1,
    ])
}

pub fn ut_xi(a: &At, i: usize) -> Sum {
    let (x1, x2, xi, t) = (a.x[0], a.x[1], a.x[i], a.t);
    let [e0, e1, _] = a.eta;
    let [p0, p1, _] = a.phi;
    sum(&[
        e1 * x1 * x2 * xi * a.rp(2.0 * t - 1.0) * p0,
        2.0 * t * e0 * x1 * x2 * xi * a.rp(2.0 * t - 2.0) * p0,
        -2.0 * e0 * x1 * x2 * xi * a.rp(2.0 * t - 2.0) * p1,
    ])
}

/// `d^2 u_t / dx_1^2` term by term in printed order. `literal` keeps the
/// printed coefficient of `eta x1 x2 |x|^{2t-2} phi'` (-2 and -6); otherwise
/// the -6 term becomes -4, which is the value the chain rule produces.
pub fn ut_x1x1(a: &At, literal: bool) -> Sum {
    ut_diag12(a, a.x[0], a.x[1], literal)
}

pub fn ut_x2x2(a: &At, literal: bool) -> Sum {
    ut_diag12(a, a.x[1], a.x[0], literal)
}

/// `p` is the differentiated coordinate, `q` the other of `x1, x2`.
fn ut_diag12(a: &At, p: f64, q: f64, literal: bool) -> Sum {
    let t = a.t;
    let [e0, e1, e2] = a.eta;
    let [p0, p1, p2] = a.phi;
    let m3 = p.powi(3) * q;
    let m1 = p * q;
    let six = if literal { 6.0 } else { 4.0 };
    sum(&[
        e2 * m3 * a.rp(2.0 * t - 2.0) * p0,
        2.0 * e1 * m1 * a.rp(2.0 * t - 1.0) * p0,
        (4.0 * t - 1.0) * e1 * m3 * a.rp(2.0 * t - 3.0) * p0,
        e1 * m1 * a.rp(2.0 * t - 1.0) * p0,
        6.0 * t * e0 * m1 * a.rp(2.0 * t - 2.0) * p0,
        -2.0 * e0 * m1 * a.rp(2.0 * t - 2.0) * p1,
        2.0 * t * (2.0 * t - 2.0) * e0 * m3 * a.rp(2.0 * t - 4.0) * p0,
        -4.0 * t * e0 * m3 * a.rp(2.0 * t - 4.0) * p1,
        -4.0 * e1 * m3 * a.rp(2.0 * t - 3.0) * p1,
        -six * e0 * m1 * a.rp(2.0 * t - 2.0) * p1,
        -2.0 * (2.0 * t - 2.0) * e0 * m3 * a.rp(2.0 * t - 4.0) * p1,
        4.0 * e0 * m3 * a.rp(2.0 * t - 4.0) * p2,
    ])
}

pub fn ut_xixi(a: &At, i: usize) -> Sum {
    let (x1, x2, xi, t) = (a.x[0], a.x[1], a.x[i], a.t);
    let [e0, e1, e2] = a.eta;
    let [p0, p1, p2] = a.phi;
    let m = x1 * x2;
    let mi = x1 * x2 * xi * xi;
    sum(&[
        e2 * mi * a.rp(2.0 * t - 2.0) * p0,
        e1 * m * a.rp(2.0 * t - 1.0) * p0,
        (4.0 * t - 1.0) * e1 * mi * a.rp(2.0 * t - 3.0) * p0,
        -2.0 * e1 * mi * a.rp(2.0 * t - 3.0) * p1,
        2.0 * t * e0 * m * a.rp(2.0 * t - 2.0) * p0,
        2.0 * t * (2.0 * t - 2.0) * e0 * mi * a.rp(2.0 * t - 4.0) * p0,
        (4.0 - 8.0 * t) * e0 * mi * a.rp(2.0 * t - 4.0) * p1,
        -2.0 * e1 * mi * a.rp(2.0 * t - 3.0) * p1,
        -2.0 * e0 * m * a.rp(2.0 * t - 2.0) * p1,
        4.0 * e0 * mi * a.rp(2.0 * t - 4.0) * p2,
    ])
}

/// `d^2 u_t / dx_1 dx_2`. The printed display carries
/// `-4 eta' x1^2 x2^2 |x|^{2t-3} phi'` twice; `literal = false` keeps only one.
pub fn ut_x1x2(a: &At, literal: bool) -> Sum {
    let (x1, x2, t) = (a.x[0], a.x[1], a.t);
    let [e0, e1, e2] = a.eta;
    let [p0, p1, p2] = a.phi;
    let q = x1 * x1 * x2 * x2;
    let s = x1 * x1 + x2 * x2;
    let mut terms = vec![
        e2 * q * a.rp(2.0 * t - 2.0) * p0,
        e1 * s * a.rp(2.0 * t - 1.0) * p0,
        (4.0 * t - 1.0) * e1 * q * a.rp(2.0 * t - 3.0) * p0,
        -4.0 * e1 * q * a.rp(2.0 * t - 3.0) * p1,
        e0 * a.rp(2.0 * t) * p0,
        2.0 * t * e0 * s * a.rp(2.0 * t - 2.0) * p0,
        -2.0 * e0 * s * a.rp(2.0 * t - 2.0) * p1,
        2.0 * t * (2.0 * t - 2.0) * e0 * q * a.rp(2.0 * t - 4.0) * p0,
        -4.0 * t * e0 * q * a.rp(2.0 * t - 4.0) * p1,
    ];
    if literal {
        terms.push(-4.0 * e1 * q * a.rp(2.0 * t - 3.0) * p1);
    }
    terms.push(-2.0 * (2.0 * t - 2.0) * e0 * q * a.rp(2.0 * t - 4.0) * p1);
    terms.push(4.0 * e0 * q * a.rp(2.0 * t - 4.0) * p2);
    sum(&terms)
}

// ---- higher order: u_t = eta(|x|) z^{k+2} |x|^{2t} phi(-ln|x|^2) ----

pub fn hut_z(a: &At, k: u32) -> CSum {
    let t = a.t;
    let (z, zb) = (a.z(), a.z().conj());
    let [e0, e1, _] = a.eta;
    let [p0, p1, _] = a.phi;
    let kk = k as f64;
    let zk = |p: u32| z.powu(p);
    csum(&[
        (kk + 2.0) * e0 * zk(k + 1) * a.rp(2.0 * t) * p0,
        0.5 * e1 * zk(k + 2) * zb * a.rp(2.0 * t - 1.0) * p0,
        t * e0 * zk(k + 2) * zb * a.rp(2.0 * t - 2.0) * p0,
        -e0 * zk(k + 2) * zb * a.rp(2.0 * t - 2.0) * p1,
    ])
}

/// `d^2 u_t / dz^2`; `literal` keeps the printed `(4t-1)/2` on the
/// `eta' z^{k+2} zbar^2 |x|^{2t-3} phi` term instead of `(4t-1)/4`.
pub fn hut_zz(a: &At, k: u32, literal: bool) -> CSum {
    let t = a.t;
    let (z, zb) = (a.z(), a.z().conj());
    let [e0, e1, e2] = a.eta;
    let [p0, p1, p2] = a.phi;
    let kk = k as f64;
    let zk = |p: u32| z.powu(p);
    let zb2 = zb * zb;
    let c = if literal { (4.0 * t - 1.0) / 2.0 } else { (4.0 * t - 1.0) / 4.0 };
    csum(&[
        (kk + 1.0) * (kk + 2.0) * e0 * zk(k) * a.rp(2.0 * t) * p0,
        0.25 * e2 * zk(k + 2) * zb2 * a.rp(2.0 * t - 2.0) * p0,
        (kk + 2.0) * e1 * zk(k + 1) * zb * a.rp(2.0 * t - 1.0) * p0,
        c * e1 * zk(k + 2) * zb2 * a.rp(2.0 * t - 3.0) * p0,
        2.0 * t * (kk + 2.0) * e0 * zk(k + 1) * zb * a.rp(2.0 * t - 2.0) * p0,
        t * (t - 1.0) * e0 * zk(k + 2) * zb2 * a.rp(2.0 * t - 4.0) * p0,
        -e1 * zk(k + 2) * zb2 * a.rp(2.0 * t - 3.0) * p1,
        -2.0 * (kk + 2.0) * e0 * zk(k + 1) * zb * a.rp(2.0 * t - 2.0) * p1,
        -(2.0 * t - 1.0) * e0 * zk(k + 2) * zb2 * a.rp(2.0 * t - 4.0) * p1,
        e0 * zk(k + 2) * zb2 * a.rp(2.0 * t - 4.0) * p2,
    ])
}

/// `d^2 u_t / dzbar dz`. The printed display has `phi` where the fourth term
/// needs `phi'`, and `eta'` where the ninth term needs `eta`; `literal`
/// reproduces the print.
pub fn hut_zbz(a: &At, k: u32, literal: bool) -> CSum {
    let t = a.t;
    let (z, zb) = (a.z(), a.z().conj());
    let [e0, e1, e2] = a.eta;
    let [p0, p1, p2] = a.phi;
    let kk = k as f64;
    let zk = |p: u32| z.powu(p);
    let (fourth_phi, ninth_eta) = if literal { (p0, e1) } else { (p1, e0) };
    csum(&[
        0.25 * e2 * zk(k + 3) * zb * a.rp(2.0 * t - 2.0) * p0,
        (kk + 3.0) / 2.0 * e1 * zk(k + 2) * a.rp(2.0 * t - 1.0) * p0,
        (4.0 * t - 1.0) / 4.0 * e1 * zk(k + 3) * zb * a.rp(2.0 * t - 3.0) * p0,
        -e1 * zk(k + 3) * zb * a.rp(2.0 * t - 3.0) * fourth_phi,
        (kk + 3.0) * t * e0 * zk(k + 2) * a.rp(2.0 * t - 2.0) * p0,
        -(kk + 2.0) * e0 * zk(k + 2) * a.rp(2.0 * t - 2.0) * p1,
        t * (t - 1.0) * e0 * zk(k + 3) * zb * a.rp(2.0 * t - 4.0) * p0,
        -(2.0 * t - 1.0) * e0 * zk(k + 3) * zb * a.rp(2.0 * t - 4.0) * p1,
        -ninth_eta * zk(k + 2) * a.rp(2.0 * t - 2.0) * p1,
        e0 * zk(k + 3) * zb * a.rp(2.0 * t - 4.0) * p2,
    ])
}

pub fn hut_xjxj(a: &At, k: u32, j: usize) -> CSum {
    let t = a.t;
    let z = a.z();
    let xj2 = a.x[j] * a.x[j];
    let [e0, e1, e2] = a.eta;
    let [p0, p1, p2] = a.phi;
    let w = z.powu(k + 2);
    csum(&[
        e2 * w * xj2 * a.rp(2.0 * t - 2.0) * p0,
        e1 * w * a.rp(2.0 * t - 1.0) * p0,
        (4.0 * t - 1.0) * e1 * w * xj2 * a.rp(2.0 * t - 3.0) * p0,
        -4.0 * e1 * w * xj2 * a.rp(2.0 * t - 3.0) * p1,
        2.0 * t * e0 * w * a.rp(2.0 * t - 2.0) * p0,
        2.0 * t * (2.0 * t - 2.0) * e0 * w * xj2 * a.rp(2.0 * t - 4.0) * p0,
        (4.0 - 8.0 * t) * e0 * w * xj2 * a.rp(2.0 * t - 4.0) * p1,
        -2.0 * e0 * w * a.rp(2.0 * t - 2.0) * p1,
        4.0 * e0 * w * xj2 * a.rp(2.0 * t - 4.0) * p2,
    ])
}

/// Even draws: `|x|` log-uniform in `[lo, hi]`. Odd draws: `|x|` uniform in
/// the cutoff ramp `[0.45, 0.7]`.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize, i: usize, lo: f64, hi: f64) -> Vec<f64> {
    let dir = unit_vector(rng, n);
    let r = if i % 2 == 0 {
        (lo.ln() + (hi / lo).ln() * rng.random::<f64>()).exp()
    } else {
        0.45 + 0.25 * rng.random::<f64>()
    };
    dir.iter().map(|d| d * r).collect()
}

pub fn rel_err(got: f64, want: f64, scale: f64) -> f64 {
    (got - want).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Truncated Taylor coefficients of `g(rho0 + d) = (rho0 + d)^t phi(-ln(rho0 + d))`
/// in `d`, built from plain series arithmetic.
pub fn radial_profile_series(phi: &PhiProfile, t: f64, rho0: f64, order: usize) -> Vec<f64> {
    // ln(rho0 + d) - ln(rho0) = sum_{m >= 1} (-1)^{m+1} (d / rho0)^m / m
    let mut dl = vec![0.0; order + 1];
    for (m, c) in dl.iter_mut().enumerate().skip(1) {
        *c = if m % 2 == 1 { 1.0 } else { -1.0 } / (m as f64 * rho0.powi(m as i32));
    }
    // rho^t = rho0^t exp(t dl)
    let a: Vec<f64> = dl.iter().map(|c| t * c).collect();
    let mut e = vec![0.0; order + 1];
    e[0] = 1.0;
    for n in 1..=order {
        e[n] = (1..=n).map(|k| k as f64 * a[k] * e[n - k]).sum::<f64>() / n as f64;
    }
    let pow_t: Vec<f64> = e.iter().map(|c| c * rho0.powf(t)).collect();
    // phi(s0 - dl) = sum_m phi^(m)(s0) (-dl)^m / m!
    let s0 = -rho0.ln();
    let mut phi_series = vec![0.0; order + 1];
    let mut power = vec![0.0; order + 1];
    power[0] = 1.0;
    let mut fact = 1.0;
    for m in 0..=order {
        if m > 0 {
            fact *= m as f64;
            power = series_mul(&power, &dl.iter().map(|c| -c).collect::<Vec<_>>());
        }
        let d = phi.eval(m, s0).unwrap() / fact;
        for (acc, p) in phi_series.iter_mut().zip(&power) {
            *acc += d * p;
        }
    }
    series_mul(&pow_t, &phi_series)
}

fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `d^p/dz^p [z^p g(z zbar)] = sum_j C(p,j) p!/j! rho^j g^(j)(rho)`.
pub fn top_wirtinger_oracle(phi: &PhiProfile, p: u32, t: f64, rho: f64) -> f64 {
    let series = radial_profile_series(phi, t, rho, p as usize);
    let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
    (0..=p)
        .map(|j| {
            let binom = fact(p) / (fact(j) * fact(p - j));
            let gj = series[j as usize] * fact(j);
            binom * fact(p) / fact(j) * rho.powi(j as i32) * gj
        })
        .sum()
}
