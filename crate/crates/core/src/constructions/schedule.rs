use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::PhiProfile;

/// Geometric ball schedule
/// `R_k = center_scale * ratio^k`, `r_k = radius_scale * ratio^k`,
/// `t_k = 1 / (4 (k + t_offset))`, `eps_k = 1 / sqrt(phi(1 / (2 t_k)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub center_scale: f64,
    pub radius_scale: f64,
    pub ratio: f64,
    pub t_offset: f64,
}

impl Default for Schedule {
    /// `R_k = 10^-k`, `r_k = 10^-(k+1)`, `t_k = 1 / (4 (k + 1))`.
    fn default() -> Self {
        Schedule { center_scale: 1.0, radius_scale: 0.1, ratio: 0.1, t_offset: 1.0 }
    }
}

/// One row of the schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallParams {
    pub k: usize,
    pub center: f64,
    pub radius: f64,
    pub t: f64,
    pub eps: f64,
}

impl Schedule {
    pub fn center(&self, k: usize) -> f64 {
        self.center_scale * self.ratio.powi(k as i32)
    }

    pub fn radius(&self, k: usize) -> f64 {
        self.radius_scale * self.ratio.powi(k as i32)
    }

    pub fn t(&self, k: usize) -> f64 {
        0.25 / (k as f64 + self.t_offset)
    }

    /// `phi(1 / (2 t_k))`, the quantity whose square root sets both the
    /// weight `eps_k` and the blow-up rate.
    pub fn phi_at_sample(&self, phi: &PhiProfile, k: usize) -> Result<f64> {
        phi.eval(0, 0.5 / self.t(k))
    }

    pub fn eps(&self, phi: &PhiProfile, k: usize) -> Result<f64> {
        let p = self.phi_at_sample(phi, k)?;
        if !(p > 0.0) {
            return Err(Error::Schedule(format!(
                "phi(1/(2 t_{k})) = {p} is not positive, eps_{k} undefined; raise the profile shift"
            )));
        }
        Ok(1.0 / p.sqrt())
    }

    pub fn ball(&self, phi: &PhiProfile, k: usize) -> Result<BallParams> {
        Ok(BallParams { k, center: self.center(k), radius: self.radius(k), t: self.t(k), eps: self.eps(phi, k)? })
    }

    /// Checks every condition the composite relies on for `1 <= k <= k_max`:
    /// shrinking radii, disjoint balls, supports clear of the coordinate
    /// hyperplanes, `0 < t_k < 1/4` decreasing, `eps_k > 0`.
    pub fn validate(&self, phi: &PhiProfile, k_max: usize) -> Result<()> {
        let finite = [self.center_scale, self.radius_scale, self.ratio, self.t_offset].iter().all(|v| v.is_finite());
        if !finite || !(self.ratio > 0.0 && self.ratio < 1.0) || !(self.center_scale > 0.0 && self.radius_scale > 0.0) {
            return Err(Error::Schedule(format!("schedule parameters out of range: {self:?}")));
        }
        for k in 1..=k_max {
            let (big, small) = (self.center(k), self.radius(k));
            if !(big > small) {
                return Err(Error::Schedule(format!("R_{k} = {big} does not exceed r_{k} = {small}")));
            }
            let (next_big, next_small) = (self.center(k + 1), self.radius(k + 1));
            if !(big - small > next_big + next_small) {
                return Err(Error::Schedule(format!(
                    "balls {k} and {} overlap: R_k - r_k = {} <= R_(k+1) + r_(k+1) = {}",
                    k + 1,
                    big - small,
                    next_big + next_small
                )));
            }
            if !(2.0 / 3.0 * small < big / std::f64::consts::SQRT_2) {
                return Err(Error::Schedule(format!("support of ball {k} reaches a coordinate hyperplane")));
            }
            let t = self.t(k);
            if !(t > 0.0 && t < 0.25 && self.t(k + 1) < t) {
                return Err(Error::Schedule(format!("t_{k} = {t} outside (0, 1/4) or not decreasing")));
            }
            self.eps(phi, k)?;
        }
        Ok(())
    }
}
