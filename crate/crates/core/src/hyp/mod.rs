//! Hyperbolic-space primitives: parameters, half-space coordinates,
//! the radial Green's function and the named weights.

mod green;
mod weights;

pub use green::{green_gp, green_parts, weight_w, weight_w_estimate, GreenParts, GreenTable};
pub use weights::{geodesic_distance, h_func, hp_base, weight_hp, weight_v};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when testing `N >= 1 + p(p-1)`, so that the boundary case
/// `p = (1 + sqrt(4N - 3)) / 2` computed in floating point is admissible.
pub const HYPOTHESIS_SLACK: f64 = 1e-9;

/// Dimension `N` and exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "N")]
    pub n: u32,
    pub p: f64,
}

impl Params {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "N must be at least 2, got {n}"
            )));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!(
                "p must be a finite real > 1, got {p}"
            )));
        }
        Ok(Params { n, p })
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Conjugate exponent `p / (p - 1)`.
    pub fn p_prime(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `((N-1)/p)^p`.
    pub fn lambda_p(&self) -> f64 {
        ((self.nf() - 1.0) / self.p).powf(self.p)
    }

    /// Exponent `(N-1)/(p-1)` of the Green's function integrand.
    pub fn alpha(&self) -> f64 {
        (self.nf() - 1.0) / (self.p - 1.0)
    }

    /// `p >= 2` and `N >= 1 + p(p-1)`.
    pub fn hypo_thm25(&self) -> bool {
        self.p >= 2.0 && self.nf() >= 1.0 + self.p * (self.p - 1.0) - HYPOTHESIS_SLACK
    }

    /// Largest `p` with `N >= 1 + p(p-1)`, i.e. `(1 + sqrt(4N - 3)) / 2`.
    pub fn p_max_for(n: u32) -> f64 {
        0.5 * (1.0 + (4.0 * n as f64 - 3.0).sqrt())
    }
}

pub fn lambda_p(params: &Params) -> f64 {
    params.lambda_p()
}

/// Point of the upper half-space, reduced to `(x1, rho, y)` with `rho` the
/// norm of the remaining `N - 2` horizontal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    pub x1: f64,
    pub rho: f64,
    pub y: f64,
}

impl HalfSpacePoint {
    pub fn new(x1: f64, rho: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("y must be positive, got {y}")));
        }
        if !(rho >= 0.0) {
            return Err(Error::Domain(format!(
                "rho must be non-negative, got {rho}"
            )));
        }
        Ok(HalfSpacePoint { x1, rho, y })
    }

    /// `|x|^2 = x1^2 + rho^2`.
    pub fn x_norm_sq(&self) -> f64 {
        self.x1 * self.x1 + self.rho * self.rho
    }
}
