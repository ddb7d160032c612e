//! Adaptive numerical integration.
//!
//! Every integral in the crate goes through the same 15-point Kronrod /
//! 7-point Gauss panel rule with max-heap refinement (see [`adaptive`]).
//! Semi-infinite ranges are truncated at a point where an analytic
//! exponential envelope bounds the tail, and that bound is added to the
//! reported error. Endpoint power singularities `(x - a)^(beta - 1)` are
//! removed by the substitution `x = a + L t^(1/beta)`.

mod adaptive;
mod gauss_kronrod;
pub mod halfspace;
pub mod radial;

pub use adaptive::{
    integrate_interval, integrate_power_weighted, integrate_semi_infinite,
    integrate_with_breakpoints, Endpoint, Endpoints, Envelope, DEFAULT_MAX_SUBDIVISIONS,
};
pub use halfspace::{halfspace_integral, HalfSpaceBox, HalfSpaceIntegrand};
pub use radial::{
    radial_energy, radial_weighted_mass, RadialEnergy, RadialMeasure, RadialTestFunction,
    RadialWeight, Smoothness,
};

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    /// Where a semi-infinite range was cut; `None` for finite ranges.
    pub truncation_point: Option<f64>,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            truncation_point: None,
        }
    }

    /// Sum of two integrals over disjoint ranges.
    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions: self.subdivisions + other.subdivisions,
            truncation_point: match (self.truncation_point, other.truncation_point) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn scale(self, c: f64) -> QuadResult {
        QuadResult {
            value: self.value * c,
            error_estimate: self.error_estimate * c.abs(),
            ..self
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error_estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error_estimate / self.value.abs()
        }
    }
}

/// Accuracy target: the error estimate must not exceed
/// `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    pub(crate) fn scaled(self, factor: f64) -> Self {
        Tolerance {
            abs: self.abs * factor,
            rel: self.rel * factor,
        }
    }
}
