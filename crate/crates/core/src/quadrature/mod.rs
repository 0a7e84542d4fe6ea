//! Numerical integration engines.
//!
//! All engines take caller-supplied evaluators returning [`ExtendedReal`]
//! and never detect singularities on their own: callers pass the known
//! singular parameters (atom locations, angles) explicitly.

mod circle;
mod gauss;
mod interval;
mod sphere;
mod sup;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use circle::{circle_mean, normalize_angle};
pub use gauss::gauss_legendre;
pub use interval::{integrate_interval, integrate_interval_with_budget, MAX_SUBINTERVALS};
pub use sphere::{sphere_mean_3d, sphere_point};
pub use sup::{circle_sup, sphere_sup, sphere_sup_3d, SupResult, CIRCLE_SUP_GRID};

#[allow(unused_imports)]
use crate::ext::ExtendedReal;

/// Default absolute tolerance for circle and sphere means.
pub const DEFAULT_MEAN_TOL: f64 = 1e-8;
/// Default relative tolerance for Dini integrals.
pub const DEFAULT_DINI_TOL: f64 = 1e-6;
/// Default refinement gap for sup estimation.
pub const DEFAULT_SUP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub singularities_split: Vec<f64>,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        Self { value, error_estimate: 0.0, nodes_used: 0, singularities_split: Vec::new() }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self.error_estimate *= factor.abs();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("node budget exhausted (partial value {partial}, error estimate {error_estimate}, {nodes_used} nodes)")]
    BudgetExceeded { partial: f64, error_estimate: f64, nodes_used: usize },
    #[error("integrand is not integrable near {at}")]
    NonIntegrable { at: f64 },
    #[error("invalid interval ({a}, {b})")]
    InvalidInterval { a: f64, b: f64 },
    #[error("dimension {0} has no sphere rule")]
    UnsupportedDimension(usize),
}

/// Error target: accepted when `error <= max(abs, rel · |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn abs(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn rel(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    pub fn halved(self) -> Self {
        Self { abs: self.abs / 2.0, rel: self.rel / 2.0 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { abs: self.abs * factor, rel: self.rel }
    }
}

impl From<f64> for Tolerance {
    fn from(abs: f64) -> Self {
        Tolerance::abs(abs)
    }
}
