//! Potential-theory lab for differences of subharmonic functions.
//!
//! The crate evaluates Nevanlinna-type characteristics of δ-subharmonic
//! functions built from explicit Riesz charges, computes moduli of continuity
//! of finitely described measures, and checks integral bounds of the form
//! `∫ U⁺ dμ ≤ A_d(r, R) T_U(r, R) (M + ∫_0^{R+r} h_μ(t) t^{1−d} dt)` on
//! concrete scenarios.

pub mod error;
pub mod characteristics;
pub mod ext;
pub mod geometry;
pub mod lab;
pub mod measure;
pub mod modulus;
pub mod potential;
pub mod quadrature;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
pub use ext::{ExtendedReal, ExtendedRealError};
pub use geometry::{Ball, DimensionContext, Point};
pub use measure::{BorelMeasure, Component};
