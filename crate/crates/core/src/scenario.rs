//! Scenario files: JSON description of a function, a measure and radii.
//!
//! ```json
//! {
//!   "schema_version": "1",
//!   "id": "circle",
//!   "dimension": 2,
//!   "function": { "type": "meromorphic", "zeros": [{ "at": [0, 0] }] },
//!   "measure": [{ "type": "arc", "center": [0, 0], "radius": 2, "from": 0, "to": 6.283185307179586, "weight": 1 }],
//!   "radii": { "r": 2, "R": 4, "r0": 0 }
//! }
//! ```

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{Point, MAX_POINT_DIM};
use crate::lab::{Scenario, ScenarioFunction, Tolerances};
use crate::measure::{BorelMeasure, Component};
use crate::potential::{DeltaSubharmonicFn, HarmonicPart, MeromorphicFn, SubharmonicFn};

pub const SCHEMA_VERSION: &str = "1";

/// Machine-readable reason a scenario file was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Syntax,
    SchemaVersion,
    Dimension,
    Coordinates,
    NegativeWeight,
    InvalidComponent,
    SupportOutside,
    RadiiOrder,
    R0Range,
    InvalidFunction,
    ChargeOverlap,
    Tolerance,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "SYNTAX",
            ErrorCode::SchemaVersion => "SCHEMA_VERSION",
            ErrorCode::Dimension => "DIMENSION",
            ErrorCode::Coordinates => "COORDINATES",
            ErrorCode::NegativeWeight => "NEGATIVE_WEIGHT",
            ErrorCode::InvalidComponent => "INVALID_COMPONENT",
            ErrorCode::SupportOutside => "SUPPORT_OUTSIDE",
            ErrorCode::RadiiOrder => "RADII_ORDER",
            ErrorCode::R0Range => "R0_RANGE",
            ErrorCode::InvalidFunction => "INVALID_FUNCTION",
            ErrorCode::ChargeOverlap => "CHARGE_OVERLAP",
            ErrorCode::Tolerance => "TOLERANCE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ScenarioError {
    pub code: ErrorCode,
    /// JSON path of the offending field.
    pub field: String,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code.as_str(), self.field, self.message)
    }
}

fn fail<T>(code: ErrorCode, field: impl Into<String>, message: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError { code, field: field.into(), message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub dimension: usize,
    pub function: FunctionSpec,
    pub measure: Vec<ComponentSpec>,
    pub radii: Radii,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Radii {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dini: Option<f64>,
}

/// Component with coordinates as arrays of `d` reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Atom { at: Vec<f64>, weight: f64 },
    Segment { start: Vec<f64>, end: Vec<f64>, weight: f64 },
    Arc { center: Vec<f64>, radius: f64, from: f64, to: f64, weight: f64 },
    Ball { center: Vec<f64>, radius: f64, weight: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSpec {
    pub at: [f64; 2],
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

fn is_one(m: &u32) -> bool {
    *m == 1
}

fn unit() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gradient: Vec<f64>,
    /// `Re Σ c_k z^k`, planar only; `[re, im]` pairs, constant first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polynomial: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubharmonicSpec {
    #[serde(default)]
    pub harmonic: HarmonicSpec,
    #[serde(default)]
    pub charge: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `c e^{p(z)} Π (z − a)^m / Π (z − b)^n`.
    Meromorphic {
        #[serde(default)]
        zeros: Vec<RootSpec>,
        #[serde(default)]
        poles: Vec<RootSpec>,
        #[serde(default = "unit")]
        unit_factor: [f64; 2],
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        exponent: Vec<[f64; 2]>,
    },
    DeltaSubharmonic { u: SubharmonicSpec, v: SubharmonicSpec },
}

fn point(d: usize, coords: &[f64], field: &str) -> Result<Point, ScenarioError> {
    if coords.len() != d {
        return fail(ErrorCode::Coordinates, field, format!("expected {d} coordinates, got {}", coords.len()));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return fail(ErrorCode::Coordinates, field, "coordinates must be finite");
    }
    Point::from_slice(coords).or_else(|e| fail(ErrorCode::Coordinates, field, e.to_string()))
}

fn component(d: usize, spec: &ComponentSpec, field: &str) -> Result<Component, ScenarioError> {
    let p = |c: &[f64], name: &str| point(d, c, &format!("{field}.{name}"));
    let c = match spec {
        ComponentSpec::Atom { at, weight } => Component::Atom { at: p(at, "at")?, weight: *weight },
        ComponentSpec::Segment { start, end, weight } => {
            Component::Segment { start: p(start, "start")?, end: p(end, "end")?, weight: *weight }
        }
        ComponentSpec::Arc { center, radius, from, to, weight } => {
            Component::Arc { center: p(center, "center")?, radius: *radius, from: *from, to: *to, weight: *weight }
        }
        ComponentSpec::Ball { center, radius, weight } => {
            Component::Ball { center: p(center, "center")?, radius: *radius, weight: *weight }
        }
    };
    if !(c.weight() > 0.0) || !c.weight().is_finite() {
        return fail(ErrorCode::NegativeWeight, format!("{field}.weight"), format!("weight must be positive, got {}", c.weight()));
    }
    c.validate(d).or_else(|e| fail(ErrorCode::InvalidComponent, field, e.to_string()))?;
    Ok(c)
}

fn measure(d: usize, specs: &[ComponentSpec], field: &str) -> Result<BorelMeasure, ScenarioError> {
    let comps = specs
        .iter()
        .enumerate()
        .map(|(i, s)| component(d, s, &format!("{field}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    BorelMeasure::new(d, comps).or_else(|e| fail(ErrorCode::InvalidComponent, field, e.to_string()))
}

fn complex(c: [f64; 2]) -> Complex64 {
    Complex64::new(c[0], c[1])
}

fn harmonic(d: usize, spec: &HarmonicSpec, field: &str) -> Result<HarmonicPart, ScenarioError> {
    if spec.gradient.len() > d {
        return fail(ErrorCode::InvalidFunction, format!("{field}.gradient"), format!("at most {d} entries"));
    }
    let mut gradient = [0.0; MAX_POINT_DIM];
    gradient[..spec.gradient.len()].copy_from_slice(&spec.gradient);
    let mut h = HarmonicPart::polynomial(spec.polynomial.iter().copied().map(complex).collect());
    h.constant = spec.constant;
    h.linear = gradient;
    Ok(h)
}

fn subharmonic(d: usize, spec: &SubharmonicSpec, field: &str) -> Result<SubharmonicFn, ScenarioError> {
    let h = harmonic(d, &spec.harmonic, &format!("{field}.harmonic"))?;
    let charge = measure(d, &spec.charge, &format!("{field}.charge"))?;
    SubharmonicFn::new(h, charge).or_else(|e| fail(ErrorCode::InvalidFunction, field, e.to_string()))
}

fn function(d: usize, spec: &FunctionSpec) -> Result<ScenarioFunction, ScenarioError> {
    match spec {
        FunctionSpec::Meromorphic { zeros, poles, unit_factor, exponent } => {
            if d != 2 {
                return fail(ErrorCode::Dimension, "function", "meromorphic functions need dimension 2");
            }
            let roots = |rs: &[RootSpec]| rs.iter().map(|r| (complex(r.at), r.multiplicity)).collect();
            MeromorphicFn::new(roots(zeros), roots(poles), complex(*unit_factor), exponent.iter().copied().map(complex).collect())
                .map(ScenarioFunction::Meromorphic)
                .or_else(|e| fail(ErrorCode::InvalidFunction, "function", e.to_string()))
        }
        FunctionSpec::DeltaSubharmonic { u, v } => {
            let u = subharmonic(d, u, "function.u")?;
            let v = subharmonic(d, v, "function.v")?;
            DeltaSubharmonicFn::new(u, v).map(ScenarioFunction::DeltaSubharmonic).or_else(|e| match e {
                Error::UnsupportedModel(m) | Error::InvalidMeasure(m) => fail(ErrorCode::ChargeOverlap, "function", m),
                e => fail(ErrorCode::InvalidFunction, "function", e.to_string()),
            })
        }
    }
}

fn positive_tolerance(v: Option<f64>, default: f64, field: &str) -> Result<f64, ScenarioError> {
    match v {
        None => Ok(default),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => fail(ErrorCode::Tolerance, field, format!("tolerance must be positive, got {t}")),
    }
}

impl ScenarioFile {
    pub fn from_json(bytes: &[u8]) -> Result<Self, ScenarioError> {
        serde_json::from_slice(bytes).or_else(|e| fail(ErrorCode::Syntax, format!("line {}", e.line()), e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files always serialize")
    }

    /// Checks every cross-field constraint and builds the scenario.
    pub fn validate(&self) -> Result<Scenario, ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return fail(
                ErrorCode::SchemaVersion,
                "schema_version",
                format!("unknown version {:?}, expected {SCHEMA_VERSION:?}", self.schema_version),
            );
        }
        let d = self.dimension;
        if !(2..=3).contains(&d) {
            return fail(ErrorCode::Dimension, "dimension", format!("dimension must be 2 or 3, got {d}"));
        }
        let Radii { r, big_r, r0 } = self.radii;
        if !(r > 0.0 && r.is_finite()) || !(r < big_r && big_r.is_finite()) {
            return fail(ErrorCode::RadiiOrder, "radii", format!("need 0 < r < R, got r={r}, R={big_r}"));
        }
        if let Some(r0) = r0 {
            if !(0.0..=r).contains(&r0) {
                return fail(ErrorCode::R0Range, "radii.r0", format!("r0 = {r0} is outside [0, r]"));
            }
        }
        let mu = measure(d, &self.measure, "measure")?;
        if !mu.supported_in(r) {
            return fail(
                ErrorCode::SupportOutside,
                "measure",
                format!("support reaches radius {} beyond r = {r}", mu.support_radius()),
            );
        }
        let f = function(d, &self.function)?;
        let defaults = Tolerances::default();
        let spec = self.tolerances.unwrap_or(ToleranceSpec { mean: None, dini: None });
        let tolerances = Tolerances {
            mean: positive_tolerance(spec.mean, defaults.mean, "tolerances.mean")?,
            dini: positive_tolerance(spec.dini, defaults.dini, "tolerances.dini")?,
        };
        let id = self.id.clone().unwrap_or_else(|| "scenario".to_string());
        let mut s = Scenario::new(id, f, mu, r, big_r, r0)
            .or_else(|e| fail(ErrorCode::InvalidFunction, "function", e.to_string()))?
            .with_tolerances(tolerances);
        s.seed = self.seed;
        Ok(s)
    }

    /// The file describing `s`; `validate` of the result gives back `s`.
    pub fn from_scenario(s: &Scenario) -> Self {
        let d = s.ctx.d();
        let coords = |p: &Point| p.coords(d).to_vec();
        let pair = |c: Complex64| [c.re, c.im];
        let comps = |m: &BorelMeasure| {
            m.components()
                .iter()
                .map(|c| match c {
                    Component::Atom { at, weight } => ComponentSpec::Atom { at: coords(at), weight: *weight },
                    Component::Segment { start, end, weight } => {
                        ComponentSpec::Segment { start: coords(start), end: coords(end), weight: *weight }
                    }
                    Component::Arc { center, radius, from, to, weight } => ComponentSpec::Arc {
                        center: coords(center),
                        radius: *radius,
                        from: *from,
                        to: *to,
                        weight: *weight,
                    },
                    Component::Ball { center, radius, weight } => {
                        ComponentSpec::Ball { center: coords(center), radius: *radius, weight: *weight }
                    }
                })
                .collect()
        };
        let harmonic = |h: &HarmonicPart| HarmonicSpec {
            constant: h.constant,
            gradient: if h.linear.iter().all(|&g| g == 0.0) { Vec::new() } else { h.linear[..d].to_vec() },
            polynomial: h.poly.iter().copied().map(pair).collect(),
        };
        let function = match &s.function {
            ScenarioFunction::Meromorphic(f) => {
                let roots = |rs: &[(Complex64, u32)]| {
                    rs.iter().map(|&(a, m)| RootSpec { at: pair(a), multiplicity: m }).collect()
                };
                FunctionSpec::Meromorphic {
                    zeros: roots(&f.zeros),
                    poles: roots(&f.poles),
                    unit_factor: pair(f.unit_factor),
                    exponent: f.exponent.iter().copied().map(pair).collect(),
                }
            }
            ScenarioFunction::DeltaSubharmonic(u) => FunctionSpec::DeltaSubharmonic {
                u: SubharmonicSpec { harmonic: harmonic(&u.u.harmonic), charge: comps(&u.u.charge) },
                v: SubharmonicSpec { harmonic: harmonic(&u.v.harmonic), charge: comps(&u.v.charge) },
            },
        };
        ScenarioFile {
            schema_version: SCHEMA_VERSION.to_string(),
            id: Some(s.id.clone()),
            dimension: d,
            function,
            measure: comps(&s.mu),
            radii: Radii { r: s.r, big_r: s.big_r, r0: s.r0 },
            tolerances: Some(ToleranceSpec { mean: Some(s.tolerances.mean), dini: Some(s.tolerances.dini) }),
            seed: s.seed,
        }
    }
}

/// Parses and validates a scenario file.
pub fn parse_scenario(bytes: &[u8]) -> Result<Scenario, ScenarioError> {
    ScenarioFile::from_json(bytes)?.validate()
}

pub fn serialize_scenario(s: &Scenario) -> String {
    ScenarioFile::from_scenario(s).to_json()
}
