//! Subharmonic and δ-subharmonic functions built from explicit Riesz charges.
//!
//! A subharmonic model is `u = h + u_ν` with `h` harmonic and
//! `u_ν(x) = ∫ k(|x − y|) dν(y)`, so its Riesz measure is `ν` by construction.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};
use crate::measure::{window_overlap, BorelMeasure, Component};
use crate::quadrature::integrate_interval;

/// Largest supported degree of the exponent polynomial of a meromorphic function.
pub const MAX_EXPONENT_DEGREE: usize = 4;

/// `c + ⟨g, x⟩ + Re Σ a_k z^k` (the polynomial part is planar only).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HarmonicPart {
    pub constant: f64,
    pub linear: [f64; 3],
    pub poly: Vec<Complex64>,
}

impl HarmonicPart {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { constant: c, ..Self::default() }
    }

    pub fn affine(constant: f64, gradient: [f64; 3]) -> Self {
        Self { constant, linear: gradient, poly: Vec::new() }
    }

    /// `Re Σ a_k z^k`.
    pub fn polynomial(coefficients: Vec<Complex64>) -> Self {
        Self { poly: coefficients, ..Self::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.linear.iter().all(|g| *g == 0.0) && self.poly.iter().all(|a| a.norm() == 0.0)
    }

    fn validate(&self, d: usize) -> Result<()> {
        if d != 2 && self.poly.iter().any(|a| a.norm() != 0.0) {
            return Err(Error::UnsupportedModel("complex polynomial harmonic parts are planar only".into()));
        }
        if self.linear.iter().skip(d).any(|g| *g != 0.0) {
            return Err(domain("harmonic gradient has coordinates outside R^d"));
        }
        let finite = self.constant.is_finite()
            && self.linear.iter().all(|g| g.is_finite())
            && self.poly.iter().all(|a| a.re.is_finite() && a.im.is_finite());
        if !finite {
            return Err(domain("harmonic coefficients must be finite"));
        }
        Ok(())
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let mut v = self.constant + self.linear[0] * x.x() + self.linear[1] * x.y() + self.linear[2] * x.z();
        if !self.poly.is_empty() {
            let z = Complex64::new(x.x(), x.y());
            let mut acc = Complex64::new(0.0, 0.0);
            for a in self.poly.iter().rev() {
                acc = acc * z + a;
            }
            v += acc.re;
        }
        v
    }

    /// Value at 0, which is also every spherical mean about 0.
    pub fn value_at_origin(&self) -> f64 {
        self.constant + self.poly.first().map_or(0.0, |a| a.re)
    }

    pub fn sub(&self, o: &HarmonicPart) -> HarmonicPart {
        let n = self.poly.len().max(o.poly.len());
        let at = |p: &[Complex64], k: usize| p.get(k).copied().unwrap_or_default();
        HarmonicPart {
            constant: self.constant - o.constant,
            linear: [self.linear[0] - o.linear[0], self.linear[1] - o.linear[1], self.linear[2] - o.linear[2]],
            poly: (0..n).map(|k| at(&self.poly, k) - at(&o.poly, k)).collect(),
        }
    }
}

/// `u_ν(x) = ∫ k(|x − y|) dν(y)`, −∞ on atoms (and on spatial segments).
pub fn kernel_potential(nu: &BorelMeasure, x: &Point) -> ExtendedReal {
    let ctx = DimensionContext::new(nu.dim()).expect("measures carry a supported dimension");
    let mut total = 0.0;
    for c in nu.components() {
        let v = component_potential(&ctx, c, x);
        if v == f64::NEG_INFINITY {
            return ExtendedReal::NEG_INF;
        }
        total += v;
    }
    ExtendedReal::from_f64(total)
}

fn component_potential(ctx: &DimensionContext, c: &Component, x: &Point) -> f64 {
    match *c {
        Component::Atom { at, weight } => weight * ctx.kernel_unchecked(at.dist(x)),
        Component::Segment { start, end, weight } => {
            let e = end - start;
            let len = e.norm();
            let dir = (1.0 / len) * e;
            let rel = *x - start;
            let s0 = rel.dot(&dir);
            let h = (rel.dot(&rel) - s0 * s0).max(0.0).sqrt();
            let (a, b) = (-s0, len - s0);
            weight / len * if ctx.d() == 2 { log_line_primitive(b, h) - log_line_primitive(a, h) } else { newton_line(a, b, h) }
        }
        Component::Arc { center, radius, from, to, weight } => {
            let w = *x - center;
            let dist = w.norm();
            let span = to - from;
            if span >= TAU * (1.0 - 1e-15) {
                return weight * dist.max(radius).ln();
            }
            let phi = w.arg();
            let mut sing: Vec<f64> = (-2..=2).map(|k| phi + TAU * k as f64).filter(|s| *s > from && *s < to).collect();
            sing.sort_by(f64::total_cmp);
            let g = |theta: f64| {
                let p = Point::new2(center.x() + radius * theta.cos(), center.y() + radius * theta.sin());
                ExtendedReal::from_f64(p.dist(x).ln())
            };
            let scale = 1.0 + dist.max(radius).ln().abs();
            match integrate_interval(g, from, to, &sing, 1e-13 * scale) {
                Ok(r) => weight * r.value / span,
                Err(e) => {
                    log::warn!("arc potential quadrature at {x:?}: {e}");
                    match e {
                        crate::quadrature::QuadratureError::BudgetExceeded { partial, .. } => weight * partial / span,
                        _ => f64::NEG_INFINITY,
                    }
                }
            }
        }
        Component::Ball { center, radius, weight } => {
            let delta = center.dist(x);
            if ctx.d() == 2 {
                if delta >= radius {
                    weight * delta.ln()
                } else {
                    weight * (radius.ln() - 0.5 + delta * delta / (2.0 * radius * radius))
                }
            } else if delta >= radius {
                -weight / delta
            } else {
                -weight * (3.0 * radius * radius - delta * delta) / (2.0 * radius.powi(3))
            }
        }
    }
}

/// `∫_0^s ln √(σ² + h²) dσ`, odd in `s`.
fn log_line_primitive(s: f64, h: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if h == 0.0 {
        return s * s.abs().ln() - s;
    }
    0.5 * (s * (s * s + h * h).ln() - 2.0 * s + 2.0 * h * (s / h).atan())
}

/// `−∫_a^b dσ / √(σ² + h²)`.
fn newton_line(a: f64, b: f64, h: f64) -> f64 {
    if h > 0.0 {
        return -((b / h).asinh() - (a / h).asinh());
    }
    if a < 0.0 && b > 0.0 || a == 0.0 || b == 0.0 {
        return f64::NEG_INFINITY;
    }
    -((b.abs() / a.abs()).ln()).abs()
}

/// `u = h + u_ν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicFn {
    pub harmonic: HarmonicPart,
    pub charge: BorelMeasure,
}

impl SubharmonicFn {
    pub fn new(harmonic: HarmonicPart, charge: BorelMeasure) -> Result<Self> {
        harmonic.validate(charge.dim())?;
        Ok(Self { harmonic, charge })
    }

    pub fn harmonic(dim: usize, harmonic: HarmonicPart) -> Result<Self> {
        Self::new(harmonic, BorelMeasure::zero(dim)?)
    }

    pub fn dim(&self) -> usize {
        self.charge.dim()
    }

    pub fn evaluate(&self, x: &Point) -> ExtendedReal {
        let p = kernel_potential(&self.charge, x);
        if p.is_neg_inf() {
            return p;
        }
        ExtendedReal::from_f64(self.harmonic.eval(x) + p.value())
    }
}

/// Value of a δ-subharmonic function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointValue {
    Value(ExtendedReal),
    /// Both parts are −∞ at the point.
    Polar,
}

impl PointValue {
    pub fn value(self) -> Option<ExtendedReal> {
        match self {
            PointValue::Value(v) => Some(v),
            PointValue::Polar => None,
        }
    }

    /// `U⁺`, with the polar marker sent to 0.
    pub fn positive_part(self) -> ExtendedReal {
        self.value().map_or(ExtendedReal::ZERO, ExtendedReal::positive_part)
    }

    pub fn negative_part(self) -> ExtendedReal {
        self.value().map_or(ExtendedReal::ZERO, ExtendedReal::negative_part)
    }
}

/// `U = u − v` with the Jordan decomposition of its charge precomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSubharmonicFn {
    pub u: SubharmonicFn,
    pub v: SubharmonicFn,
    plus: BorelMeasure,
    minus: BorelMeasure,
    /// Whether any charge of `u` and `v` cancelled.
    cancelled: bool,
}

impl DeltaSubharmonicFn {
    /// Fails when continuous components of opposite sign overlap on a set of
    /// positive measure without cancelling exactly.
    pub fn new(u: SubharmonicFn, v: SubharmonicFn) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(domain("u and v live in different dimensions"));
        }
        let (plus, minus, cancelled) = jordan(&u.charge, &v.charge)?;
        Ok(Self { u, v, plus, minus, cancelled })
    }

    pub fn from_subharmonic(u: SubharmonicFn) -> Result<Self> {
        let v = SubharmonicFn::harmonic(u.dim(), HarmonicPart::zero())?;
        Self::new(u, v)
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `(Δ_U⁺, Δ_U⁻)`.
    pub fn jordan_decomposition(&self) -> (&BorelMeasure, &BorelMeasure) {
        (&self.plus, &self.minus)
    }

    /// `h_u − h_v`.
    pub fn harmonic_remainder(&self) -> HarmonicPart {
        self.u.harmonic.sub(&self.v.harmonic)
    }

    /// `(u_*, v_*)` with Riesz measures `Δ_U⁺`, `Δ_U⁻` and `u_* − v_* = U`.
    /// Without any cancellation the original pair is returned; otherwise the
    /// harmonic remainder goes to `u_*`.
    pub fn canonical_representation(&self) -> (SubharmonicFn, SubharmonicFn) {
        if !self.cancelled {
            return (self.u.clone(), self.v.clone());
        }
        let u = SubharmonicFn { harmonic: self.harmonic_remainder(), charge: self.plus.clone() };
        let v = SubharmonicFn { harmonic: HarmonicPart::zero(), charge: self.minus.clone() };
        (u, v)
    }

    /// `U(x)`, evaluated through the reduced charges.
    pub fn evaluate(&self, x: &Point) -> PointValue {
        let p = kernel_potential(&self.plus, x);
        let m = kernel_potential(&self.minus, x);
        match (p.is_neg_inf(), m.is_neg_inf()) {
            (true, true) => {
                log::debug!("polar point {x:?}");
                PointValue::Polar
            }
            (true, false) => PointValue::Value(ExtendedReal::NEG_INF),
            (false, true) => PointValue::Value(ExtendedReal::POS_INF),
            (false, false) => {
                let h = self.u.harmonic.eval(x) - self.v.harmonic.eval(x);
                PointValue::Value(ExtendedReal::from_f64(h + p.value() - m.value()))
            }
        }
    }

    /// `max{U(x), 0}`; polar points map to 0.
    pub fn positive_part(&self, x: &Point) -> ExtendedReal {
        self.evaluate(x).positive_part()
    }
}

fn same_geometry(a: &Component, b: &Component) -> bool {
    a.with_weight(1.0) == b.with_weight(1.0)
}

/// Groups identical geometries with signed weights, then rejects positive-measure
/// overlaps between the surviving positive and negative continuous parts.
fn jordan(pos: &BorelMeasure, neg: &BorelMeasure) -> Result<(BorelMeasure, BorelMeasure, bool)> {
    let mut groups: Vec<(Component, f64, bool, bool)> = Vec::new();
    for (c, sign) in pos.components().iter().map(|c| (c, 1.0)).chain(neg.components().iter().map(|c| (c, -1.0))) {
        if let Some(g) = groups.iter_mut().find(|g| same_geometry(&g.0, c)) {
            g.1 += sign * c.weight();
            if sign > 0.0 { g.2 = true } else { g.3 = true }
        } else {
            groups.push((c.clone(), sign * c.weight(), sign > 0.0, sign < 0.0));
        }
    }
    let cancelled = groups.iter().any(|g| g.2 && g.3);
    let scale = pos.total_mass().max(neg.total_mass()).max(1.0);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (c, w, _, _) in groups {
        if w.abs() <= 1e-15 * scale {
            continue;
        }
        if w > 0.0 {
            plus.push(c.with_weight(w));
        } else {
            minus.push(c.with_weight(-w));
        }
    }
    for a in plus.iter().filter(|c| !c.is_atom()) {
        for b in minus.iter().filter(|c| !c.is_atom()) {
            if overlaps(a, b) {
                return Err(Error::UnsupportedModel(format!(
                    "{} and {} charges of opposite sign overlap without cancelling",
                    a.kind(),
                    b.kind()
                )));
            }
        }
    }
    let dim = pos.dim();
    Ok((BorelMeasure::new(dim, plus)?, BorelMeasure::new(dim, minus)?, cancelled))
}

/// Whether two continuous primitives share a set of positive measure for both.
fn overlaps(a: &Component, b: &Component) -> bool {
    match (a, b) {
        (Component::Ball { center: c1, radius: r1, .. }, Component::Ball { center: c2, radius: r2, .. }) => {
            c1.dist(c2) < r1 + r2
        }
        (Component::Segment { start: a0, end: a1, .. }, Component::Segment { start: b0, end: b1, .. }) => {
            let e = *a1 - *a0;
            let len = e.norm();
            let dir = (1.0 / len) * e;
            let off = |p: &Point| {
                let rel = *p - *a0;
                let s = rel.dot(&dir);
                ((rel.dot(&rel) - s * s).max(0.0).sqrt(), s)
            };
            let (h0, s0) = off(b0);
            let (h1, s1) = off(b1);
            let tol = 1e-12 * (1.0 + len);
            h0 <= tol && h1 <= tol && s0.max(s1).min(len) - s0.min(s1).max(0.0) > tol
        }
        (
            Component::Arc { center: c1, radius: r1, from: f1, to: t1, .. },
            Component::Arc { center: c2, radius: r2, from: f2, to: t2, .. },
        ) => c1.dist(c2) <= 1e-12 && (r1 - r2).abs() <= 1e-12 * r1 && window_overlap(*f1, *t1, *f2, *t2) > 1e-12,
        _ => false,
    }
}

/// `f(z) = c e^{p(z)} Π (z − a_i)^{m_i} / Π (z − b_j)^{n_j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeromorphicFn {
    pub zeros: Vec<(Complex64, u32)>,
    pub poles: Vec<(Complex64, u32)>,
    pub unit_factor: Complex64,
    /// Coefficients of `p`, constant term first.
    pub exponent: Vec<Complex64>,
}

impl MeromorphicFn {
    pub fn new(
        zeros: Vec<(Complex64, u32)>,
        poles: Vec<(Complex64, u32)>,
        unit_factor: Complex64,
        exponent: Vec<Complex64>,
    ) -> Result<Self> {
        if unit_factor.norm() == 0.0 || !unit_factor.norm().is_finite() {
            return Err(domain("unit factor must be a finite non-zero complex number"));
        }
        if exponent.len() > MAX_EXPONENT_DEGREE + 1 {
            return Err(Error::UnsupportedModel(format!("exponent degree above {MAX_EXPONENT_DEGREE}")));
        }
        if zeros.iter().chain(&poles).any(|(_, m)| *m == 0) {
            return Err(domain("multiplicities must be at least 1"));
        }
        if zeros.iter().any(|(a, _)| poles.iter().any(|(b, _)| a == b)) {
            return Err(domain("a zero coincides with a pole"));
        }
        Ok(Self { zeros, poles, unit_factor, exponent })
    }

    /// Polynomial `f(z) = c Π (z − a_i)`.
    pub fn rational(zeros: &[Complex64], poles: &[Complex64]) -> Result<Self> {
        Self::new(
            zeros.iter().map(|&a| (a, 1)).collect(),
            poles.iter().map(|&b| (b, 1)).collect(),
            Complex64::new(1.0, 0.0),
            Vec::new(),
        )
    }

    /// `f(z)` in complex arithmetic; `None` at a pole.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let mut p = Complex64::new(0.0, 0.0);
        for a in self.exponent.iter().rev() {
            p = p * z + a;
        }
        let mut num = self.unit_factor * p.exp();
        for (a, m) in &self.zeros {
            num *= (z - a).powu(*m);
        }
        let mut den = Complex64::new(1.0, 0.0);
        for (b, n) in &self.poles {
            den *= (z - b).powu(*n);
        }
        if den.norm() == 0.0 {
            return None;
        }
        Some(num / den)
    }

    /// `ln|f(z)|` from the complex value.
    pub fn log_abs(&self, z: Complex64) -> ExtendedReal {
        match self.eval(z) {
            None => ExtendedReal::POS_INF,
            Some(w) => ExtendedReal::from_f64(w.norm().ln()),
        }
    }

    /// Number of poles in `|z| ≤ t`, with multiplicity.
    pub fn pole_count(&self, t: f64) -> u32 {
        self.poles.iter().filter(|(b, _)| b.norm() <= t).map(|(_, n)| n).sum()
    }

    pub fn zero_count(&self, t: f64) -> u32 {
        self.zeros.iter().filter(|(a, _)| a.norm() <= t).map(|(_, m)| m).sum()
    }

    /// Whether `f(0)` is finite.
    pub fn finite_at_origin(&self) -> bool {
        self.pole_count(0.0) == 0
    }

    fn point_measure(points: &[(Complex64, u32)]) -> Result<BorelMeasure> {
        let atoms: Vec<(Point, f64)> = points.iter().map(|(a, m)| (Point::new2(a.re, a.im), *m as f64)).collect();
        BorelMeasure::atoms(2, &atoms)
    }

    pub fn zero_measure(&self) -> Result<BorelMeasure> {
        Self::point_measure(&self.zeros)
    }

    pub fn pole_measure(&self) -> Result<BorelMeasure> {
        Self::point_measure(&self.poles)
    }

    /// `ln|f| = (ln|c| + Re p + Σ m_i ln|z − a_i|) − Σ n_j ln|z − b_j|`.
    pub fn to_delta_subharmonic(&self) -> Result<DeltaSubharmonicFn> {
        let mut harmonic = HarmonicPart::polynomial(self.exponent.clone());
        harmonic.constant = self.unit_factor.norm().ln();
        let u = SubharmonicFn::new(harmonic, self.zero_measure()?)?;
        let v = SubharmonicFn::new(HarmonicPart::zero(), self.pole_measure()?)?;
        DeltaSubharmonicFn::new(u, v)
    }
}

/// Angles at which planar charges meet, or come within `band` of, the circle `|z| = r`.
pub fn circle_singular_angles(charges: &[&BorelMeasure], r: f64, band: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for nu in charges {
        for c in nu.components() {
            match *c {
                Component::Atom { at, .. } => {
                    if (at.norm() - r).abs() <= band {
                        out.push(at.arg());
                    }
                }
                Component::Segment { start, end, .. } => {
                    let e = end - start;
                    let (a, b, cc) = (e.dot(&e), 2.0 * start.dot(&e), start.dot(&start) - r * r);
                    let disc = b * b - 4.0 * a * cc;
                    if disc >= 0.0 {
                        for s in [(-b - disc.sqrt()) / (2.0 * a), (-b + disc.sqrt()) / (2.0 * a)] {
                            if (0.0..=1.0).contains(&s) {
                                out.push((start + s * e).arg());
                            }
                        }
                    }
                }
                Component::Arc { center, radius, from, to, .. } => {
                    for theta in [from, to] {
                        let p = crate::measure::arc_endpoint(&center, radius, theta);
                        if (p.norm() - r).abs() <= band {
                            out.push(p.arg());
                        }
                    }
                }
                Component::Ball { .. } => {}
            }
        }
    }
    out
}
