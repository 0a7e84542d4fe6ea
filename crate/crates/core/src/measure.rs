//! Finitely described positive Borel measures.
//!
//! A measure is a finite sum of primitives (atoms, uniform segments, uniform
//! circular arcs, uniform balls). Every ball-mass query has a closed form.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};
use crate::quadrature::{integrate_interval, Tolerance};

/// Tolerance used for the non-atomic part of integrated counting functions.
const COUNTING_TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-11 };

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    Atom { at: Point, weight: f64 },
    /// Uniform (length) measure on the segment `[start, end]`.
    Segment { start: Point, end: Point, weight: f64 },
    /// Uniform (arclength) measure on `{center + radius·e^{iθ} : θ ∈ [from, to]}`,
    /// planar only, `0 < to − from ≤ 2π`.
    Arc { center: Point, radius: f64, from: f64, to: f64, weight: f64 },
    /// Uniform (volume) measure on the closed ball.
    Ball { center: Point, radius: f64, weight: f64 },
}

impl Component {
    pub fn weight(&self) -> f64 {
        match *self {
            Component::Atom { weight, .. }
            | Component::Segment { weight, .. }
            | Component::Arc { weight, .. }
            | Component::Ball { weight, .. } => weight,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Component::Atom { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Component::Atom { .. } => "atom",
            Component::Segment { .. } => "segment",
            Component::Arc { .. } => "arc",
            Component::Ball { .. } => "ball",
        }
    }

    pub(crate) fn with_weight(&self, w: f64) -> Component {
        let mut c = self.clone();
        match &mut c {
            Component::Atom { weight, .. }
            | Component::Segment { weight, .. }
            | Component::Arc { weight, .. }
            | Component::Ball { weight, .. } => *weight = w,
        }
        c
    }

    pub(crate) fn validate(&self, d: usize) -> Result<()> {
        let w = self.weight();
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "{} weight must be finite and > 0, got {w}",
                self.kind()
            )));
        }
        let points: Vec<&Point> = match self {
            Component::Atom { at, .. } => vec![at],
            Component::Segment { start, end, .. } => {
                if start.dist(end) == 0.0 {
                    return Err(Error::InvalidMeasure("segment endpoints coincide".into()));
                }
                vec![start, end]
            }
            Component::Arc { center, radius, from, to, .. } => {
                if d != 2 {
                    return Err(Error::InvalidMeasure("arcs are planar components".into()));
                }
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidMeasure(format!("arc radius must be > 0, got {radius}")));
                }
                let span = to - from;
                if !(span > 0.0) || span > TAU * (1.0 + 1e-15) || !from.is_finite() {
                    return Err(Error::InvalidMeasure(format!(
                        "arc angle span must lie in (0, 2π], got {span}"
                    )));
                }
                vec![center]
            }
            Component::Ball { center, radius, .. } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidMeasure(format!("ball radius must be > 0, got {radius}")));
                }
                vec![center]
            }
        };
        if points.iter().any(|p| !p.lies_in(d)) {
            return Err(Error::InvalidMeasure(format!(
                "{} has coordinates outside R^{d}",
                self.kind()
            )));
        }
        Ok(())
    }

    /// Smallest and largest distance from `y` to the support.
    pub fn distance_range(&self, y: &Point) -> (f64, f64) {
        match self {
            Component::Atom { at, .. } => {
                let r = at.dist(y);
                (r, r)
            }
            Component::Segment { start, end, .. } => {
                let e = *end - *start;
                let len2 = e.dot(&e);
                let s = ((*y - *start).dot(&e) / len2).clamp(0.0, 1.0);
                let foot = *start + s * e;
                (foot.dist(y), start.dist(y).max(end.dist(y)))
            }
            Component::Arc { center, radius, from, to, .. } => {
                let w = *y - *center;
                let dist = w.norm();
                if dist == 0.0 {
                    return (*radius, *radius);
                }
                let phi = w.arg();
                let near = if angle_in_arc(phi, *from, *to) {
                    (dist - radius).abs()
                } else {
                    arc_endpoint(center, *radius, *from).dist(y).min(arc_endpoint(center, *radius, *to).dist(y))
                };
                let far = if angle_in_arc(phi + PI, *from, *to) {
                    dist + radius
                } else {
                    arc_endpoint(center, *radius, *from).dist(y).max(arc_endpoint(center, *radius, *to).dist(y))
                };
                (near, far)
            }
            Component::Ball { center, radius, .. } => {
                let dist = center.dist(y);
                ((dist - radius).max(0.0), dist + radius)
            }
        }
    }

    /// Distances from `y` at which the ball-mass function of this component
    /// changes its analytic form.
    fn counting_breakpoints(&self, y: &Point) -> Vec<f64> {
        let (lo, hi) = self.distance_range(y);
        let mut out = vec![lo, hi];
        match self {
            Component::Segment { start, end, .. } => {
                out.push(start.dist(y));
                out.push(end.dist(y));
            }
            Component::Arc { center, radius, from, to, .. } => {
                out.push(arc_endpoint(center, *radius, *from).dist(y));
                out.push(arc_endpoint(center, *radius, *to).dist(y));
            }
            Component::Ball { center, radius, .. } => {
                out.push((center.dist(y) - radius).abs());
            }
            Component::Atom { .. } => {}
        }
        out
    }

    /// Mass of the closed ball `B̄_y(t)`.
    pub fn ball_mass(&self, d: usize, y: &Point, t: f64) -> f64 {
        match self {
            Component::Atom { at, weight } => {
                if at.dist(y) <= t {
                    *weight
                } else {
                    0.0
                }
            }
            Component::Segment { start, end, weight } => {
                let e = *end - *start;
                let len = e.norm();
                let dir = (1.0 / len) * e;
                let rel = *y - *start;
                let s0 = rel.dot(&dir);
                let h2 = (rel.dot(&rel) - s0 * s0).max(0.0);
                if h2 > t * t {
                    return 0.0;
                }
                let half = (t * t - h2).sqrt();
                let lo = (s0 - half).max(0.0);
                let hi = (s0 + half).min(len);
                if hi <= lo {
                    return 0.0;
                }
                weight * ((hi - lo) / len).min(1.0)
            }
            Component::Arc { center, radius, from, to, weight } => {
                let (near, far) = self.distance_range(y);
                if t >= far {
                    return *weight;
                }
                if t < near {
                    return 0.0;
                }
                let w = *y - *center;
                let dist = w.norm();
                let span = to - from;
                let half = if dist == 0.0 {
                    if *radius <= t {
                        PI
                    } else {
                        return 0.0;
                    }
                } else {
                    let c = (radius * radius + dist * dist - t * t) / (2.0 * radius * dist);
                    if c > 1.0 {
                        return 0.0;
                    }
                    c.max(-1.0).acos()
                };
                if half >= PI {
                    return *weight;
                }
                let phi = w.arg();
                let covered = window_overlap(*from, *to, phi - half, phi + half);
                weight * (covered / span).min(1.0)
            }
            Component::Ball { center, radius, weight } => {
                let dist = center.dist(y);
                weight * (ball_intersection(d, *radius, t, dist) / ball_content(d, *radius)).min(1.0)
            }
        }
    }

    /// Translate by `v`.
    pub fn translated(&self, v: &Point) -> Component {
        let mut c = self.clone();
        match &mut c {
            Component::Atom { at, .. } => *at = *at + *v,
            Component::Segment { start, end, .. } => {
                *start = *start + *v;
                *end = *end + *v;
            }
            Component::Arc { center, .. } | Component::Ball { center, .. } => *center = *center + *v,
        }
        c
    }

    /// Representative interior point (used as a search seed).
    pub fn centroid(&self) -> Point {
        match self {
            Component::Atom { at, .. } => *at,
            Component::Segment { start, end, .. } => 0.5 * (*start + *end),
            Component::Arc { center, radius, from, to, .. } => arc_endpoint(center, *radius, 0.5 * (from + to)),
            Component::Ball { center, .. } => *center,
        }
    }
}

pub(crate) fn arc_endpoint(center: &Point, radius: f64, theta: f64) -> Point {
    Point::new2(center.x() + radius * theta.cos(), center.y() + radius * theta.sin())
}

/// Whether the angle `phi` (mod 2π) lies in `[from, to]`.
pub(crate) fn angle_in_arc(phi: f64, from: f64, to: f64) -> bool {
    if to - from >= TAU {
        return true;
    }
    let rel = (phi - from).rem_euclid(TAU);
    rel <= to - from
}

/// Length of `[from, to] ∩ ([lo, hi] + 2πℤ)`, both windows at most 2π long.
pub(crate) fn window_overlap(from: f64, to: f64, lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    for k in -2..=2 {
        let shift = TAU * k as f64;
        let a = from.max(lo + shift);
        let b = to.min(hi + shift);
        if b > a {
            total += b - a;
        }
    }
    total.min(to - from)
}

/// Lebesgue content of a ball of radius `r` in dimension `d` (2 or 3).
pub(crate) fn ball_content(d: usize, r: f64) -> f64 {
    match d {
        2 => PI * r * r,
        _ => 4.0 / 3.0 * PI * r * r * r,
    }
}

/// Content of the intersection of two balls of radii `a`, `b` at centre distance `dist`.
pub(crate) fn ball_intersection(d: usize, a: f64, b: f64, dist: f64) -> f64 {
    if dist >= a + b {
        return 0.0;
    }
    if dist + a.min(b) <= a.max(b) {
        return ball_content(d, a.min(b));
    }
    match d {
        2 => {
            let ca = ((dist * dist + a * a - b * b) / (2.0 * dist * a)).clamp(-1.0, 1.0);
            let cb = ((dist * dist + b * b - a * a) / (2.0 * dist * b)).clamp(-1.0, 1.0);
            let k = ((-dist + a + b) * (dist + a - b) * (dist - a + b) * (dist + a + b)).max(0.0);
            a * a * ca.acos() + b * b * cb.acos() - 0.5 * k.sqrt()
        }
        _ => {
            let s = a + b - dist;
            PI * s * s * (dist * dist + 2.0 * dist * (a + b) - 3.0 * (a - b) * (a - b)) / (12.0 * dist)
        }
    }
}

/// A positive measure given as a finite sum of primitives in `R^d`, d ∈ {2, 3}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorelMeasure {
    dim: usize,
    components: Vec<Component>,
}

impl BorelMeasure {
    pub fn new(dim: usize, components: Vec<Component>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        for c in &components {
            c.validate(dim)?;
        }
        Ok(Self { dim, components })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn atoms(dim: usize, atoms: &[(Point, f64)]) -> Result<Self> {
        Self::new(dim, atoms.iter().map(|&(at, weight)| Component::Atom { at, weight }).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.components.iter().all(Component::is_atom)
    }

    pub fn has_atoms(&self) -> bool {
        self.components.iter().any(Component::is_atom)
    }

    /// Total mass `μ(R^d)`.
    pub fn total_mass(&self) -> f64 {
        self.components.iter().map(Component::weight).sum()
    }

    /// Smallest `r` with `supp μ ⊆ B̄(r)` (centre 0).
    pub fn support_radius(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.distance_range(&Point::ORIGIN).1)
            .fold(0.0, f64::max)
    }

    pub fn supported_in(&self, r: f64) -> bool {
        self.support_radius() <= r * (1.0 + 1e-12)
    }

    /// `μ(B̄_y(t))`, right-continuous and non-decreasing in `t`.
    pub fn radial_counting(&self, y: &Point, t: f64) -> f64 {
        if !(t >= 0.0) {
            return 0.0;
        }
        self.components.iter().map(|c| c.ball_mass(self.dim, y, t)).sum()
    }

    pub fn translated(&self, v: &Point) -> BorelMeasure {
        BorelMeasure { dim: self.dim, components: self.components.iter().map(|c| c.translated(v)).collect() }
    }

    pub fn sum(&self, other: &BorelMeasure) -> Result<BorelMeasure> {
        if self.dim != other.dim {
            return Err(domain("cannot add measures of different dimensions"));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(BorelMeasure { dim: self.dim, components })
    }

    /// `N_μ(r, R) = d̂ ∫_r^R μ_c^rad(t) t^{1−d} dt` around `center`.
    ///
    /// Atoms contribute `w (k(R) − k(max(r, |a − c|)))` exactly; continuous
    /// components are integrated between their nearest and farthest distance
    /// from the centre and contribute exactly beyond it. The value is +∞ when
    /// `r = 0` and the integrand is not integrable at 0.
    pub fn integrated_counting(&self, ctx: &DimensionContext, r: f64, big_r: f64, center: &Point) -> Result<ExtendedReal> {
        if !(r >= 0.0) || !(r < big_r) || !big_r.is_finite() {
            return Err(domain(format!("integrated counting needs 0 <= r < R, got r={r}, R={big_r}")));
        }
        let k = |t: f64| ctx.kernel_unchecked(t);
        let mut total = 0.0;
        for c in &self.components {
            let w = c.weight();
            let (near, far) = c.distance_range(center);
            if near > big_r {
                continue;
            }
            if let Component::Atom { .. } = c {
                if near == 0.0 && r == 0.0 {
                    return Ok(ExtendedReal::POS_INF);
                }
                total += w * (k(big_r) - k(near.max(r)));
                continue;
            }
            if r == 0.0 && near == 0.0 && ctx.d() >= 3 && matches!(c, Component::Segment { .. }) {
                // Mass ~ t near the centre against t^{−2}: logarithmic divergence.
                return Ok(ExtendedReal::POS_INF);
            }
            if far < big_r {
                total += w * (k(big_r) - k(far.max(r)));
            }
            let lo = near.max(r);
            let hi = far.min(big_r);
            if hi > lo {
                let d_hat = ctx.d_hat() as f64;
                let dim = ctx.d() as i32;
                let breaks = c.counting_breakpoints(center);
                let res = integrate_interval(
                    |t| ExtendedReal::from_f64(d_hat * c.ball_mass(self.dim, center, t) * t.powi(1 - dim)),
                    lo,
                    hi,
                    &breaks,
                    COUNTING_TOL,
                )?;
                total += res.value;
            }
        }
        Ok(ExtendedReal::from_f64(total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_atoms() -> BorelMeasure {
        BorelMeasure::atoms(2, &[(Point::ORIGIN, 1.0), (Point::new2(1.0, 0.0), 1.0)]).unwrap()
    }

    #[test]
    fn closed_ball_contains_its_centre_atom() {
        let mu = BorelMeasure::atoms(2, &[(Point::ORIGIN, 1.0)]).unwrap();
        assert_eq!(mu.radial_counting(&Point::ORIGIN, 0.0), 1.0);
    }

    #[test]
    fn atoms_on_the_boundary_are_counted() {
        assert_eq!(unit_atoms().radial_counting(&Point::new2(0.5, 0.0), 0.5), 2.0);
    }

    #[test]
    fn segment_proportional_length() {
        let mu = BorelMeasure::new(
            2,
            vec![Component::Segment { start: Point::ORIGIN, end: Point::new2(1.0, 0.0), weight: 1.0 }],
        )
        .unwrap();
        assert!((mu.radial_counting(&Point::ORIGIN, 0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn arc_mass_queries() {
        let circle = Component::Arc { center: Point::ORIGIN, radius: 1.0, from: 0.0, to: TAU, weight: 2.0 };
        // Centre of the circle: all or nothing.
        assert_eq!(circle.ball_mass(2, &Point::ORIGIN, 0.99), 0.0);
        assert_eq!(circle.ball_mass(2, &Point::ORIGIN, 1.0), 2.0);
        // A unit ball through the centre of the circle, centred on it, covers a third.
        let m = circle.ball_mass(2, &Point::new2(1.0, 0.0), 1.0);
        assert!((m - 2.0 / 3.0).abs() < 1e-12, "{m}");
        let half = Component::Arc { center: Point::ORIGIN, radius: 1.0, from: -0.5, to: 0.5, weight: 1.0 };
        assert!((half.ball_mass(2, &Point::new2(1.0, 0.0), 2.0) - 1.0).abs() < 1e-15);
        let far = half.ball_mass(2, &Point::new2(-1.0, 0.0), 1.0);
        assert_eq!(far, 0.0);
    }

    #[test]
    fn ball_intersections() {
        let disk = Component::Ball { center: Point::ORIGIN, radius: 1.0, weight: 1.0 };
        assert!((disk.ball_mass(2, &Point::ORIGIN, 0.5) - 0.25).abs() < 1e-14);
        // Symmetric lens of two unit disks at distance 1: 2π/3 − √3/2.
        let lens = disk.ball_mass(2, &Point::new2(1.0, 0.0), 1.0);
        assert!((lens - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0) / PI).abs() < 1e-13);
        let ball = Component::Ball { center: Point::ORIGIN, radius: 1.0, weight: 1.0 };
        // Two unit balls at distance 1: 5π/12.
        let v = ball.ball_mass(3, &Point::new3(1.0, 0.0, 0.0), 1.0);
        assert!((v - (5.0 * PI / 12.0) / (4.0 * PI / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn integrated_counting_anchors() {
        let d2 = DimensionContext::planar();
        let d3 = DimensionContext::spatial();
        let at0 = BorelMeasure::atoms(2, &[(Point::ORIGIN, 1.0)]).unwrap();
        let n = at0.integrated_counting(&d2, 1.0, std::f64::consts::E, &Point::ORIGIN).unwrap();
        assert!((n.value() - 1.0).abs() < 1e-15);
        let off = BorelMeasure::atoms(2, &[(Point::new2(0.5, 0.0), 1.0)]).unwrap();
        let n = off.integrated_counting(&d2, 1.0, 2.0, &Point::ORIGIN).unwrap();
        assert!((n.value() - 2f64.ln()).abs() < 1e-15);
        let at0_3 = BorelMeasure::atoms(3, &[(Point::ORIGIN, 1.0)]).unwrap();
        let n = at0_3.integrated_counting(&d3, 1.0, 2.0, &Point::ORIGIN).unwrap();
        assert!((n.value() - 0.5).abs() < 1e-15);
        assert!(at0.integrated_counting(&d2, 0.0, 1.0, &Point::ORIGIN).unwrap().is_pos_inf());
        assert!(at0.integrated_counting(&d2, 2.0, 1.0, &Point::ORIGIN).is_err());
    }

    #[test]
    fn integrated_counting_of_an_atom_matches_quadrature() {
        let d2 = DimensionContext::planar();
        let off = BorelMeasure::atoms(2, &[(Point::new2(0.5, 0.0), 1.0)]).unwrap();
        let q = integrate_interval(
            |t| ExtendedReal::from_f64(off.radial_counting(&Point::ORIGIN, t) / t),
            1.0,
            2.0,
            &[],
            1e-13,
        )
        .unwrap();
        let exact = off.integrated_counting(&d2, 1.0, 2.0, &Point::ORIGIN).unwrap();
        assert!((q.value - exact.value()).abs() < 1e-12);
    }

    #[test]
    fn integrated_counting_of_continuous_components() {
        let d2 = DimensionContext::planar();
        // Uniform disk of radius 1 centred at 0: μ^rad(t) = t² for t ≤ 1.
        let disk = BorelMeasure::new(2, vec![Component::Ball { center: Point::ORIGIN, radius: 1.0, weight: 1.0 }]).unwrap();
        let n = disk.integrated_counting(&d2, 0.0, 2.0, &Point::ORIGIN).unwrap();
        assert!((n.value() - (0.5 + 2f64.ln())).abs() < 1e-12);
        // Segment [0, 1]: μ^rad(t) = t, ∫_0^1 dt + ∫_1^3 dt/t.
        let seg = BorelMeasure::new(
            2,
            vec![Component::Segment { start: Point::ORIGIN, end: Point::new2(1.0, 0.0), weight: 1.0 }],
        )
        .unwrap();
        let n = seg.integrated_counting(&d2, 0.0, 3.0, &Point::ORIGIN).unwrap();
        assert!((n.value() - (1.0 + 3f64.ln())).abs() < 1e-12);
        let seg3 = BorelMeasure::new(
            3,
            vec![Component::Segment { start: Point::ORIGIN, end: Point::new3(0.0, 0.0, 1.0), weight: 1.0 }],
        )
        .unwrap();
        let d3 = DimensionContext::spatial();
        assert!(seg3.integrated_counting(&d3, 0.0, 2.0, &Point::ORIGIN).unwrap().is_pos_inf());
    }

    #[test]
    fn rejects_bad_components() {
        assert!(BorelMeasure::atoms(2, &[(Point::ORIGIN, -1.0)]).is_err());
        assert!(BorelMeasure::atoms(2, &[(Point::new3(0.0, 0.0, 1.0), 1.0)]).is_err());
        let arc3 = Component::Arc { center: Point::ORIGIN, radius: 1.0, from: 0.0, to: 1.0, weight: 1.0 };
        assert!(BorelMeasure::new(3, vec![arc3]).is_err());
        assert!(BorelMeasure::zero(4).is_err());
    }

    fn arb_component() -> impl Strategy<Value = Component> {
        let pt = (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Point::new2(x, y));
        prop_oneof![
            (pt.clone(), 0.1f64..2.0).prop_map(|(at, weight)| Component::Atom { at, weight }),
            (pt.clone(), pt.clone(), 0.1f64..2.0)
                .prop_filter("distinct", |(a, b, _)| a.dist(b) > 1e-3)
                .prop_map(|(start, end, weight)| Component::Segment { start, end, weight }),
            (pt.clone(), 0.1f64..1.0, -3.0f64..3.0, 0.1f64..TAU, 0.1f64..2.0).prop_map(|(center, radius, from, span, weight)| {
                Component::Arc { center, radius, from, to: from + span, weight }
            }),
            (pt, 0.05f64..1.0, 0.1f64..2.0).prop_map(|(center, radius, weight)| Component::Ball { center, radius, weight }),
        ]
    }

    proptest! {
        #[test]
        fn radial_counting_monotone_and_bounded(
            comps in proptest::collection::vec(arb_component(), 1..5),
            yx in -2.0f64..2.0, yy in -2.0f64..2.0,
            t1 in 0.0f64..3.0, dt in 0.0f64..1.0,
        ) {
            let mu = BorelMeasure::new(2, comps).unwrap();
            let y = Point::new2(yx, yy);
            let a = mu.radial_counting(&y, t1);
            let b = mu.radial_counting(&y, t1 + dt);
            prop_assert!(a <= b + 1e-12);
            prop_assert!(b <= mu.total_mass() + 1e-12);
            prop_assert!((mu.radial_counting(&Point::ORIGIN, mu.support_radius()) - mu.total_mass()).abs() < 1e-9);
        }

        #[test]
        fn integrated_counting_additive_and_splits(
            c1 in proptest::collection::vec(arb_component(), 1..4),
            c2 in proptest::collection::vec(arb_component(), 1..4),
            r in 0.05f64..1.0, gap1 in 0.05f64..1.0, gap2 in 0.05f64..1.0,
        ) {
            let ctx = DimensionContext::planar();
            let m1 = BorelMeasure::new(2, c1).unwrap();
            let m2 = BorelMeasure::new(2, c2).unwrap();
            let s = r + gap1;
            let big = s + gap2;
            let o = Point::ORIGIN;
            let n1 = m1.integrated_counting(&ctx, r, big, &o).unwrap().value();
            let n2 = m2.integrated_counting(&ctx, r, big, &o).unwrap().value();
            let n12 = m1.sum(&m2).unwrap().integrated_counting(&ctx, r, big, &o).unwrap().value();
            prop_assert!((n12 - (n1 + n2)).abs() <= 1e-14 * n12.abs().max(1.0));
            let left = m1.integrated_counting(&ctx, r, s, &o).unwrap().value();
            let right = m1.integrated_counting(&ctx, s, big, &o).unwrap().value();
            prop_assert!((left + right - n1).abs() <= 1e-10 * n1.abs().max(1e-300) + 1e-13);
        }
    }
}
