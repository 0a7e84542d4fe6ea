//! Modulus of continuity `h_μ(t) = sup_y μ(B̄_y(t))` and the Dini integral.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};
use crate::measure::{arc_endpoint, BorelMeasure, Component};
use crate::quadrature::{integrate_interval, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

impl Exactness {
    pub fn and(self, other: Exactness) -> Exactness {
        if self == Exactness::Exact && other == Exactness::Exact {
            Exactness::Exact
        } else {
            Exactness::LowerBound
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusValue {
    pub value: f64,
    pub exactness: Exactness,
}

/// Relative slack for "atom lies on the sphere" decisions at candidate centres.
const ON_SPHERE_SLACK: f64 = 1e-12;

/// `h_μ(t)`.
///
/// Exact for the zero measure, a single primitive, and purely atomic planar
/// measures. Anything else is a lower bound: the largest of the exact
/// per-component values and a multi-start pattern search.
pub fn modulus_of_continuity(mu: &BorelMeasure, t: f64) -> ModulusValue {
    let t = t.max(0.0);
    let comps = mu.components();
    if comps.is_empty() {
        return ModulusValue { value: 0.0, exactness: Exactness::Exact };
    }
    if comps.len() == 1 {
        return ModulusValue { value: primitive_modulus(mu.dim(), &comps[0], t), exactness: Exactness::Exact };
    }
    let total = mu.total_mass();
    if mu.is_atomic() {
        let atoms = atom_list(comps);
        let (value, exactness) = if mu.dim() == 2 {
            (atomic_planar(&atoms, t), Exactness::Exact)
        } else {
            let best = atomic_spatial_candidates(&atoms, t);
            (best.max(pattern_search(mu, t, &candidate_starts(mu, t))), Exactness::LowerBound)
        };
        return ModulusValue { value: value.min(total), exactness };
    }
    let per_component = comps.iter().map(|c| primitive_modulus(mu.dim(), c, t)).fold(0.0, f64::max);
    let searched = pattern_search(mu, t, &candidate_starts(mu, t));
    ModulusValue { value: per_component.max(searched).min(total), exactness: Exactness::LowerBound }
}

/// Closed-form modulus of a single primitive.
pub fn primitive_modulus(d: usize, c: &Component, t: f64) -> f64 {
    match *c {
        Component::Atom { weight, .. } => weight,
        Component::Segment { start, end, weight } => {
            let len = start.dist(&end);
            weight * (2.0 * t / len).min(1.0)
        }
        Component::Arc { radius, from, to, weight, .. } => {
            if t >= radius {
                return weight;
            }
            let span = to - from;
            weight * (2.0 * (t / radius).asin()).min(span) / span
        }
        Component::Ball { radius, weight, .. } => weight * (t / radius).min(1.0).powi(d as i32),
    }
}

/// Lengths at which the closed-form modulus of a primitive changes regime.
fn primitive_breakpoints(c: &Component) -> Vec<f64> {
    match *c {
        Component::Atom { .. } => vec![],
        Component::Segment { start, end, .. } => vec![0.5 * start.dist(&end)],
        Component::Arc { radius, from, to, .. } => {
            let span = to - from;
            let mut v = vec![radius];
            if span < PI {
                v.push(radius * (0.5 * span).sin());
            }
            v
        }
        Component::Ball { radius, .. } => vec![radius],
    }
}

fn atom_list(comps: &[Component]) -> Vec<(Point, f64)> {
    comps
        .iter()
        .filter_map(|c| match *c {
            Component::Atom { at, weight } => Some((at, weight)),
            _ => None,
        })
        .collect()
}

fn covered(atoms: &[(Point, f64)], y: &Point, t: f64) -> f64 {
    let lim = t + ON_SPHERE_SLACK * (t + 1.0);
    atoms.iter().filter(|(p, _)| p.dist(y) <= lim).map(|(_, w)| w).sum()
}

/// Exact `h_μ(t)` for planar atoms: an optimal disk can be moved until its
/// boundary passes through two atoms, or it is centred at an atom.
pub fn atomic_planar(atoms: &[(Point, f64)], t: f64) -> f64 {
    let mut best = 0.0f64;
    for (p, _) in atoms {
        best = best.max(covered(atoms, p, t));
    }
    for (i, (p, _)) in atoms.iter().enumerate() {
        for (q, _) in &atoms[i + 1..] {
            let dist = p.dist(q);
            if dist == 0.0 || dist > 2.0 * t {
                continue;
            }
            let mid = 0.5 * (*p + *q);
            let h = (t * t - 0.25 * dist * dist).max(0.0).sqrt();
            let perp = Point::new2(-(q.y() - p.y()) / dist, (q.x() - p.x()) / dist);
            for s in [h, -h] {
                best = best.max(covered(atoms, &(mid + s * perp), t));
            }
        }
    }
    best
}

/// Candidate centres for spatial atoms: atoms, pair midpoints and the
/// circumcentres of triples that fit in a ball of radius `t`.
fn atomic_spatial_candidates(atoms: &[(Point, f64)], t: f64) -> f64 {
    let mut best = 0.0f64;
    let n = atoms.len();
    for i in 0..n {
        best = best.max(covered(atoms, &atoms[i].0, t));
        for j in i + 1..n {
            let (p, q) = (atoms[i].0, atoms[j].0);
            if p.dist(&q) <= 2.0 * t {
                best = best.max(covered(atoms, &(0.5 * (p + q)), t));
            }
            for k in j + 1..n.min(j + 1 + 24) {
                if let Some(c) = circumcentre(&p, &q, &atoms[k].0) {
                    if c.dist(&p) <= t {
                        best = best.max(covered(atoms, &c, t));
                    }
                }
            }
        }
    }
    best
}

fn circumcentre(a: &Point, b: &Point, c: &Point) -> Option<Point> {
    let u = *b - *a;
    let v = *c - *a;
    let uu = u.dot(&u);
    let vv = v.dot(&v);
    let uv = u.dot(&v);
    let det = 2.0 * (uu * vv - uv * uv);
    if det.abs() <= 1e-300 {
        return None;
    }
    let s = vv * (uu - uv) / det;
    let r = uu * (vv - uv) / det;
    Some(*a + s * u + r * v)
}

fn candidate_starts(mu: &BorelMeasure, t: f64) -> Vec<Point> {
    // The origin attains saturation once t reaches the support radius.
    let mut starts = vec![Point::ORIGIN];
    for c in mu.components() {
        starts.push(c.centroid());
        match *c {
            Component::Segment { start, end, .. } => {
                for j in 0..=4 {
                    let s = j as f64 / 4.0;
                    starts.push(start + s * (end - start));
                }
            }
            Component::Arc { center, radius, from, to, .. } => {
                let mid = 0.5 * (from + to);
                let inward = (radius * radius - t * t).max(0.0).sqrt();
                starts.push(arc_endpoint(&center, inward, mid));
                starts.push(center);
                for j in 0..=4 {
                    starts.push(arc_endpoint(&center, radius, from + (to - from) * j as f64 / 4.0));
                }
            }
            _ => {}
        }
    }
    let base: Vec<Point> = mu.components().iter().take(24).map(Component::centroid).collect();
    for (i, p) in base.iter().enumerate() {
        for q in &base[i + 1..] {
            starts.push(0.5 * (*p + *q));
        }
    }
    starts
}

fn directions(d: usize) -> Vec<Point> {
    if d == 2 {
        (0..8)
            .map(|j| {
                let a = PI * j as f64 / 4.0;
                Point::new2(a.cos(), a.sin())
            })
            .collect()
    } else {
        let mut v = vec![
            Point::new3(1.0, 0.0, 0.0),
            Point::new3(-1.0, 0.0, 0.0),
            Point::new3(0.0, 1.0, 0.0),
            Point::new3(0.0, -1.0, 0.0),
            Point::new3(0.0, 0.0, 1.0),
            Point::new3(0.0, 0.0, -1.0),
        ];
        let s = 1.0 / 3f64.sqrt();
        for sx in [-s, s] {
            for sy in [-s, s] {
                for sz in [-s, s] {
                    v.push(Point::new3(sx, sy, sz));
                }
            }
        }
        v
    }
}

/// Compass search on `y ↦ μ(B̄_y(t))` from the best dozen starts.
fn pattern_search(mu: &BorelMeasure, t: f64, starts: &[Point]) -> f64 {
    let f = |y: &Point| mu.radial_counting(y, t);
    let mut scored: Vec<(f64, Point)> = starts.iter().map(|p| (f(p), *p)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let dirs = directions(mu.dim());
    let scale = mu.support_radius().max(1e-12);
    let mut best = scored.first().map(|s| s.0).unwrap_or(0.0);
    for &(v0, p0) in scored.iter().take(12) {
        let (mut v, mut p) = (v0, p0);
        let mut step = 0.5 * t.max(1e-9 * scale);
        let min_step = step * 1e-6;
        let mut evals = 0;
        while step > min_step && evals < 4000 {
            let mut moved = false;
            for dir in &dirs {
                let q = p + step * *dir;
                let w = f(&q);
                evals += 1;
                if w > v * (1.0 + 1e-14) + 1e-300 {
                    v = w;
                    p = q;
                    moved = true;
                    break;
                }
            }
            if !moved {
                step *= FRAC_1_SQRT_2;
            }
        }
        best = best.max(v);
    }
    best
}

/// `h_μ` on an increasing radius grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub exactness: Vec<Exactness>,
}

impl ModulusProfile {
    pub fn sample(mu: &BorelMeasure, radii: &[f64]) -> Self {
        let mut radii = radii.to_vec();
        radii.sort_by(f64::total_cmp);
        let vals: Vec<ModulusValue> = radii.iter().map(|&t| modulus_of_continuity(mu, t)).collect();
        // h is non-decreasing, so a bound at a smaller radius still bounds the larger one.
        let values = vals
            .iter()
            .scan(0.0f64, |best, v| {
                *best = best.max(v.value);
                Some(*best)
            })
            .collect();
        Self {
            radii,
            values,
            exactness: vals.iter().map(|v| v.exactness).collect(),
        }
    }

    /// Grid `upper · 2^{−k}`, k = 0..=levels, in increasing order.
    pub fn geometric(mu: &BorelMeasure, upper: f64, levels: u32) -> Self {
        let radii: Vec<f64> = (0..=levels).rev().map(|k| upper * 0.5f64.powi(k as i32)).collect();
        Self::sample(mu, &radii)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Values never decrease along the grid (up to `slack` on lower bounds).
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1] + slack)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiniIntegral {
    /// `∫_0^upper h_μ(t) t^{1−d} dt`; +∞ when the tail does not converge.
    pub value: ExtendedReal,
    pub error_estimate: f64,
    /// `LowerBound` means `value` under-estimates the true integral.
    pub exactness: Exactness,
    pub cells: usize,
}

const DINI_MAX_CELLS: usize = 60;
const DINI_DIVERGENCE_SUM: f64 = 1e12;
/// Sub-cells per dyadic cell in the lower Riemann sum for search-based profiles.
const LOWER_SUM_SPLIT: usize = 16;

/// Dini integral over dyadic cells `[u 2^{−k−1}, u 2^{−k}]`.
///
/// Exact profiles are integrated cell by cell with adaptive Gauss–Kronrod.
/// Search-based profiles use a lower Riemann sum, which stays below the true
/// integral because `h_μ` is non-decreasing.
pub fn dini_integral(ctx: &DimensionContext, mu: &BorelMeasure, upper: f64, tol: f64) -> DiniIntegral {
    let d = ctx.d() as i32;
    if mu.is_zero() || !(upper > 0.0) {
        return DiniIntegral { value: ExtendedReal::ZERO, error_estimate: 0.0, exactness: Exactness::Exact, cells: 0 };
    }
    if mu.has_atoms() {
        // h_μ ≥ smallest atom weight near 0 and ∫_0 t^{1−d} dt diverges.
        return DiniIntegral { value: ExtendedReal::POS_INF, error_estimate: 0.0, exactness: Exactness::Exact, cells: 0 };
    }
    let exact = mu.components().len() == 1;
    let breaks: Vec<f64> = mu.components().iter().flat_map(primitive_breakpoints).collect();
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut contributions: Vec<f64> = Vec::new();
    let mut exactness = if exact { Exactness::Exact } else { Exactness::LowerBound };
    for k in 0..DINI_MAX_CELLS {
        let hi = upper * 0.5f64.powi(k as i32);
        let lo = 0.5 * hi;
        let c = if exact {
            let comp = &mu.components()[0];
            let integrand = |t: f64| ExtendedReal::from_f64(primitive_modulus(ctx.d(), comp, t) * t.powi(1 - d));
            match integrate_interval(integrand, lo, hi, &breaks, Tolerance { abs: 0.0, rel: 0.1 * tol }) {
                Ok(r) => {
                    err += r.error_estimate;
                    r.value
                }
                Err(e) => {
                    log::warn!("dini cell [{lo}, {hi}] did not converge: {e}");
                    exactness = Exactness::LowerBound;
                    lower_sum_cell(mu, d, lo, hi)
                }
            }
        } else {
            lower_sum_cell(mu, d, lo, hi)
        };
        sum += c;
        contributions.push(c);
        if sum > DINI_DIVERGENCE_SUM {
            return divergent(k + 1);
        }
        if c == 0.0 {
            // h_μ vanishes on the cell, hence below it.
            return DiniIntegral { value: ExtendedReal::from_f64(sum), error_estimate: err, exactness, cells: k + 1 };
        }
        if k >= 4 {
            let q = c / contributions[k - 1];
            if q <= 0.75 && c <= 0.1 * tol * sum {
                let tail = c * q / (1.0 - q);
                if exactness == Exactness::Exact {
                    sum += tail;
                }
                err += tail;
                return DiniIntegral { value: ExtendedReal::from_f64(sum), error_estimate: err, exactness, cells: k + 1 };
            }
            if k >= 16 && contributions[k - 8..=k].windows(2).all(|w| w[1] >= 0.95 * w[0]) {
                return divergent(k + 1);
            }
        }
    }
    divergent(DINI_MAX_CELLS)
}

fn divergent(cells: usize) -> DiniIntegral {
    DiniIntegral { value: ExtendedReal::POS_INF, error_estimate: 0.0, exactness: Exactness::Exact, cells }
}

fn lower_sum_cell(mu: &BorelMeasure, d: i32, lo: f64, hi: f64) -> f64 {
    let ratio = (hi / lo).powf(1.0 / LOWER_SUM_SPLIT as f64);
    let mut a = lo;
    let mut total = 0.0;
    for j in 0..LOWER_SUM_SPLIT {
        let b = if j + 1 == LOWER_SUM_SPLIT { hi } else { a * ratio };
        let weight = if d == 2 { (b / a).ln() } else { (a.powi(2 - d) - b.powi(2 - d)) / (d - 2) as f64 };
        total += modulus_of_continuity(mu, a).value * weight;
        a = b;
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiniLimits {
    /// `(t, h_μ(t))` at the smallest grid radii, increasing `t`.
    pub h_tail: Vec<(f64, f64)>,
    /// `(t, h_μ(t) k(t))` at the same radii.
    pub hk_tail: Vec<(f64, f64)>,
    pub h_tends_to_zero: bool,
    pub hk_tends_to_zero: bool,
}

const LIMIT_TOL: f64 = 1e-6;
const LIMIT_TAIL: usize = 5;

/// Checks `h_μ(t) → 0` and `h_μ(t) k(t) → 0` on the small end of the grid:
/// the tail must decay toward 0 and end below `1e−6` times the profile maximum.
pub fn dini_limits_check(profile: &ModulusProfile, ctx: &DimensionContext) -> DiniLimits {
    let n = profile.len().min(LIMIT_TAIL);
    let h_tail: Vec<(f64, f64)> = profile.radii.iter().zip(&profile.values).take(n).map(|(&t, &h)| (t, h)).collect();
    let hk_tail: Vec<(f64, f64)> = h_tail
        .iter()
        .map(|&(t, h)| (t, if h == 0.0 { 0.0 } else { h * ctx.kernel_unchecked(t) }))
        .collect();
    let scale = profile.values.iter().copied().fold(0.0, f64::max).max(1e-300);
    let decays = |tail: &[(f64, f64)]| {
        tail.windows(2).all(|w| w[0].1.abs() <= w[1].1.abs() * (1.0 + 1e-12))
            && tail.first().is_none_or(|p| p.1.abs() <= LIMIT_TOL * scale)
    };
    DiniLimits {
        h_tends_to_zero: decays(&h_tail),
        hk_tends_to_zero: decays(&hk_tail),
        h_tail,
        hk_tail,
    }
}
