use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::verify_all;
use super::report::{InequalityTag, VerificationReport};
use super::{Scenario, ScenarioFunction, Tolerances};
use crate::geometry::Point;
use crate::measure::{BorelMeasure, Component};
use crate::potential::{DeltaSubharmonicFn, HarmonicPart, MeromorphicFn, SubharmonicFn};

/// Scenario families of the seeded corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Angle measure on an arc of `∂B(r)`, random rational `f`.
    Arc,
    /// Area measure on disjoint discs in `B̄(r)`, random rational `f`.
    Disks,
    /// Length measure on segments in `B̄(r)`, random rational `f`.
    Segments,
    /// Planar δ-subharmonic functions with atoms, discs and segments as charges.
    PlanarCharges,
    /// Spatial δ-subharmonic functions with atoms and balls as charges.
    SpatialCharges,
    /// Purely atomic measures; the Dini condition fails by design.
    Atomic,
}

impl Family {
    pub const DINI_ADMISSIBLE: [Family; 5] =
        [Family::Arc, Family::Disks, Family::Segments, Family::PlanarCharges, Family::SpatialCharges];

    fn label(self) -> &'static str {
        match self {
            Family::Arc => "arc",
            Family::Disks => "disks",
            Family::Segments => "segments",
            Family::PlanarCharges => "charges2",
            Family::SpatialCharges => "charges3",
            Family::Atomic => "atomic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    pub count: usize,
    /// Cycled through by scenario index.
    pub families: Vec<Family>,
    pub checks: Vec<InequalityTag>,
    /// Sample points per scenario for the pointwise and Poisson–Jensen checks.
    pub sample_points: usize,
    pub tolerances: Tolerances,
    /// Record wall time per row; off by default so output is reproducible.
    pub timing: bool,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            count: 200,
            families: Family::DINI_ADMISSIBLE.to_vec(),
            checks: InequalityTag::ALL.to_vec(),
            sample_points: 16,
            tolerances: Tolerances::default(),
            timing: false,
            threads: None,
        }
    }
}

fn stream(seed: u64, salt: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    rng.set_stream(index as u64);
    rng
}

fn in_ball(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> Point {
    loop {
        let p = match d {
            2 => Point::new2(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
            _ => Point::new3(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)),
        };
        if p.norm() <= 1.0 {
            return radius * p;
        }
    }
}

/// Uniform sample points in `B̄(r)`, kept off the atoms of the charge.
pub fn sample_points(s: &Scenario, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = stream(seed, 0x5A4D_9E37, 0);
    let (plus, minus) = s.u.jordan_decomposition();
    let atoms: Vec<Point> = plus
        .components()
        .iter()
        .chain(minus.components())
        .filter_map(|c| match *c {
            Component::Atom { at, .. } => Some(at),
            _ => None,
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = in_ball(&mut rng, s.ctx.d(), s.r);
        if atoms.iter().all(|a| a.dist(&p) > 1e-6 * s.r) {
            out.push(p);
        }
    }
    out
}

/// Geometry a generated charge must keep clear of.
struct Clearance<'a> {
    r: f64,
    big_r: f64,
    mu: &'a BorelMeasure,
}

impl Clearance<'_> {
    fn margin(&self) -> f64 {
        0.02 * self.big_r
    }

    fn clear_of_spheres(&self, near: f64, far: f64, spheres: &[f64]) -> bool {
        spheres.iter().all(|&rho| far < rho - self.margin() || near > rho + self.margin())
    }

    fn atom_ok(&self, a: &Point) -> bool {
        let support = self.mu.components().iter().map(|c| c.distance_range(a).0).fold(f64::INFINITY, f64::min);
        support > self.margin() && self.clear_of_spheres(a.norm(), a.norm(), &[self.r, self.big_r])
    }

    /// Continuous charges stay outside `B̄(r)`, so they never meet μ, and do
    /// not cross the spheres of radius `(R + r)/2` and `R`.
    fn continuous_ok(&self, c: &Component) -> bool {
        let (near, far) = c.distance_range(&Point::ORIGIN);
        near > self.r + self.margin() && self.clear_of_spheres(near, far, &[0.5 * (self.r + self.big_r), self.big_r])
    }
}

fn radii(rng: &mut ChaCha8Rng) -> (f64, f64, Option<f64>) {
    let r = rng.gen_range(0.5..2.0);
    let big_r = r * rng.gen_range(1.3..3.0);
    let r0 = match rng.gen_range(0..10) {
        0..=2 => None,
        3..=4 => Some(0.0),
        _ => Some(rng.gen_range(0.0..=r)),
    };
    (r, big_r, r0)
}

fn charge_atom(rng: &mut ChaCha8Rng, d: usize, clear: &Clearance) -> Point {
    loop {
        let a = in_ball(rng, d, 0.8 * clear.big_r);
        if clear.atom_ok(&a) {
            return a;
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng, clear: &Clearance) -> MeromorphicFn {
    let complex = |p: Point| Complex64::new(p.x(), p.y());
    let nz = rng.gen_range(0..=4);
    let np = rng.gen_range(if nz == 0 { 1 } else { 0 }..=3);
    let mut zeros = Vec::new();
    for _ in 0..nz {
        zeros.push((complex(charge_atom(rng, 2, clear)), if rng.gen_bool(0.2) { 2 } else { 1 }));
    }
    let mut poles = Vec::new();
    for i in 0..np {
        let origin_ok = clear.atom_ok(&Point::ORIGIN);
        let b = if i == 0 && origin_ok && rng.gen_bool(0.15) { Point::ORIGIN } else { charge_atom(rng, 2, clear) };
        poles.push((complex(b), 1));
    }
    let unit = Complex64::from_polar(rng.gen_range(-1.0f64..1.0).exp(), rng.gen_range(-PI..PI));
    let exponent = if rng.gen_bool(0.3) {
        let degree = rng.gen_range(1..=2);
        (0..=degree)
            .map(|k| if k == 0 { Complex64::new(0.0, 0.0) } else { Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)) })
            .collect()
    } else {
        Vec::new()
    };
    MeromorphicFn::new(zeros, poles, unit, exponent).expect("generated meromorphic data is valid")
}

fn disjoint_balls(rng: &mut ChaCha8Rng, d: usize, r: f64, count: usize, weight_by_volume: bool) -> Vec<Component> {
    let mut out: Vec<Component> = Vec::new();
    while out.len() < count {
        let radius = rng.gen_range(0.05 * r..0.4 * r);
        let center = in_ball(rng, d, r - radius);
        let apart = out.iter().all(|c| match c {
            Component::Ball { center: c2, radius: r2, .. } => c2.dist(&center) > radius + r2 + 0.01 * r,
            _ => true,
        });
        if apart {
            let weight = if weight_by_volume { radius.powi(d as i32) * if d == 2 { PI } else { 4.0 * PI / 3.0 } } else { rng.gen_range(0.5..2.0) };
            out.push(Component::Ball { center, radius, weight });
        }
    }
    out
}

fn arc_measure(rng: &mut ChaCha8Rng, r: f64) -> Component {
    let span = rng.gen_range(0.3..=TAU);
    let from = rng.gen_range(-PI..PI);
    Component::Arc { center: Point::ORIGIN, radius: r, from, to: from + span, weight: span }
}

fn segment_in(rng: &mut ChaCha8Rng, r: f64) -> Component {
    loop {
        let start = in_ball(rng, 2, r);
        let end = in_ball(rng, 2, r);
        if start.dist(&end) > 0.1 * r {
            return Component::Segment { start, end, weight: start.dist(&end) };
        }
    }
}

fn continuous_charge(rng: &mut ChaCha8Rng, d: usize, clear: &Clearance, segment: bool) -> Component {
    loop {
        let c = if segment {
            let start = in_ball(rng, 2, 1.5 * clear.big_r);
            let dir = in_ball(rng, 2, 0.3 * clear.big_r);
            Component::Segment { start, end: start + dir, weight: rng.gen_range(0.5..2.0) }
        } else {
            let radius = rng.gen_range(0.02..0.15) * clear.big_r;
            Component::Ball { center: in_ball(rng, d, 1.5 * clear.big_r), radius, weight: rng.gen_range(0.5..2.0) }
        };
        if c.validate(d).is_ok() && clear.continuous_ok(&c) {
            return c;
        }
    }
}

fn random_charges(rng: &mut ChaCha8Rng, d: usize, clear: &Clearance) -> DeltaSubharmonicFn {
    let atoms = |rng: &mut ChaCha8Rng, n: usize| -> Vec<Component> {
        (0..n).map(|_| Component::Atom { at: charge_atom(rng, d, clear), weight: rng.gen_range(0.5..2.0) }).collect()
    };
    let (np, nn) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    let mut pos = atoms(rng, np);
    let mut neg = atoms(rng, nn);
    if rng.gen_bool(0.5) {
        pos.push(continuous_charge(rng, d, clear, false));
    }
    if rng.gen_bool(0.5) {
        neg.push(continuous_charge(rng, d, clear, d == 2));
    }
    // Partial cancellation: one geometry carried by both parts.
    if let Some(Component::Atom { at, weight }) = pos.first().cloned() {
        if rng.gen_bool(0.3) {
            neg.push(Component::Atom { at, weight: weight * rng.gen_range(0.2..0.8) });
        }
    }
    if pos.is_empty() && neg.is_empty() {
        pos = atoms(rng, 1);
    }
    let mut gradient = [0.0; 3];
    for g in gradient.iter_mut().take(d) {
        *g = rng.gen_range(-0.5..0.5);
    }
    let harmonic = HarmonicPart::affine(rng.gen_range(-1.0..1.0), gradient);
    let u = SubharmonicFn::new(harmonic, BorelMeasure::new(d, pos).expect("valid charge")).expect("valid part");
    let v = SubharmonicFn::new(HarmonicPart::zero(), BorelMeasure::new(d, neg).expect("valid charge")).expect("valid part");
    DeltaSubharmonicFn::new(u, v).expect("charges of opposite sign are disjoint")
}

fn generate_one(family: Family, seed: u64, index: usize, tolerances: Tolerances) -> Scenario {
    let mut rng = stream(seed, 0xC0_5E_ED, index);
    let (r, big_r, r0) = radii(&mut rng);
    let d = if family == Family::SpatialCharges { 3 } else { 2 };
    let components = match family {
        Family::Arc => vec![arc_measure(&mut rng, r)],
        Family::Disks => {
            let n = rng.gen_range(1..=3);
            disjoint_balls(&mut rng, 2, r, n, true)
        }
        Family::Segments => (0..rng.gen_range(1..=2)).map(|_| segment_in(&mut rng, r)).collect(),
        Family::PlanarCharges => {
            if rng.gen_bool(0.5) {
                vec![arc_measure(&mut rng, r)]
            } else {
                disjoint_balls(&mut rng, 2, r, 1, false)
            }
        }
        Family::SpatialCharges => {
            let n = rng.gen_range(1..=2);
            disjoint_balls(&mut rng, 3, r, n, false)
        }
        Family::Atomic => (0..rng.gen_range(1..=5))
            .map(|_| Component::Atom { at: in_ball(&mut rng, 2, r), weight: rng.gen_range(0.2..1.0) })
            .collect(),
    };
    let mu = BorelMeasure::new(d, components).expect("generated measure is valid");
    let clear = Clearance { r, big_r, mu: &mu };
    let function = match family {
        Family::PlanarCharges | Family::SpatialCharges => ScenarioFunction::DeltaSubharmonic(random_charges(&mut rng, d, &clear)),
        _ => ScenarioFunction::Meromorphic(random_rational(&mut rng, &clear)),
    };
    let id = format!("{}-{index:04}", family.label());
    let mut s = Scenario::new(id, function, mu, r, big_r, r0).expect("generated scenario is valid").with_tolerances(tolerances);
    s.seed = Some(seed);
    s
}

/// Deterministic scenarios for `seed`; scenario `i` draws from its own stream.
pub fn generate_corpus(config: &CorpusConfig, seed: u64) -> Vec<Scenario> {
    if config.families.is_empty() {
        return Vec::new();
    }
    (0..config.count)
        .map(|i| generate_one(config.families[i % config.families.len()], seed, i, config.tolerances))
        .collect()
}

/// Generates and checks the corpus; rows come back in scenario order.
pub fn run_corpus(config: &CorpusConfig, seed: u64) -> Vec<VerificationReport> {
    let scenarios = generate_corpus(config, seed);
    let run = || -> Vec<VerificationReport> {
        scenarios
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let points = sample_points(s, config.sample_points, seed.wrapping_add(i as u64));
                verify_all(s, &config.checks, &points, config.timing)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not build a pool of {n} threads: {e}");
                run()
            }
        },
        None => run(),
    }
}
