use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use super::gauss::{gauss_legendre, kronrod15};
use super::{QuadratureError, QuadratureResult, Tolerance};
use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};

const PRODUCT_LEVELS: [usize; 5] = [8, 16, 32, 64, 128];
const MAX_CELLS: usize = 40_000;

/// Point of the sphere of radius `r` at polar angle `theta`, azimuth `phi`.
#[inline]
pub fn sphere_point(r: f64, theta: f64, phi: f64) -> Point {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Point::new3(r * st * cp, r * st * sp, r * ct)
}

fn eval<G>(g: &G, theta: f64, phi: f64) -> Result<f64, QuadratureError>
where
    G: Fn(f64, f64) -> ExtendedReal,
{
    if let Some(v) = g(theta, phi).finite() {
        return Ok(v);
    }
    let nudged = theta + 8.0 * f64::EPSILON * (1.0 + theta);
    log::debug!("sphere node ({theta}, {phi}) hit a polar value, nudged");
    g(nudged, phi).finite().ok_or(QuadratureError::NonIntegrable { at: theta })
}

/// Mean of `g(θ, φ)` over the unit sphere in `R^3` (area element `sin θ dθ dφ`).
///
/// Product Gauss–Legendre (polar) × trapezoid (azimuthal) with doubling until
/// two successive refinements agree within `tol`; integrands that do not settle
/// (near-singular peaks) fall through to adaptive tensor Gauss–Kronrod cells.
pub fn sphere_mean_3d<G>(
    ctx: &DimensionContext,
    g: G,
    tol: impl Into<Tolerance>,
) -> Result<QuadratureResult, QuadratureError>
where
    G: Fn(f64, f64) -> ExtendedReal,
{
    if ctx.d() != 3 {
        return Err(QuadratureError::UnsupportedDimension(ctx.d()));
    }
    let tol = tol.into();
    let mut previous: Option<f64> = None;
    let mut settled = false;
    let mut nodes = 0usize;
    for &n in &PRODUCT_LEVELS {
        let q = product_rule(&g, n)?;
        nodes += n * 2 * n;
        if let Some(p) = previous {
            let change = (q - p).abs();
            let small = change <= tol.target(q);
            if small && settled {
                return Ok(QuadratureResult {
                    value: q,
                    error_estimate: change,
                    nodes_used: nodes,
                    singularities_split: Vec::new(),
                });
            }
            settled = small;
        }
        previous = Some(q);
    }
    adaptive_cells(&g, tol, nodes)
}

fn product_rule<G>(g: &G, n: usize) -> Result<f64, QuadratureError>
where
    G: Fn(f64, f64) -> ExtendedReal,
{
    let (x, w) = gauss_legendre(n);
    let m = 2 * n;
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let theta = 0.5 * PI * (xi + 1.0);
        let mut ring = 0.0;
        for j in 0..m {
            let phi = TAU * (j as f64 + 0.5) / m as f64;
            ring += eval(g, theta, phi)?;
        }
        total += wi * theta.sin() * ring / m as f64;
    }
    // (1/4π) · (π/2) · 2π = π/4 in front of the averaged rings.
    Ok(0.25 * PI * total)
}

struct Cell {
    t0: f64,
    t1: f64,
    p0: f64,
    p1: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn tensor_gk<G>(g: &G, t0: f64, t1: f64, p0: f64, p1: f64) -> Result<Cell, QuadratureError>
where
    G: Fn(f64, f64) -> ExtendedReal,
{
    let rule = kronrod15();
    let (tc, th) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
    let (pc, ph) = (0.5 * (p0 + p1), 0.5 * (p1 - p0));
    let mut k = 0.0;
    let mut gs = 0.0;
    for &(xt, wkt, wgt) in &rule {
        let theta = tc + th * xt;
        let st = theta.sin();
        for &(xp, wkp, wgp) in &rule {
            let v = eval(g, theta, pc + ph * xp)? * st;
            k += wkt * wkp * v;
            gs += wgt * wgp * v;
        }
    }
    let scale = th * ph / (4.0 * PI);
    Ok(Cell { t0, t1, p0, p1, value: k * scale, error: ((k - gs) * scale).abs() })
}

fn adaptive_cells<G>(g: &G, tol: Tolerance, mut nodes: usize) -> Result<QuadratureResult, QuadratureError>
where
    G: Fn(f64, f64) -> ExtendedReal,
{
    let mut heap = BinaryHeap::new();
    let (nt, np) = (4, 8);
    for i in 0..nt {
        for j in 0..np {
            let t0 = PI * i as f64 / nt as f64;
            let t1 = PI * (i + 1) as f64 / nt as f64;
            let p0 = TAU * j as f64 / np as f64;
            let p1 = TAU * (j + 1) as f64 / np as f64;
            heap.push(tensor_gk(g, t0, t1, p0, p1)?);
            nodes += 225;
        }
    }
    let totals = |h: &BinaryHeap<Cell>| h.iter().fold((0.0, 0.0), |(v, e), c| (v + c.value, e + c.error));
    let (mut value, mut error) = totals(&heap);
    while error > tol.target(value) {
        if heap.len() >= MAX_CELLS {
            return Err(QuadratureError::BudgetExceeded { partial: value, error_estimate: error, nodes_used: nodes });
        }
        let c = heap.pop().expect("non-empty cell heap");
        let (a, b) = if c.t1 - c.t0 >= 0.5 * (c.p1 - c.p0) {
            let m = 0.5 * (c.t0 + c.t1);
            (tensor_gk(g, c.t0, m, c.p0, c.p1)?, tensor_gk(g, m, c.t1, c.p0, c.p1)?)
        } else {
            let m = 0.5 * (c.p0 + c.p1);
            (tensor_gk(g, c.t0, c.t1, c.p0, m)?, tensor_gk(g, c.t0, c.t1, m, c.p1)?)
        };
        nodes += 450;
        value += a.value + b.value - c.value;
        error += a.error + b.error - c.error;
        heap.push(a);
        heap.push(b);
    }
    let (value, error) = totals(&heap);
    Ok(QuadratureResult { value, error_estimate: error, nodes_used: nodes, singularities_split: Vec::new() })
}
