use std::f64::consts::{PI, TAU};

use super::sphere::sphere_point;
use super::QuadratureError;
use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};

pub const CIRCLE_SUP_GRID: usize = 4096;
const SPHERE_SUP_GRID: (usize, usize) = (100, 100);
const CANDIDATES: usize = 8;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Sampled supremum: a lower bound on the true supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct SupResult {
    pub value: ExtendedReal,
    /// `(θ)` on a circle, `(θ, φ)` on a 2-sphere.
    pub argmax: Vec<f64>,
    /// Last improvement of the local refinement at the winning candidate.
    pub refinement_gap: f64,
    pub evaluations: usize,
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, f64, usize) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.max(fd);
    let mut gap = f64::INFINITY;
    let mut evals = 2;
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
        evals += 1;
        let new_best = best.max(fc).max(fd);
        gap = new_best - best;
        best = new_best;
        if b - a < 1e-13 || (gap <= tol * 1e-3 && b - a < 1e-9) {
            break;
        }
    }
    let arg = if fc > fd { c } else { d };
    (best, arg, gap, evals)
}

/// Supremum over `θ ∈ [0, 2π)` of `g(θ)`: a 4096-angle scan followed by
/// golden-section refinement around the eight best local maxima.
pub fn circle_sup<G>(g: G, refinement_tol: f64) -> SupResult
where
    G: Fn(f64) -> ExtendedReal,
{
    let n = CIRCLE_SUP_GRID;
    let step = TAU / n as f64;
    let values: Vec<f64> = (0..n).map(|i| g(i as f64 * step).value()).collect();
    if let Some(i) = values.iter().position(|v| *v == f64::INFINITY) {
        return SupResult {
            value: ExtendedReal::POS_INF,
            argmax: vec![i as f64 * step],
            refinement_gap: 0.0,
            evaluations: n,
        };
    }
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] >= prev && values[i] >= next
        })
        .collect();
    if peaks.is_empty() {
        peaks.push(0);
    }
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    peaks.truncate(CANDIDATES);

    let grid_best = peaks[0];
    let mut best = (values[grid_best], grid_best as f64 * step, 0.0);
    let mut evaluations = n;
    let f = |t: f64| g(t).value();
    for &i in &peaks {
        let center = i as f64 * step;
        let (v, arg, gap, e) = golden_max(&f, center - step, center + step, refinement_tol);
        evaluations += e;
        if v > best.0 {
            best = (v, arg, gap);
        }
    }
    SupResult {
        value: ExtendedReal::from_f64(best.0),
        argmax: vec![crate::quadrature::normalize_angle(best.1)],
        refinement_gap: best.2,
        evaluations,
    }
}

/// Supremum of `g(θ, φ)` over the unit 2-sphere: a product-grid scan followed
/// by shrinking pattern search around the best grid nodes.
pub fn sphere_sup_3d<G>(g: G, refinement_tol: f64) -> SupResult
where
    G: Fn(f64, f64) -> ExtendedReal,
{
    let (nt, np) = SPHERE_SUP_GRID;
    let mut samples = Vec::with_capacity(nt * np + 2);
    samples.push((0.0, 0.0, g(0.0, 0.0).value()));
    samples.push((PI, 0.0, g(PI, 0.0).value()));
    for i in 0..nt {
        let theta = PI * (i as f64 + 0.5) / nt as f64;
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            samples.push((theta, phi, g(theta, phi).value()));
        }
    }
    let mut evaluations = samples.len();
    if let Some(s) = samples.iter().find(|s| s.2 == f64::INFINITY) {
        return SupResult { value: ExtendedReal::POS_INF, argmax: vec![s.0, s.1], refinement_gap: 0.0, evaluations };
    }
    samples.sort_by(|a, b| b.2.total_cmp(&a.2));
    let mut best = (samples[0].2, samples[0].0, samples[0].1, 0.0);
    for s in samples.iter().take(CANDIDATES) {
        let (mut t, mut p, mut v) = (s.0, s.1, s.2);
        let mut h = PI / nt as f64;
        let mut gap = 0.0;
        while h > 1e-10 {
            let mut moved = false;
            for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                let (tt, pp) = ((t + dt).clamp(0.0, PI), p + dp);
                let vv = g(tt, pp).value();
                evaluations += 1;
                if vv > v {
                    gap = vv - v;
                    t = tt;
                    p = pp;
                    v = vv;
                    moved = true;
                    break;
                }
            }
            if !moved || gap < refinement_tol * 1e-3 {
                h *= 0.5;
            }
        }
        if v > best.0 {
            best = (v, t, p, gap);
        }
    }
    SupResult {
        value: ExtendedReal::from_f64(best.0),
        argmax: vec![best.1, crate::quadrature::normalize_angle(best.2)],
        refinement_gap: best.3,
        evaluations,
    }
}

/// Supremum of `g` over the sphere of radius `r` centred at the origin.
pub fn sphere_sup<G>(ctx: &DimensionContext, r: f64, g: G, refinement_tol: f64) -> Result<SupResult, QuadratureError>
where
    G: Fn(&Point) -> ExtendedReal,
{
    match ctx.d() {
        2 => Ok(circle_sup(|t| g(&Point::new2(r * t.cos(), r * t.sin())), refinement_tol)),
        3 => Ok(sphere_sup_3d(|t, p| g(&sphere_point(r, t, p)), refinement_tol)),
        d => Err(QuadratureError::UnsupportedDimension(d)),
    }
}
