use std::cell::{Cell, RefCell};
use std::f64::consts::TAU;

use crate::characteristics::mean_over_sphere_at;
use crate::error::{Error, Result};
use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};
use crate::measure::{BorelMeasure, Component};
use crate::quadrature::integrate_interval;

/// Samples per curve used to bracket kinks of the probe.
const CURVE_KINK_SAMPLES: usize = 512;
/// Atoms within this distance of a curve get a cut at their foot point.
const NEAR_CURVE: f64 = 0.05;

/// Parameters in `(a, b)` where `probe` changes sign.
fn interval_sign_changes<P: Fn(f64) -> f64>(probe: &P, a: f64, b: f64, samples: usize) -> Vec<f64> {
    let step = (b - a) / samples as f64;
    let vals: Vec<f64> = (0..=samples).map(|i| probe(a + i as f64 * step)).collect();
    let mut out = Vec::new();
    for i in 0..samples {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa.is_nan() || fb.is_nan() || (fa > 0.0) == (fb > 0.0) {
            continue;
        }
        let (mut lo, mut hi) = (a + i as f64 * step, a + (i + 1) as f64 * step);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            if (probe(m) > 0.0) == (fa > 0.0) {
                lo = m;
            } else {
                hi = m;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

fn charge_atoms<'a>(charges: &'a [&BorelMeasure]) -> impl Iterator<Item = Point> + 'a {
    charges.iter().flat_map(|m| m.components()).filter_map(|c| match *c {
        Component::Atom { at, .. } => Some(at),
        _ => None,
    })
}

/// `∫ field dμ` for a finite measure built from primitives.
///
/// `probe` marks kinks of the field by its sign changes (for `U⁺` it is `U`);
/// `charges` are the measures generating the field's singularities. Returns the
/// value and an error estimate.
pub fn integrate_against<F, P>(
    ctx: &DimensionContext,
    mu: &BorelMeasure,
    field: F,
    probe: Option<P>,
    charges: &[&BorelMeasure],
    tol: f64,
) -> Result<(ExtendedReal, f64)>
where
    F: Fn(&Point) -> ExtendedReal,
    P: Fn(&Point) -> f64,
{
    let mut total = ExtendedReal::ZERO;
    let mut error = 0.0;
    for c in mu.components() {
        let (v, e) = integrate_component(ctx, c, &field, probe.as_ref(), charges, tol)?;
        total = total.checked_add(v)?;
        error += e;
    }
    Ok((total, error))
}

fn integrate_component<F, P>(
    ctx: &DimensionContext,
    c: &Component,
    field: &F,
    probe: Option<&P>,
    charges: &[&BorelMeasure],
    tol: f64,
) -> Result<(ExtendedReal, f64)>
where
    F: Fn(&Point) -> ExtendedReal,
    P: Fn(&Point) -> f64,
{
    let w = c.weight();
    let scaled = |q: crate::quadrature::QuadratureResult| (ExtendedReal::from_f64(w * q.value), w * q.error_estimate);
    match *c {
        Component::Atom { at, .. } => Ok((ExtendedReal::from_f64(w).mul(field(&at)), 0.0)),
        Component::Segment { start, end, .. } => {
            let dir = end - start;
            let len2 = dir.dot(&dir);
            let at = |s: f64| start + s * dir;
            let mut breaks = probe.map_or_else(Vec::new, |p| {
                interval_sign_changes(&|s| p(&at(s)), 0.0, 1.0, CURVE_KINK_SAMPLES)
            });
            for a in charge_atoms(charges) {
                let s = ((a - start).dot(&dir) / len2).clamp(0.0, 1.0);
                if at(s).dist(&a) <= NEAR_CURVE * len2.sqrt() {
                    breaks.push(s);
                }
            }
            Ok(scaled(integrate_interval(|s| field(&at(s)), 0.0, 1.0, &breaks, tol)?))
        }
        Component::Arc { center, radius, from, to, .. } => {
            let at = |th: f64| center + Point::new2(radius * th.cos(), radius * th.sin());
            let mut breaks =
                probe.map_or_else(Vec::new, |p| interval_sign_changes(&|th| p(&at(th)), from, to, CURVE_KINK_SAMPLES));
            for a in charge_atoms(charges) {
                let rel = a - center;
                if (rel.norm() - radius).abs() <= NEAR_CURVE * radius {
                    let th = from + (rel.arg() - from).rem_euclid(TAU);
                    if th < to {
                        breaks.push(th);
                    }
                }
            }
            let span = to - from;
            let q = integrate_interval(|th| field(&at(th)), from, to, &breaks, tol * span)?;
            Ok(scaled(crate::quadrature::QuadratureResult {
                value: q.value / span,
                error_estimate: q.error_estimate / span,
                ..q
            }))
        }
        Component::Ball { center, radius, .. } => {
            let d = ctx.d() as i32;
            let breaks: Vec<f64> = charge_atoms(charges).map(|a| a.dist(&center)).filter(|&s| s < radius).collect();
            let inner_error = Cell::new(0.0);
            let failure: RefCell<Option<Error>> = RefCell::new(None);
            let shell = |s: f64| {
                if s <= 0.0 {
                    return field(&center);
                }
                match mean_over_sphere_at(ctx, &center, s, field, probe, charges, tol) {
                    Ok(q) => {
                        let jac = d as f64 * s.powi(d - 1) / radius.powi(d);
                        inner_error.set(inner_error.get() + jac * q.error_estimate);
                        ExtendedReal::from_f64(jac * q.value)
                    }
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        ExtendedReal::ZERO
                    }
                }
            };
            let q = integrate_interval(shell, 0.0, radius, &breaks, tol)?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            // Inner errors are summed over every outer node, so they overcount.
            let nodes = q.nodes_used.max(1) as f64;
            let inner = inner_error.get() * radius / nodes;
            Ok((ExtendedReal::from_f64(w * q.value), w * (q.error_estimate + inner)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> Option<fn(&Point) -> f64> {
        None
    }

    #[test]
    fn masses_and_first_moments() {
        let ctx = DimensionContext::planar();
        let mu = BorelMeasure::new(
            2,
            vec![
                Component::Segment { start: Point::new2(0.0, 0.0), end: Point::new2(2.0, 0.0), weight: 1.5 },
                Component::Arc { center: Point::ORIGIN, radius: 1.0, from: 0.0, to: 1.0, weight: 2.0 },
                Component::Ball { center: Point::new2(0.5, 0.5), radius: 0.25, weight: 0.5 },
            ],
        )
        .unwrap();
        let one = |_: &Point| ExtendedReal::from_f64(1.0);
        let (m, _) = integrate_against(&ctx, &mu, one, none(), &[], 1e-12).unwrap();
        assert!((m.value() - 4.0).abs() < 1e-12);
        let x = |p: &Point| ExtendedReal::from_f64(p.x());
        let (m, _) = integrate_against(&ctx, &mu, x, none(), &[], 1e-12).unwrap();
        let exact = 1.5 * 1.0 + 2.0 * 1f64.sin() + 0.5 * 0.5;
        assert!((m.value() - exact).abs() < 1e-11, "{} vs {exact}", m.value());
    }

    #[test]
    fn ball_second_moment_in_space() {
        let ctx = DimensionContext::spatial();
        let mu = BorelMeasure::new(3, vec![Component::Ball { center: Point::ORIGIN, radius: 2.0, weight: 1.0 }]).unwrap();
        let r2 = |p: &Point| ExtendedReal::from_f64(p.dot(p));
        let (m, _) = integrate_against(&ctx, &mu, r2, none(), &[], 1e-10).unwrap();
        // E|x|² = 3ρ²/5 for the uniform ball.
        assert!((m.value() - 2.4).abs() < 1e-9);
    }

    #[test]
    fn kinked_positive_part_on_segment() {
        let ctx = DimensionContext::planar();
        let mu = BorelMeasure::new(
            2,
            vec![Component::Segment { start: Point::new2(-1.0, 0.0), end: Point::new2(2.0, 0.0), weight: 3.0 }],
        )
        .unwrap();
        let field = |p: &Point| ExtendedReal::from_f64(p.x().max(0.0));
        let probe = |p: &Point| p.x();
        let (m, _) = integrate_against(&ctx, &mu, field, Some(probe), &[], 1e-12).unwrap();
        // Density 1 on [−1, 2]: ∫_0^2 x dx = 2.
        assert!((m.value() - 2.0).abs() < 1e-12);
    }
}
