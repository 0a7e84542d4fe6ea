use std::f64::consts::{PI, TAU};

use super::interval::{integrate_interval, sample};
use super::{QuadratureError, QuadratureResult, Tolerance};
use crate::ext::ExtendedReal;

const MIN_TRAPEZOID_NODES: usize = 16;
const MAX_TRAPEZOID_NODES: usize = 4096;

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// `(1/2π) ∫_0^{2π} g(θ) dθ`.
///
/// Without singular angles this is the periodic trapezoid rule with node
/// doubling until two successive refinements agree within `tol`; the doubled
/// sum reuses every earlier node. When singular angles
/// are listed, or the trapezoid does not settle within its node budget, the
/// circle is cut at those angles and each arc is integrated adaptively.
pub fn circle_mean<G>(
    g: G,
    singular_angles: &[f64],
    tol: impl Into<Tolerance>,
) -> Result<QuadratureResult, QuadratureError>
where
    G: Fn(f64) -> ExtendedReal,
{
    let tol = tol.into();
    if singular_angles.is_empty() {
        if let Some(r) = trapezoid_doubling(&g, tol)? {
            return Ok(r);
        }
    }
    let mut angles: Vec<f64> = singular_angles.iter().map(|&a| normalize_angle(a)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    let start = angles.first().copied().unwrap_or(0.0);
    let cuts: Vec<f64> = angles.iter().skip(1).copied().collect();
    let r = integrate_interval(&g, start, start + TAU, &cuts, tol.scaled(TAU))?;
    Ok(QuadratureResult { singularities_split: angles, ..r }.scaled(1.0 / TAU))
}

fn trapezoid_doubling<G>(g: &G, tol: Tolerance) -> Result<Option<QuadratureResult>, QuadratureError>
where
    G: Fn(f64) -> ExtendedReal,
{
    let mut n = MIN_TRAPEZOID_NODES;
    let mut sum = 0.0;
    for j in 0..n {
        let theta = TAU * j as f64 / n as f64;
        sum += sample(g, theta, 0.0, TAU).ok_or(QuadratureError::NonIntegrable { at: theta })?;
    }
    let mut mean = sum / n as f64;
    // Two consecutive small changes guard against a lucky early agreement.
    let mut settled = false;
    while n < MAX_TRAPEZOID_NODES {
        for j in 0..n {
            let theta = PI * (2 * j + 1) as f64 / n as f64;
            sum += sample(g, theta, 0.0, TAU).ok_or(QuadratureError::NonIntegrable { at: theta })?;
        }
        n *= 2;
        let refined = sum / n as f64;
        let change = (refined - mean).abs();
        mean = refined;
        let small = change <= tol.target(mean);
        if small && settled {
            return Ok(Some(QuadratureResult {
                value: mean,
                error_estimate: change,
                nodes_used: n,
                singularities_split: Vec::new(),
            }));
        }
        settled = small;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ext(x: f64) -> ExtendedReal {
        ExtendedReal::from_f64(x)
    }

    #[test]
    fn constant_mean() {
        let r = circle_mean(|_| ext(2.5), &[], 1e-12).unwrap();
        assert!((r.value - 2.5).abs() < 1e-15);
    }

    #[test]
    fn positive_log_of_radius_two() {
        let r = circle_mean(|_| ext(2f64.ln().max(0.0)), &[], 1e-10).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn jensen_mean_value_against_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r: f64 = rng.gen_range(0.2..3.0);
            let a = (rng.gen_range(0.0..3.0) as f64, rng.gen_range(0.0..TAU));
            let (ax, ay) = (a.0 * a.1.cos(), a.0 * a.1.sin());
            let g = |t: f64| {
                let (x, y) = (r * t.cos() - ax, r * t.sin() - ay);
                ext(0.5 * (x * x + y * y).ln())
            };
            let res = circle_mean(g, &[a.1], 1e-10).unwrap();
            let exact = r.max(a.0).ln();
            assert!((res.value - exact).abs() < 1e-8, "r={r} |a|={} got {}", a.0, res.value);
        }
    }

    #[test]
    fn trig_polynomials_are_exact() {
        let g = |t: f64| ext(1.0 + (3.0 * t).cos() - 0.5 * (7.0 * t).sin() + 0.25 * (5.0 * t).cos());
        let r = circle_mean(g, &[], 1e-14).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn atom_on_circle_is_integrable() {
        // ln|e^{iθ} − 1| has mean 0 on the unit circle.
        let g = |t: f64| ext(0.5 * ((t.cos() - 1.0).powi(2) + t.sin().powi(2)).ln());
        let r = circle_mean(g, &[0.0], 1e-10).unwrap();
        assert!(r.value.abs() < 1e-9);
    }
}
