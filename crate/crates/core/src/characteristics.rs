//! Spherical means, sups, classical Nevanlinna functionals and the difference
//! characteristic `T_U(r, R) = C_{U⁺}(R) + N_{Δ_U⁻}(r, R)`.

use std::cell::Cell;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};
use crate::measure::{BorelMeasure, Component};
use crate::potential::{circle_singular_angles, DeltaSubharmonicFn, MeromorphicFn, PointValue, SubharmonicFn};
use crate::quadrature::{
    circle_mean, circle_sup, integrate_interval, sphere_mean_3d, sphere_point, sphere_sup_3d, QuadratureResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacteristicKind {
    CMean,
    MSup,
    MClassical,
    NClassical,
    TClassical,
    TDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicRecord {
    pub kind: CharacteristicKind,
    /// `[r]` or `[r, R]`.
    pub arguments: Vec<f64>,
    pub value: ExtendedReal,
    pub error_estimate: f64,
}

impl CharacteristicRecord {
    fn new(kind: CharacteristicKind, arguments: Vec<f64>, value: ExtendedReal, error_estimate: f64) -> Self {
        Self { kind, arguments, value, error_estimate }
    }
}

/// Pointwise transform applied before averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Positive,
    Negative,
    Abs,
}

impl Transform {
    pub fn apply(self, v: PointValue) -> ExtendedReal {
        match (self, v) {
            (Transform::Identity, PointValue::Value(x)) => x,
            (Transform::Identity, PointValue::Polar) => ExtendedReal::NEG_INF,
            (Transform::Positive, v) => v.positive_part(),
            (Transform::Negative, v) => v.negative_part(),
            (Transform::Abs, v) => v.value().map_or(ExtendedReal::ZERO, ExtendedReal::abs),
        }
    }
}

/// Charges closer than this fraction of the radius to the sphere get a cut.
const NEAR_BAND: f64 = 0.02;
/// Samples used to bracket sign changes of the kink probe on a circle.
const KINK_SAMPLES: usize = 1024;
const SPHERE_KINK_SAMPLES: usize = 256;

fn positive_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain(format!("radius must be positive and finite, got {r}")));
    }
    Ok(())
}

fn circle_point(r: f64, theta: f64) -> Point {
    Point::new2(r * theta.cos(), r * theta.sin())
}

/// Angles in `[0, 2π)` where `probe` changes sign, located by bisection.
fn sign_changes<P: Fn(f64) -> f64>(probe: &P, samples: usize) -> Vec<f64> {
    let step = TAU / samples as f64;
    let vals: Vec<f64> = (0..=samples).map(|i| probe(i as f64 * step)).collect();
    let mut out = Vec::new();
    for i in 0..samples {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa.is_nan() || fb.is_nan() || (fa > 0.0) == (fb > 0.0) {
            continue;
        }
        let (mut a, mut b) = (i as f64 * step, (i + 1) as f64 * step);
        let pos_a = fa > 0.0;
        for _ in 0..64 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (probe(m) > 0.0) == pos_a {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

fn atoms_near(measures: &[&BorelMeasure], r: f64) -> Vec<Point> {
    measures
        .iter()
        .flat_map(|m| m.components())
        .filter_map(|c| match *c {
            Component::Atom { at, .. } if (at.norm() - r).abs() <= NEAR_BAND * r => Some(at),
            _ => None,
        })
        .collect()
}

/// Mean of `field` over the sphere `|x| = r` in `R^d`, d ∈ {2, 3}.
///
/// `charges` are the measures whose potentials make up the field: their
/// crossings of the sphere and nearby atoms become cuts. `probe`, when given,
/// is a function whose sign changes mark kinks of the field.
pub fn mean_over_sphere<F, P>(
    ctx: &DimensionContext,
    r: f64,
    field: F,
    probe: Option<P>,
    charges: &[&BorelMeasure],
    tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(&Point) -> ExtendedReal,
    P: Fn(&Point) -> f64,
{
    mean_over_sphere_at(ctx, &Point::ORIGIN, r, field, probe, charges, tol)
}

/// [`mean_over_sphere`] for the sphere `|x − center| = r`.
pub fn mean_over_sphere_at<F, P>(
    ctx: &DimensionContext,
    center: &Point,
    r: f64,
    field: F,
    probe: Option<P>,
    charges: &[&BorelMeasure],
    tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(&Point) -> ExtendedReal,
    P: Fn(&Point) -> f64,
{
    positive_radius(r)?;
    let shifted: Vec<BorelMeasure>;
    let charges: Vec<&BorelMeasure> = if *center == Point::ORIGIN {
        charges.to_vec()
    } else {
        let back = -1.0 * *center;
        shifted = charges.iter().map(|m| m.translated(&back)).collect();
        shifted.iter().collect()
    };
    let c = *center;
    let field = |x: &Point| field(&(c + *x));
    let probe = probe.map(|p| move |x: &Point| p(&(c + *x)));
    match ctx.d() {
        2 => {
            let mut breaks = circle_singular_angles(&charges, r, NEAR_BAND * r);
            if let Some(p) = &probe {
                breaks.extend(sign_changes(&|th: f64| p(&circle_point(r, th)), KINK_SAMPLES));
            }
            Ok(circle_mean(|th| field(&circle_point(r, th)), &breaks, tol)?)
        }
        3 => {
            let near = atoms_near(&charges, r);
            if probe.is_none() && near.is_empty() {
                return Ok(sphere_mean_3d(ctx, |th, ph| field(&sphere_point(r, th, ph)), tol)?);
            }
            let theta_breaks: Vec<f64> = near.iter().map(|a| (a.z() / a.norm()).clamp(-1.0, 1.0).acos()).collect();
            let phi_breaks: Vec<f64> = near.iter().map(|a| a.y().atan2(a.x())).collect();
            let inner_error = Cell::new(0.0f64);
            let failure: Cell<Option<Error>> = Cell::new(None);
            let inner = |theta: f64| {
                let mut breaks = phi_breaks.clone();
                if let Some(p) = &probe {
                    breaks.extend(sign_changes(&|ph: f64| p(&sphere_point(r, theta, ph)), SPHERE_KINK_SAMPLES));
                }
                match circle_mean(|ph| field(&sphere_point(r, theta, ph)), &breaks, 0.1 * tol) {
                    Ok(q) => {
                        inner_error.set(inner_error.get().max(q.error_estimate));
                        ExtendedReal::from_f64(0.5 * theta.sin() * q.value)
                    }
                    Err(e) => {
                        failure.set(Some(e.into()));
                        ExtendedReal::ZERO
                    }
                }
            };
            let outer = integrate_interval(inner, 0.0, PI, &theta_breaks, tol)?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(QuadratureResult { error_estimate: outer.error_estimate + inner_error.get(), ..outer })
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// `C_{τ(U)}(r)` for a transform `τ`.
pub fn spherical_mean(u: &DeltaSubharmonicFn, transform: Transform, r: f64, tol: f64) -> Result<CharacteristicRecord> {
    let ctx = DimensionContext::new(u.dim())?;
    let (plus, minus) = u.jordan_decomposition();
    let field = |x: &Point| transform.apply(u.evaluate(x));
    let probe = |x: &Point| match u.evaluate(x) {
        PointValue::Value(v) => v.value(),
        PointValue::Polar => f64::NAN,
    };
    let q = if transform == Transform::Identity {
        mean_over_sphere(&ctx, r, field, None::<fn(&Point) -> f64>, &[plus, minus], tol)?
    } else {
        mean_over_sphere(&ctx, r, field, Some(probe), &[plus, minus], tol)?
    };
    Ok(CharacteristicRecord::new(CharacteristicKind::CMean, vec![r], ExtendedReal::from_f64(q.value), q.error_estimate))
}

/// `M_{τ(U)}(r) = sup_{|x| = r} τ(U)(x)`, a sampled lower bound.
pub fn sup_on_sphere(u: &DeltaSubharmonicFn, transform: Transform, r: f64, tol: f64) -> Result<CharacteristicRecord> {
    positive_radius(r)?;
    let field = |x: &Point| transform.apply(u.evaluate(x));
    let s = match u.dim() {
        2 => circle_sup(|th| field(&circle_point(r, th)), tol),
        3 => sphere_sup_3d(|th, ph| field(&sphere_point(r, th, ph)), tol),
        d => return Err(Error::UnsupportedDimension(d)),
    };
    Ok(CharacteristicRecord::new(CharacteristicKind::MSup, vec![r], s.value, s.refinement_gap))
}

/// `ln M(r, f) = sup_{|z| = r} ln|f(z)|` from complex evaluation.
pub fn log_max_modulus(f: &MeromorphicFn, r: f64, tol: f64) -> Result<CharacteristicRecord> {
    positive_radius(r)?;
    let s = circle_sup(|th| f.log_abs(Complex64::from_polar(r, th)), tol);
    Ok(CharacteristicRecord::new(CharacteristicKind::MSup, vec![r], s.value, s.refinement_gap))
}

/// `m(r, f) = (1/2π) ∫ ln⁺|f(re^{iφ})| dφ`.
pub fn nevanlinna_m(f: &MeromorphicFn, r: f64, tol: f64) -> Result<CharacteristicRecord> {
    positive_radius(r)?;
    let log_abs = |th: f64| f.log_abs(Complex64::from_polar(r, th));
    let mut breaks = sign_changes(&|th| log_abs(th).value(), KINK_SAMPLES);
    for (b, _) in &f.poles {
        if (b.norm() - r).abs() <= NEAR_BAND * r {
            breaks.push(b.arg());
        }
    }
    let q = circle_mean(|th| log_abs(th).positive_part(), &breaks, tol)?;
    Ok(CharacteristicRecord::new(
        CharacteristicKind::MClassical,
        vec![r],
        ExtendedReal::from_f64(q.value),
        q.error_estimate,
    ))
}

/// `N(r, f) = Σ_{b ≠ 0} n_b ln⁺(r/|b|) + n(0, f) ln r`, exact.
#[allow(non_snake_case)]
pub fn nevanlinna_N(f: &MeromorphicFn, r: f64) -> Result<CharacteristicRecord> {
    positive_radius(r)?;
    let n0 = f.pole_count(0.0) as f64;
    let sum: f64 = f
        .poles
        .iter()
        .filter(|(b, _)| b.norm() > 0.0 && b.norm() < r)
        .map(|(b, n)| *n as f64 * (r / b.norm()).ln())
        .sum();
    Ok(CharacteristicRecord::new(
        CharacteristicKind::NClassical,
        vec![r],
        ExtendedReal::from_f64(sum + n0 * r.ln()),
        0.0,
    ))
}

/// `T(r, f) = m(r, f) + N(r, f)`.
#[allow(non_snake_case)]
pub fn nevanlinna_T(f: &MeromorphicFn, r: f64, tol: f64) -> Result<CharacteristicRecord> {
    let m = nevanlinna_m(f, r, tol)?;
    let n = nevanlinna_N(f, r)?;
    Ok(CharacteristicRecord::new(
        CharacteristicKind::TClassical,
        vec![r],
        m.value.checked_add(n.value)?,
        m.error_estimate + n.error_estimate,
    ))
}

fn radii_order(r: f64, big_r: f64) -> Result<()> {
    if !(r >= 0.0) || !(r < big_r) || !big_r.is_finite() {
        return Err(domain(format!("need 0 <= r < R, got r={r}, R={big_r}")));
    }
    Ok(())
}

/// `T_U(r, R) = C_{U⁺}(R) + N_{Δ_U⁻}(r, R)`; +∞ when `r = 0` and the counting
/// integral diverges.
pub fn difference_characteristic(u: &DeltaSubharmonicFn, r: f64, big_r: f64, tol: f64) -> Result<CharacteristicRecord> {
    radii_order(r, big_r)?;
    let ctx = DimensionContext::new(u.dim())?;
    let c = spherical_mean(u, Transform::Positive, big_r, tol)?;
    let n = u.jordan_decomposition().1.integrated_counting(&ctx, r, big_r, &Point::ORIGIN)?;
    Ok(CharacteristicRecord::new(
        CharacteristicKind::TDifference,
        vec![r, big_r],
        c.value.checked_add(n)?,
        c.error_estimate,
    ))
}

fn subharmonic_mean(ctx: &DimensionContext, s: &SubharmonicFn, r: f64, tol: f64) -> Result<QuadratureResult> {
    mean_over_sphere(ctx, r, |x| s.evaluate(x), None::<fn(&Point) -> f64>, &[&s.charge], tol)
}

/// `T_U(r, R) = C_{max{u_*, v_*}}(R) − C_{v_*}(r)` from the canonical pair.
pub fn difference_characteristic_canonical(
    u: &DeltaSubharmonicFn,
    r: f64,
    big_r: f64,
    tol: f64,
) -> Result<CharacteristicRecord> {
    radii_order(r, big_r)?;
    if r == 0.0 {
        return Err(domain("the canonical form needs r > 0"));
    }
    let ctx = DimensionContext::new(u.dim())?;
    let (us, vs) = u.canonical_representation();
    let field = |x: &Point| us.evaluate(x).max(vs.evaluate(x));
    let probe = |x: &Point| us.evaluate(x).value() - vs.evaluate(x).value();
    let top = mean_over_sphere(&ctx, big_r, field, Some(probe), &[&us.charge, &vs.charge], tol)?;
    let bottom = subharmonic_mean(&ctx, &vs, r, tol)?;
    Ok(CharacteristicRecord::new(
        CharacteristicKind::TDifference,
        vec![r, big_r],
        ExtendedReal::from_f64(top.value - bottom.value),
        top.error_estimate + bottom.error_estimate,
    ))
}

/// `C_v(r)` for a subharmonic model.
pub fn subharmonic_spherical_mean(s: &SubharmonicFn, r: f64, tol: f64) -> Result<CharacteristicRecord> {
    let ctx = DimensionContext::new(s.dim())?;
    let q = subharmonic_mean(&ctx, s, r, tol)?;
    Ok(CharacteristicRecord::new(CharacteristicKind::CMean, vec![r], ExtendedReal::from_f64(q.value), q.error_estimate))
}

/// Jensen-type closed form of `C_v(r)`: `h(0) + ∫ k(max{r, |y|}) dν(y)`, exact for
/// atoms, balls and centred circles, and used as an oracle for the quadratures.
pub fn subharmonic_mean_closed_form(s: &SubharmonicFn, r: f64) -> Option<f64> {
    let ctx = DimensionContext::new(s.dim()).ok()?;
    let mut total = s.harmonic.value_at_origin();
    for c in s.charge.components() {
        total += match *c {
            Component::Atom { at, weight } => weight * ctx.kernel_unchecked(at.norm().max(r)),
            Component::Arc { center, radius, from, to, weight } if center.norm() == 0.0 && to - from >= TAU * (1.0 - 1e-15) => {
                weight * ctx.kernel_unchecked(radius.max(r))
            }
            Component::Ball { center, radius, weight } => {
                let delta = center.norm();
                if r >= delta + radius {
                    weight * ctx.kernel_unchecked(r)
                } else if r <= delta - radius {
                    let ball = BorelMeasure::new(s.dim(), vec![c.clone()]).ok()?;
                    crate::potential::kernel_potential(&ball, &Point::ORIGIN).value()
                } else {
                    return None;
                }
            }
            _ => return None,
        };
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rational(z: &[Complex64], p: &[Complex64]) -> MeromorphicFn {
        MeromorphicFn::rational(z, p).unwrap()
    }

    #[test]
    fn mean_anchors() {
        let log_z = rational(&[c(0.0, 0.0)], &[]).to_delta_subharmonic().unwrap();
        let m = spherical_mean(&log_z, Transform::Identity, E, 1e-10).unwrap();
        assert!((m.value.value() - 1.0).abs() < 1e-10);
        let shifted = rational(&[c(2.5, 1.0)], &[]).to_delta_subharmonic().unwrap();
        let m = spherical_mean(&shifted, Transform::Identity, 1.5, 1e-10).unwrap();
        assert!((m.value.value() - c(2.5, 1.0).norm().ln()).abs() < 1e-8);
        let p = spherical_mean(&log_z, Transform::Positive, 0.5, 1e-10).unwrap();
        assert_eq!(p.value.value(), 0.0);
    }

    #[test]
    fn sup_anchors() {
        let z = rational(&[c(0.0, 0.0)], &[]);
        assert!((log_max_modulus(&z, 3.0, 1e-9).unwrap().value.value() - 3f64.ln()).abs() < 1e-9);
        let g = rational(&[c(1.0, 0.0), c(-1.0, 0.0)], &[]);
        let dense = (0..100_000)
            .map(|i| g.log_abs(Complex64::from_polar(2.0, TAU * i as f64 / 100_000.0)).value())
            .fold(f64::NEG_INFINITY, f64::max);
        let s = log_max_modulus(&g, 2.0, 1e-9).unwrap().value.value();
        assert!((s - 5f64.ln()).abs() < 1e-9 && s >= dense - 1e-12);
        let zero = DeltaSubharmonicFn::from_subharmonic(
            SubharmonicFn::harmonic(2, crate::potential::HarmonicPart::zero()).unwrap(),
        )
        .unwrap();
        assert_eq!(sup_on_sphere(&zero, Transform::Identity, 1.0, 1e-9).unwrap().value.value(), 0.0);
    }

    #[test]
    fn classical_anchors() {
        let z = rational(&[c(0.0, 0.0)], &[]);
        assert!((nevanlinna_m(&z, 2.0, 1e-10).unwrap().value.value() - 2f64.ln()).abs() < 1e-10);
        assert_eq!(nevanlinna_m(&z, 0.5, 1e-10).unwrap().value.value(), 0.0);
        assert!((nevanlinna_T(&z, E, 1e-10).unwrap().value.value() - 1.0).abs() < 1e-10);
        let inv = rational(&[], &[c(0.0, 0.0)]);
        assert!((nevanlinna_N(&inv, E).unwrap().value.value() - 1.0).abs() < 1e-15);
        assert!((nevanlinna_T(&inv, E, 1e-10).unwrap().value.value() - 1.0).abs() < 1e-10);
        let shifted = rational(&[], &[c(1.0, 0.0)]);
        assert!((nevanlinna_N(&shifted, 2.0).unwrap().value.value() - 2f64.ln()).abs() < 1e-15);
        let entire = rational(&[c(0.3, 0.0)], &[]);
        assert_eq!(nevanlinna_N(&entire, 5.0).unwrap().value.value(), 0.0);
    }

    #[test]
    fn pole_measure_counting_matches_classical_n() {
        let f = rational(&[c(0.2, 0.1)], &[c(1.0, 0.0), c(0.0, -0.4)]);
        let ctx = DimensionContext::planar();
        let n = f.pole_measure().unwrap().integrated_counting(&ctx, 0.5, 2.0, &Point::ORIGIN).unwrap().value();
        let classical = nevanlinna_N(&f, 2.0).unwrap().value.value() - nevanlinna_N(&f, 0.5).unwrap().value.value();
        assert!((n - classical).abs() < 1e-14);
    }

    #[test]
    fn bridge_and_cross_form_on_a_simple_quotient() {
        let f = rational(&[c(0.0, 0.0)], &[c(1.0, 0.0)]);
        let u = f.to_delta_subharmonic().unwrap();
        let t = difference_characteristic(&u, 1.0, 3.0, 1e-11).unwrap().value.value();
        let classical = nevanlinna_T(&f, 3.0, 1e-11).unwrap().value.value() - nevanlinna_N(&f, 1.0).unwrap().value.value();
        assert!((t - classical).abs() < 1e-8, "{t} vs {classical}");
        let canon = difference_characteristic_canonical(&u, 1.0, 2.0, 1e-11).unwrap().value.value();
        let direct = difference_characteristic(&u, 1.0, 2.0, 1e-11).unwrap().value.value();
        assert!((canon - direct).abs() < 1e-8 * direct.abs().max(1.0), "{canon} vs {direct}");
    }

    #[test]
    fn vanishing_characteristic() {
        // U = ln|z/10| ≤ 0 on B̄(2), no negative charge.
        let f = MeromorphicFn::new(vec![(c(0.0, 0.0), 1)], vec![], c(0.1, 0.0), vec![]).unwrap();
        let u = f.to_delta_subharmonic().unwrap();
        assert_eq!(difference_characteristic(&u, 0.5, 2.0, 1e-10).unwrap().value.value(), 0.0);
        // A pole at 0 and r = 0 give +∞.
        let g = rational(&[], &[c(0.0, 0.0)]).to_delta_subharmonic().unwrap();
        assert!(difference_characteristic(&g, 0.0, 2.0, 1e-10).unwrap().value.is_pos_inf());
    }

    #[test]
    fn log_z_canonical_form() {
        let u = rational(&[c(0.0, 0.0)], &[]).to_delta_subharmonic().unwrap();
        for (r, big_r) in [(0.5, 2.0), (1.5, 4.0)] {
            let t = difference_characteristic_canonical(&u, r, big_r, 1e-11).unwrap().value.value();
            // v_* ≡ 0, so T = C_{max(ln|z|, 0)}(R) = ln⁺ R.
            let expected: f64 = big_r.ln().max(0.0);
            assert!((t - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn spatial_means() {
        let nu = BorelMeasure::atoms(3, &[(Point::new3(0.3, -0.2, 0.4), 1.0), (Point::new3(0.0, 0.0, 2.5), 2.0)]).unwrap();
        let s = SubharmonicFn::new(crate::potential::HarmonicPart::affine(0.5, [1.0, -2.0, 0.3]), nu).unwrap();
        for r in [0.8, 1.9, 3.0] {
            let q = subharmonic_spherical_mean(&s, r, 1e-10).unwrap().value.value();
            let exact = subharmonic_mean_closed_form(&s, r).unwrap();
            assert!((q - exact).abs() < 1e-8, "r={r}: {q} vs {exact}");
        }
        let u = DeltaSubharmonicFn::from_subharmonic(s).unwrap();
        let pos = spherical_mean(&u, Transform::Positive, 1.0, 1e-9).unwrap();
        let neg = spherical_mean(&u, Transform::Negative, 1.0, 1e-9).unwrap();
        let id = spherical_mean(&u, Transform::Identity, 1.0, 1e-10).unwrap();
        assert!((pos.value.value() - neg.value.value() - id.value.value()).abs() < 1e-7);
    }
}
