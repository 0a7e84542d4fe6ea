use std::time::Instant;

use num_complex::Complex64;

use super::integrate::integrate_against;
use super::report::{Breakdown, InequalityTag, VerificationReport, Verdict};
use super::Scenario;
use crate::characteristics::{difference_characteristic, mean_over_sphere, nevanlinna_N, nevanlinna_T, spherical_mean, Transform};
use crate::error::{domain, Error, Result};
use crate::ext::ExtendedReal;
use crate::geometry::{DimensionContext, Point};
use crate::measure::{BorelMeasure, Component};
use crate::modulus::{dini_integral, DiniIntegral};
use crate::potential::{kernel_potential, DeltaSubharmonicFn, PointValue};

/// Relative guard for floating-point rounding added to every budget.
const ROUNDING: f64 = 1e-12;

/// `A_d(r, R) = 2((R+r)/(R−r))^{d−1} max{1, (R−r)^{d−2}}`.
pub fn constant_a(ctx: &DimensionContext, r: f64, big_r: f64) -> Result<f64> {
    if !(r > 0.0 && r < big_r && big_r.is_finite()) {
        return Err(domain(format!("need 0 < r < R, got r={r}, R={big_r}")));
    }
    let d = ctx.d() as i32;
    Ok(2.0 * ((big_r + r) / (big_r - r)).powi(d - 1) * (big_r - r).powi(d - 2).max(1.0))
}

fn rounding(lhs: ExtendedReal, rhs: ExtendedReal) -> f64 {
    ROUNDING * (lhs.finite().unwrap_or(0.0).abs() + rhs.finite().unwrap_or(0.0).abs())
}

fn failed_report(id: &str, tag: InequalityTag, e: &Error) -> VerificationReport {
    let verdict = match e {
        Error::UnsupportedModel(_) | Error::UnsupportedDimension(_) => Verdict::NotApplicable,
        _ => Verdict::Inconclusive,
    };
    log::warn!("{id} {tag}: {e}");
    VerificationReport::skipped(id, tag, verdict, e.to_string())
}

/// Left-hand side and measure-side pieces shared by the main bound and its
/// planar forms.
struct MeasureSide {
    lhs: ExtendedReal,
    lhs_error: f64,
    mass: f64,
    dini: DiniIntegral,
}

fn dini_for(s: &Scenario) -> DiniIntegral {
    dini_integral(&s.ctx, &s.mu, s.big_r + s.r, s.tolerances.dini)
}

fn positive_part_integral(s: &Scenario) -> Result<(ExtendedReal, f64)> {
    let (plus, minus) = s.u.jordan_decomposition();
    let field = |x: &Point| s.u.positive_part(x);
    let probe = |x: &Point| match s.u.evaluate(x) {
        PointValue::Value(v) => v.value(),
        PointValue::Polar => f64::NAN,
    };
    integrate_against(&s.ctx, &s.mu, field, Some(probe), &[plus, minus], s.tolerances.mean)
}

fn measure_side(s: &Scenario) -> std::result::Result<MeasureSide, VerificationReport> {
    let dini = dini_for(s);
    if dini.value.is_pos_inf() {
        return Err(VerificationReport::skipped(
            &s.id,
            InequalityTag::Main,
            Verdict::PreconditionFailed,
            "the Dini integral of the measure diverges",
        ));
    }
    let (lhs, lhs_error) = positive_part_integral(s).map_err(|e| failed_report(&s.id, InequalityTag::Main, &e))?;
    Ok(MeasureSide { lhs, lhs_error, mass: s.mu.total_mass(), dini })
}

/// `rhs = a · t · (M + D)` with its propagated error.
fn assemble(
    id: &str,
    tag: InequalityTag,
    side: &MeasureSide,
    a: f64,
    t: ExtendedReal,
    t_error: f64,
) -> VerificationReport {
    let measure_factor = ExtendedReal::from_f64(side.mass).checked_add(side.dini.value).unwrap_or(ExtendedReal::POS_INF);
    let rhs = ExtendedReal::from_f64(a).mul(t).mul(measure_factor);
    let t_abs = t.finite().unwrap_or(0.0);
    let budget = side.lhs_error
        + a * (t_error * measure_factor.finite().unwrap_or(0.0) + t_abs * side.dini.error_estimate)
        + rounding(side.lhs, rhs);
    VerificationReport::new(id, tag, side.lhs, rhs, budget).with_breakdown(Breakdown {
        a_d: a,
        t_u: Some(t),
        mass: side.mass,
        dini: Some(side.dini.value),
    })
}

fn with_tag(mut r: VerificationReport, tag: InequalityTag) -> VerificationReport {
    r.tag = tag;
    r
}

fn zero_measure(s: &Scenario, tag: InequalityTag) -> VerificationReport {
    VerificationReport::new(&s.id, tag, ExtendedReal::ZERO, ExtendedReal::ZERO, 0.0).with_note("zero measure")
}

/// Checks `∫ U⁺ dμ ≤ A_d(r,R) T_U(r0, R) (M + ∫_0^{R+r} h_μ(t) t^{1−d} dt)`.
pub fn verify_main_theorem(s: &Scenario) -> VerificationReport {
    main_and_planar(s, true, false).remove(0)
}

fn planar_constant(r: f64, big_r: f64) -> f64 {
    2.0 * (big_r + r) / (big_r - r)
}

fn planar_not_applicable(s: &Scenario) -> VerificationReport {
    VerificationReport::skipped(&s.id, InequalityTag::Planar, Verdict::NotApplicable, "planar check in higher dimension")
}

/// The planar form of the main bound with `A_2 = 2(R+r)/(R−r)`.
pub fn verify_planar(s: &Scenario) -> VerificationReport {
    main_and_planar(s, false, true).remove(0)
}

fn log_abs_side(s: &Scenario) -> std::result::Result<MeasureSide, VerificationReport> {
    let tag = InequalityTag::PlanarMeromorphic;
    let f = s.meromorphic().expect("meromorphic scenario");
    let dini = dini_for(s);
    if dini.value.is_pos_inf() {
        return Err(VerificationReport::skipped(
            &s.id,
            tag,
            Verdict::PreconditionFailed,
            "the Dini integral of the measure diverges",
        ));
    }
    let zeros = f.zero_measure().map_err(|e| failed_report(&s.id, tag, &e))?;
    let poles = f.pole_measure().map_err(|e| failed_report(&s.id, tag, &e))?;
    let log_abs = |x: &Point| f.log_abs(Complex64::new(x.x(), x.y()));
    let field = |x: &Point| log_abs(x).positive_part();
    let probe = |x: &Point| log_abs(x).value();
    let (lhs, lhs_error) = integrate_against(&s.ctx, &s.mu, field, Some(probe), &[&zeros, &poles], s.tolerances.mean)
        .map_err(|e| failed_report(&s.id, tag, &e))?;
    Ok(MeasureSide { lhs, lhs_error, mass: s.mu.total_mass(), dini })
}

/// The meromorphic forms: `T(R,f) − N(r0,f)` and, when `N(r0,f) ≥ 0`, `T(R,f)`
/// alone, both built from complex evaluation of `f`.
pub fn verify_planar_meromorphic(s: &Scenario) -> (VerificationReport, VerificationReport) {
    let (tf, tfr) = (InequalityTag::PlanarMeromorphic, InequalityTag::PlanarMeromorphicSimplified);
    let Some(f) = s.meromorphic() else {
        return (
            VerificationReport::skipped(&s.id, tf, Verdict::NotApplicable, "not a meromorphic scenario"),
            VerificationReport::skipped(&s.id, tfr, Verdict::NotApplicable, "not a meromorphic scenario"),
        );
    };
    let r0 = s.inner_radius();
    let simplified_applies = r0 >= 1.0 || f.finite_at_origin();
    let skipped_fr = || VerificationReport::skipped(&s.id, tfr, Verdict::NotApplicable, "N(r, f) may be negative");
    if s.mu.is_zero() {
        let fr = if simplified_applies { zero_measure(s, tfr) } else { skipped_fr() };
        return (zero_measure(s, tf), fr);
    }
    let side = match log_abs_side(s) {
        Ok(side) => side,
        Err(report) => {
            let fr = if simplified_applies { with_tag(report.clone(), tfr) } else { skipped_fr() };
            return (report, fr);
        }
    };
    let t = match nevanlinna_T(f, s.big_r, s.tolerances.mean) {
        Ok(t) => t,
        Err(e) => return (failed_report(&s.id, tf, &e), failed_report(&s.id, tfr, &e)),
    };
    let n = if r0 > 0.0 {
        nevanlinna_N(f, r0).map(|n| n.value)
    } else if f.finite_at_origin() {
        Ok(ExtendedReal::ZERO)
    } else {
        Ok(ExtendedReal::NEG_INF)
    };
    let a = planar_constant(s.r, s.big_r);
    let first = match n.and_then(|n| Ok(t.value.checked_sub(n)?)) {
        Ok(diff) => assemble(&s.id, tf, &side, a, diff, t.error_estimate),
        Err(e) => failed_report(&s.id, tf, &e),
    };
    let second = if simplified_applies {
        assemble(&s.id, tfr, &side, a, t.value, t.error_estimate)
    } else {
        skipped_fr()
    };
    (first, second)
}

/// Residuals of the Poisson–Jensen representation at sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonJensenReport {
    /// `|U(x) − (P[U](x) − G(x))| / max{1, |U(x)|}` per evaluated point.
    pub residuals: Vec<f64>,
    /// Points skipped because `U` is infinite or polar there.
    pub skipped: usize,
    pub max_residual: f64,
}

/// `∫ G_R(x, y) dν(y)` with `G_R(x, y) = k(|R y/|y| − |y| x/R|) − k(|y − x|)` over
/// the part of `ν` in `B̄(R)`, each component by the inversion identity.
fn green_integral(ctx: &DimensionContext, nu: &BorelMeasure, big_r: f64, x: &Point) -> Result<ExtendedReal> {
    let k_r = ctx.kernel_unchecked(big_r);
    let xn = x.norm();
    let mirror = (big_r * big_r / (xn * xn)) * *x;
    let mut total = ExtendedReal::ZERO;
    for c in nu.components() {
        let (near, far) = c.distance_range(&Point::ORIGIN);
        if near >= big_r {
            continue;
        }
        if far > big_r {
            return Err(Error::UnsupportedModel("a charge component crosses the sphere |y| = R".into()));
        }
        let w = c.weight();
        let single = BorelMeasure::new(ctx.d(), vec![c.clone()])?;
        let at_x = kernel_potential(&single, x);
        let term = if xn == 0.0 {
            ExtendedReal::from_f64(w * k_r).checked_sub(at_x)?
        } else {
            let beyond = kernel_potential(&single, &mirror).value();
            let image = match ctx.d() {
                2 => w * (xn / big_r).ln() + beyond,
                _ => (big_r / xn) * beyond,
            };
            ExtendedReal::from_f64(image).checked_sub(at_x)?
        };
        total = total.checked_add(term)?;
    }
    Ok(total)
}

/// Compares `U(x)` with `P[U](x) − ∫_{B(R)} G_R(x, y) dΔ_U(y)`, where
/// `P[U](x) = R^{d−2}(R² − |x|²) · mean_{|y|=R} U(y)/|y − x|^d`.
pub fn verify_poisson_jensen(
    u: &DeltaSubharmonicFn,
    big_r: f64,
    points: &[Point],
    tol: f64,
) -> Result<PoissonJensenReport> {
    let ctx = DimensionContext::new(u.dim())?;
    let d = ctx.d() as i32;
    let (plus, minus) = u.jordan_decomposition();
    let mut residuals = Vec::with_capacity(points.len());
    let mut skipped = 0;
    for x in points {
        if x.norm() >= big_r {
            return Err(domain(format!("sample point {x:?} is outside B(R)")));
        }
        let Some(ux) = u.evaluate(x).value().and_then(ExtendedReal::finite) else {
            log::debug!("skipping polar or infinite point {x:?}");
            skipped += 1;
            continue;
        };
        let field = |y: &Point| match u.evaluate(y) {
            PointValue::Value(v) => ExtendedReal::from_f64(v.value() / y.dist(x).powi(d)),
            PointValue::Polar => ExtendedReal::NEG_INF,
        };
        let mean = mean_over_sphere(&ctx, big_r, field, None::<fn(&Point) -> f64>, &[plus, minus], tol)?;
        let poisson = big_r.powi(d - 2) * (big_r * big_r - x.dot(x)) * mean.value;
        let green = green_integral(&ctx, plus, big_r, x)?.checked_sub(green_integral(&ctx, minus, big_r, x)?)?;
        let Some(green) = green.finite() else {
            skipped += 1;
            continue;
        };
        residuals.push((ux - (poisson - green)).abs() / ux.abs().max(1.0));
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(PoissonJensenReport { residuals, skipped, max_residual })
}

/// `∫_{B(R)} (k(R+r) − k(|y − x|)) dΔ⁻(y)`, exact per component.
fn negative_charge_term(ctx: &DimensionContext, minus: &BorelMeasure, r: f64, big_r: f64, x: &Point) -> Result<ExtendedReal> {
    let k_top = ctx.kernel_unchecked(big_r + r);
    let mut total = ExtendedReal::ZERO;
    for c in minus.components() {
        let (near, far) = c.distance_range(&Point::ORIGIN);
        if near >= big_r {
            continue;
        }
        if far > big_r && !c.is_atom() {
            return Err(Error::UnsupportedModel("a negative charge component crosses the sphere |y| = R".into()));
        }
        let single = BorelMeasure::new(ctx.d(), vec![c.clone()])?;
        let term = ExtendedReal::from_f64(c.weight() * k_top).checked_sub(kernel_potential(&single, x))?;
        total = total.checked_add(term)?;
    }
    Ok(total)
}

/// Checks `U⁺(x) ≤ R^{d−2}(R+r)/(R−r)^{d−1} C_{U⁺}(R) + ∫_{B(R)} (k(R+r) − k(|y−x|)) dΔ_U⁻(y)`
/// at each sample point and reports the tightest one.
pub fn verify_pointwise_bound(
    u: &DeltaSubharmonicFn,
    r: f64,
    big_r: f64,
    points: &[Point],
    tol: f64,
) -> Result<VerificationReport> {
    if !(r > 0.0 && r < big_r) {
        return Err(domain(format!("need 0 < r < R, got r={r}, R={big_r}")));
    }
    let ctx = DimensionContext::new(u.dim())?;
    let d = ctx.d() as i32;
    let coeff = big_r.powi(d - 2) * (big_r + r) / (big_r - r).powi(d - 1);
    let c = spherical_mean(u, Transform::Positive, big_r, tol)?;
    let minus = u.jordan_decomposition().1;
    let mut worst: Option<VerificationReport> = None;
    let mut skipped = 0;
    for x in points {
        if x.norm() > r * (1.0 + 1e-12) {
            return Err(domain(format!("sample point {x:?} is outside B̄(r)")));
        }
        let lhs = match u.evaluate(x) {
            PointValue::Value(v) if !v.is_pos_inf() => v.positive_part(),
            _ => {
                skipped += 1;
                continue;
            }
        };
        let charge = negative_charge_term(&ctx, minus, r, big_r, x)?;
        let rhs = ExtendedReal::from_f64(coeff * c.value.value()).checked_add(charge)?;
        let budget = coeff * c.error_estimate + rounding(lhs, rhs);
        let report = VerificationReport::new("", InequalityTag::Pointwise, lhs, rhs, budget);
        let margin = |rep: &VerificationReport| {
            rep.slack().finite().map_or(f64::INFINITY, |s| s - rep.error_budget)
        };
        if worst.as_ref().is_none_or(|w| margin(&report) < margin(w)) {
            worst = Some(report);
        }
    }
    let evaluated = points.len() - skipped;
    let note = format!("{evaluated} points, {skipped} skipped");
    Ok(match worst {
        Some(w) => w.with_note(note),
        None => VerificationReport::skipped("", InequalityTag::Pointwise, Verdict::NotApplicable, note),
    })
}

/// Checks `Δ^rad(R*) ≤ R^{d−1} N_Δ(R*, R) / (d̂ (R − R*))`.
pub fn verify_counting_lemma(
    delta: &BorelMeasure,
    r_star: f64,
    big_r: f64,
    ctx: &DimensionContext,
) -> Result<VerificationReport> {
    if !(r_star > 0.0 && r_star < big_r && big_r.is_finite()) {
        return Err(domain(format!("need 0 < R* < R, got R*={r_star}, R={big_r}")));
    }
    let lhs = ExtendedReal::from_f64(delta.radial_counting(&Point::ORIGIN, r_star));
    let n = delta.integrated_counting(ctx, r_star, big_r, &Point::ORIGIN)?;
    let factor = big_r.powi(ctx.d() as i32 - 1) / (ctx.d_hat() as f64 * (big_r - r_star));
    let rhs = ExtendedReal::from_f64(factor).mul(n);
    let guard = if delta.is_atomic() { 1.0 } else { 1e3 };
    Ok(VerificationReport::new("", InequalityTag::CountingLemma, lhs, rhs, guard * rounding(lhs, rhs)))
}

/// The μ-integrated pointwise bound at `R* = (R + r)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedBound {
    pub r_star: f64,
    /// `a C_{U⁺}(R*) M + ∫_{B(R*)} (k(R*+r) M − u_μ(y)) dΔ⁻(y)`.
    pub exact: ExtendedReal,
    /// `a C_{U⁺}(R*) M + Δ⁻^rad(R*) d̂ ∫_0^{R*+r} h_μ(t) t^{1−d} dt`.
    pub relaxed: ExtendedReal,
    pub error_estimate: f64,
}

/// Integrates the pointwise bound against μ; the chain
/// `∫U⁺dμ ≤ exact ≤ relaxed ≤ RHS` is what the main bound's proof walks.
pub fn integrated_pointwise_bound(s: &Scenario) -> Result<IntegratedBound> {
    let ctx = &s.ctx;
    let d = ctx.d() as i32;
    let (r, r_star) = (s.r, 0.5 * (s.r + s.big_r));
    let a = r_star.powi(d - 2) * (r_star + r) / (r_star - r).powi(d - 1);
    let c = spherical_mean(&s.u, Transform::Positive, r_star, s.tolerances.mean)?;
    let mass = s.mu.total_mass();
    let minus = s.u.jordan_decomposition().1;
    let k_top = ctx.kernel_unchecked(r_star + r);
    let mut exact = ExtendedReal::from_f64(a * c.value.value() * mass);
    let mut error = a * c.error_estimate * mass;
    let mut inside = 0.0;
    for comp in minus.components() {
        let (near, far) = comp.distance_range(&Point::ORIGIN);
        if near >= r_star {
            continue;
        }
        if far >= r_star && !comp.is_atom() {
            return Err(Error::UnsupportedModel("a negative charge component crosses |y| = R*".into()));
        }
        let w = comp.weight();
        inside += w;
        // `∫ u_c dμ` for the component `c` (weight included).
        let (paired, e) = match *comp {
            Component::Atom { at, .. } => (ExtendedReal::from_f64(w).mul(kernel_potential(&s.mu, &at)), 0.0),
            _ => {
                let single = BorelMeasure::new(ctx.d(), vec![comp.clone()])?;
                integrate_against(
                    ctx,
                    &s.mu,
                    |x: &Point| kernel_potential(&single, x),
                    None::<fn(&Point) -> f64>,
                    &[&single],
                    s.tolerances.mean,
                )?
            }
        };
        exact = exact.checked_add(ExtendedReal::from_f64(w * k_top * mass).checked_sub(paired)?)?;
        error += e;
    }
    let dini = dini_integral(ctx, &s.mu, r_star + r, s.tolerances.dini);
    let relaxed = ExtendedReal::from_f64(a * c.value.value() * mass)
        .checked_add(ExtendedReal::from_f64(inside * ctx.d_hat() as f64).mul(dini.value))?;
    error += inside * ctx.d_hat() as f64 * dini.error_estimate;
    Ok(IntegratedBound { r_star, exact, relaxed, error_estimate: error })
}

/// Runs the requested checks on one scenario, in tag order.
///
/// `points` sample points in `B̄(r)` are used by the pointwise and
/// Poisson–Jensen checks.
pub fn verify_all(s: &Scenario, checks: &[InequalityTag], points: &[Point], timing: bool) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let wants = |t: InequalityTag| checks.contains(&t);
    let timed = |f: &dyn Fn() -> Vec<VerificationReport>| {
        let start = Instant::now();
        let mut rows = f();
        if timing {
            let ms = start.elapsed().as_millis() as u64;
            for r in &mut rows {
                r.wall_time_ms = ms;
            }
        }
        rows
    };
    // The main bound and its planar form share the measure side.
    if wants(InequalityTag::Main) || wants(InequalityTag::Planar) {
        out.extend(timed(&|| main_and_planar(s, wants(InequalityTag::Main), wants(InequalityTag::Planar))));
    }
    if wants(InequalityTag::PlanarMeromorphic) || wants(InequalityTag::PlanarMeromorphicSimplified) {
        out.extend(timed(&|| {
            let (a, b) = verify_planar_meromorphic(s);
            [a, b].into_iter().filter(|r| wants(r.tag)).collect()
        }));
    }
    if wants(InequalityTag::PoissonJensen) {
        out.extend(timed(&|| vec![poisson_jensen_row(s, points)]));
    }
    if wants(InequalityTag::Pointwise) {
        out.extend(timed(&|| {
            let row = verify_pointwise_bound(&s.u, s.r, s.big_r, points, s.tolerances.mean)
                .unwrap_or_else(|e| failed_report(&s.id, InequalityTag::Pointwise, &e));
            vec![VerificationReport { scenario_id: s.id.clone(), ..row }]
        }));
    }
    if wants(InequalityTag::CountingLemma) {
        out.extend(timed(&|| {
            let (plus, minus) = s.u.jordan_decomposition();
            let row = plus
                .sum(minus)
                .and_then(|total| verify_counting_lemma(&total, 0.5 * (s.r + s.big_r), s.big_r, &s.ctx))
                .unwrap_or_else(|e| failed_report(&s.id, InequalityTag::CountingLemma, &e));
            vec![VerificationReport { scenario_id: s.id.clone(), ..row }]
        }));
    }
    out
}

fn main_and_planar(s: &Scenario, main: bool, planar: bool) -> Vec<VerificationReport> {
    let planar_applies = s.ctx.d() == 2;
    let mut rows = Vec::new();
    if s.mu.is_zero() {
        if main {
            rows.push(zero_measure(s, InequalityTag::Main));
        }
        if planar {
            rows.push(if planar_applies { zero_measure(s, InequalityTag::Planar) } else { planar_not_applicable(s) });
        }
        return rows;
    }
    let side = measure_side(s);
    let t = difference_characteristic(&s.u, s.inner_radius(), s.big_r, s.tolerances.mean);
    let row = |tag: InequalityTag, a: Result<f64>| match (&side, &t, a) {
        (Err(report), _, _) => with_tag(report.clone(), tag),
        (_, Err(e), _) => failed_report(&s.id, tag, e),
        (_, _, Err(e)) => failed_report(&s.id, tag, &e),
        (Ok(side), Ok(t), Ok(a)) => assemble(&s.id, tag, side, a, t.value, t.error_estimate),
    };
    if main {
        rows.push(row(InequalityTag::Main, constant_a(&s.ctx, s.r, s.big_r)));
    }
    if planar {
        rows.push(if planar_applies {
            row(InequalityTag::Planar, Ok(planar_constant(s.r, s.big_r)))
        } else {
            planar_not_applicable(s)
        });
    }
    rows
}

/// Relative residual threshold of the Poisson–Jensen row.
pub const POISSON_JENSEN_THRESHOLD: f64 = 1e-6;

fn poisson_jensen_row(s: &Scenario, points: &[Point]) -> VerificationReport {
    let tag = InequalityTag::PoissonJensen;
    match verify_poisson_jensen(&s.u, s.big_r, points, s.tolerances.mean) {
        Ok(pj) => VerificationReport::new(
            &s.id,
            tag,
            ExtendedReal::from_f64(pj.max_residual),
            ExtendedReal::from_f64(POISSON_JENSEN_THRESHOLD),
            0.0,
        )
        .with_note(format!("{} points, {} skipped", pj.residuals.len(), pj.skipped)),
        Err(e) => failed_report(&s.id, tag, &e),
    }
}
