//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any criterion
//! fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use deltasubh_core::characteristics::{
    difference_characteristic, difference_characteristic_canonical, nevanlinna_N, nevanlinna_T, spherical_mean,
    Transform,
};
use deltasubh_core::geometry::{DimensionContext, Point};
use deltasubh_core::lab::{
    constant_a, generate_corpus, run_corpus, verify_counting_lemma, verify_poisson_jensen, CorpusConfig, Family, Verdict,
};
use deltasubh_core::measure::BorelMeasure;
use deltasubh_core::modulus::{modulus_of_continuity, Exactness, ModulusProfile};
use deltasubh_core::potential::MeromorphicFn;
use deltasubh_core::report::{ReportRow, Summary};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_point_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let rho = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(rho, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Rational function with 1–4 zeros and 0–4 poles in the disc of radius 3.
fn random_rational(rng: &mut ChaCha8Rng) -> MeromorphicFn {
    let zeros: Vec<Complex64> = (0..rng.gen_range(1..=4)).map(|_| random_point_in_disc(rng, 3.0)).collect();
    let poles: Vec<Complex64> = (0..rng.gen_range(0..=4)).map(|_| random_point_in_disc(rng, 3.0)).collect();
    let c = Complex64::from_polar(log_uniform(rng, 0.2, 5.0), rng.gen_range(0.0..6.0));
    MeromorphicFn::new(
        zeros.into_iter().map(|a| (a, 1)).collect(),
        poles.into_iter().map(|b| (b, 1)).collect(),
        c,
        Vec::new(),
    )
    .expect("valid rational function")
}

const TIGHT: f64 = 1e-10;

fn closed_form_anchors() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let z = MeromorphicFn::rational(&[Complex64::new(0.0, 0.0)], &[]).unwrap();
    let inv_z = MeromorphicFn::rational(&[], &[Complex64::new(0.0, 0.0)]).unwrap();
    for _ in 0..50 {
        let radius = log_uniform(&mut r, 0.05, 20.0);
        let t = nevanlinna_T(&z, radius, TIGHT).unwrap().value.value();
        worst = worst.max((t - radius.ln().max(0.0)).abs());

        let radius = log_uniform(&mut r, 1.0, 20.0);
        let n = nevanlinna_N(&inv_z, radius).unwrap().value.value();
        worst = worst.max((n - radius.ln()).abs());

        let a = random_point_in_disc(&mut r, 4.0);
        let radius = r.gen_range(0.1..5.0);
        let u = MeromorphicFn::rational(&[a], &[]).unwrap().to_delta_subharmonic().unwrap();
        let c = spherical_mean(&u, Transform::Identity, radius, TIGHT).unwrap().value.value();
        worst = worst.max((c - radius.max(a.norm()).ln()).abs());
    }
    outcome(worst < 1e-8, format!("150 anchors, max abs error {worst:.2e}"))
}

fn random_radii(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r = rng.gen_range(0.2..1.5);
    (r, r + rng.gen_range(0.3..3.0))
}

fn cross_form() -> Outcome {
    let mut r = rng(2);
    let (mut worst, mut zeros, mut ok) = (0.0f64, 0, true);
    for _ in 0..100 {
        let u = random_rational(&mut r).to_delta_subharmonic().unwrap();
        let (a, b) = random_radii(&mut r);
        let direct = difference_characteristic(&u, a, b, TIGHT).unwrap();
        let canonical = difference_characteristic_canonical(&u, a, b, TIGHT).unwrap();
        let (x, y) = (direct.value.value(), canonical.value.value());
        let scale = x.abs().max(y.abs());
        // T_U = 0 exactly on one side leaves only rounding on the other.
        let allowance = 1e-7 * scale + direct.error_estimate + canonical.error_estimate;
        ok &= (x - y).abs() <= allowance;
        if scale > 1e-9 {
            worst = worst.max((x - y).abs() / scale);
        } else {
            zeros += 1;
        }
    }
    outcome(ok, format!("100 rational scenarios, max relative gap {worst:.2e}, {zeros} with T_U = 0 within rounding"))
}

fn bridge() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = random_rational(&mut r);
        let (a, b) = random_radii(&mut r);
        let classical = nevanlinna_T(&f, b, TIGHT).unwrap().value.value() - nevanlinna_N(&f, a).unwrap().value.value();
        let u = f.to_delta_subharmonic().unwrap();
        let t = difference_characteristic(&u, a, b, TIGHT).unwrap().value.value();
        worst = worst.max((classical - t).abs());
    }
    outcome(worst < 1e-7, format!("100 rational f, max abs gap {worst:.2e}"))
}

/// Second divided difference of `ys` against abscissas `xs`.
fn second_differences(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (1..xs.len() - 1)
        .map(|i| {
            let left = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            let right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            (right - left) / (xs[i + 1] - xs[i - 1])
        })
        .collect()
}

fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn characteristic_shape() -> Outcome {
    let config = CorpusConfig { count: 50, ..CorpusConfig::default() };
    let mut issues = Vec::new();
    let mut worst_convex = 0.0f64;
    let mut worst_concave = 0.0f64;
    for s in generate_corpus(&config, 4) {
        let ctx = s.ctx;
        let tol = TIGHT;
        let t_of = |a: f64, b: f64| {
            let rec = difference_characteristic(&s.u, a, b, tol).unwrap();
            (rec.value.value(), rec.error_estimate)
        };

        let inner = 0.5 * s.r;
        let outer = geometric_grid(1.2 * inner, 1.5 * s.big_r, 20);
        let (ts, errs): (Vec<f64>, Vec<f64>) = outer.iter().map(|&b| t_of(inner, b)).unzip();
        let ks: Vec<f64> = outer.iter().map(|&b| ctx.kernel_unchecked(b)).collect();
        for i in 1..ts.len() {
            let allowance = errs[i] + errs[i - 1] + 1e-9 * (1.0 + ts[i].abs());
            if ts[i] < ts[i - 1] - allowance {
                issues.push(format!("{}: T(r, ·) decreases at R={:.4}", s.id, outer[i]));
            }
        }
        let dd = second_differences(&ks, &ts).into_iter().fold(f64::INFINITY, f64::min);
        worst_convex = worst_convex.min(dd);
        if dd < -1e-6 {
            issues.push(format!("{}: not convex in k(R), second difference {dd:.2e}", s.id));
        }

        let first = geometric_grid(0.05 * s.big_r, 0.95 * s.big_r, 20);
        let (ts, errs): (Vec<f64>, Vec<f64>) = first.iter().map(|&a| t_of(a, s.big_r)).unzip();
        let ks: Vec<f64> = first.iter().map(|&a| ctx.kernel_unchecked(a)).collect();
        for i in 1..ts.len() {
            let allowance = errs[i] + errs[i - 1] + 1e-9 * (1.0 + ts[i].abs());
            if ts[i] > ts[i - 1] + allowance {
                issues.push(format!("{}: T(·, R) increases at r={:.4}", s.id, first[i]));
            }
        }
        let dd = second_differences(&ks, &ts).into_iter().fold(f64::NEG_INFINITY, f64::max);
        worst_concave = worst_concave.max(dd);
        if dd > 1e-6 {
            issues.push(format!("{}: not concave in k(r), second difference {dd:.2e}", s.id));
        }
    }
    let detail = format!(
        "50 scenarios x 2 grids of 20, min convexity dd {worst_convex:.2e}, max concavity dd {worst_concave:.2e}{}",
        issues.first().map(|i| format!("; first issue: {i}")).unwrap_or_default()
    );
    outcome(issues.is_empty(), detail)
}

/// Brute-force `h_μ(t)` for integer-weighted planar atoms.
mod brute {
    /// Sandwich `lower ≤ h(t) ≤ upper`; equal once refinement resolved it.
    pub struct Bracket {
        pub lower: f64,
        pub upper: f64,
    }

    pub struct Atoms<'a>(pub &'a [(f64, f64, f64)]);

    impl Atoms<'_> {
        fn mass(&self, x: f64, y: f64, rho: f64) -> f64 {
            self.0.iter().filter(|a| (a.0 - x).hypot(a.1 - y) <= rho).map(|a| a.2).sum()
        }

        /// Mass of `B̄(p, rho)` at every pixel `p` of the grid, row by row.
        fn scan(&self, origin: (f64, f64), n: (usize, usize), h: f64, rho: f64, mut visit: impl FnMut(usize, usize, f64)) {
            let mut diff = vec![0.0f64; n.0 + 1];
            for j in 0..n.1 {
                let y = origin.1 + j as f64 * h;
                diff.iter_mut().for_each(|d| *d = 0.0);
                let mut any = false;
                for &(ax, ay, w) in self.0 {
                    let dy = (y - ay).abs();
                    if dy > rho {
                        continue;
                    }
                    let half = (rho * rho - dy * dy).sqrt();
                    let lo = ((ax - half - origin.0) / h).ceil().max(0.0) as usize;
                    let hi = (((ax + half - origin.0) / h).floor() as isize).min(n.0 as isize - 1);
                    if hi < lo as isize {
                        continue;
                    }
                    diff[lo] += w;
                    diff[hi as usize + 1] -= w;
                    any = true;
                }
                if !any {
                    continue;
                }
                let mut acc = 0.0;
                for (i, d) in diff.iter().take(n.0).enumerate() {
                    acc += d;
                    visit(i, j, acc);
                }
            }
        }

        /// Pixel grid of step `h`, then tenfold refinement of every cell whose
        /// covering bound still beats the best value found.
        pub fn modulus(&self, t: f64, h: f64) -> Bracket {
            let pad = t + 2.0 * h;
            let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            for &(x, y, _) in self.0 {
                (x0, y0, x1, y1) = (x0.min(x), y0.min(y), x1.max(x), y1.max(y));
            }
            let origin = (x0 - pad, y0 - pad);
            let n = (((x1 - x0 + 2.0 * pad) / h) as usize + 1, ((y1 - y0 + 2.0 * pad) / h) as usize + 1);
            let cover = h * std::f64::consts::FRAC_1_SQRT_2;
            let (inner, outer) = (t * (1.0 - 1e-12), (t + cover) * (1.0 + 1e-12));
            let mut best = 0.0f64;
            self.scan(origin, n, h, inner, |_, _, v| best = best.max(v));
            let mut bound = 0.0f64;
            self.scan(origin, n, h, outer, |_, _, v| bound = bound.max(v));
            if bound <= best {
                return Bracket { lower: best, upper: best };
            }
            let mut cells = Vec::new();
            self.scan(origin, n, h, outer, |i, j, v| {
                if v > best {
                    cells.push((origin.0 + i as f64 * h, origin.1 + j as f64 * h));
                }
            });
            let mut size = h;
            while !cells.is_empty() && size > 1e-10 && cells.len() < 500_000 {
                let sub = size / 10.0;
                let reach = (t + sub * std::f64::consts::FRAC_1_SQRT_2) * (1.0 + 1e-12);
                let mut next = Vec::new();
                for &(cx, cy) in &cells {
                    for a in 0..10 {
                        for b in 0..10 {
                            let qx = cx - 0.5 * size + (a as f64 + 0.5) * sub;
                            let qy = cy - 0.5 * size + (b as f64 + 0.5) * sub;
                            best = best.max(self.mass(qx, qy, t * (1.0 - 1e-12)));
                            let up = self.mass(qx, qy, reach);
                            if up > best {
                                next.push((qx, qy, up));
                            }
                        }
                    }
                }
                cells = next.into_iter().filter(|c| c.2 > best).map(|c| (c.0, c.1)).collect();
                size = sub;
            }
            if cells.is_empty() {
                return Bracket { lower: best, upper: best };
            }
            let reach = (t + size * std::f64::consts::FRAC_1_SQRT_2) * (1.0 + 1e-12);
            let upper = cells.iter().map(|&(x, y)| self.mass(x, y, reach)).fold(best, f64::max);
            Bracket { lower: best, upper }
        }
    }
}

fn modulus_oracle() -> Outcome {
    let mut r = rng(5);
    let radii = geometric_grid(0.005, 0.75, 20);
    let (mut compared, mut refined_open, mut mismatches) = (0, 0, Vec::new());
    for m in 0..50 {
        let n = r.gen_range(1..=12);
        let atoms: Vec<(f64, f64, f64)> =
            (0..n).map(|_| (r.gen::<f64>(), r.gen::<f64>(), r.gen_range(1..=3) as f64)).collect();
        let list: Vec<(Point, f64)> = atoms.iter().map(|&(x, y, w)| (Point::new2(x, y), w)).collect();
        let mu = BorelMeasure::atoms(2, &list).unwrap();
        for &t in &radii {
            let h = modulus_of_continuity(&mu, t);
            let oracle = brute::Atoms(&atoms).modulus(t, 1e-3);
            compared += 1;
            if h.exactness != Exactness::Exact {
                mismatches.push(format!("measure {m}, t={t:.4}: not flagged exact"));
            }
            if oracle.lower == oracle.upper {
                if h.value != oracle.lower {
                    mismatches.push(format!("measure {m}, t={t:.4}: {} vs brute force {}", h.value, oracle.lower));
                }
            } else {
                refined_open += 1;
                if h.value < oracle.lower || h.value > oracle.upper {
                    mismatches.push(format!("measure {m}, t={t:.4}: {} outside [{}, {}]", h.value, oracle.lower, oracle.upper));
                }
            }
        }
    }
    let detail = format!(
        "{compared} radii, {} mismatches, {refined_open} left bracketed after refinement{}",
        mismatches.len(),
        mismatches.first().map(|i| format!("; first: {i}")).unwrap_or_default()
    );
    outcome(mismatches.is_empty(), detail)
}

fn modulus_shape() -> Outcome {
    let mut families = Family::DINI_ADMISSIBLE.to_vec();
    families.push(Family::Atomic);
    let config = CorpusConfig { count: 240, families, ..CorpusConfig::default() };
    let mut issues = Vec::new();
    let corpus = generate_corpus(&config, 42);
    for s in &corpus {
        let mass = s.mu.total_mass();
        let sr = s.mu.support_radius();
        let profile = ModulusProfile::geometric(&s.mu, 4.0 * sr.max(1e-3), 24);
        if !profile.is_monotone(0.0) {
            issues.push(format!("{}: profile decreases", s.id));
        }
        if profile.values.iter().any(|&v| v > mass) {
            issues.push(format!("{}: value above the total mass", s.id));
        }
        for t in [sr, 2.0 * sr, 4.0 * sr, 10.0 * sr] {
            let v = modulus_of_continuity(&s.mu, t).value;
            if v != mass {
                issues.push(format!("{}: h({t:.4}) = {v} instead of {mass}", s.id));
            }
        }
    }
    let detail = format!(
        "{} measures, {} issues{}",
        corpus.len(),
        issues.len(),
        issues.first().map(|i| format!("; first: {i}")).unwrap_or_default()
    );
    outcome(issues.is_empty(), detail)
}

fn random_point_in_ball(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> Point {
    loop {
        let p = Point::new3(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), if d == 3 { rng.gen_range(-1.0..1.0) } else { 0.0 });
        if p.norm() < 1.0 {
            return radius * p;
        }
    }
}

fn poisson_jensen() -> Outcome {
    let config = CorpusConfig { count: 50, ..CorpusConfig::default() };
    let mut r = rng(7);
    let (mut worst, mut evaluated, mut skipped) = (0.0f64, 0, 0);
    let mut errors = Vec::new();
    for s in generate_corpus(&config, 7) {
        let points: Vec<Point> = (0..100).map(|_| random_point_in_ball(&mut r, s.ctx.d(), 0.95 * s.big_r)).collect();
        match verify_poisson_jensen(&s.u, s.big_r, &points, s.tolerances.mean) {
            Ok(rep) => {
                worst = worst.max(rep.max_residual);
                evaluated += rep.residuals.len();
                skipped += rep.skipped;
            }
            Err(e) => errors.push(format!("{}: {e}", s.id)),
        }
    }
    let detail = format!("{evaluated} points ({skipped} polar skipped), max relative residual {worst:.2e}{}",
        errors.first().map(|e| format!("; error: {e}")).unwrap_or_default());
    outcome(errors.is_empty() && worst < 1e-6 && evaluated >= 4900, detail)
}

fn counting_lemma() -> Outcome {
    let mut r = rng(8);
    let mut issues = Vec::new();
    for i in 0..200 {
        let ctx = if i % 2 == 0 { DimensionContext::planar() } else { DimensionContext::spatial() };
        let d = ctx.d();
        let atoms: Vec<(Point, f64)> =
            (0..r.gen_range(1..=10)).map(|_| (random_point_in_ball(&mut r, d, 3.0), r.gen_range(0.1..2.0))).collect();
        let mu = BorelMeasure::atoms(d, &atoms).unwrap();
        let r_star = r.gen_range(0.2..2.5);
        let big_r = r_star + r.gen_range(0.1..2.0);
        let rep = verify_counting_lemma(&mu, r_star, big_r, &ctx).unwrap();
        // Closed forms: the step integrand integrates to ln or 1/t terms.
        let lhs: f64 = atoms.iter().filter(|(p, _)| p.norm() <= r_star).map(|(_, w)| w).sum();
        let n: f64 = atoms
            .iter()
            .filter(|(p, _)| p.norm() < big_r)
            .map(|(p, w)| {
                let from = p.norm().max(r_star);
                w * if d == 2 { (big_r / from).ln() } else { 1.0 / from - 1.0 / big_r }
            })
            .sum();
        let rhs = big_r.powi(d as i32 - 1) / (big_r - r_star) * n;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        if rep.verdict != Verdict::Pass || !close(rep.lhs.value(), lhs) || !close(rep.rhs.value(), rhs) {
            issues.push(format!("measure {i} (d={d}): {:?} lhs {} vs {lhs}, rhs {} vs {rhs}", rep.verdict, rep.lhs.value(), rep.rhs.value()));
        }
    }
    let delta = BorelMeasure::atoms(2, &[(Point::ORIGIN, 1.0)]).unwrap();
    let anchor = verify_counting_lemma(&delta, 1.0, 2.0, &DimensionContext::planar()).unwrap();
    let anchor_ok = anchor.lhs.value() == 1.0
        && (anchor.rhs.value() - 2.0 * 2f64.ln()).abs() < 1e-15
        && anchor.verdict == Verdict::Pass;
    let detail = format!(
        "200 atomic measures, {} issues; anchor 1 <= {:.15}{}",
        issues.len(),
        anchor.rhs.value(),
        issues.first().map(|i| format!("; first: {i}")).unwrap_or_default()
    );
    outcome(issues.is_empty() && anchor_ok, detail)
}

fn main_corpus() -> Outcome {
    let rows: Vec<ReportRow> = run_corpus(&CorpusConfig::default(), 42).iter().map(ReportRow::from).collect();
    let summary = Summary::of(&rows);
    let anchor = constant_a(&DimensionContext::planar(), 1.0, 3.0).unwrap();
    let fails = summary.count(Verdict::Fail);
    let inconclusive = summary.inconclusive_fraction();
    let counts: Vec<String> = summary.counts.iter().filter(|(_, &v)| v > 0).map(|(k, v)| format!("{k}={v}")).collect();
    let detail = format!("{} rows: {}; inconclusive share {:.3}; A_2(1,3) = {anchor}", summary.total, counts.join(" "), inconclusive);
    outcome(fails == 0 && inconclusive <= 0.02 && anchor == 4.0, detail)
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_deltasubh-lab"))
            .args(["corpus", "--seed", "42", "--count", "200"])
            .env_remove("DELTASUBH_THREADS")
            .output()
            .expect("spawn deltasubh-lab")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout;
    let ok = same && a.status.success() && b.status.success() && !a.stdout.is_empty();
    outcome(ok, format!("{} bytes, identical: {same}, exit codes {:?} {:?}", a.stdout.len(), a.status.code(), b.status.code()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("closed-form characteristic anchors", Duration::from_secs(5), closed_form_anchors),
        ("difference vs canonical characteristic", Duration::from_secs(30), cross_form),
        ("bridge identity T(R,f) - N(r,f)", Duration::from_secs(30), bridge),
        ("monotonicity and convexity of T_U", Duration::from_secs(60), characteristic_shape),
        ("modulus vs brute-force grid", Duration::from_secs(60), modulus_oracle),
        ("modulus monotone, bounded, saturating", Duration::from_secs(60), modulus_shape),
        ("Poisson-Jensen residual", Duration::from_secs(60), poisson_jensen),
        ("counting lemma on atomic measures", Duration::from_secs(5), counting_lemma),
        ("main bound corpus and A_2 anchor", Duration::from_secs(600), main_corpus),
        ("byte-identical corpus runs", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= *limit;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({}) in {:.2}s, limit {}s",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
