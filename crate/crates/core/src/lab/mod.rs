//! Verifier for the main integral bound, its planar forms, the Poisson–Jensen
//! representation, the pointwise bound and the counting lemma.

mod checks;
mod corpus;
mod integrate;
mod report;

pub use checks::{
    constant_a, integrated_pointwise_bound, verify_all, verify_counting_lemma, verify_main_theorem, verify_planar,
    verify_planar_meromorphic, verify_poisson_jensen, verify_pointwise_bound, IntegratedBound, PoissonJensenReport,
    POISSON_JENSEN_THRESHOLD,
};
pub use corpus::{generate_corpus, run_corpus, sample_points, CorpusConfig, Family};
pub use integrate::integrate_against;
pub use report::{Breakdown, InequalityTag, VerificationReport, Verdict};

use crate::error::{domain, Result};
use crate::geometry::DimensionContext;
use crate::measure::BorelMeasure;
use crate::potential::{DeltaSubharmonicFn, MeromorphicFn};
use crate::quadrature::{DEFAULT_DINI_TOL, DEFAULT_MEAN_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub mean: f64,
    pub dini: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { mean: DEFAULT_MEAN_TOL, dini: DEFAULT_DINI_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioFunction {
    Meromorphic(MeromorphicFn),
    DeltaSubharmonic(DeltaSubharmonicFn),
}

/// One instance of the main bound: a function, a measure on `B̄(r)` and radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub ctx: DimensionContext,
    pub function: ScenarioFunction,
    /// `ln|f|` for meromorphic scenarios.
    pub u: DeltaSubharmonicFn,
    pub mu: BorelMeasure,
    pub r: f64,
    pub big_r: f64,
    pub r0: Option<f64>,
    pub tolerances: Tolerances,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        function: ScenarioFunction,
        mu: BorelMeasure,
        r: f64,
        big_r: f64,
        r0: Option<f64>,
    ) -> Result<Self> {
        let u = match &function {
            ScenarioFunction::Meromorphic(f) => f.to_delta_subharmonic()?,
            ScenarioFunction::DeltaSubharmonic(u) => u.clone(),
        };
        let ctx = DimensionContext::new(u.dim())?;
        if mu.dim() != u.dim() {
            return Err(domain("the measure and the function live in different dimensions"));
        }
        if !(r > 0.0 && r < big_r && big_r.is_finite()) {
            return Err(domain(format!("need 0 < r < R, got r={r}, R={big_r}")));
        }
        if let Some(r0) = r0 {
            if !(0.0..=r).contains(&r0) {
                return Err(domain(format!("r0 = {r0} is outside [0, r]")));
            }
        }
        if !mu.supported_in(r) {
            return Err(domain(format!("the measure reaches radius {} beyond r = {r}", mu.support_radius())));
        }
        Ok(Self {
            id: id.into(),
            ctx,
            function,
            u,
            mu,
            r,
            big_r,
            r0,
            tolerances: Tolerances::default(),
            seed: None,
        })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn meromorphic(&self) -> Option<&MeromorphicFn> {
        match &self.function {
            ScenarioFunction::Meromorphic(f) => Some(f),
            ScenarioFunction::DeltaSubharmonic(_) => None,
        }
    }

    /// First argument of `T_U` on the right-hand side.
    pub fn inner_radius(&self) -> f64 {
        self.r0.unwrap_or(self.r)
    }
}
