use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error};
use crate::ext::ExtendedReal;

/// Which inequality a report row checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InequalityTag {
    /// The main bound in any dimension.
    #[serde(rename = "UR")]
    Main,
    /// Planar form with `A_2 = 2(R+r)/(R−r)`.
    #[serde(rename = "UR2")]
    Planar,
    /// Planar meromorphic form with `T(R,f) − N(r,f)`.
    #[serde(rename = "UR2f")]
    PlanarMeromorphic,
    /// As above with `T(R,f)` alone, valid when `N(r,f) ≥ 0`.
    #[serde(rename = "UR2fr")]
    PlanarMeromorphicSimplified,
    /// Poisson–Jensen representation at sample points.
    #[serde(rename = "Ux")]
    PoissonJensen,
    /// Pointwise upper bound for `U⁺`.
    #[serde(rename = "U+B")]
    Pointwise,
    /// Counting-measure lemma.
    #[serde(rename = "dBr")]
    CountingLemma,
}

impl InequalityTag {
    pub const ALL: [InequalityTag; 7] = [
        InequalityTag::Main,
        InequalityTag::Planar,
        InequalityTag::PlanarMeromorphic,
        InequalityTag::PlanarMeromorphicSimplified,
        InequalityTag::PoissonJensen,
        InequalityTag::Pointwise,
        InequalityTag::CountingLemma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityTag::Main => "UR",
            InequalityTag::Planar => "UR2",
            InequalityTag::PlanarMeromorphic => "UR2f",
            InequalityTag::PlanarMeromorphicSimplified => "UR2fr",
            InequalityTag::PoissonJensen => "Ux",
            InequalityTag::Pointwise => "U+B",
            InequalityTag::CountingLemma => "dBr",
        }
    }
}

impl fmt::Display for InequalityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        InequalityTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| domain(format!("unknown inequality tag {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The error budget covers the slack.
    Inconclusive,
    /// The right-hand side is +∞.
    VacuousPass,
    /// A hypothesis (usually the Dini condition) fails.
    PreconditionFailed,
    /// The check does not apply to this scenario.
    NotApplicable,
}

impl Verdict {
    pub const ALL: [Verdict; 6] = [
        Verdict::Pass,
        Verdict::Fail,
        Verdict::Inconclusive,
        Verdict::VacuousPass,
        Verdict::PreconditionFailed,
        Verdict::NotApplicable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::VacuousPass => "vacuous-pass",
            Verdict::PreconditionFailed => "precondition-failed",
            Verdict::NotApplicable => "not-applicable",
        }
    }

    /// Verdict for `lhs ≤ rhs` given a combined error budget.
    pub fn decide(lhs: ExtendedReal, rhs: ExtendedReal, budget: f64) -> Verdict {
        if rhs.is_pos_inf() {
            return if lhs.is_pos_inf() { Verdict::Inconclusive } else { Verdict::VacuousPass };
        }
        if lhs.is_neg_inf() {
            return Verdict::Pass;
        }
        if lhs.is_pos_inf() || rhs.is_neg_inf() {
            return Verdict::Fail;
        }
        let slack = rhs.value() - lhs.value();
        if !budget.is_finite() {
            Verdict::Inconclusive
        } else if slack > budget || (budget == 0.0 && slack >= 0.0) {
            Verdict::Pass
        } else if slack + budget < 0.0 {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Verdict::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| domain(format!("unknown verdict {s:?}")))
    }
}

/// Pieces of the main bound's right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Breakdown {
    pub a_d: f64,
    pub t_u: Option<ExtendedReal>,
    pub mass: f64,
    pub dini: Option<ExtendedReal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario_id: String,
    pub tag: InequalityTag,
    pub lhs: ExtendedReal,
    pub rhs: ExtendedReal,
    pub error_budget: f64,
    pub verdict: Verdict,
    pub breakdown: Breakdown,
    pub wall_time_ms: u64,
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn new(
        scenario_id: impl Into<String>,
        tag: InequalityTag,
        lhs: ExtendedReal,
        rhs: ExtendedReal,
        error_budget: f64,
    ) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            tag,
            lhs,
            rhs,
            error_budget,
            verdict: Verdict::decide(lhs, rhs, error_budget),
            breakdown: Breakdown::default(),
            wall_time_ms: 0,
            note: None,
        }
    }

    /// A row without numbers, for checks that could not run.
    pub fn skipped(scenario_id: impl Into<String>, tag: InequalityTag, verdict: Verdict, note: impl Into<String>) -> Self {
        Self {
            scenario_id: scenario_id.into(),
            tag,
            lhs: ExtendedReal::ZERO,
            rhs: ExtendedReal::ZERO,
            error_budget: 0.0,
            verdict,
            breakdown: Breakdown::default(),
            wall_time_ms: 0,
            note: Some(note.into()),
        }
    }

    /// `rhs − lhs`, with `∞ − ∞` read as 0.
    pub fn slack(&self) -> ExtendedReal {
        self.rhs.checked_sub(self.lhs).unwrap_or(ExtendedReal::ZERO)
    }

    pub fn with_breakdown(mut self, breakdown: Breakdown) -> Self {
        self.breakdown = breakdown;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
