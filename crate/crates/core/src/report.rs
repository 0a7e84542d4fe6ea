//! Report rows as CSV with a frozen column order and fixed float formatting.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{domain, Result};
use crate::ext::ExtendedReal;
use crate::lab::{InequalityTag, VerificationReport, Verdict};

pub const COLUMNS: [&str; 8] =
    ["scenario_id", "inequality_tag", "lhs", "rhs", "slack", "error_budget", "verdict", "wall_time_ms"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario_id: String,
    pub tag: InequalityTag,
    pub lhs: ExtendedReal,
    pub rhs: ExtendedReal,
    pub slack: ExtendedReal,
    pub error_budget: f64,
    pub verdict: Verdict,
    pub wall_time_ms: u64,
}

impl From<&VerificationReport> for ReportRow {
    fn from(r: &VerificationReport) -> Self {
        Self {
            scenario_id: r.scenario_id.clone(),
            tag: r.tag,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack(),
            error_budget: r.error_budget,
            verdict: r.verdict,
            wall_time_ms: r.wall_time_ms,
        }
    }
}

/// 17 significant digits in scientific notation; `inf` and `-inf` for the
/// infinities.
pub fn format_float(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Negative zero would otherwise print as "-0.0…".
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn parse_float(s: &str, column: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| domain(format!("column {column}: cannot parse {s:?} as a number"))),
    }
}

impl ReportRow {
    fn record(&self) -> [String; 8] {
        [
            self.scenario_id.clone(),
            self.tag.to_string(),
            format_float(self.lhs.value()),
            format_float(self.rhs.value()),
            format_float(self.slack.value()),
            format_float(self.error_budget),
            self.verdict.to_string(),
            self.wall_time_ms.to_string(),
        ]
    }

    fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != COLUMNS.len() {
            return Err(domain(format!("expected {} columns, got {}", COLUMNS.len(), rec.len())));
        }
        let ext = |i: usize| -> Result<ExtendedReal> {
            Ok(ExtendedReal::new(parse_float(&rec[i], COLUMNS[i])?)?)
        };
        Ok(Self {
            scenario_id: rec[0].to_string(),
            tag: rec[1].parse()?,
            lhs: ext(2)?,
            rhs: ext(3)?,
            slack: ext(4)?,
            error_budget: parse_float(&rec[5], COLUMNS[5])?,
            verdict: rec[6].parse()?,
            wall_time_ms: rec[7].parse().map_err(|_| domain(format!("bad wall_time_ms {:?}", &rec[7])))?,
        })
    }
}

fn io(e: impl std::fmt::Display) -> crate::Error {
    domain(format!("csv i/o: {e}"))
}

pub fn write_csv<W: Write>(out: W, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS).map_err(io)?;
    for row in rows {
        w.write_record(row.record()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn to_csv_string(rows: &[ReportRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(io)?.clone();
    if header.iter().ne(COLUMNS) {
        return Err(domain(format!("unexpected header {header:?}")));
    }
    r.records().map(|rec| ReportRow::from_record(&rec.map_err(io)?)).collect()
}

/// Verdict counts over a set of rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub counts: BTreeMap<&'static str, usize>,
    pub total: usize,
}

impl Summary {
    pub fn of(rows: &[ReportRow]) -> Self {
        let mut counts: BTreeMap<&'static str, usize> = Verdict::ALL.iter().map(|v| (v.as_str(), 0)).collect();
        for row in rows {
            *counts.entry(row.verdict.as_str()).or_default() += 1;
        }
        Self { counts, total: rows.len() }
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.counts.get(v.as_str()).copied().unwrap_or(0)
    }

    /// Share of inconclusive rows among rows that actually ran a check.
    pub fn inconclusive_fraction(&self) -> f64 {
        let ran = self.total - self.count(Verdict::NotApplicable) - self.count(Verdict::PreconditionFailed);
        if ran == 0 {
            0.0
        } else {
            self.count(Verdict::Inconclusive) as f64 / ran as f64
        }
    }

    /// No fail rows and inconclusive rows within `threshold`.
    pub fn acceptable(&self, threshold: f64) -> bool {
        self.count(Verdict::Fail) == 0 && self.inconclusive_fraction() <= threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_and_round_trips() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        assert_eq!(format_float(f64::INFINITY), "inf");
        for x in [0.1, std::f64::consts::PI, -1.234e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(parse_float(&format_float(x), "x").unwrap(), x);
        }
    }

    #[test]
    fn csv_round_trip() {
        let report = VerificationReport::new("s-1", InequalityTag::Main, ExtendedReal::from_f64(0.5), ExtendedReal::POS_INF, 1e-9);
        let rows = vec![ReportRow::from(&report)];
        let text = to_csv_string(&rows);
        assert!(text.starts_with("scenario_id,inequality_tag,lhs,rhs,slack,error_budget,verdict,wall_time_ms\n"));
        assert!(text.contains("s-1,UR,5.0000000000000000e-1,inf,inf,"));
        assert_eq!(read_csv(text.as_bytes()).unwrap(), rows);
        let s = Summary::of(&rows);
        assert_eq!(s.count(Verdict::VacuousPass), 1);
        assert!(s.acceptable(0.02));
    }
}
