use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deltasubh_core::characteristics::{
    difference_characteristic, nevanlinna_N, nevanlinna_T, nevanlinna_m, spherical_mean, sup_on_sphere,
    CharacteristicKind, CharacteristicRecord, Transform,
};
use deltasubh_core::lab::{run_corpus, sample_points, verify_all, CorpusConfig, Family, InequalityTag, Scenario};
use deltasubh_core::modulus::{modulus_of_continuity, Exactness};
use deltasubh_core::report::{format_float, read_csv, to_csv_string, ReportRow, Summary};
use deltasubh_core::scenario::parse_scenario;

mod grid;

/// Share of inconclusive rows tolerated before the run counts as failed.
const INCONCLUSIVE_THRESHOLD: f64 = 0.02;

#[derive(Parser)]
#[command(name = "deltasubh-lab", version, about = "Integral bounds for differences of subharmonic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Tolerance {
    /// Tolerance for spherical means and left-hand side integrals.
    #[arg(long)]
    tol_mean: Option<f64>,
    /// Tolerance for the Dini integral.
    #[arg(long)]
    tol_dini: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Spherical mean of τ(U).
    CMean,
    /// Supremum of τ(U) over the sphere.
    MSup,
    /// Difference characteristic T_U(r, R).
    TDifference,
    /// m(r, f).
    MClassical,
    /// N(r, f).
    NClassical,
    /// T(r, f).
    TClassical,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Identity,
    Positive,
    Negative,
    Abs,
}

impl From<TransformArg> for Transform {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::Identity => Transform::Identity,
            TransformArg::Positive => Transform::Positive,
            TransformArg::Negative => Transform::Negative,
            TransformArg::Abs => Transform::Abs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print a characteristic over a radius grid as CSV.
    Characteristic {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "t-difference")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "positive")]
        transform: TransformArg,
        /// Radii as start:stop:step; for t-difference these are the first arguments.
        #[arg(long)]
        r_grid: String,
        /// Outer radius for t-difference (defaults to the scenario's R).
        #[arg(long = "outer")]
        outer: Option<f64>,
        #[command(flatten)]
        tol: Tolerance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the modulus of continuity of the scenario's measure as CSV.
    Modulus {
        scenario: PathBuf,
        #[arg(long)]
        t_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check one scenario and print its report rows.
    Verify {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Sample points for the pointwise and Poisson–Jensen checks.
        #[arg(long, default_value_t = 32)]
        points: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        tol: Tolerance,
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and check a seeded corpus.
    Corpus {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Include purely atomic measures (reported as precondition failures).
        #[arg(long)]
        atomic: bool,
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[command(flatten)]
        tol: Tolerance,
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge report files and print verdict counts.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit 2: input could not be read or understood.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<bool, InputError>;

fn threads() -> Option<usize> {
    let v = std::env::var("DELTASUBH_THREADS").ok()?;
    match v.parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            log::warn!("ignoring DELTASUBH_THREADS={v:?}");
            None
        }
    }
}

fn load(path: &Path, tol: &Tolerance) -> Result<Scenario, InputError> {
    let bytes = fs::read(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let mut s = parse_scenario(&bytes).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    if let Some(t) = tol.tol_mean {
        s.tolerances.mean = t;
    }
    if let Some(t) = tol.tol_dini {
        s.tolerances.dini = t;
    }
    Ok(s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), InputError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| InputError(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn parse_checks(checks: Option<Vec<String>>) -> Result<Vec<InequalityTag>, InputError> {
    match checks {
        None => Ok(InequalityTag::ALL.to_vec()),
        Some(list) => {
            let mut tags = list.iter().map(|s| s.trim().parse::<InequalityTag>()).collect::<Result<Vec<_>, _>>()?;
            tags.sort();
            tags.dedup();
            Ok(tags)
        }
    }
}

fn finish(rows: &[ReportRow]) -> bool {
    let summary = Summary::of(rows);
    let counts: Vec<String> = summary.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!("rows={} {}", summary.total, counts.join(" "));
    summary.acceptable(INCONCLUSIVE_THRESHOLD)
}

fn characteristic_row(rec: &CharacteristicRecord) -> String {
    let args = match rec.arguments.as_slice() {
        [r] => format!("{},", format_float(*r)),
        [r, big_r] => format!("{},{}", format_float(*r), format_float(*big_r)),
        _ => ",".into(),
    };
    let kind = match rec.kind {
        CharacteristicKind::CMean => "c_mean",
        CharacteristicKind::MSup => "m_sup",
        CharacteristicKind::MClassical => "m_classical",
        CharacteristicKind::NClassical => "n_classical",
        CharacteristicKind::TClassical => "t_classical",
        CharacteristicKind::TDifference => "t_difference",
    };
    format!("{kind},{args},{},{}\n", format_float(rec.value.value()), format_float(rec.error_estimate))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Characteristic { scenario, kind, transform, r_grid, outer, tol, out } => {
            let s = load(&scenario, &tol)?;
            let radii = grid::parse_grid(&r_grid)?;
            let t = s.tolerances.mean;
            let big_r = outer.unwrap_or(s.big_r);
            let mut text = String::from("kind,r,R,value,error_estimate\n");
            for r in radii {
                let rec = match kind {
                    Kind::CMean => spherical_mean(&s.u, transform.into(), r, t),
                    Kind::MSup => sup_on_sphere(&s.u, transform.into(), r, t),
                    Kind::TDifference => difference_characteristic(&s.u, r, big_r, t),
                    Kind::MClassical | Kind::NClassical | Kind::TClassical => {
                        let f = s.meromorphic().ok_or_else(|| InputError("classical characteristics need a meromorphic function".into()))?;
                        match kind {
                            Kind::MClassical => nevanlinna_m(f, r, t),
                            Kind::NClassical => nevanlinna_N(f, r),
                            _ => nevanlinna_T(f, r, t),
                        }
                    }
                }?;
                text.push_str(&characteristic_row(&rec));
            }
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Modulus { scenario, t_grid, out } => {
            let s = load(&scenario, &Tolerance { tol_mean: None, tol_dini: None })?;
            let mut text = String::from("t,h,exactness\n");
            for t in grid::parse_grid(&t_grid)? {
                let h = modulus_of_continuity(&s.mu, t);
                let exactness = match h.exactness {
                    Exactness::Exact => "exact",
                    Exactness::LowerBound => "lower-bound",
                };
                text.push_str(&format!("{},{},{exactness}\n", format_float(t), format_float(h.value)));
            }
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Verify { scenario, checks, points, seed, tol, timing, out } => {
            let s = load(&scenario, &tol)?;
            let checks = parse_checks(checks)?;
            let pts = sample_points(&s, points, seed.or(s.seed).unwrap_or(0));
            let reports = verify_all(&s, &checks, &pts, timing);
            for r in &reports {
                if let Some(note) = &r.note {
                    log::info!("{} {}: {note}", r.scenario_id, r.tag);
                }
            }
            let rows: Vec<ReportRow> = reports.iter().map(ReportRow::from).collect();
            emit(out.as_deref(), &to_csv_string(&rows))?;
            Ok(finish(&rows))
        }
        Command::Corpus { seed, count, checks, atomic, points, tol, timing, out } => {
            let mut config = CorpusConfig {
                count,
                checks: parse_checks(checks)?,
                sample_points: points,
                timing,
                threads: threads(),
                ..CorpusConfig::default()
            };
            if atomic {
                config.families.push(Family::Atomic);
            }
            if let Some(t) = tol.tol_mean {
                config.tolerances.mean = t;
            }
            if let Some(t) = tol.tol_dini {
                config.tolerances.dini = t;
            }
            let rows: Vec<ReportRow> = run_corpus(&config, seed).iter().map(ReportRow::from).collect();
            emit(out.as_deref(), &to_csv_string(&rows))?;
            Ok(finish(&rows))
        }
        Command::Report { files, out } => {
            let mut rows = Vec::new();
            for f in &files {
                let file = fs::File::open(f).map_err(|e| InputError(format!("{}: {e}", f.display())))?;
                rows.extend(read_csv(file).map_err(|e| InputError(format!("{}: {e}", f.display())))?);
            }
            if let Some(p) = out {
                emit(Some(&p), &to_csv_string(&rows))?;
            }
            let summary = Summary::of(&rows);
            println!("verdict,count");
            for (k, v) in &summary.counts {
                println!("{k},{v}");
            }
            println!("total,{}", summary.total);
            Ok(summary.acceptable(INCONCLUSIVE_THRESHOLD))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
