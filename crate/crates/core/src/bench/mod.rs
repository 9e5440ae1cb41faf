//! Batch runs over formula files, generators and cactus data.
//!
//! A formula file holds one formula per line; blank lines and lines starting
//! with `#` are skipped. [`run_file`] checks each formula in turn and
//! [`BenchReport::write`] produces the `output.txt` layout:
//!
//! ```text
//! # timeout 60
//! # seed 7
//! # solvers tableau lasso shortcut
//! # mode separate
//! 1  sat  shortcut  0.0002
//! 2  unsat  tableau  0.0051
//! 3  error  none  0.0000
//! # totals
//! shortcut  0.0004  1
//! tableau  0.0060  2
//! ```
//!
//! Each formula line is `line number, verdict, winner, seconds`, tab separated.
//! The totals block lists `solver, total seconds, solved count`, fastest first.
//! Runs that hit the timeout count as exactly the timeout.

mod gen;

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

pub use gen::{gen_conjunction, gen_o1, gen_random, PATTERNS};

use crate::engine::{Verdict, VerdictKind};
use crate::ltl::{parse, ParseError};
use crate::portfolio::{arbitrate, race, run_all, RunRecord, SolverSpec};

/// Timeout per formula used by the original experiments.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

/// Name of the single totals row in race mode.
pub const PORTFOLIO: &str = "portfolio";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One race per formula; totals are for the portfolio as a whole.
    Race,
    /// Every solver runs to completion on every formula; totals per solver.
    Separate,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Race => "race",
            Mode::Separate => "separate",
        })
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("no solvers configured")]
    NoSolvers,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Checked {
        verdict: Verdict,
        winner: String,
        elapsed: Duration,
        /// Solvers gave contradicting definitive answers (separate mode only).
        conflict: bool,
        records: Vec<RunRecord>,
    },
    ParseError(ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaResult {
    /// 1-based line number in the input file.
    pub line: usize,
    pub text: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverTotal {
    pub solver: String,
    pub total: Duration,
    pub solved: usize,
    /// Times of the definitive answers, in file order.
    pub solved_times: Vec<Duration>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchReport {
    pub timeout: Duration,
    /// Seed of the generator that produced the input, when known.
    pub seed: Option<u64>,
    pub mode: Mode,
    pub solvers: Vec<String>,
    pub formulas: Vec<FormulaResult>,
    /// Fastest first.
    pub totals: Vec<SolverTotal>,
}

/// Checks every formula in `path` with the given solvers.
///
/// Formulas that fail to parse are reported as such and do not count towards
/// any total.
pub fn run_file(
    path: &Path,
    solvers: &[SolverSpec],
    timeout: Duration,
    mode: Mode,
) -> Result<BenchReport, BenchError> {
    let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.into(),
        source,
    })?;
    run_lines(&text, solvers, timeout, mode)
}

/// [`run_file`] on text already in memory.
pub fn run_lines(text: &str, solvers: &[SolverSpec], timeout: Duration, mode: Mode) -> Result<BenchReport, BenchError> {
    if solvers.is_empty() {
        return Err(BenchError::NoSolvers);
    }
    let mut formulas = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let outcome = match parse(trimmed) {
            Err(e) => Outcome::ParseError(e),
            Ok(f) => match mode {
                Mode::Race => {
                    let r = race(&f, solvers, timeout, false).expect("solvers are nonempty");
                    Outcome::Checked {
                        verdict: r.verdict,
                        winner: r.winner,
                        elapsed: r.elapsed,
                        conflict: false,
                        records: r.all_records,
                    }
                }
                Mode::Separate => separate(&f, solvers, timeout),
            },
        };
        formulas.push(FormulaResult {
            line: i + 1,
            text: trimmed.to_string(),
            outcome,
        });
    }
    let names: Vec<String> = solvers.iter().map(|s| s.name.clone()).collect();
    let totals = totals(&formulas, &names, mode, timeout);
    Ok(BenchReport {
        timeout,
        seed: None,
        mode,
        solvers: names,
        formulas,
        totals,
    })
}

fn separate(f: &crate::ltl::Formula, solvers: &[SolverSpec], timeout: Duration) -> Outcome {
    let records = run_all(f, solvers, timeout);
    let conflict = arbitrate(f, &records).has_conflict();
    match records.iter().find(|r| r.verdict.is_definitive()) {
        Some(first) => Outcome::Checked {
            verdict: first.verdict.clone(),
            winner: first.solver.clone(),
            elapsed: first.elapsed,
            conflict,
            records,
        },
        None => Outcome::Checked {
            verdict: Verdict::Unknown(crate::engine::UnknownReason::Timeout),
            winner: "none".into(),
            elapsed: timeout,
            conflict,
            records,
        },
    }
}

fn totals(formulas: &[FormulaResult], names: &[String], mode: Mode, timeout: Duration) -> Vec<SolverTotal> {
    let rows: Vec<String> = match mode {
        Mode::Race => vec![PORTFOLIO.to_string()],
        Mode::Separate => names.to_vec(),
    };
    let mut totals: Vec<SolverTotal> = rows
        .into_iter()
        .map(|solver| SolverTotal {
            solver,
            total: Duration::ZERO,
            solved: 0,
            solved_times: vec![],
        })
        .collect();
    for fr in formulas {
        let Outcome::Checked {
            verdict,
            elapsed,
            records,
            ..
        } = &fr.outcome
        else {
            continue;
        };
        let add = |t: &mut SolverTotal, v: &Verdict, elapsed: Duration| {
            let elapsed = elapsed.min(timeout);
            t.total += elapsed;
            if v.is_definitive() {
                t.solved += 1;
                t.solved_times.push(elapsed);
            }
        };
        match mode {
            Mode::Race => add(&mut totals[0], verdict, *elapsed),
            Mode::Separate => {
                for t in totals.iter_mut() {
                    if let Some(r) = records.iter().find(|r| r.solver == t.solver) {
                        add(t, &r.verdict, r.elapsed);
                    }
                }
            }
        }
    }
    totals.sort_by_key(|t| t.total);
    totals
}

/// Seconds with at most four decimals and no trailing zeros.
pub fn format_seconds(d: Duration) -> String {
    let s = format!("{:.4}", d.as_secs_f64());
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

impl BenchReport {
    /// The `output.txt` text.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# timeout {}\n", format_seconds(self.timeout)));
        match self.seed {
            Some(s) => out.push_str(&format!("# seed {s}\n")),
            None => out.push_str("# seed none\n"),
        }
        out.push_str(&format!("# solvers {}\n", self.solvers.join(" ")));
        out.push_str(&format!("# mode {}\n", self.mode));
        for fr in &self.formulas {
            let (verdict, winner, elapsed) = match &fr.outcome {
                Outcome::ParseError(_) => ("error".to_string(), "none", Duration::ZERO),
                Outcome::Checked {
                    verdict,
                    winner,
                    elapsed,
                    conflict,
                    ..
                } => {
                    let v = if *conflict {
                        "conflict".to_string()
                    } else {
                        verdict.to_string()
                    };
                    (v, winner.as_str(), *elapsed)
                }
            };
            out.push_str(&format!("{}\t{verdict}\t{winner}\t{:.4}\n", fr.line, elapsed.as_secs_f64()));
        }
        out.push_str("# totals\n");
        for t in &self.totals {
            out.push_str(&format!("{}\t{:.4}\t{}\n", t.solver, t.total.as_secs_f64(), t.solved));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), BenchError> {
        fs::write(path, self.render()).map_err(|source| BenchError::Io {
            path: path.into(),
            source,
        })
    }

    /// `<solver>\t<seconds>s` per totals row, fastest first, then the closing line.
    pub fn summary(&self, output_name: &str) -> Vec<String> {
        let mut lines: Vec<String> = self
            .totals
            .iter()
            .map(|t| format!("{}\t{}s", t.solver, format_seconds(t.total)))
            .collect();
        lines.push(format!("The generated file is {output_name}."));
        lines
    }

    pub fn parse_errors(&self) -> impl Iterator<Item = (usize, &ParseError)> {
        self.formulas.iter().filter_map(|fr| match &fr.outcome {
            Outcome::ParseError(e) => Some((fr.line, e)),
            Outcome::Checked { .. } => None,
        })
    }

    pub fn count(&self, kind: VerdictKind) -> usize {
        self.formulas
            .iter()
            .filter(|fr| matches!(&fr.outcome, Outcome::Checked { verdict, .. } if verdict.kind() == kind))
            .count()
    }
}

/// Cumulative solve times per solver, each solver's times sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CactusSeries {
    pub series: Vec<(String, Vec<Duration>)>,
}

pub fn cactus(report: &BenchReport) -> CactusSeries {
    let series = report
        .totals
        .iter()
        .map(|t| {
            let mut times = t.solved_times.clone();
            times.sort();
            let cumulative = times
                .iter()
                .scan(Duration::ZERO, |acc, &d| {
                    *acc += d;
                    Some(*acc)
                })
                .collect();
            (t.solver.clone(), cumulative)
        })
        .collect();
    CactusSeries { series }
}

/// One block per solver: a `# name` line, then `instances<TAB>seconds` rows.
impl fmt::Display for CactusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, points) in &self.series {
            writeln!(f, "# {name}")?;
            for (i, d) in points.iter().enumerate() {
                writeln!(f, "{}\t{:.4}", i + 1, d.as_secs_f64())?;
            }
        }
        Ok(())
    }
}
