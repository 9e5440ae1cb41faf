//! Racing solvers against each other.
//!
//! [`race`] starts one worker thread per solver and returns the first
//! definitive verdict, cancelling everyone else. [`run_all`] lets every solver
//! finish and [`arbitrate`] compares what they said.

use std::fmt;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::engine::{Budget, CancelFlag, Strategy, UnknownReason, Verdict, VerdictKind};
use crate::external::{invoke, ExternalSolverSpec};
use crate::ltl::Formula;
use crate::trace::{eval, LassoWord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverKind {
    Internal(Strategy),
    External(ExternalSolverSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverSpec {
    pub name: String,
    pub kind: SolverKind,
    /// Whether the solver is expected to print evidence for sat answers.
    pub supports_evidence: bool,
}

impl SolverSpec {
    pub fn internal(strategy: Strategy) -> Self {
        SolverSpec {
            name: strategy.name().to_string(),
            kind: SolverKind::Internal(strategy),
            supports_evidence: true,
        }
    }

    pub fn external(spec: ExternalSolverSpec) -> Self {
        SolverSpec {
            name: spec.name.clone(),
            kind: SolverKind::External(spec),
            supports_evidence: true,
        }
    }

    /// The three built-in solvers.
    pub fn builtin() -> Vec<SolverSpec> {
        Strategy::ALL.into_iter().map(SolverSpec::internal).collect()
    }
}

/// One solver's answer on one formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub solver: String,
    pub verdict: Verdict,
    /// Wall-clock time; exactly the timeout when the verdict is a timeout.
    pub elapsed: Duration,
}

impl RunRecord {
    pub fn evidence(&self) -> Option<&LassoWord> {
        self.verdict.evidence()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortfolioResult {
    pub verdict: Verdict,
    /// Solver that produced `verdict`, or `"none"`.
    pub winner: String,
    pub elapsed: Duration,
    /// Every worker's record, fastest first.
    pub all_records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PortfolioError {
    #[error("no solvers configured")]
    NoSolvers,
}

/// Runs one solver with its own timeout.
pub fn run_solver(spec: &SolverSpec, f: &Formula, timeout: Duration, cancel: &CancelFlag) -> RunRecord {
    match &spec.kind {
        SolverKind::External(ext) => RunRecord {
            solver: spec.name.clone(),
            ..invoke(ext, f, timeout, cancel)
        },
        SolverKind::Internal(strategy) => {
            let start = Instant::now();
            let budget = Budget {
                deadline: Some(start + timeout),
                ..Budget::default()
            };
            let verdict = strategy.check(f, &budget, cancel);
            let elapsed = match verdict {
                Verdict::Unknown(UnknownReason::Timeout) => timeout,
                _ => start.elapsed(),
            };
            RunRecord {
                solver: spec.name.clone(),
                verdict,
                elapsed,
            }
        }
    }
}

/// Replaces evidence that does not satisfy `f` with none.
fn drop_bad_evidence(f: &Formula, record: &mut RunRecord) {
    if let Verdict::Sat(Some(w)) = &record.verdict {
        if !eval(w, f) {
            record.verdict = Verdict::Sat(None);
        }
    }
}

/// Races `solvers` on `f`; the first definitive verdict wins and the rest are
/// cancelled. Simultaneous finishers are ranked by position in `solvers`.
///
/// With `want_evidence`, a sat answer without (valid) evidence only
/// provisionally wins: solvers that support evidence keep running until one
/// of them supplies it or they all stop, and the others are cancelled. All
/// workers have stopped when this returns.
pub fn race(
    f: &Formula,
    solvers: &[SolverSpec],
    timeout: Duration,
    want_evidence: bool,
) -> Result<PortfolioResult, PortfolioError> {
    if solvers.is_empty() {
        return Err(PortfolioError::NoSolvers);
    }
    let flags: Vec<CancelFlag> = solvers.iter().map(|_| CancelFlag::new()).collect();
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
    let mut records: Vec<Option<RunRecord>> = vec![None; solvers.len()];

    let winner = thread::scope(|scope| {
        for (i, spec) in solvers.iter().enumerate() {
            let tx = tx.clone();
            let cancel = &flags[i];
            scope.spawn(move || {
                let _ = tx.send((i, run_solver(spec, f, timeout, cancel)));
            });
        }
        drop(tx);

        let mut winner: Option<usize> = None;
        let mut settled = false;
        while let Ok(first) = rx.recv() {
            let mut batch: Vec<_> = std::iter::once(first).chain(rx.try_iter()).collect();
            batch.sort_by_key(|(i, _)| *i);
            for (i, mut record) in batch {
                drop_bad_evidence(f, &mut record);
                let v = &record.verdict;
                if !settled && v.is_definitive() {
                    let complete = !want_evidence || matches!(v, Verdict::Unsat | Verdict::Sat(Some(_)));
                    match winner {
                        None => {
                            winner = Some(i);
                            settled = complete;
                        }
                        Some(_) if complete && v.kind() == VerdictKind::Sat => {
                            winner = Some(i);
                            settled = true;
                        }
                        Some(_) => {}
                    }
                }
                records[i] = Some(record);
            }
            if settled {
                break;
            }
            if winner.is_some() {
                for (spec, flag) in solvers.iter().zip(&flags) {
                    if !spec.supports_evidence {
                        flag.cancel();
                    }
                }
            }
        }
        flags.iter().for_each(CancelFlag::cancel);
        winner
    });

    for (i, mut record) in rx.try_iter() {
        drop_bad_evidence(f, &mut record);
        records[i] = Some(record);
    }
    let result = match winner {
        Some(w) => {
            let r = records[w].as_ref().expect("winner reported");
            PortfolioResult {
                verdict: r.verdict.clone(),
                winner: solvers[w].name.clone(),
                elapsed: r.elapsed,
                all_records: vec![],
            }
        }
        None => PortfolioResult {
            verdict: Verdict::Unknown(UnknownReason::Timeout),
            winner: "none".to_string(),
            elapsed: timeout,
            all_records: vec![],
        },
    };
    let mut all_records: Vec<RunRecord> = records.into_iter().flatten().collect();
    all_records.sort_by_key(|r| r.elapsed);
    Ok(PortfolioResult { all_records, ..result })
}

/// Runs every solver to completion (or its own timeout) concurrently, without
/// cancelling anyone. Records come back fastest first.
pub fn run_all(f: &Formula, solvers: &[SolverSpec], timeout: Duration) -> Vec<RunRecord> {
    let never = CancelFlag::new();
    let mut records: Vec<RunRecord> = thread::scope(|scope| {
        let handles: Vec<_> = solvers
            .iter()
            .map(|spec| {
                let never = &never;
                scope.spawn(move || run_solver(spec, f, timeout, never))
            })
            .collect();
        handles
            .into_iter()
            .zip(solvers)
            .map(|(h, spec)| {
                h.join().unwrap_or_else(|_| RunRecord {
                    solver: spec.name.clone(),
                    verdict: Verdict::Unknown(UnknownReason::SolverError("solver panicked".into())),
                    elapsed: Duration::ZERO,
                })
            })
            .collect()
    });
    records.sort_by_key(|r| r.elapsed);
    records
}

/// Outcome of comparing several solvers' answers on one formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub sat: Vec<String>,
    pub unsat: Vec<String>,
    /// Solvers whose sat evidence does not satisfy the formula.
    pub invalid_evidence: Vec<String>,
}

impl ConsistencyReport {
    pub fn has_conflict(&self) -> bool {
        !self.sat.is_empty() && !self.unsat.is_empty()
    }

    pub fn is_consistent(&self) -> bool {
        !self.has_conflict() && self.invalid_evidence.is_empty()
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_consistent() {
            return f.write_str("consistent");
        }
        let mut parts = Vec::new();
        if self.has_conflict() {
            parts.push(format!(
                "conflict: sat from {}; unsat from {}",
                self.sat.join(", "),
                self.unsat.join(", ")
            ));
        }
        if !self.invalid_evidence.is_empty() {
            parts.push(format!("invalid evidence from {}", self.invalid_evidence.join(", ")));
        }
        f.write_str(&parts.join("; "))
    }
}

/// Groups solvers by definitive verdict and re-checks any evidence against `f`.
/// Unknown answers never conflict with anything.
pub fn arbitrate(f: &Formula, records: &[RunRecord]) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    for r in records {
        match &r.verdict {
            Verdict::Sat(evidence) => {
                report.sat.push(r.solver.clone());
                if evidence.as_ref().is_some_and(|w| !eval(w, f)) {
                    report.invalid_evidence.push(r.solver.clone());
                }
            }
            Verdict::Unsat => report.unsat.push(r.solver.clone()),
            Verdict::Unknown(_) => {}
        }
    }
    report
}
