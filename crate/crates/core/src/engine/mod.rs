//! Built-in decision procedures.
//!
//! Three solvers share one lazily built tableau graph construction:
//!
//! * [`tableau_check`] explores the whole graph and looks for a reachable
//!   strongly connected component that fulfils every until-eventuality. It is
//!   complete: it answers `Unsat` when no such component exists.
//! * [`lasso_search`] runs an iterative-deepening search for short accepting
//!   lassos and only ever answers `Sat`.
//! * [`sat_shortcut`] guesses a single-state model from the formula's literal
//!   obligations and keeps it only if [`crate::trace::eval`] confirms it.
//!
//! Every check polls a [`CancelFlag`] and its [`Budget`] while it works.

mod bits;
mod graph;
mod lasso;
mod shortcut;
mod tableau;

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::ltl::Formula;
use crate::trace::LassoWord;

pub use lasso::{lasso_search, DEFAULT_MAX_DEPTH};
pub use shortcut::{sat_shortcut, OBLIGATION_CAP};
pub use tableau::tableau_check;

/// Why a solver produced no definitive answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    Timeout,
    Cancelled,
    /// The procedure ran to completion without reaching a verdict
    /// (incomplete procedures only).
    Inconclusive,
    SolverError(String),
}

/// A solver's answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat(Option<LassoWord>),
    Unsat,
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_definitive(&self) -> bool {
        matches!(self, Verdict::Sat(_) | Verdict::Unsat)
    }

    pub fn evidence(&self) -> Option<&LassoWord> {
        match self {
            Verdict::Sat(Some(w)) => Some(w),
            _ => None,
        }
    }

    /// The verdict with any evidence dropped; useful for comparing answers.
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Sat(_) => VerdictKind::Sat,
            Verdict::Unsat => VerdictKind::Unsat,
            Verdict::Unknown(_) => VerdictKind::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerdictKind {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Sat(_) => f.write_str("sat"),
            Verdict::Unsat => f.write_str("unsat"),
            Verdict::Unknown(UnknownReason::Timeout) => f.write_str("timeout"),
            Verdict::Unknown(UnknownReason::Cancelled) => f.write_str("cancelled"),
            Verdict::Unknown(UnknownReason::Inconclusive) => f.write_str("unknown"),
            Verdict::Unknown(UnknownReason::SolverError(_)) => f.write_str("error"),
        }
    }
}

/// Resource limits for a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of tableau states (or search steps for the lasso search).
    pub max_nodes: usize,
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: 1_000_000,
            deadline: None,
        }
    }
}

impl Budget {
    pub fn with_timeout(timeout: Duration) -> Self {
        Budget {
            deadline: Some(Instant::now() + timeout),
            ..Budget::default()
        }
    }
}

/// Shared cancellation signal.
#[derive(Debug, Clone, Default)]
pub struct CancelFlag(Arc<AtomicBool>);

impl CancelFlag {
    pub fn new() -> Self {
        CancelFlag::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// Built-in solver identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Tableau,
    Lasso,
    Shortcut,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Tableau, Strategy::Lasso, Strategy::Shortcut];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Tableau => "tableau",
            Strategy::Lasso => "lasso",
            Strategy::Shortcut => "shortcut",
        }
    }

    pub fn from_name(name: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn check(self, f: &Formula, budget: &Budget, cancel: &CancelFlag) -> Verdict {
        match self {
            Strategy::Tableau => tableau_check(f, budget, cancel),
            Strategy::Lasso => lasso_search(f, DEFAULT_MAX_DEPTH, budget, cancel),
            Strategy::Shortcut => sat_shortcut(f, cancel),
        }
    }
}

/// Why a check stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Interrupt {
    Timeout,
    Cancelled,
}

impl From<Interrupt> for Verdict {
    fn from(i: Interrupt) -> Self {
        match i {
            Interrupt::Timeout => Verdict::Unknown(UnknownReason::Timeout),
            Interrupt::Cancelled => Verdict::Unknown(UnknownReason::Cancelled),
        }
    }
}

/// Polls cancellation and the deadline; cheap enough to call in inner loops.
pub(crate) struct Guard {
    cancel: CancelFlag,
    deadline: Option<Instant>,
    ticks: u32,
}

impl Guard {
    pub fn new(budget: &Budget, cancel: &CancelFlag) -> Self {
        Guard {
            cancel: cancel.clone(),
            deadline: budget.deadline,
            ticks: 0,
        }
    }

    /// Checks unconditionally.
    pub fn check(&self) -> Result<(), Interrupt> {
        if self.cancel.is_cancelled() {
            return Err(Interrupt::Cancelled);
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Interrupt::Timeout);
        }
        Ok(())
    }

    /// Checks every 256th call.
    pub fn tick(&mut self) -> Result<(), Interrupt> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(256) {
            self.check()
        } else {
            Ok(())
        }
    }
}
