use std::collections::BTreeSet;

use indexmap::IndexSet;

use super::{CancelFlag, UnknownReason, Verdict};
use crate::ltl::{nnf, Formula};
use crate::trace::{eval, LassoWord};

/// Obligation families larger than this make the shortcut give up.
pub const OBLIGATION_CAP: usize = 4096;

/// A literal: proposition name and polarity.
type Literal = (String, bool);
type Obligation = BTreeSet<Literal>;

/// Cheap sat filter: tries single-state loops built from the formula's literal
/// obligations and keeps the first one that actually satisfies the formula.
///
/// Only ever answers `Sat` (with evidence) or `Unknown(Inconclusive)`.
pub fn sat_shortcut(f: &Formula, cancel: &CancelFlag) -> Verdict {
    let Some(family) = obligations(&nnf(f)) else {
        return Verdict::Unknown(UnknownReason::Inconclusive);
    };
    for set in family {
        if cancel.is_cancelled() {
            return Verdict::Unknown(UnknownReason::Cancelled);
        }
        let state = set
            .iter()
            .filter(|(_, positive)| *positive)
            .map(|(p, _)| p.clone())
            .collect();
        let word = LassoWord::constant(state);
        if eval(&word, f) {
            return Verdict::Sat(Some(word));
        }
    }
    Verdict::Unknown(UnknownReason::Inconclusive)
}

/// Consistent obligation sets of an NNF formula, or `None` past the cap.
fn obligations(f: &Formula) -> Option<IndexSet<Obligation>> {
    use Formula::*;
    let single = |lit: Literal| Some(IndexSet::from([Obligation::from([lit])]));
    match f {
        True => Some(IndexSet::from([Obligation::new()])),
        False => Some(IndexSet::new()),
        Prop(p) => single((p.clone(), true)),
        Not(inner) => match &**inner {
            Prop(p) => single((p.clone(), false)),
            _ => unreachable!("shortcut runs on NNF"),
        },
        Next(g) => obligations(g),
        Until(_, g) | Release(_, g) => obligations(g),
        Or(l, r) => {
            let mut out = obligations(l)?;
            out.extend(obligations(r)?);
            (out.len() <= OBLIGATION_CAP).then_some(out)
        }
        And(l, r) => {
            let (l, r) = (obligations(l)?, obligations(r)?);
            let mut out = IndexSet::new();
            for a in &l {
                for b in &r {
                    let merged: Obligation = a.union(b).cloned().collect();
                    if consistent(&merged) {
                        out.insert(merged);
                        if out.len() > OBLIGATION_CAP {
                            return None;
                        }
                    }
                }
            }
            Some(out)
        }
        Implies(..) | Iff(..) | Globally(_) | Finally(_) => unreachable!("shortcut runs on NNF"),
    }
}

fn consistent(set: &Obligation) -> bool {
    set.iter()
        .all(|(p, positive)| !set.contains(&(p.clone(), !positive)))
}
