//! Ultimately periodic words and exact LTL evaluation over them.
//!
//! A [`LassoWord`] denotes the infinite word `prefix · loop^ω`. Its text form
//! lists the true propositions of each state separated by spaces, states
//! separated by `,`, the prefix separated from the loop by `;`, and the loop
//! wrapped in parentheses: `a,b;(c)` or just `(b)` when the prefix is empty.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ltl::{is_valid_prop, Formula};

/// The propositions that hold at one position; every other proposition is false.
pub type State = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub prefix: Vec<State>,
    /// Never empty.
    pub cycle: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvidenceError {
    #[error("evidence must end with a parenthesized loop")]
    MissingLoop,
    #[error("invalid proposition `{0}` in evidence")]
    BadProp(String),
    #[error("unexpected `{0}` in evidence")]
    Unexpected(char),
}

impl LassoWord {
    /// # Panics
    ///
    /// If `cycle` is empty.
    pub fn new(prefix: Vec<State>, cycle: Vec<State>) -> Self {
        assert!(!cycle.is_empty(), "a lasso needs at least one loop state");
        LassoWord { prefix, cycle }
    }

    /// The word `state^ω`.
    pub fn constant(state: State) -> Self {
        LassoWord::new(vec![], vec![state])
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// State at position `i` of the infinite word.
    pub fn state(&self, i: usize) -> &State {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Same word with one copy of the loop moved into the prefix.
    pub fn unrolled(&self) -> Self {
        let mut prefix = self.prefix.clone();
        prefix.extend(self.cycle.iter().cloned());
        LassoWord::new(prefix, self.cycle.clone())
    }

    fn successor(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Decides `word ⊨ f` exactly.
pub fn eval(word: &LassoWord, f: &Formula) -> bool {
    Evaluator { word }.values(f)[0]
}

struct Evaluator<'a> {
    word: &'a LassoWord,
}

impl Evaluator<'_> {
    // Truth value of `f` at each of the word's distinct positions.
    fn values(&self, f: &Formula) -> Vec<bool> {
        use Formula::*;
        let n = self.word.len();
        match f {
            True => vec![true; n],
            False => vec![false; n],
            Prop(p) => (0..n).map(|i| self.word.state(i).contains(p)).collect(),
            Not(g) => self.values(g).into_iter().map(|v| !v).collect(),
            And(l, r) => self.zip(l, r, |a, b| a && b),
            Or(l, r) => self.zip(l, r, |a, b| a || b),
            Implies(l, r) => self.zip(l, r, |a, b| !a || b),
            Iff(l, r) => self.zip(l, r, |a, b| a == b),
            Next(g) => {
                let inner = self.values(g);
                (0..n).map(|i| inner[self.word.successor(i)]).collect()
            }
            Until(l, r) => self.until(&self.values(l), &self.values(r)),
            Release(l, r) => self.release(&self.values(l), &self.values(r)),
            Finally(g) => self.until(&vec![true; n], &self.values(g)),
            Globally(g) => self.release(&vec![false; n], &self.values(g)),
        }
    }

    fn zip(&self, l: &Formula, r: &Formula, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
        let (a, b) = (self.values(l), self.values(r));
        a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
    }

    /// Least fixpoint of `v = b ∨ (a ∧ X v)`.
    fn until(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fixpoint(vec![false; a.len()], |v, i, next| b[i] || (a[i] && v[next]))
    }

    /// Greatest fixpoint of `v = b ∧ (a ∨ X v)`.
    fn release(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fixpoint(vec![true; a.len()], |v, i, next| b[i] && (a[i] || v[next]))
    }

    fn fixpoint(
        &self,
        mut v: Vec<bool>,
        step: impl Fn(&[bool], usize, usize) -> bool,
    ) -> Vec<bool> {
        loop {
            let mut changed = false;
            for i in (0..v.len()).rev() {
                let new = step(&v, i, self.word.successor(i));
                if new != v[i] {
                    v[i] = new;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }
}

/// Canonical evidence text for `word`.
pub fn print_evidence(word: &LassoWord) -> String {
    let states = |states: &[State]| {
        states
            .iter()
            .map(|s| s.iter().map(String::as_str).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = String::new();
    if !word.prefix.is_empty() {
        out.push_str(&states(&word.prefix));
        out.push(';');
    }
    out.push('(');
    out.push_str(&states(&word.cycle));
    out.push(')');
    out
}

/// Inverse of [`print_evidence`]. Surrounding whitespace is ignored.
pub fn parse_evidence(text: &str) -> Result<LassoWord, EvidenceError> {
    let text = text.trim();
    let (prefix_text, loop_text) = match text.find(';') {
        Some(i) => (Some(&text[..i]), &text[i + 1..]),
        None => (None, text),
    };
    let loop_text = loop_text.trim();
    let inner = loop_text
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or(EvidenceError::MissingLoop)?;
    let prefix = match prefix_text {
        Some(p) => parse_states(p)?,
        None => vec![],
    };
    let cycle = parse_states(inner)?;
    Ok(LassoWord::new(prefix, cycle))
}

fn parse_states(text: &str) -> Result<Vec<State>, EvidenceError> {
    if let Some(c) = text.chars().find(|c| matches!(c, '(' | ')' | ';')) {
        return Err(EvidenceError::Unexpected(c));
    }
    text.split(',')
        .map(|state| {
            state
                .split_ascii_whitespace()
                .map(|p| {
                    if is_valid_prop(p) {
                        Ok(p.to_string())
                    } else {
                        Err(EvidenceError::BadProp(p.to_string()))
                    }
                })
                .collect()
        })
        .collect()
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_evidence(self))
    }
}

impl std::str::FromStr for LassoWord {
    type Err = EvidenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_evidence(s)
    }
}
