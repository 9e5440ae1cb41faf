//! Exhaustive small-formula check of the tableau against brute-force lassos.
//!
//! The oracle evaluates every formula on every lasso with a prefix of at most
//! three letters and a loop of at most three letters over `{p, q}`. Truth
//! values are bitmasks over lasso positions, built bottom-up from the values
//! of the subformulas, so each formula costs one pass over the lasso table.

use std::rc::Rc;

use polsat::engine::{tableau_check, Budget, CancelFlag, Verdict};
use polsat::ltl::Formula;
use polsat::trace::eval;

const MAX_SIZE: usize = 7;

struct Lasso {
    letters: Vec<u8>,
    succ: Vec<usize>,
}

fn lassos() -> Vec<Lasso> {
    let mut out = Vec::new();
    for prefix in 0..=3usize {
        for cycle in 1..=3usize {
            let n = prefix + cycle;
            for code in 0..4usize.pow(n as u32) {
                let letters = (0..n).map(|i| ((code >> (2 * i)) & 3) as u8).collect();
                let succ = (0..n).map(|i| if i + 1 < n { i + 1 } else { prefix }).collect();
                out.push(Lasso { letters, succ });
            }
        }
    }
    out
}

fn next(l: &Lasso, m: u8) -> u8 {
    let mut r = 0;
    for (i, &s) in l.succ.iter().enumerate() {
        r |= ((m >> s) & 1) << i;
    }
    r
}

fn full(l: &Lasso) -> u8 {
    ((1u16 << l.letters.len()) - 1) as u8
}

fn until(l: &Lasso, a: u8, b: u8) -> u8 {
    let mut z = 0;
    loop {
        let z2 = b | (a & next(l, z));
        if z2 == z {
            return z;
        }
        z = z2;
    }
}

fn release(l: &Lasso, a: u8, b: u8) -> u8 {
    let mut z = full(l);
    loop {
        let z2 = b & (a | next(l, z));
        if z2 == z {
            return z;
        }
        z = z2;
    }
}

#[derive(Clone, Copy)]
enum Op {
    Not,
    Next,
    And,
    Or,
    Until,
    Release,
}

const UNARY: [Op; 2] = [Op::Not, Op::Next];
const BINARY: [Op; 4] = [Op::And, Op::Or, Op::Until, Op::Release];

fn build(op: Op, l: Formula, r: Option<Formula>) -> Formula {
    match (op, r) {
        (Op::Not, _) => Formula::not(l),
        (Op::Next, _) => Formula::next(l),
        (Op::And, Some(r)) => Formula::and(l, r),
        (Op::Or, Some(r)) => Formula::or(l, r),
        (Op::Until, Some(r)) => Formula::until(l, r),
        (Op::Release, Some(r)) => Formula::release(l, r),
        _ => unreachable!(),
    }
}

fn apply(op: Op, lassos: &[Lasso], a: &[u8], b: Option<&[u8]>) -> Vec<u8> {
    lassos
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let x = a[k];
            let y = b.map_or(0, |b| b[k]);
            match op {
                Op::Not => !x & full(l),
                Op::Next => next(l, x),
                Op::And => x & y,
                Op::Or => x | y,
                Op::Until => until(l, x, y),
                Op::Release => release(l, x, y),
            }
        })
        .collect()
}

type Entry = (Formula, Rc<Vec<u8>>);

pub struct Summary {
    pub formulas: usize,
    pub sat: usize,
    pub disagreements: Vec<String>,
}

/// Enumerates every formula over `{p, q}` built from `!`, `X`, `&`, `|`, `U`,
/// `R` with at most `MAX_SIZE` nodes and compares verdicts.
pub fn run() -> Summary {
    let lassos = lassos();
    let mut by_size: Vec<Vec<Entry>> = vec![vec![]; MAX_SIZE + 1];
    for (bit, name) in ["p", "q"].into_iter().enumerate() {
        let v = lassos.iter().map(|l| l.letters.iter().enumerate().fold(0u8, |m, (i, &c)| m | (((c >> bit) & 1) << i))).collect();
        by_size[1].push((Formula::prop(name), Rc::new(v)));
    }
    let mut summary = Summary {
        formulas: 0,
        sat: 0,
        disagreements: vec![],
    };
    for size in 1..=MAX_SIZE {
        let mut level: Vec<Entry> = std::mem::take(&mut by_size[size]);
        if size > 1 {
            for op in UNARY {
                for (f, v) in &by_size[size - 1] {
                    level.push((build(op, f.clone(), None), Rc::new(apply(op, &lassos, v, None))));
                }
            }
            for left in 1..size - 1 {
                let right = size - 1 - left;
                for op in BINARY {
                    for (lf, lv) in &by_size[left] {
                        for (rf, rv) in &by_size[right] {
                            let v = apply(op, &lassos, lv, Some(rv));
                            level.push((build(op, lf.clone(), Some(rf.clone())), Rc::new(v)));
                        }
                    }
                }
            }
        }
        for (f, v) in &level {
            summary.formulas += 1;
            let oracle_sat = v.iter().any(|m| m & 1 != 0);
            summary.sat += oracle_sat as usize;
            if let Some(problem) = compare(f, oracle_sat) {
                summary.disagreements.push(problem);
            }
        }
        if size < MAX_SIZE {
            by_size[size] = level;
        }
    }
    summary
}

fn compare(f: &Formula, oracle_sat: bool) -> Option<String> {
    match tableau_check(f, &Budget::default(), &CancelFlag::new()) {
        Verdict::Sat(Some(w)) if !eval(&w, f) => Some(format!("{f}: evidence {w} rejected")),
        Verdict::Sat(Some(_)) if oracle_sat => None,
        Verdict::Unsat if !oracle_sat => None,
        other => Some(format!("{f}: tableau {other}, oracle sat = {oracle_sat}")),
    }
}
