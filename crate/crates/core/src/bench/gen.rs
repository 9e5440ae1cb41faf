//! Seeded formula generators for benchmark files.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ltl::{parse, Formula};

/// Chance that a leaf is `true` or `false` instead of a proposition.
const CONSTANT_LEAF: f64 = 0.05;

#[derive(Clone, Copy)]
enum Op {
    Not,
    Next,
    Globally,
    Finally,
    And,
    Or,
    Implies,
    Iff,
    Until,
    Release,
}

const OPS: [Op; 10] = [
    Op::Not,
    Op::Next,
    Op::Globally,
    Op::Finally,
    Op::And,
    Op::Or,
    Op::Implies,
    Op::Iff,
    Op::Until,
    Op::Release,
];
const UNARY: [Op; 4] = [Op::Not, Op::Next, Op::Globally, Op::Finally];

/// Random formula with exactly `length` nodes over `p0 .. p{nvars-1}`.
///
/// Operators are uniform over the ten connectives (only unary ones fit when
/// two nodes remain) and binary nodes split the remaining size uniformly.
///
/// # Panics
///
/// If `length` or `nvars` is zero.
pub fn gen_random(length: usize, nvars: usize, seed: u64) -> Formula {
    assert!(length >= 1 && nvars >= 1, "length and nvars must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree(&mut rng, length, nvars)
}

fn random_tree(rng: &mut ChaCha8Rng, size: usize, nvars: usize) -> Formula {
    if size == 1 {
        return if rng.gen_bool(CONSTANT_LEAF) {
            if rng.gen() {
                Formula::True
            } else {
                Formula::False
            }
        } else {
            Formula::prop(format!("p{}", rng.gen_range(0..nvars)))
        };
    }
    let op = if size == 2 {
        *UNARY.choose(rng).unwrap()
    } else {
        *OPS.choose(rng).unwrap()
    };
    let unary = |f: fn(Formula) -> Formula, rng: &mut ChaCha8Rng| f(random_tree(rng, size - 1, nvars));
    let binary = |f: fn(Formula, Formula) -> Formula, rng: &mut ChaCha8Rng| {
        let left = rng.gen_range(1..size - 1);
        let l = random_tree(rng, left, nvars);
        f(l, random_tree(rng, size - 1 - left, nvars))
    };
    match op {
        Op::Not => unary(Formula::not, rng),
        Op::Next => unary(Formula::next, rng),
        Op::Globally => unary(Formula::globally, rng),
        Op::Finally => unary(Formula::finally, rng),
        Op::And => binary(Formula::and, rng),
        Op::Or => binary(Formula::or, rng),
        Op::Implies => binary(Formula::implies, rng),
        Op::Iff => binary(Formula::iff, rng),
        Op::Until => binary(Formula::until, rng),
        Op::Release => binary(Formula::release, rng),
    }
}

/// Specification patterns over the placeholders `P`, `Q`, `E`, `S`, `T`.
pub const PATTERNS: &[(&str, &str)] = &[
    ("absence", "G !P"),
    ("existence", "F P"),
    ("universality", "G P"),
    ("response", "G (P -> F S)"),
    ("precedence", "(!P U S) | G !P"),
    ("response chain", "G (P -> F (S & X F T))"),
    ("precedence chain", "F P -> (!P U (S & !P & X (!P U T)))"),
    ("absence after", "G (Q -> G !P)"),
    ("existence before", "G !E | (!E U (P & !E))"),
    ("universality between", "G ((Q & !E & F E) -> (P U E))"),
    ("absence before", "F E -> (!P U E)"),
    ("response after", "G (Q -> G (P -> F S))"),
    ("recurrence", "G F P"),
    ("persistence", "F G P"),
];

const PLACEHOLDERS: [&str; 5] = ["P", "Q", "E", "S", "T"];
const SHARED: usize = 4;

/// Conjunction of `n` patterns drawn from [`PATTERNS`].
///
/// Each placeholder becomes, by a fair coin, one of the shared propositions
/// `p0 .. p3` or a proposition `u<k>` used nowhere else in the formula.
///
/// # Panics
///
/// If `n` is zero.
pub fn gen_conjunction(n: usize, seed: u64) -> Formula {
    assert!(n >= 1, "at least one pattern");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fresh = 0;
    let parts = (0..n).map(|_| {
        let (_, text) = PATTERNS.choose(&mut rng).unwrap();
        let names: HashMap<&str, String> = PLACEHOLDERS
            .iter()
            .map(|&ph| {
                let name = if rng.gen() {
                    format!("p{}", rng.gen_range(0..SHARED))
                } else {
                    fresh += 1;
                    format!("u{fresh}")
                };
                (ph, name)
            })
            .collect();
        rename(&parse(text).expect("pattern library parses"), &names)
    });
    Formula::conjunction(parts.collect::<Vec<_>>())
}

fn rename(f: &Formula, names: &HashMap<&str, String>) -> Formula {
    use Formula::*;
    let go = |g: &Formula| Box::new(rename(g, names));
    match f {
        True => True,
        False => False,
        Prop(p) => Prop(names.get(p.as_str()).cloned().unwrap_or_else(|| p.clone())),
        Not(g) => Not(go(g)),
        Next(g) => Next(go(g)),
        Globally(g) => Globally(go(g)),
        Finally(g) => Finally(go(g)),
        And(l, r) => And(go(l), go(r)),
        Or(l, r) => Or(go(l), go(r)),
        Implies(l, r) => Implies(go(l), go(r)),
        Iff(l, r) => Iff(go(l), go(r)),
        Until(l, r) => Until(go(l), go(r)),
        Release(l, r) => Release(go(l), go(r)),
    }
}

/// `((a1) | (b1)) & … & ((an) | (bn)) & ((G c) & (X ! c))`, nested to the left.
///
/// # Panics
///
/// If `n` is zero.
pub fn gen_o1(n: usize) -> Formula {
    assert!(n >= 1, "at least one disjunction");
    let c = || Formula::prop("c");
    let tail = Formula::and(Formula::globally(c()), Formula::next(Formula::not(c())));
    let ors = (1..=n).map(|i| Formula::or(Formula::prop(format!("a{i}")), Formula::prop(format!("b{i}"))));
    Formula::conjunction(ors.chain([tail]).collect::<Vec<_>>())
}
