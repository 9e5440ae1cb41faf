use indexmap::IndexSet;

use super::Formula;

/// Rewrites `->`, `<->`, `G` and `F` into the core operators.
///
/// `G f` becomes `false R f` and `F f` becomes `true U f`.
pub fn desugar(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => False,
        Prop(p) => Prop(p.clone()),
        Not(g) => Formula::not(desugar(g)),
        And(l, r) => Formula::and(desugar(l), desugar(r)),
        Or(l, r) => Formula::or(desugar(l), desugar(r)),
        Implies(l, r) => Formula::or(Formula::not(desugar(l)), desugar(r)),
        Iff(l, r) => {
            let (l, r) = (desugar(l), desugar(r));
            Formula::and(
                Formula::or(Formula::not(l.clone()), r.clone()),
                Formula::or(l, Formula::not(r)),
            )
        }
        Next(g) => Formula::next(desugar(g)),
        Until(l, r) => Formula::until(desugar(l), desugar(r)),
        Release(l, r) => Formula::release(desugar(l), desugar(r)),
        Globally(g) => Formula::release(False, desugar(g)),
        Finally(g) => Formula::until(True, desugar(g)),
    }
}

/// Negation normal form: negations only directly above propositions.
pub fn nnf(f: &Formula) -> Formula {
    push(&desugar(f), false)
}

// `negate` tracks whether an odd number of negations sits above `f`.
fn push(f: &Formula, negate: bool) -> Formula {
    use Formula::*;
    match (f, negate) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Prop(p), false) => Prop(p.clone()),
        (Prop(p), true) => Formula::not(Prop(p.clone())),
        (Not(g), _) => push(g, !negate),
        (And(l, r), false) => Formula::and(push(l, false), push(r, false)),
        (And(l, r), true) => Formula::or(push(l, true), push(r, true)),
        (Or(l, r), false) => Formula::or(push(l, false), push(r, false)),
        (Or(l, r), true) => Formula::and(push(l, true), push(r, true)),
        (Next(g), _) => Formula::next(push(g, negate)),
        (Until(l, r), false) => Formula::until(push(l, false), push(r, false)),
        (Until(l, r), true) => Formula::release(push(l, true), push(r, true)),
        (Release(l, r), false) => Formula::release(push(l, false), push(r, false)),
        (Release(l, r), true) => Formula::until(push(l, true), push(r, true)),
        (Implies(..) | Iff(..) | Globally(_) | Finally(_), _) => {
            unreachable!("push runs on desugared formulas")
        }
    }
}

/// Subformula closure in pre-order of first appearance.
pub fn closure(f: &Formula) -> IndexSet<Formula> {
    let mut out = IndexSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if out.insert(g.clone()) {
            stack.extend(g.children().into_iter().rev());
        }
    }
    out
}
