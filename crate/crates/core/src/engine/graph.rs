//! Tableau graph over sets of NNF obligations.
//!
//! A state is the set of formulas that must hold at the current position.
//! Expanding a state saturates it with the rules
//!
//! * `a U b` = `b ∨ (a ∧ X(a U b))`
//! * `a R b` = `b ∧ (a ∨ X(a R b))`
//!
//! and yields edges labelled with a consistent literal set (the letter read at
//! this position) and the until-formulas that were postponed without being
//! fulfilled. The successor state is the set of `X` operands. An accepting
//! cycle is one on which every until-formula is fulfilled at least once.

use std::collections::HashMap;
use std::rc::Rc;

use indexmap::IndexSet;

use super::bits::BitSet;
use super::{Guard, Interrupt};
use crate::ltl::{closure, Formula};
use crate::trace::{LassoWord, State};

pub(crate) type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    True,
    False,
    Lit { var: usize, positive: bool },
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Next(NodeId),
    Until(NodeId, NodeId),
    Release(NodeId, NodeId),
}

/// Hash-consed subformulas of an NNF formula, numbered in closure order.
struct Arena {
    nodes: Vec<Node>,
    vars: Vec<String>,
    node_vars: Vec<BitSet>,
    /// Acceptance index of each until node.
    until_index: Vec<Option<usize>>,
    until_count: usize,
    true_node: Option<NodeId>,
}

impl Arena {
    fn build(f: &Formula) -> Arena {
        let cl = closure(f);
        let mut vars: IndexSet<String> = IndexSet::new();
        for g in &cl {
            if let Formula::Prop(p) = g {
                vars.insert(p.clone());
            }
        }
        let id = |g: &Formula| cl.get_index_of(g).expect("closure contains subformulas");
        let mut until_count = 0;
        let mut until_index = Vec::with_capacity(cl.len());
        let nodes: Vec<Node> = cl
            .iter()
            .map(|g| {
                let node = match g {
                    Formula::True => Node::True,
                    Formula::False => Node::False,
                    Formula::Prop(p) => Node::Lit {
                        var: vars.get_index_of(p).unwrap(),
                        positive: true,
                    },
                    Formula::Not(inner) => match &**inner {
                        Formula::Prop(p) => Node::Lit {
                            var: vars.get_index_of(p).unwrap(),
                            positive: false,
                        },
                        _ => panic!("formula is not in negation normal form"),
                    },
                    Formula::And(l, r) => Node::And(id(l), id(r)),
                    Formula::Or(l, r) => Node::Or(id(l), id(r)),
                    Formula::Next(x) => Node::Next(id(x)),
                    Formula::Until(l, r) => Node::Until(id(l), id(r)),
                    Formula::Release(l, r) => Node::Release(id(l), id(r)),
                    _ => panic!("formula is not in negation normal form"),
                };
                if matches!(node, Node::Until(..)) {
                    until_index.push(Some(until_count));
                    until_count += 1;
                } else {
                    until_index.push(None);
                }
                node
            })
            .collect();
        let mut arena = Arena {
            true_node: nodes.iter().position(|n| *n == Node::True),
            node_vars: vec![BitSet::new(); nodes.len()],
            nodes,
            vars: vars.into_iter().collect(),
            until_index,
            until_count,
        };
        let mut done = vec![false; arena.nodes.len()];
        for n in 0..arena.nodes.len() {
            arena.collect_vars(n, &mut done);
        }
        arena
    }

    fn collect_vars(&mut self, n: NodeId, done: &mut [bool]) {
        if done[n] {
            return;
        }
        let vars = match self.nodes[n] {
            Node::True | Node::False => BitSet::new(),
            Node::Lit { var, .. } => BitSet::singleton(var),
            Node::Next(x) => {
                self.collect_vars(x, done);
                self.node_vars[x].clone()
            }
            Node::And(l, r) | Node::Or(l, r) | Node::Until(l, r) | Node::Release(l, r) => {
                self.collect_vars(l, done);
                self.collect_vars(r, done);
                self.node_vars[l].union(&self.node_vars[r])
            }
        };
        self.node_vars[n] = vars;
        done[n] = true;
    }
}

/// One way of satisfying a set of obligations at the current position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Partial {
    pos: BitSet,
    neg: BitSet,
    next: BitSet,
    deferred: BitSet,
    fulfilled: BitSet,
}

impl Partial {
    fn empty() -> Self {
        Partial {
            pos: BitSet::new(),
            neg: BitSet::new(),
            next: BitSet::new(),
            deferred: BitSet::new(),
            fulfilled: BitSet::new(),
        }
    }

    fn merge(&self, other: &Partial) -> Option<Partial> {
        if !self.pos.is_disjoint(&other.neg) || !self.neg.is_disjoint(&other.pos) {
            return None;
        }
        Some(Partial {
            pos: self.pos.union(&other.pos),
            neg: self.neg.union(&other.neg),
            next: self.next.union(&other.next),
            deferred: self.deferred.union(&other.deferred),
            fulfilled: self.fulfilled.union(&other.fulfilled),
        })
    }

    /// Every constraint of `self` is implied by `other`'s.
    fn dominates(&self, other: &Partial) -> bool {
        self.pos.is_subset(&other.pos)
            && self.neg.is_subset(&other.neg)
            && self.next.is_subset(&other.next)
            && self.deferred.is_subset(&other.deferred)
            && other.fulfilled.is_subset(&self.fulfilled)
    }

    /// Forgets literals over variables outside `keep`.
    fn project(&self, keep: &BitSet) -> Partial {
        Partial {
            pos: self.pos.intersection(keep),
            neg: self.neg.intersection(keep),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Edge {
    pub target: usize,
    /// Variables true at this position.
    pub letter: BitSet,
    /// Until-formulas (acceptance indices) postponed and not fulfilled here.
    pub pending: BitSet,
}

/// Adds `item` unless something in `set` dominates it, evicting whatever it dominates.
fn insert_minimal<T>(set: &mut Vec<T>, item: T, dominates: impl Fn(&T, &T) -> bool) {
    if set.iter().any(|x| dominates(x, &item)) {
        return;
    }
    set.retain(|x| !dominates(&item, x));
    set.push(item);
}

/// The tableau graph of one formula, built on demand.
pub(crate) struct Graph {
    arena: Arena,
    states: IndexSet<BitSet>,
    edges: Vec<Option<Rc<[Edge]>>>,
    expansions: HashMap<NodeId, Rc<Vec<Partial>>>,
    pub guard: Guard,
}

impl Graph {
    /// `f` must be in negation normal form. State 0 is the initial state.
    pub fn new(f: &Formula, guard: Guard) -> Graph {
        let arena = Arena::build(f);
        let mut graph = Graph {
            arena,
            states: IndexSet::new(),
            edges: Vec::new(),
            expansions: HashMap::new(),
            guard,
        };
        // closure order puts the root first
        graph.intern(BitSet::singleton(0));
        graph
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn until_count(&self) -> usize {
        self.arena.until_count
    }

    /// True if a cycle made of edges with these pending sets fulfils every until.
    pub fn accepting<'a>(&self, pendings: impl IntoIterator<Item = &'a BitSet>) -> bool {
        let mut iter = pendings.into_iter();
        let Some(first) = iter.next() else {
            return false;
        };
        let mut common = first.clone();
        for p in iter {
            if common.is_empty() {
                break;
            }
            common = common.intersection(p);
        }
        common.is_empty()
    }

    pub fn edges(&mut self, state: usize) -> Result<Rc<[Edge]>, Interrupt> {
        if let Some(e) = &self.edges[state] {
            return Ok(e.clone());
        }
        self.guard.check()?;
        let obligations = self.states[state].clone();
        let edges: Rc<[Edge]> = self.expand_state(&obligations)?.into();
        self.edges[state] = Some(edges.clone());
        Ok(edges)
    }

    pub fn word(&self, letters: &[&BitSet], loop_start: usize) -> LassoWord {
        let to_state = |letter: &BitSet| -> State {
            letter.iter().map(|v| self.arena.vars[v].clone()).collect()
        };
        let prefix = letters[..loop_start].iter().map(|l| to_state(l)).collect();
        let cycle = letters[loop_start..].iter().map(|l| to_state(l)).collect();
        LassoWord::new(prefix, cycle)
    }

    fn intern(&mut self, mut next: BitSet) -> usize {
        // `true` obligations are vacuous; drop them so `{true}` and `{}` coincide
        if let Some(t) = self.arena.true_node {
            if next.contains(t) {
                next = next.difference(&BitSet::singleton(t));
            }
        }
        let (idx, fresh) = self.states.insert_full(next);
        if fresh {
            self.edges.push(None);
        }
        idx
    }

    fn expand_state(&mut self, obligations: &BitSet) -> Result<Vec<Edge>, Interrupt> {
        let mut base = Partial::empty();
        let mut choices: Vec<NodeId> = Vec::new();
        let mut seen = BitSet::new();
        let mut stack: Vec<NodeId> = obligations.iter().collect();
        stack.reverse();
        while let Some(n) = stack.pop() {
            if seen.contains(n) {
                continue;
            }
            seen.insert(n);
            match self.arena.nodes[n] {
                Node::True => {}
                Node::False => return Ok(vec![]),
                Node::Lit { var, positive } => {
                    let (same, other) = if positive {
                        (&mut base.pos, &base.neg)
                    } else {
                        (&mut base.neg, &base.pos)
                    };
                    if other.contains(var) {
                        return Ok(vec![]);
                    }
                    same.insert(var);
                }
                Node::And(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                Node::Next(x) => base.next.insert(x),
                Node::Release(l, r) if self.arena.nodes[l] == Node::False => {
                    base.next.insert(n);
                    stack.push(r);
                }
                Node::Or(..) | Node::Until(..) | Node::Release(..) => choices.push(n),
            }
        }
        choices.sort_unstable();

        // Literals over variables that no later choice mentions can no longer
        // clash, so partials differing only there are interchangeable.
        let mut future = vec![BitSet::new(); choices.len() + 1];
        for k in (0..choices.len()).rev() {
            future[k] = future[k + 1].union(&self.arena.node_vars[choices[k]]);
        }
        // A partial that asks for less than another (fewer literals on live
        // variables, fewer successor obligations, fewer postponed untils) admits
        // every continuation the other does, so only minimal partials are kept.
        let mut partials: Vec<(Partial, Partial)> = vec![(base.project(&future[0]), base)];
        for (k, &choice) in choices.iter().enumerate() {
            let options = self.expansion(choice)?;
            let mut joined: Vec<(Partial, Partial)> = Vec::new();
            for (_, p) in &partials {
                for o in options.iter() {
                    self.guard.tick()?;
                    if let Some(m) = p.merge(o) {
                        insert_minimal(&mut joined, (m.project(&future[k + 1]), m), |a, b| {
                            a.0.dominates(&b.0)
                        });
                    }
                }
            }
            partials = joined;
            if partials.is_empty() {
                return Ok(vec![]);
            }
        }

        let true_node = self.arena.true_node.map(BitSet::singleton).unwrap_or_default();
        let mut kept: Vec<(BitSet, BitSet, BitSet)> = Vec::new();
        for (_, p) in partials {
            let pending = p.deferred.difference(&p.fulfilled);
            let next = p.next.difference(&true_node);
            insert_minimal(&mut kept, (next, pending, p.pos), |a, b| {
                a.0.is_subset(&b.0) && a.1.is_subset(&b.1)
            });
        }
        Ok(kept
            .into_iter()
            .map(|(next, pending, letter)| Edge {
                target: self.intern(next),
                letter,
                pending,
            })
            .collect())
    }

    /// All ways of satisfying node `n` at the current position.
    fn expansion(&mut self, n: NodeId) -> Result<Rc<Vec<Partial>>, Interrupt> {
        if let Some(e) = self.expansions.get(&n) {
            return Ok(e.clone());
        }
        let result: Vec<Partial> = match self.arena.nodes[n] {
            Node::True => vec![Partial::empty()],
            Node::False => vec![],
            Node::Lit { var, positive } => {
                let mut p = Partial::empty();
                if positive {
                    p.pos.insert(var);
                } else {
                    p.neg.insert(var);
                }
                vec![p]
            }
            Node::Next(x) => {
                let mut p = Partial::empty();
                p.next.insert(x);
                vec![p]
            }
            Node::And(l, r) => {
                let (l, r) = (self.expansion(l)?, self.expansion(r)?);
                self.join(&l, &r)?
            }
            Node::Or(l, r) => {
                let (l, r) = (self.expansion(l)?, self.expansion(r)?);
                union(&l, &r)
            }
            Node::Until(a, b) => {
                let k = self.arena.until_index[n].expect("until nodes are indexed");
                let now: Vec<Partial> = self
                    .expansion(b)?
                    .iter()
                    .map(|p| {
                        let mut p = p.clone();
                        p.fulfilled.insert(k);
                        p
                    })
                    .collect();
                let mut later = Partial::empty();
                later.next.insert(n);
                later.deferred.insert(k);
                let left = self.expansion(a)?;
                let later = self.join(&left, &[later])?;
                union(&now, &later)
            }
            Node::Release(a, b) => {
                let mut later = Partial::empty();
                later.next.insert(n);
                let either = union(&self.expansion(a)?, &[later]);
                let now = self.expansion(b)?;
                self.join(&now, &either)?
            }
        };
        let result = Rc::new(result);
        self.expansions.insert(n, result.clone());
        Ok(result)
    }

    fn join(&mut self, a: &[Partial], b: &[Partial]) -> Result<Vec<Partial>, Interrupt> {
        let mut out = IndexSet::new();
        for x in a {
            for y in b {
                self.guard.tick()?;
                if let Some(m) = x.merge(y) {
                    out.insert(m);
                }
            }
        }
        Ok(out.into_iter().collect())
    }
}

fn union(a: &[Partial], b: &[Partial]) -> Vec<Partial> {
    let mut out: IndexSet<Partial> = a.iter().cloned().collect();
    out.extend(b.iter().cloned());
    out.into_iter().collect()
}
