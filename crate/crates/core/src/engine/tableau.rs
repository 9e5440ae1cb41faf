use std::collections::VecDeque;
use std::rc::Rc;

use super::bits::BitSet;
use super::graph::{Edge, Graph};
use super::{Budget, CancelFlag, Guard, Interrupt, Verdict};
use crate::ltl::{nnf, Formula};
use crate::trace::LassoWord;

/// Complete satisfiability check.
///
/// Builds the full reachable tableau graph, then searches its strongly
/// connected components for one that is non-trivial and fulfils every
/// until-formula. Evidence is a path into that component followed by a cycle
/// through it. Exceeding `budget.max_nodes` states reports a timeout.
pub fn tableau_check(f: &Formula, budget: &Budget, cancel: &CancelFlag) -> Verdict {
    let mut graph = Graph::new(&nnf(f), Guard::new(budget, cancel));
    match explore(&mut graph, budget.max_nodes) {
        Ok(adjacency) => match find_accepting(&graph, &adjacency) {
            Some(word) => Verdict::Sat(Some(word)),
            None => Verdict::Unsat,
        },
        Err(i) => i.into(),
    }
}

fn explore(graph: &mut Graph, max_nodes: usize) -> Result<Vec<Rc<[Edge]>>, Interrupt> {
    let mut adjacency = Vec::new();
    let mut s = 0;
    while s < graph.state_count() {
        if graph.state_count() > max_nodes {
            return Err(Interrupt::Timeout);
        }
        adjacency.push(graph.edges(s)?);
        s += 1;
    }
    Ok(adjacency)
}

/// Strongly connected components, iterative Tarjan.
fn components(adjacency: &[Rc<[Edge]>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adjacency.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next_edge)) = call.last_mut() {
            if let Some(e) = adjacency[v].get(*next_edge) {
                *next_edge += 1;
                let w = e.target;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack holds the component");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

fn find_accepting(graph: &Graph, adjacency: &[Rc<[Edge]>]) -> Option<LassoWord> {
    let comps = components(adjacency);
    let mut comp_of = vec![0; adjacency.len()];
    for (c, members) in comps.iter().enumerate() {
        for &m in members {
            comp_of[m] = c;
        }
    }
    // Tarjan emits components in reverse topological order; scan from the
    // initial state's side so the evidence prefix stays short.
    for c in (0..comps.len()).rev() {
        let internal: Vec<(usize, &Edge)> = comps[c]
            .iter()
            .flat_map(|&s| adjacency[s].iter().map(move |e| (s, e)))
            .filter(|(_, e)| comp_of[e.target] == c)
            .collect();
        if internal.is_empty() || !graph.accepting(internal.iter().map(|(_, e)| &e.pending)) {
            continue;
        }
        return Some(lasso_through(graph, adjacency, &comp_of, c, &internal));
    }
    None
}

fn lasso_through(
    graph: &Graph,
    adjacency: &[Rc<[Edge]>],
    comp_of: &[usize],
    comp: usize,
    internal: &[(usize, &Edge)],
) -> LassoWord {
    let entry = internal[0].0;
    let mut letters: Vec<&BitSet> = path(adjacency, 0, entry, |_| true);
    let loop_start = letters.len();

    // One internal edge fulfilling each until-formula, or any edge if none exist.
    let mut required: Vec<(usize, &Edge)> = Vec::new();
    for k in 0..graph.until_count() {
        if required.iter().any(|(_, e)| !e.pending.contains(k)) {
            continue;
        }
        let pick = internal
            .iter()
            .find(|(_, e)| !e.pending.contains(k))
            .expect("accepting component fulfils every until");
        required.push(*pick);
    }
    if required.is_empty() {
        required.push(internal[0]);
    }

    let inside = |s: usize| comp_of[s] == comp;
    let mut at = entry;
    for (src, edge) in required {
        letters.extend(path(adjacency, at, src, inside));
        letters.push(&edge.letter);
        at = edge.target;
    }
    letters.extend(path(adjacency, at, entry, inside));
    graph.word(&letters, loop_start)
}

/// Letters along a shortest path from `from` to `to` through states allowed by `keep`.
fn path(
    adjacency: &[Rc<[Edge]>],
    from: usize,
    to: usize,
    keep: impl Fn(usize) -> bool,
) -> Vec<&BitSet> {
    if from == to {
        return vec![];
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        for (i, e) in adjacency[s].iter().enumerate() {
            let t = e.target;
            if seen[t] || !keep(t) {
                continue;
            }
            seen[t] = true;
            parent[t] = Some((s, i));
            if t == to {
                let mut letters = Vec::new();
                let mut cur = to;
                while let Some((p, i)) = parent[cur] {
                    letters.push(&adjacency[p][i].letter);
                    cur = p;
                }
                letters.reverse();
                return letters;
            }
            queue.push_back(t);
        }
    }
    unreachable!("target state is reachable")
}
