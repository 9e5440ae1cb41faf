use std::rc::Rc;

use super::bits::BitSet;
use super::graph::{Edge, Graph};
use super::{Budget, CancelFlag, Guard, Interrupt, UnknownReason, Verdict};
use crate::ltl::{nnf, Formula};

pub const DEFAULT_MAX_DEPTH: usize = 12;

/// Iterative-deepening search for an accepting lasso of at most `max_depth`
/// letters in the tableau graph.
///
/// Never answers `Unsat`; running out of depth gives
/// `Unknown(Inconclusive)`. `budget.max_nodes` bounds the number of search
/// steps.
pub fn lasso_search(
    f: &Formula,
    max_depth: usize,
    budget: &Budget,
    cancel: &CancelFlag,
) -> Verdict {
    let mut search = Search {
        graph: Graph::new(&nnf(f), Guard::new(budget, cancel)),
        steps_left: budget.max_nodes,
    };
    for depth in 1..=max_depth {
        match search.run(depth) {
            Ok(Some(v)) => return v,
            Ok(None) => {}
            Err(i) => return i.into(),
        }
    }
    Verdict::Unknown(UnknownReason::Inconclusive)
}

struct Search {
    graph: Graph,
    steps_left: usize,
}

struct Frame {
    state: usize,
    edges: Rc<[Edge]>,
    next: usize,
}

impl Search {
    /// Looks for a lasso with exactly `depth` letters along simple paths.
    fn run(&mut self, depth: usize) -> Result<Option<Verdict>, Interrupt> {
        let mut frames = vec![Frame {
            state: 0,
            edges: self.graph.edges(0)?,
            next: 0,
        }];
        // edges taken so far; taken[i] leaves frames[i]
        let mut taken: Vec<Edge> = Vec::new();
        while let Some(top) = frames.last_mut() {
            let Some(edge) = top.edges.get(top.next).cloned() else {
                frames.pop();
                taken.pop();
                continue;
            };
            top.next += 1;
            if self.steps_left == 0 {
                return Err(Interrupt::Timeout);
            }
            self.steps_left -= 1;
            self.graph.guard.tick()?;

            let target = edge.target;
            let on_path = frames.iter().position(|fr| fr.state == target);
            if frames.len() == depth {
                if let Some(j) = on_path {
                    let cycle = taken[j..].iter().chain(std::iter::once(&edge));
                    if self.graph.accepting(cycle.map(|e| &e.pending)) {
                        let mut letters: Vec<&BitSet> = taken.iter().map(|e| &e.letter).collect();
                        letters.push(&edge.letter);
                        return Ok(Some(Verdict::Sat(Some(self.graph.word(&letters, j)))));
                    }
                }
                continue;
            }
            if on_path.is_none() {
                let edges = self.graph.edges(target)?;
                frames.push(Frame {
                    state: target,
                    edges,
                    next: 0,
                });
                taken.push(edge);
            }
        }
        Ok(None)
    }
}
