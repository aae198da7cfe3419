//! Edge-to-step assignment (a constrained edge colouring).
//!
//! Two edges sharing a vertex never share a step. Tree-ordered schedules add
//! two more rules: every tree edge runs strictly after its parent edge, and
//! every non-tree edge runs strictly after the last tree edge.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{Edge, Graph};
use crate::tree::{RootedSpanningTree, TreeError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("tree does not span the graph: {0}")]
    TreeMismatch(#[from] TreeError),
    #[error("expected {expected} step assignments, got {got}")]
    WrongLength { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Plain greedy edge colouring, no tree.
    Traditional,
    /// Tree edges first, top-down, then the remaining edges.
    TreeOrdered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduledEdge {
    pub edge: Edge,
    /// 1-based step index.
    pub step: usize,
    pub in_tree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSchedule {
    strategy: Strategy,
    tree: Option<RootedSpanningTree>,
    /// One entry per graph edge, canonical edge order.
    entries: Vec<ScheduledEdge>,
    num_steps: usize,
    delayed_start_total: usize,
}

impl StepSchedule {
    /// Wraps an explicit assignment (`steps[i]` for `g.edges()[i]`) without
    /// checking legality; run [`verify_schedule`] on the result.
    pub fn from_assignment(
        g: &Graph,
        strategy: Strategy,
        tree: Option<RootedSpanningTree>,
        steps: &[usize],
    ) -> Result<Self, ScheduleError> {
        if steps.len() != g.m() {
            return Err(ScheduleError::WrongLength {
                expected: g.m(),
                got: steps.len(),
            });
        }
        if let Some(t) = &tree {
            t.validate(g)?;
        }
        let entries: Vec<ScheduledEdge> = g
            .edges()
            .iter()
            .zip(steps)
            .map(|(&edge, &step)| ScheduledEdge {
                edge,
                step,
                in_tree: tree
                    .as_ref()
                    .is_some_and(|t| t.contains_edge(edge.u, edge.v)),
            })
            .collect();
        let delayed_start_total = tree
            .as_ref()
            .map(|t| delayed_starts(t, &entries))
            .unwrap_or(0);
        Ok(StepSchedule {
            strategy,
            num_steps: entries.iter().map(|e| e.step).max().unwrap_or(0),
            tree,
            entries,
            delayed_start_total,
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn tree(&self) -> Option<&RootedSpanningTree> {
        self.tree.as_ref()
    }

    /// Entries in canonical edge order.
    pub fn entries(&self) -> &[ScheduledEdge] {
        &self.entries
    }

    pub fn step_of(&self, a: usize, b: usize) -> Option<usize> {
        let e = Edge::new(a, b);
        self.entries
            .binary_search_by(|x| x.edge.cmp(&e))
            .ok()
            .map(|i| self.entries[i].step)
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    /// Last step used by a tree edge (0 without a tree).
    pub fn tree_steps(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.in_tree)
            .map(|e| e.step)
            .max()
            .unwrap_or(0)
    }

    /// Sum over tree edges of `step - level(child)`.
    pub fn delayed_start_total(&self) -> usize {
        self.delayed_start_total
    }

    /// Entries ordered by `(step, edge)`; the order circuits are emitted in.
    pub fn in_step_order(&self) -> Vec<ScheduledEdge> {
        let mut v = self.entries.clone();
        v.sort_by_key(|e| (e.step, e.edge));
        v
    }
}

fn delayed_starts(t: &RootedSpanningTree, entries: &[ScheduledEdge]) -> usize {
    entries
        .iter()
        .filter(|e| e.in_tree)
        .map(|e| {
            let child = if t.parent(e.edge.v) == Some(e.edge.u) {
                e.edge.v
            } else {
                e.edge.u
            };
            e.step.saturating_sub(t.level(child))
        })
        .sum()
}

/// Growable bitset of occupied steps at one vertex.
#[derive(Clone, Default)]
struct StepSet(Vec<u64>);

impl StepSet {
    fn insert(&mut self, s: usize) {
        let w = s / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (s % 64);
    }

    fn word(&self, w: usize) -> u64 {
        self.0.get(w).copied().unwrap_or(0)
    }

    /// Smallest step `>= lb` free in both sets.
    fn first_common_free(a: &StepSet, b: &StepSet, lb: usize) -> usize {
        let mut w = lb / 64;
        let mut mask = !0u64 << (lb % 64);
        loop {
            let free = !(a.word(w) | b.word(w)) & mask;
            if free != 0 {
                return w * 64 + free.trailing_zeros() as usize;
            }
            w += 1;
            mask = !0;
        }
    }
}

/// Greedy colouring over `edges` in the given order, all steps `>= lb`.
fn greedy_color(n: usize, edges: impl Iterator<Item = Edge>, lb: usize) -> Vec<usize> {
    let mut used = vec![StepSet::default(); n];
    edges
        .map(|e| {
            let s = StepSet::first_common_free(&used[e.u], &used[e.v], lb);
            used[e.u].insert(s);
            used[e.v].insert(s);
            s
        })
        .collect()
}

/// Greedy edge colouring in canonical edge order; each edge takes the
/// smallest step free at both endpoints.
pub fn schedule_traditional(g: &Graph) -> StepSchedule {
    let steps = greedy_color(g.n(), g.edges().iter().copied(), 1);
    StepSchedule::from_assignment(g, Strategy::Traditional, None, &steps)
        .expect("assignment covers every edge")
}

/// Tree-ordered schedule. Tree edges are placed in discovery order at the
/// smallest step after their parent edge that is free at both endpoints;
/// the remaining edges are then coloured greedily after the last tree step.
pub fn schedule_tree_ordered(
    g: &Graph,
    t: &RootedSpanningTree,
) -> Result<StepSchedule, ScheduleError> {
    t.validate(g)?;
    let n = g.n();
    let mut steps = vec![0usize; g.m()];
    let mut used = vec![StepSet::default(); n];
    let mut step_into = vec![0usize; n];
    let mut last_tree_step = 0;
    for te in t.discovery_order() {
        let lb = step_into[te.parent] + 1;
        let s = StepSet::first_common_free(&used[te.parent], &used[te.child], lb);
        used[te.parent].insert(s);
        used[te.child].insert(s);
        step_into[te.child] = s;
        last_tree_step = last_tree_step.max(s);
        let idx = g
            .edge_index(te.parent, te.child)
            .expect("validated tree edge");
        steps[idx] = s;
    }

    let rest: Vec<usize> = (0..g.m()).filter(|&i| steps[i] == 0).collect();
    let colored = greedy_color(n, rest.iter().map(|&i| g.edges()[i]), last_tree_step + 1);
    for (i, s) in rest.into_iter().zip(colored) {
        steps[i] = s;
    }
    StepSchedule::from_assignment(g, Strategy::TreeOrdered, Some(t.clone()), &steps)
}

/// A broken scheduling rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The schedule does not list exactly the graph's edges.
    EdgeSetMismatch,
    /// Steps are 1-based.
    ZeroStep(Edge),
    /// Incident edges in the same step.
    SharedVertex { a: Edge, b: Edge, step: usize },
    /// A tree edge not strictly after its parent edge.
    AncestorOrder {
        edge: Edge,
        parent: Edge,
        step: usize,
        parent_step: usize,
    },
    /// A non-tree edge at or before the last tree step.
    NonTreeBeforeTree {
        edge: Edge,
        step: usize,
        last_tree_step: usize,
    },
    /// A tree-ordered schedule without a valid spanning tree.
    MissingTree,
    /// `num_steps` disagrees with the largest assigned step.
    NumStepsMismatch { recorded: usize, actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeSetMismatch => write!(f, "schedule edges differ from graph edges"),
            Violation::ZeroStep(e) => write!(f, "edge {e} has step 0"),
            Violation::SharedVertex { a, b, step } => {
                write!(f, "incident edges {a} and {b} share step {step}")
            }
            Violation::AncestorOrder {
                edge,
                parent,
                step,
                parent_step,
            } => write!(
                f,
                "tree edge {edge} at step {step} not after parent edge {parent} at step {parent_step}"
            ),
            Violation::NonTreeBeforeTree {
                edge,
                step,
                last_tree_step,
            } => write!(
                f,
                "non-tree edge {edge} at step {step} before tree phase ends at {last_tree_step}"
            ),
            Violation::MissingTree => write!(f, "tree-ordered schedule has no valid tree"),
            Violation::NumStepsMismatch { recorded, actual } => {
                write!(f, "num_steps {recorded} but max step {actual}")
            }
        }
    }
}

/// Lists every rule `sched` breaks on `g`; empty means legal. A tree edge
/// sharing its parent edge's step is reported once, as [`Violation::AncestorOrder`].
pub fn verify_schedule(g: &Graph, sched: &StepSchedule) -> Vec<Violation> {
    let mut out = Vec::new();
    if sched.entries.len() != g.m() || sched.entries.iter().zip(g.edges()).any(|(s, e)| s.edge != *e)
    {
        out.push(Violation::EdgeSetMismatch);
        return out;
    }
    let actual = sched.entries.iter().map(|e| e.step).max().unwrap_or(0);
    if actual != sched.num_steps {
        out.push(Violation::NumStepsMismatch {
            recorded: sched.num_steps,
            actual,
        });
    }
    for e in &sched.entries {
        if e.step == 0 {
            out.push(Violation::ZeroStep(e.edge));
        }
    }

    let tree = match (sched.strategy, &sched.tree) {
        (Strategy::TreeOrdered, Some(t)) if t.validate(g).is_ok() => Some(t),
        (Strategy::TreeOrdered, _) => {
            out.push(Violation::MissingTree);
            None
        }
        (Strategy::Traditional, _) => None,
    };
    // child endpoint of a tree edge
    let child_of = |e: &Edge| -> Option<usize> {
        let t = tree?;
        if t.parent(e.v) == Some(e.u) {
            Some(e.v)
        } else if t.parent(e.u) == Some(e.v) {
            Some(e.u)
        } else {
            None
        }
    };
    let parent_child = |a: &Edge, b: &Edge| match (child_of(a), child_of(b)) {
        (Some(ca), Some(cb)) => ca != cb && (b.touches(ca) || a.touches(cb)),
        _ => false,
    };

    let mut at: HashMap<(usize, usize), Vec<Edge>> = HashMap::new();
    for e in &sched.entries {
        for x in [e.edge.u, e.edge.v] {
            let slot = at.entry((x, e.step)).or_default();
            for prev in slot.iter() {
                if !parent_child(prev, &e.edge) {
                    out.push(Violation::SharedVertex {
                        a: *prev,
                        b: e.edge,
                        step: e.step,
                    });
                }
            }
            slot.push(e.edge);
        }
    }

    if let Some(t) = tree {
        let step = |a: usize, b: usize| sched.step_of(a, b).expect("edge present");
        for te in t.discovery_order() {
            if let Some(gp) = t.parent(te.parent) {
                let (s, ps) = (step(te.parent, te.child), step(gp, te.parent));
                if s <= ps {
                    out.push(Violation::AncestorOrder {
                        edge: Edge::new(te.parent, te.child),
                        parent: Edge::new(gp, te.parent),
                        step: s,
                        parent_step: ps,
                    });
                }
            }
        }
        let last_tree_step = sched.tree_steps();
        for e in sched.entries.iter().filter(|e| !e.in_tree) {
            if e.step <= last_tree_step {
                out.push(Violation::NonTreeBeforeTree {
                    edge: e.edge,
                    step: e.step,
                    last_tree_step,
                });
            }
        }
    }
    out
}

/// Dumps a schedule as `u v step tree|nontree` lines in step order.
pub fn write_schedule(sched: &StepSchedule) -> String {
    sched
        .in_step_order()
        .iter()
        .map(|e| {
            let kind = if e.in_tree { "tree" } else { "nontree" };
            format!("{} {} {} {}\n", e.edge.u, e.edge.v, e.step, kind)
        })
        .collect()
}
