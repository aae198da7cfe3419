//! Exact minimum step count over all rooted spanning trees of a tiny graph.
//!
//! For one tree the problem splits in two independent phases. The tree phase
//! has a closed form: with `need(v)` the smallest possible span of the
//! subtree under `v`, a vertex whose children have needs `f₁ ≥ f₂ ≥ …` (sorted
//! descending) spends `max_i (i + f_i)`; giving the i-th child step `i` after
//! the incoming edge is optimal by an exchange argument, since subtrees are
//! vertex-disjoint and only siblings compete for a vertex. The non-tree phase
//! then needs exactly the chromatic index of the leftover edges, found by
//! backtracking. Trees are enumerated by edge inclusion/exclusion with
//! connectivity pruning, and whole trees are skipped when their lower bound
//! cannot beat the incumbent.

use thiserror::Error;

use crate::graph::{Edge, Graph};
use crate::schedule::{schedule_tree_ordered, StepSchedule, Strategy};
use crate::tree::{build_greedy_tree, HeuristicConfig, RootedSpanningTree, TreeError};

/// Largest graph [`solve_exact`] accepts.
pub const MAX_ORACLE_VERTICES: usize = 8;
/// Enumeration aborts past this many spanning trees.
pub const TREE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle supports at most {MAX_ORACLE_VERTICES} vertices, got {0}")]
    TooLarge(usize),
    #[error("more than {TREE_BUDGET} spanning trees")]
    TreeBudget,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub best_steps: usize,
    pub witness_tree: RootedSpanningTree,
    pub witness_schedule: StepSchedule,
    pub trees_enumerated: u64,
}

/// Minimum total steps over every spanning tree rooted at `root` and every
/// legal tree-ordered schedule for it.
pub fn solve_exact(g: &Graph, root: usize) -> Result<OracleResult, OracleError> {
    let n = g.n();
    if n > MAX_ORACLE_VERTICES {
        return Err(OracleError::TooLarge(n));
    }
    if root >= n {
        return Err(TreeError::InvalidRoot { root, n }.into());
    }

    let mut search = Search {
        g,
        root,
        best: None,
        trees: 0,
    };
    let mut chosen = Vec::with_capacity(n - 1);
    let uf: Vec<usize> = (0..n).collect();
    search.enumerate(0, &uf, &mut chosen)?;

    let (best_steps, tree, steps) = search.best.expect("connected graph has a spanning tree");
    let witness_schedule = StepSchedule::from_assignment(g, Strategy::TreeOrdered, Some(tree.clone()), &steps)
        .expect("witness matches graph");
    Ok(OracleResult {
        best_steps,
        witness_tree: tree,
        witness_schedule,
        trees_enumerated: search.trees,
    })
}

/// `(heuristic_steps, oracle_steps)` for the greedy tree at `root`.
pub fn heuristic_gap(
    g: &Graph,
    root: usize,
    cfg: HeuristicConfig,
) -> Result<(usize, usize), OracleError> {
    let exact = solve_exact(g, root)?;
    let t = build_greedy_tree(g, root, cfg)?;
    let sched = schedule_tree_ordered(g, &t).expect("greedy tree spans its graph");
    Ok((sched.num_steps(), exact.best_steps))
}

struct Search<'a> {
    g: &'a Graph,
    root: usize,
    best: Option<(usize, RootedSpanningTree, Vec<usize>)>,
    trees: u64,
}

fn find(uf: &[usize], mut x: usize) -> usize {
    while uf[x] != x {
        x = uf[x];
    }
    x
}

impl Search<'_> {
    fn enumerate(&mut self, i: usize, uf: &[usize], chosen: &mut Vec<usize>) -> Result<(), OracleError> {
        let n = self.g.n();
        let edges = self.g.edges();
        if chosen.len() == n - 1 {
            self.trees += 1;
            if self.trees > TREE_BUDGET {
                return Err(OracleError::TreeBudget);
            }
            self.evaluate(chosen);
            return Ok(());
        }
        if i == edges.len() || edges.len() - i < n - 1 - chosen.len() {
            return Ok(());
        }

        let e = edges[i];
        let (ru, rv) = (find(uf, e.u), find(uf, e.v));
        if ru != rv {
            let mut next = uf.to_vec();
            next[ru] = rv;
            chosen.push(i);
            self.enumerate(i + 1, &next, chosen)?;
            chosen.pop();
        }
        // exclusion only pays off if the chosen edges plus the undecided
        // ones can still connect everything
        let mut probe = uf.to_vec();
        for f in &edges[i + 1..] {
            let (a, b) = (find(&probe, f.u), find(&probe, f.v));
            if a != b {
                probe[a] = b;
            }
        }
        let r0 = find(&probe, 0);
        if (1..n).all(|v| find(&probe, v) == r0) {
            self.enumerate(i + 1, uf, chosen)?;
        }
        Ok(())
    }

    fn evaluate(&mut self, chosen: &[usize]) {
        let g = self.g;
        let n = g.n();
        let edges = g.edges();

        // orient breadth-first from the root, children in ascending order
        let mut in_tree = vec![false; edges.len()];
        let mut tree_adj = vec![Vec::new(); n];
        for &i in chosen {
            in_tree[i] = true;
            tree_adj[edges[i].u].push(edges[i].v);
            tree_adj[edges[i].v].push(edges[i].u);
        }
        let mut order = Vec::with_capacity(n - 1);
        let mut seen = vec![false; n];
        seen[self.root] = true;
        let mut queue = std::collections::VecDeque::from([self.root]);
        while let Some(v) = queue.pop_front() {
            tree_adj[v].sort_unstable();
            for &w in &tree_adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    order.push((v, w));
                    queue.push_back(w);
                }
            }
        }

        // tree phase: need(v) bottom-up
        let mut children = vec![Vec::new(); n];
        for &(p, c) in &order {
            children[p].push(c);
        }
        let mut need = vec![0usize; n];
        for &(_, c) in order.iter().rev() {
            need[c] = span(&children[c], &need);
        }
        let tree_steps = span(&children[self.root], &need);

        let rest: Vec<Edge> = (0..edges.len())
            .filter(|&i| !in_tree[i])
            .map(|i| edges[i])
            .collect();
        let mut deg = vec![0usize; n];
        for e in &rest {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        let max_deg = deg.iter().copied().max().unwrap_or(0);
        let bound = self.best.as_ref().map_or(usize::MAX, |b| b.0);
        if tree_steps + max_deg >= bound {
            return;
        }
        let colors = match color_edges(n, &rest, max_deg) {
            Some(c) => c,
            None => {
                if tree_steps + max_deg + 1 >= bound {
                    return;
                }
                // Vizing: Δ + 1 colours always suffice for simple graphs
                color_edges(n, &rest, max_deg + 1).expect("Vizing bound")
            }
        };
        let non_tree_steps = colors.iter().map(|c| c + 1).max().unwrap_or(0);
        let total = tree_steps + non_tree_steps;

        // witness: children take consecutive steps after their parent edge,
        // neediest first
        let mut step_into = vec![0usize; n];
        let mut steps = vec![0usize; edges.len()];
        let mut assign = |p: usize, step_into: &mut Vec<usize>| {
            let mut kids = children[p].clone();
            kids.sort_by(|a, b| need[*b].cmp(&need[*a]).then(a.cmp(b)));
            for (i, c) in kids.into_iter().enumerate() {
                let s = step_into[p] + i + 1;
                step_into[c] = s;
                steps[g.edge_index(p, c).expect("tree edge")] = s;
            }
        };
        assign(self.root, &mut step_into);
        for &(_, c) in &order {
            assign(c, &mut step_into);
        }
        for (e, c) in rest.iter().zip(&colors) {
            steps[g.edge_index(e.u, e.v).expect("graph edge")] = tree_steps + c + 1;
        }
        let tree = RootedSpanningTree::from_discovery(g, self.root, order).expect("valid tree");
        self.best = Some((total, tree, steps));
    }
}

/// Minimal span for children with the given needs: sort descending, the
/// i-th child (1-based) finishes at `i + need`.
fn span(children: &[usize], need: &[usize]) -> usize {
    let mut needs: Vec<usize> = children.iter().map(|&c| need[c]).collect();
    needs.sort_unstable_by(|a, b| b.cmp(a));
    needs
        .iter()
        .enumerate()
        .map(|(i, f)| i + 1 + f)
        .max()
        .unwrap_or(0)
}

/// Proper edge colouring with colours `0..k`, or `None` if impossible.
fn color_edges(n: usize, edges: &[Edge], k: usize) -> Option<Vec<usize>> {
    if edges.is_empty() {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    // most constrained (highest endpoint degree) edges first
    let mut deg = vec![0usize; n];
    for e in edges {
        deg[e.u] += 1;
        deg[e.v] += 1;
    }
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(deg[edges[i].u] + deg[edges[i].v]));

    let mut used = vec![0u64; n];
    let mut colors = vec![usize::MAX; edges.len()];
    fn go(
        pos: usize,
        order: &[usize],
        edges: &[Edge],
        k: usize,
        max_used: usize,
        used: &mut [u64],
        colors: &mut [usize],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let i = order[pos];
        let e = edges[i];
        // a colour beyond max_used + 1 is symmetric to max_used + 1
        let limit = k.min(max_used + 1);
        for c in 0..limit {
            let bit = 1u64 << c;
            if (used[e.u] | used[e.v]) & bit != 0 {
                continue;
            }
            used[e.u] |= bit;
            used[e.v] |= bit;
            colors[i] = c;
            if go(pos + 1, order, edges, k, max_used.max(c + 1), used, colors) {
                return true;
            }
            used[e.u] &= !bit;
            used[e.v] &= !bit;
        }
        false
    }
    go(0, &order, edges, k, 0, &mut used, &mut colors).then_some(colors)
}
