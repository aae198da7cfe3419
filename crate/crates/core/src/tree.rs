//! Rooted spanning trees: depth-first and breadth-first baselines and the
//! cost-driven greedy construction that balances height against branching.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("root {root} is not a vertex of a graph with {n} vertices")]
    InvalidRoot { root: usize, n: usize },
    #[error("branching parameter B must be at least 1")]
    InvalidBranching,
    #[error("({parent}, {child}) is not an edge of the graph")]
    NotAnEdge { parent: usize, child: usize },
    #[error("parent {parent} of {child} is not yet in the tree")]
    DetachedParent { parent: usize, child: usize },
    #[error("vertex {0} discovered twice")]
    Revisited(usize),
    #[error("tree has {got} edges, expected {expected}")]
    WrongEdgeCount { got: usize, expected: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A tree edge oriented from the vertex it was discovered from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TreeEdge {
    pub parent: usize,
    pub child: usize,
}

/// A spanning tree rooted at `root`.
///
/// `branch_count[v]` is the number of children of `v`. For the root that is
/// also its tree degree; for every other vertex it is the tree degree minus
/// one, matching the usual notion of branching factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedSpanningTree {
    root: usize,
    parent: Vec<Option<usize>>,
    level: Vec<usize>,
    branch_count: Vec<usize>,
    discovery_order: Vec<TreeEdge>,
}

impl RootedSpanningTree {
    /// Builds a tree from edges listed in discovery order. Each edge's parent
    /// must already be in the tree and its child must be new.
    pub fn from_discovery(
        g: &Graph,
        root: usize,
        order: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TreeError> {
        let n = g.n();
        if root >= n {
            return Err(TreeError::InvalidRoot { root, n });
        }
        let mut in_tree = vec![false; n];
        in_tree[root] = true;
        let mut tree = RootedSpanningTree {
            root,
            parent: vec![None; n],
            level: vec![0; n],
            branch_count: vec![0; n],
            discovery_order: Vec::with_capacity(n - 1),
        };
        for (parent, child) in order {
            if !g.has_edge(parent, child) {
                return Err(TreeError::NotAnEdge { parent, child });
            }
            if !in_tree[parent] {
                return Err(TreeError::DetachedParent { parent, child });
            }
            if in_tree[child] {
                return Err(TreeError::Revisited(child));
            }
            in_tree[child] = true;
            tree.attach(parent, child);
        }
        if tree.discovery_order.len() != n - 1 {
            return Err(TreeError::WrongEdgeCount {
                got: tree.discovery_order.len(),
                expected: n - 1,
            });
        }
        Ok(tree)
    }

    fn empty(n: usize, root: usize) -> Self {
        RootedSpanningTree {
            root,
            parent: vec![None; n],
            level: vec![0; n],
            branch_count: vec![0; n],
            discovery_order: Vec::with_capacity(n.saturating_sub(1)),
        }
    }

    fn attach(&mut self, parent: usize, child: usize) {
        self.parent[child] = Some(parent);
        self.level[child] = self.level[parent] + 1;
        self.branch_count[parent] += 1;
        self.discovery_order.push(TreeEdge { parent, child });
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn branch_count(&self, v: usize) -> usize {
        self.branch_count[v]
    }

    /// Tree edges in the order they were added.
    pub fn discovery_order(&self) -> &[TreeEdge] {
        &self.discovery_order
    }

    /// Maximum level over all vertices.
    pub fn height(&self) -> usize {
        self.level.iter().copied().max().unwrap_or(0)
    }

    /// Whether `{a, b}` is a tree edge (in either orientation).
    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.parent[b] == Some(a) || self.parent[a] == Some(b)
    }

    /// Children of `v` in discovery order.
    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.discovery_order
            .iter()
            .filter(move |e| e.parent == v)
            .map(|e| e.child)
    }

    /// Checks the structural invariants against `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), TreeError> {
        let rebuilt = RootedSpanningTree::from_discovery(
            g,
            self.root,
            self.discovery_order.iter().map(|e| (e.parent, e.child)),
        )?;
        if rebuilt != *self {
            return Err(TreeError::WrongEdgeCount {
                got: self.discovery_order.len(),
                expected: g.n() - 1,
            });
        }
        Ok(())
    }
}

fn check_root(g: &Graph, root: usize) -> Result<(), TreeError> {
    if root >= g.n() {
        Err(TreeError::InvalidRoot { root, n: g.n() })
    } else {
        Ok(())
    }
}

/// Depth-first spanning tree, exploring neighbors in ascending order.
pub fn build_dfs_tree(g: &Graph, root: usize) -> Result<RootedSpanningTree, TreeError> {
    check_root(g, root)?;
    let mut tree = RootedSpanningTree::empty(g.n(), root);
    let mut visited = vec![false; g.n()];
    visited[root] = true;
    // (vertex, index of the next neighbor to try)
    let mut stack = vec![(root, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        match g.neighbors(v)[next..].iter().position(|&w| !visited[w]) {
            Some(offset) => {
                let w = g.neighbors(v)[next + offset];
                top.1 = next + offset + 1;
                visited[w] = true;
                tree.attach(v, w);
                stack.push((w, 0));
            }
            None => {
                stack.pop();
            }
        }
    }
    Ok(tree)
}

/// Breadth-first spanning tree, exploring neighbors in ascending order. Its
/// height is the eccentricity of `root`, the minimum over all spanning trees.
pub fn build_bfs_tree(g: &Graph, root: usize) -> Result<RootedSpanningTree, TreeError> {
    check_root(g, root)?;
    let mut tree = RootedSpanningTree::empty(g.n(), root);
    let mut visited = vec![false; g.n()];
    visited[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if !visited[w] {
                visited[w] = true;
                tree.attach(v, w);
                queue.push_back(w);
            }
        }
    }
    Ok(tree)
}

/// How equal-cost frontier edges are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// The earliest-inserted frontier edge wins.
    #[default]
    FirstInserted,
}

/// Parameters of the greedy tree builder.
///
/// A vertex stops attracting new children once its branch counter reaches
/// `branching`, so use `branching = f + 1` to aim for a maximum branching
/// factor of `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub branching: usize,
    pub tie_break: TieBreak,
}

impl HeuristicConfig {
    pub fn new(branching: usize) -> Result<Self, TreeError> {
        if branching == 0 {
            return Err(TreeError::InvalidBranching);
        }
        Ok(HeuristicConfig {
            branching,
            tie_break: TieBreak::FirstInserted,
        })
    }
}

/// Attractiveness of growing the tree from a vertex at `level` whose branch
/// counter is `branch`: `(n - level) * (B - branch)`. Negative once the
/// counter exceeds `B`.
pub fn cost_of(n: usize, level: usize, branch: usize, branching: usize) -> i64 {
    (n as i64 - level as i64) * (branching as i64 - branch as i64)
}

/// Greedy cost-driven spanning tree.
///
/// The frontier holds edges `(u, v)` from a visited `u` to an unvisited `v`
/// in insertion order. Each round scans it and keeps the first edge whose
/// cost is strictly larger than everything seen so far (starting from zero
/// with the first live edge as the default pick), attaches it, bumps the
/// source's counter, and pushes the new vertex's edges to unvisited
/// neighbors. The root's counter starts at one. Edges whose target has
/// since been visited are skipped and periodically compacted away.
///
/// Runs in O(Δ · n²).
pub fn build_greedy_tree(
    g: &Graph,
    root: usize,
    cfg: HeuristicConfig,
) -> Result<RootedSpanningTree, TreeError> {
    check_root(g, root)?;
    if cfg.branching == 0 {
        return Err(TreeError::InvalidBranching);
    }
    let n = g.n();
    let mut tree = RootedSpanningTree::empty(n, root);
    let mut visited = vec![false; n];
    let mut counter = vec![0usize; n];
    visited[root] = true;
    counter[root] += 1;

    let mut frontier: Vec<(usize, usize)> = g.neighbors(root).iter().map(|&v| (root, v)).collect();
    let mut dead = 0usize;
    let mut n_visited = 1;

    while n_visited < n {
        let mut best: Option<(usize, usize)> = None;
        let mut best_cost = 0i64;
        for &(u, v) in &frontier {
            if visited[v] {
                continue;
            }
            if best.is_none() {
                best = Some((u, v));
            }
            let cost = cost_of(n, tree.level[u], counter[u], cfg.branching);
            if cost > best_cost {
                best_cost = cost;
                best = Some((u, v));
            }
        }
        // The graph is connected, so an unvisited vertex is always reachable.
        let (x, y) = best.expect("non-empty frontier while vertices remain");

        visited[y] = true;
        n_visited += 1;
        counter[x] += 1;
        tree.attach(x, y);

        dead += frontier.iter().filter(|&&(_, q)| q == y).count();
        if dead * 2 > frontier.len() {
            frontier.retain(|&(_, q)| !visited[q]);
            dead = 0;
        }
        frontier.extend(g.neighbors(y).iter().filter(|&&q| !visited[q]).map(|&q| (y, q)));
    }
    Ok(tree)
}

/// Serializes a tree as a `root r` header followed by `child parent level`
/// lines in discovery order.
pub fn write_tree(t: &RootedSpanningTree) -> String {
    let mut out = format!("root {}\n", t.root);
    for e in &t.discovery_order {
        out.push_str(&format!("{} {} {}\n", e.child, e.parent, t.level[e.child]));
    }
    out
}

/// Parses the output of [`write_tree`] against `g`, checking levels.
pub fn read_tree(g: &Graph, text: &str) -> Result<RootedSpanningTree, TreeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, msg: &str| TreeError::Parse {
        line,
        msg: msg.to_string(),
    };
    let (hl, header) = lines.next().ok_or_else(|| bad(1, "missing `root r` header"))?;
    let root = header
        .strip_prefix("root ")
        .and_then(|r| r.trim().parse::<usize>().ok())
        .ok_or_else(|| bad(hl, "expected `root r`"))?;

    let mut order = Vec::new();
    let mut levels = Vec::new();
    for (line, body) in lines {
        let nums: Vec<usize> = body
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad(line, "expected integers"))?;
        let [child, parent, level] = nums[..] else {
            return Err(bad(line, "expected `child parent level`"));
        };
        order.push((parent, child));
        levels.push((line, child, level));
    }
    let tree = RootedSpanningTree::from_discovery(g, root, order)?;
    for (line, child, level) in levels {
        if tree.level(child) != level {
            return Err(bad(line, "level disagrees with parent chain"));
        }
    }
    Ok(tree)
}
