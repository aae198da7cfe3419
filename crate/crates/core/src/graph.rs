//! Undirected simple connected graphs, standard generators, and the
//! edge-list text format.
//!
//! Random graphs are drawn from ChaCha8 (`rand_chacha::ChaCha8Rng`), which is
//! portable across platforms, so a `(n, p_edge, seed)` triple names the same
//! graph everywhere.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Upper bound on connectivity resamples before giving up on an ER draw.
pub const MAX_ER_RESAMPLES: u32 = 100_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs at least {min} vertices, got {n}")]
    TooFewVertices { n: usize, min: usize },
    #[error("edge probability must lie in (0, 1], got {0}")]
    BadProbability(String),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no connected sample after {0} resamples")]
    ResampleLimit(u32),
}

/// An undirected edge stored canonically with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Canonical edge between `a` and `b` (order of arguments is irrelevant).
    pub fn new(a: usize, b: usize) -> Self {
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    pub fn shares_vertex(&self, other: &Edge) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// Immutable undirected simple connected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates and builds a graph. Edges may be given in either
    /// orientation; storage is canonical and sorted.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n < 2 {
            return Err(GraphError::TooFewVertices { n, min: 2 });
        }
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange { u: a, v: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            canon.push(Edge::new(a, b));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].u, w[0].v));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &canon {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let g = Graph {
            n,
            edges: canon,
            adjacency,
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical sorted order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Position of the edge `{a, b}` in [`Graph::edges`].
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&Edge::new(a, b)).ok()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, self.edges.iter().map(|e| (perm[e.u], perm[e.v])))
    }
}

/// Complete graph K_n.
pub fn generate_complete(n: usize) -> Result<Graph, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices { n, min: 2 });
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, edges)
}

/// Cycle C_n with edges `(i, (i + 1) mod n)`.
pub fn generate_cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::TooFewVertices { n, min: 3 });
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// A connected G(n, p) sample and how many disconnected draws preceded it.
#[derive(Clone, Debug)]
pub struct ErSample {
    pub graph: Graph,
    pub resamples: u32,
}

/// Connected Erdős–Rényi sample. Disconnected draws are discarded and the
/// next attempt uses seed `seed + k` for attempt `k`, which keeps the output
/// a sample of G(n, p) conditioned on connectivity.
pub fn sample_erdos_renyi(n: usize, p_edge: f64, seed: u64) -> Result<ErSample, GraphError> {
    if n < 2 {
        return Err(GraphError::TooFewVertices { n, min: 2 });
    }
    if !(p_edge > 0.0 && p_edge <= 1.0) {
        return Err(GraphError::BadProbability(p_edge.to_string()));
    }
    for attempt in 0..=MAX_ER_RESAMPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p_edge {
                    edges.push((u, v));
                }
            }
        }
        match Graph::from_edges(n, edges) {
            Ok(graph) => {
                if attempt > 0 {
                    log::debug!("G({n}, {p_edge}) seed {seed}: {attempt} resample(s)");
                }
                return Ok(ErSample {
                    graph,
                    resamples: attempt,
                });
            }
            Err(GraphError::Disconnected) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::ResampleLimit(MAX_ER_RESAMPLES))
}

/// Connected Erdős–Rényi graph; see [`sample_erdos_renyi`].
pub fn generate_erdos_renyi(n: usize, p_edge: f64, seed: u64) -> Result<Graph, GraphError> {
    sample_erdos_renyi(n, p_edge, seed).map(|s| s.graph)
}

/// Parses the edge-list format: a header line `n m`, then `m` lines `u v`.
/// Blank lines are ignored.
pub fn read_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing `n m` header".into(),
    })?;
    let (n, m) = parse_pair(hline, header)?;

    let mut edges = Vec::with_capacity(m);
    for (line, body) in lines {
        let (u, v) = parse_pair(line, body)?;
        if u >= n || v >= n {
            return Err(GraphError::Parse {
                line,
                msg: format!("vertex out of range for n = {n}"),
            });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: hline,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

fn parse_pair(line: usize, body: &str) -> Result<(usize, usize), GraphError> {
    let bad = |msg: String| GraphError::Parse { line, msg };
    let mut it = body.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        let tok = it.next().ok_or_else(|| bad("expected two integers".into()))?;
        tok.parse().map_err(|_| bad(format!("not an integer: {tok:?}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(bad("trailing tokens".into()));
    }
    Ok((a, b))
}

/// Writes the canonical edge-list text (sorted `u < v`, LF newlines).
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for e in g.edges() {
        out.push_str(&format!("{} {}\n", e.u, e.v));
    }
    out
}
