//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

use lowdepth_qaoa::circuit::{CircuitIR, Gate};
use num_complex::Complex64 as C;

/// Full `2^n x 2^n` unitary of one gate, built entry by entry.
pub fn dense_gate(n: usize, gate: &Gate<f64>) -> Vec<Vec<C>> {
    let dim = 1usize << n;
    let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
    let one_qubit = |q: usize, u: [[C; 2]; 2], m: &mut Vec<Vec<C>>| {
        for r in 0..dim {
            for c in 0..dim {
                if (r ^ c) & !(1 << q) == 0 {
                    m[r][c] = u[(r >> q) & 1][(c >> q) & 1];
                }
            }
        }
    };
    match *gate {
        Gate::H(q) => {
            let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            one_qubit(q, [[h, h], [h, -h]], &mut m);
        }
        Gate::Rx(q, t) => {
            let c = C::new((t / 2.0).cos(), 0.0);
            let s = C::new(0.0, -(t / 2.0).sin());
            one_qubit(q, [[c, s], [s, c]], &mut m);
        }
        Gate::Rz(q, t) => {
            let z = C::new(0.0, 0.0);
            one_qubit(
                q,
                [[C::from_polar(1.0, -t / 2.0), z], [z, C::from_polar(1.0, t / 2.0)]],
                &mut m,
            );
        }
        Gate::Cx { control, target } => {
            for (r, row) in m.iter_mut().enumerate() {
                // CX is its own inverse, so row r has its one in column cx(r)
                let c = if r >> control & 1 == 1 { r ^ (1 << target) } else { r };
                row[c] = C::new(1.0, 0.0);
            }
        }
    }
    m
}

/// Output amplitudes of `c` on `|0...0>` by repeated dense matrix-vector
/// products.
pub fn dense_run(c: &CircuitIR<f64>) -> Vec<C> {
    let dim = 1usize << c.n_qubits();
    let mut psi = vec![C::new(0.0, 0.0); dim];
    psi[0] = C::new(1.0, 0.0);
    for g in c.gates() {
        let m = dense_gate(c.n_qubits(), g);
        psi = (0..dim)
            .map(|r| (0..dim).map(|k| m[r][k] * psi[k]).sum())
            .collect();
    }
    psi
}

/// Longest path in the gate DAG, where gate `j` depends on every earlier
/// gate `i` sharing a qubit.
pub fn dag_depth(c: &CircuitIR<f64>) -> usize {
    let gates = c.gates();
    let mut longest = vec![1usize; gates.len()];
    for j in 0..gates.len() {
        for i in 0..j {
            if gates[i].qubits().any(|q| gates[j].qubits().any(|p| p == q)) {
                longest[j] = longest[j].max(longest[i] + 1);
            }
        }
    }
    longest.into_iter().max().unwrap_or(0)
}

/// Connectivity by transitive closure.
pub fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(u, v) in edges {
        reach[u][v] = true;
        reach[v][u] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    reach[0].iter().all(|&r| r)
}

/// Literal transcription of the greedy tree pseudocode: the frontier is a
/// plain list scanned in insertion order, and edges into a newly visited
/// vertex are removed eagerly. Returns `(parent, child)` in discovery order.
pub fn reference_greedy(
    n: usize,
    neighbours: impl Fn(usize) -> Vec<usize>,
    root: usize,
    b: i64,
) -> Vec<(usize, usize)> {
    let mut bf = vec![0i64; n];
    let mut level = vec![0i64; n];
    let mut visited = vec![false; n];
    visited[root] = true;
    bf[root] += 1;
    let mut frontier: Vec<(usize, usize)> = neighbours(root).into_iter().map(|w| (root, w)).collect();
    let mut tree = Vec::new();
    while tree.len() < n - 1 {
        let mut e = frontier[0];
        let mut c = 0i64;
        for &(u, v) in &frontier {
            let cost = (n as i64 - level[u]) * (b - bf[u]);
            if cost > c {
                c = cost;
                e = (u, v);
            }
        }
        let (x, y) = e;
        tree.push(e);
        visited[y] = true;
        level[y] = level[x] + 1;
        bf[x] += 1;
        frontier.retain(|&(_, q)| q != y);
        for q in neighbours(y) {
            if !visited[q] {
                frontier.push((y, q));
            }
        }
    }
    tree
}
