//! Gate-level QAOA Max-Cut circuits in traditional and CNOT-reduced form.
//!
//! Each edge `(j, k)` of a cost layer is the block `CX(j,k) RZ(k, 2γ) CX(j,k)`,
//! which applies `exp(-iγ Z_j Z_k)` (the identity term of the Max-Cut
//! Hamiltonian only contributes a global phase and is dropped). The mixer is
//! `RX(q, 2β)` on every qubit.
//!
//! In the reduced form, layer 1 replaces each tree edge `(parent, child)` by
//! `RZ(child, 2γ) CX(parent, child)`. Starting from `|+⟩^n`, the child qubit is
//! still untouched when its tree edge runs, so the leading CNOT only relabels
//! a uniform amplitude and can be dropped; the trailing one maps the child
//! back to the computational basis. That saves n - 1 CNOTs and needs the
//! tree-ordered schedule.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::graph::{Edge, Graph};
use crate::scalar::Scalar;
use crate::schedule::{verify_schedule, StepSchedule, Strategy, Violation};
use crate::tree::RootedSpanningTree;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("layer count must be at least 1 with one gamma and one beta per layer")]
    BadParams,
    #[error("expected a {expected:?} schedule")]
    WrongStrategy { expected: Strategy },
    #[error("schedule does not match the graph or tree")]
    Mismatch,
    #[error("schedule is not legal: {0:?}")]
    IllegalSchedule(Vec<Violation>),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate<T> {
    H(usize),
    Rx(usize, T),
    Rz(usize, T),
    Cx { control: usize, target: usize },
}

impl<T> Gate<T> {
    pub fn is_cx(&self) -> bool {
        matches!(self, Gate::Cx { .. })
    }

    /// Qubits the gate acts on.
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Gate::H(q) | Gate::Rx(q, _) | Gate::Rz(q, _) => (q, None),
            Gate::Cx { control, target } => (control, Some(target)),
        };
        std::iter::once(a).chain(b)
    }
}

/// Where a gate came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateTag {
    Init,
    /// Cost layer `layer` (1-based), block of `edge`.
    Cost { layer: usize, edge: Edge },
    Mixer { layer: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitIR<T> {
    n_qubits: usize,
    gates: Vec<Gate<T>>,
    tags: Vec<GateTag>,
}

impl<T: Scalar> CircuitIR<T> {
    pub fn new(n_qubits: usize) -> Self {
        CircuitIR {
            n_qubits,
            gates: Vec::new(),
            tags: Vec::new(),
        }
    }

    /// Appends a gate. Panics on an out-of-range qubit or a CX with
    /// `control == target`.
    pub fn push(&mut self, gate: Gate<T>, tag: GateTag) {
        for q in gate.qubits() {
            assert!(q < self.n_qubits, "qubit {q} out of range");
        }
        if let Gate::Cx { control, target } = gate {
            assert_ne!(control, target, "CX control equals target");
        }
        self.gates.push(gate);
        self.tags.push(tag);
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn tags(&self) -> &[GateTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Longest chain of gates that pairwise share a qubit, each gate
    /// counting one.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let level = g.qubits().map(|q| frontier[q]).max().unwrap_or(0) + 1;
            for q in g.qubits() {
                frontier[q] = level;
            }
            depth = depth.max(level);
        }
        depth
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }
}

/// Per-layer cost (`gammas`) and mixer (`betas`) angles in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzParams<T> {
    gammas: Vec<T>,
    betas: Vec<T>,
}

impl<T: Scalar> AnsatzParams<T> {
    pub fn new(gammas: Vec<T>, betas: Vec<T>) -> Result<Self, CircuitError> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(CircuitError::BadParams);
        }
        Ok(AnsatzParams { gammas, betas })
    }

    /// `p` layers with γ uniform in [0, 2π) and β uniform in [0, π).
    pub fn random<R: Rng>(p: usize, rng: &mut R) -> Result<Self, CircuitError> {
        let pi = T::PI();
        let two = T::lit(2.0);
        let mut draw = |scale: T| T::lit(rng.gen::<f64>()) * scale;
        let (mut gammas, mut betas) = (Vec::with_capacity(p), Vec::with_capacity(p));
        for _ in 0..p {
            gammas.push(draw(two * pi));
            betas.push(draw(pi));
        }
        Self::new(gammas, betas)
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gamma(&self, layer: usize) -> T {
        self.gammas[layer - 1]
    }

    pub fn beta(&self, layer: usize) -> T {
        self.betas[layer - 1]
    }
}

fn check_schedule(g: &Graph, sched: &StepSchedule) -> Result<(), CircuitError> {
    if sched.entries().len() != g.m()
        || sched.entries().iter().zip(g.edges()).any(|(s, e)| s.edge != *e)
    {
        return Err(CircuitError::Mismatch);
    }
    Ok(())
}

fn full_block<T: Scalar>(c: &mut CircuitIR<T>, e: Edge, angle: T, layer: usize) {
    let tag = GateTag::Cost { layer, edge: e };
    c.push(Gate::Cx { control: e.u, target: e.v }, tag);
    c.push(Gate::Rz(e.v, angle), tag);
    c.push(Gate::Cx { control: e.u, target: e.v }, tag);
}

fn init_layer<T: Scalar>(c: &mut CircuitIR<T>) {
    for q in 0..c.n_qubits {
        c.push(Gate::H(q), GateTag::Init);
    }
}

fn mixer_layer<T: Scalar>(c: &mut CircuitIR<T>, beta: T, layer: usize) {
    let two = T::lit(2.0);
    for q in 0..c.n_qubits {
        c.push(Gate::Rx(q, two * beta), GateTag::Mixer { layer });
    }
}

/// Traditional ansatz: H layer, then per layer every edge block in step
/// order followed by the mixer. Uses `2 m p` CNOTs.
pub fn build_traditional<T: Scalar>(
    g: &Graph,
    params: &AnsatzParams<T>,
    sched: &StepSchedule,
) -> Result<CircuitIR<T>, CircuitError> {
    if sched.strategy() != Strategy::Traditional {
        return Err(CircuitError::WrongStrategy {
            expected: Strategy::Traditional,
        });
    }
    check_schedule(g, sched)?;
    let order = sched.in_step_order();
    let two = T::lit(2.0);
    let mut c = CircuitIR::new(g.n());
    init_layer(&mut c);
    for layer in 1..=params.p() {
        for e in &order {
            full_block(&mut c, e.edge, two * params.gamma(layer), layer);
        }
        mixer_layer(&mut c, params.beta(layer), layer);
    }
    Ok(c)
}

/// CNOT-reduced ansatz: identical to [`build_traditional`] except that
/// layer-1 tree edges emit `RZ(child, 2γ₁) CX(parent, child)`. Uses
/// `2 m p - (n - 1)` CNOTs.
pub fn build_optimized<T: Scalar>(
    g: &Graph,
    params: &AnsatzParams<T>,
    t: &RootedSpanningTree,
    sched: &StepSchedule,
) -> Result<CircuitIR<T>, CircuitError> {
    if sched.strategy() != Strategy::TreeOrdered {
        return Err(CircuitError::WrongStrategy {
            expected: Strategy::TreeOrdered,
        });
    }
    if sched.tree() != Some(t) {
        return Err(CircuitError::Mismatch);
    }
    check_schedule(g, sched)?;
    let violations = verify_schedule(g, sched);
    if !violations.is_empty() {
        return Err(CircuitError::IllegalSchedule(violations));
    }

    let order = sched.in_step_order();
    let two = T::lit(2.0);
    let mut c = CircuitIR::new(g.n());
    init_layer(&mut c);
    for layer in 1..=params.p() {
        let angle = two * params.gamma(layer);
        for e in &order {
            if layer == 1 && e.in_tree {
                let (parent, child) = if t.parent(e.edge.v) == Some(e.edge.u) {
                    (e.edge.u, e.edge.v)
                } else {
                    (e.edge.v, e.edge.u)
                };
                let tag = GateTag::Cost { layer, edge: e.edge };
                c.push(Gate::Rz(child, angle), tag);
                c.push(
                    Gate::Cx {
                        control: parent,
                        target: child,
                    },
                    tag,
                );
            } else {
                full_block(&mut c, e.edge, angle, layer);
            }
        }
        mixer_layer(&mut c, params.beta(layer), layer);
    }
    Ok(c)
}

impl<T: Scalar> fmt::Display for CircuitIR<T> {
    /// One gate per line after an `n_qubits k` header.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n_qubits {}", self.n_qubits)?;
        for g in &self.gates {
            match g {
                Gate::H(q) => writeln!(f, "H {q}")?,
                Gate::Rz(q, a) => writeln!(f, "RZ {q} {a}")?,
                Gate::Rx(q, a) => writeln!(f, "RX {q} {a}")?,
                Gate::Cx { control, target } => writeln!(f, "CX {control} {target}")?,
            }
        }
        Ok(())
    }
}

/// Parses the dump written by `Display`. Provenance tags are not part of the
/// format; every gate comes back tagged [`GateTag::Init`].
pub fn read_circuit<T: Scalar + std::str::FromStr>(text: &str) -> Result<CircuitIR<T>, CircuitError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, msg: &str| CircuitError::Parse {
        line,
        msg: msg.to_string(),
    };
    let (hl, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let n_qubits: usize = header
        .strip_prefix("n_qubits ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| bad(hl, "expected `n_qubits k`"))?;
    let mut c = CircuitIR::new(n_qubits);
    for (line, body) in lines {
        let toks: Vec<&str> = body.split_whitespace().collect();
        let q = |i: usize| -> Result<usize, CircuitError> {
            let v: usize = toks
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(line, "bad qubit"))?;
            if v >= n_qubits {
                return Err(bad(line, "qubit out of range"));
            }
            Ok(v)
        };
        let angle = || -> Result<T, CircuitError> {
            toks.get(2)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(line, "bad angle"))
        };
        let gate = match (toks.first().copied(), toks.len()) {
            (Some("H"), 2) => Gate::H(q(1)?),
            (Some("RZ"), 3) => Gate::Rz(q(1)?, angle()?),
            (Some("RX"), 3) => Gate::Rx(q(1)?, angle()?),
            (Some("CX"), 3) => {
                let (control, target) = (q(1)?, q(2)?);
                if control == target {
                    return Err(bad(line, "CX control equals target"));
                }
                Gate::Cx { control, target }
            }
            _ => return Err(bad(line, "unknown gate")),
        };
        c.push(gate, GateTag::Init);
    }
    Ok(c)
}
