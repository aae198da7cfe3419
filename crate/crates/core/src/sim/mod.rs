//! Statevector and density-matrix simulation.
//!
//! The noise model is depolarizing only: a two-qubit channel after every CX,
//! a one-qubit channel after every other gate, and a one-qubit idle channel
//! on each qubit left untouched during a cost-layer step. The idle term ties
//! error to the number of steps, so deeper schedules pay for their depth.

mod density;
mod kernels;
mod state;

use thiserror::Error;

pub use density::DensityMatrix;
pub use state::{cut_value, expected_cut, run_ideal, StateVector, MAX_STATEVECTOR_QUBITS};

use crate::circuit::{CircuitIR, GateTag};
use crate::scalar::Scalar;
use crate::schedule::StepSchedule;

/// Largest register [`run_noisy`] will allocate (a `4^n` density matrix).
pub const MAX_DENSITY_QUBITS: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("{n} qubits exceeds the simulator limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("state has {state} qubits but graph has {graph} vertices")]
    DimensionMismatch { state: usize, graph: usize },
    #[error("circuit and schedule disagree: {0}")]
    ScheduleMismatch(String),
    #[error("noise probabilities must lie in [0, 1)")]
    BadNoise,
}

/// Depolarizing probabilities per CX, per one-qubit gate, and per idle
/// qubit per cost step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams<T> {
    pub p_cx: T,
    pub p_1q: T,
    pub p_idle: T,
}

impl<T: Scalar> NoiseParams<T> {
    pub fn new(p_cx: T, p_1q: T, p_idle: T) -> Result<Self, SimError> {
        let ok = |p: T| p >= T::zero() && p < T::one();
        if ok(p_cx) && ok(p_1q) && ok(p_idle) {
            Ok(NoiseParams { p_cx, p_1q, p_idle })
        } else {
            Err(SimError::BadNoise)
        }
    }

    pub fn noiseless() -> Self {
        NoiseParams {
            p_cx: T::zero(),
            p_1q: T::zero(),
            p_idle: T::zero(),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_cx == T::zero() && self.p_1q == T::zero() && self.p_idle == T::zero()
    }
}

impl<T: Scalar> Default for NoiseParams<T> {
    /// Fixed reference values: `p_cx = 0.01`, `p_1q = 0.001`, `p_idle = 0.002`.
    fn default() -> Self {
        NoiseParams {
            p_cx: T::lit(0.01),
            p_1q: T::lit(0.001),
            p_idle: T::lit(0.002),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimMetadata<T> {
    pub gates: usize,
    pub cnots: usize,
    pub depth: usize,
    pub num_steps: usize,
    pub noise: NoiseParams<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult<T> {
    /// ⟨ψ|ρ|ψ⟩ between the ideal output and the noisy density matrix.
    pub p_success: T,
    pub ideal_state: StateVector<T>,
    pub metadata: SimMetadata<T>,
}

/// Tracks which qubits the current cost step has touched.
struct StepTracker {
    current: Option<(usize, usize)>,
    touched: Vec<bool>,
}

impl StepTracker {
    fn idle_all<T: Scalar>(rho: &mut DensityMatrix<T>, p: T) {
        for q in 0..rho.n_qubits() {
            rho.depolarize(&[q], p);
        }
    }

    fn close<T: Scalar>(&mut self, rho: &mut DensityMatrix<T>, p: T) {
        if self.current.take().is_some() {
            for q in 0..self.touched.len() {
                if !self.touched[q] {
                    rho.depolarize(&[q], p);
                }
                self.touched[q] = false;
            }
        }
    }
}

/// Noisy density-matrix run of `c`. `sched` assigns each cost-layer block
/// its step, which drives idle noise; every layer spans `sched.num_steps()`
/// steps, and steps with no gates idle every qubit.
pub fn run_noisy<T: Scalar>(
    c: &CircuitIR<T>,
    sched: &StepSchedule,
    noise: &NoiseParams<T>,
) -> Result<SimResult<T>, SimError> {
    let n = c.n_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(SimError::TooManyQubits {
            n,
            max: MAX_DENSITY_QUBITS,
        });
    }
    if sched.entries().iter().any(|e| e.edge.v >= n) {
        return Err(SimError::ScheduleMismatch(
            "schedule references qubits outside the circuit".into(),
        ));
    }
    let ideal = run_ideal(c)?;
    let metadata = SimMetadata {
        gates: c.len(),
        cnots: c.cnot_count(),
        depth: c.depth(),
        num_steps: sched.num_steps(),
        noise: *noise,
    };

    let mut rho = DensityMatrix::from_pure(&StateVector::basis(n, 0));
    let mut steps = StepTracker {
        current: None,
        touched: vec![false; n],
    };
    // last step finished in the open cost layer
    let mut open_layer: Option<(usize, usize)> = None;
    let finish_layer = |rho: &mut DensityMatrix<T>, last: usize| {
        for _ in last + 1..=sched.num_steps() {
            StepTracker::idle_all(rho, noise.p_idle);
        }
    };

    for (gate, tag) in c.gates().iter().zip(c.tags()) {
        if let GateTag::Cost { layer, edge } = *tag {
            let step = sched.step_of(edge.u, edge.v).ok_or_else(|| {
                SimError::ScheduleMismatch(format!("edge {edge} missing from schedule"))
            })?;
            if steps.current != Some((layer, step)) {
                steps.close(&mut rho, noise.p_idle);
                let last = match open_layer {
                    Some((l, s)) if l == layer => s,
                    Some((_, s)) => {
                        finish_layer(&mut rho, s);
                        0
                    }
                    None => 0,
                };
                if step <= last {
                    return Err(SimError::ScheduleMismatch(format!(
                        "edge {edge} at step {step} emitted after step {last}"
                    )));
                }
                for _ in last + 1..step {
                    StepTracker::idle_all(&mut rho, noise.p_idle);
                }
                steps.current = Some((layer, step));
                open_layer = Some((layer, step));
            }
            for q in gate.qubits() {
                steps.touched[q] = true;
            }
        } else {
            steps.close(&mut rho, noise.p_idle);
            if let Some((_, s)) = open_layer.take() {
                finish_layer(&mut rho, s);
            }
        }

        rho.apply(gate);
        let qubits: Vec<usize> = gate.qubits().collect();
        let p = if gate.is_cx() { noise.p_cx } else { noise.p_1q };
        rho.depolarize(&qubits, p);
    }
    steps.close(&mut rho, noise.p_idle);
    if let Some((_, s)) = open_layer {
        finish_layer(&mut rho, s);
    }

    // Without noise ρ is exactly |ψ⟩⟨ψ|; skip the rounding of the overlap.
    let p_success = if noise.is_noiseless() {
        T::one()
    } else {
        rho.overlap(&ideal).max(T::zero()).min(T::one())
    };
    Ok(SimResult {
        p_success,
        ideal_state: ideal,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::circuit::{build_optimized, build_traditional, AnsatzParams, Gate};
    use crate::graph::{generate_cycle, Graph};
    use crate::schedule::{schedule_traditional, schedule_tree_ordered};
    use crate::tree::{build_greedy_tree, HeuristicConfig};

    type C = Complex<f64>;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hadamards_give_uniform_amplitudes() {
        let mut c = CircuitIR::<f64>::new(2);
        c.push(Gate::H(0), GateTag::Init);
        c.push(Gate::H(1), GateTag::Init);
        let sv = run_ideal(&c).unwrap();
        for a in sv.amplitudes() {
            assert!(close(a.re, 0.5, 1e-12) && close(a.im, 0.0, 1e-12));
        }
    }

    #[test]
    fn zero_angles_leave_uniform_superposition() {
        let g = generate_cycle(4).unwrap();
        let s = schedule_traditional(&g);
        let params = AnsatzParams::new(vec![0.0], vec![0.0]).unwrap();
        let c = build_traditional(&g, &params, &s).unwrap();
        let sv = run_ideal(&c).unwrap();
        for a in sv.amplitudes() {
            assert!(close(a.re, 0.25, 1e-12) && close(a.im, 0.0, 1e-12));
        }
        assert!(close(expected_cut(&sv, &g).unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn expected_cut_on_basis_states() {
        let g = generate_cycle(4).unwrap();
        let alt = StateVector::<f64>::basis(4, 0b0101);
        assert_eq!(expected_cut(&alt, &g).unwrap(), 4.0);
        let zero = StateVector::<f64>::basis(4, 0);
        assert_eq!(expected_cut(&zero, &g).unwrap(), 0.0);
        let small = StateVector::<f64>::basis(3, 0);
        assert!(matches!(
            expected_cut(&small, &g),
            Err(SimError::DimensionMismatch { .. })
        ));
    }

    // Explicit 4x4 reference: CX as a permutation, then the two-qubit channel
    // written as a Pauli twirl (1 - p) ρ + p/16 Σ P ρ P†.
    fn pauli_twirl_reference(p: f64) -> f64 {
        let z = C::new(0.0, 0.0);
        let o = C::new(1.0, 0.0);
        let i = C::new(0.0, 1.0);
        let paulis: [[[C; 2]; 2]; 4] = [
            [[o, z], [z, o]],
            [[z, o], [o, z]],
            [[z, -i], [i, z]],
            [[o, z], [z, -o]],
        ];
        let kron = |a: &[[C; 2]; 2], b: &[[C; 2]; 2]| {
            let mut m = [[z; 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    // qubit 0 is the low bit
                    m[r][c] = a[r >> 1][c >> 1] * b[r & 1][c & 1];
                }
            }
            m
        };
        let mut rho = [[z; 4]; 4];
        rho[0][0] = o;
        // CX(0 -> 1) maps |00> to itself, so ρ is unchanged by the gate
        let mut out = [[z; 4]; 4];
        for a in &paulis {
            for b in &paulis {
                let m = kron(a, b);
                for r in 0..4 {
                    for c in 0..4 {
                        let mut acc = z;
                        for x in 0..4 {
                            for y in 0..4 {
                                acc += m[r][x] * rho[x][y] * m[c][y].conj();
                            }
                        }
                        out[r][c] += acc * (p / 16.0);
                    }
                }
            }
        }
        (rho[0][0] * (1.0 - p) + out[0][0]).re
    }

    fn single_cnot(p_cx: f64) -> f64 {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = schedule_traditional(&g);
        let mut c = CircuitIR::<f64>::new(2);
        c.push(Gate::Cx { control: 0, target: 1 }, GateTag::Init);
        let noise = NoiseParams::new(p_cx, 0.0, 0.0).unwrap();
        run_noisy(&c, &s, &noise).unwrap().p_success
    }

    #[test]
    fn single_cnot_matches_pauli_reference() {
        let p = 0.01;
        let got = single_cnot(p);
        let want = pauli_twirl_reference(p);
        assert!(close(got, want, 1e-12), "{got} vs {want}");
        assert!(close(got, 0.9925, 1e-12));
    }

    fn c4_circuit(seed: u64) -> (CircuitIR<f64>, crate::StepSchedule) {
        let g = generate_cycle(4).unwrap();
        let t = build_greedy_tree(&g, 0, HeuristicConfig::new(3).unwrap()).unwrap();
        let s = schedule_tree_ordered(&g, &t).unwrap();
        let params = AnsatzParams::random(1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        (build_optimized(&g, &params, &t, &s).unwrap(), s)
    }

    #[test]
    fn zero_noise_is_exact() {
        let (c, s) = c4_circuit(3);
        let r = run_noisy(&c, &s, &NoiseParams::noiseless()).unwrap();
        assert_eq!(r.p_success, 1.0);
        assert_eq!(r.metadata.cnots, c.cnot_count());
        assert_eq!(r.metadata.num_steps, s.num_steps());
    }

    #[test]
    fn channels_preserve_trace() {
        let (c, _) = c4_circuit(5);
        let mut rho = DensityMatrix::from_pure(&StateVector::basis(4, 0));
        for g in c.gates() {
            rho.apply(g);
            let qs: Vec<usize> = g.qubits().collect();
            rho.depolarize(&qs, 0.05);
            let tr = rho.trace();
            assert!(close(tr.re, 1.0, 1e-12) && close(tr.im, 0.0, 1e-12));
        }
        rho.depolarize(&[0, 1, 2, 3], 1.0);
        assert!(close(rho.get(5, 5).re, 1.0 / 16.0, 1e-12));
        assert!(close(rho.get(5, 6).norm(), 0.0, 1e-12));
    }

    #[test]
    fn success_falls_as_each_rate_rises() {
        let (c, s) = c4_circuit(11);
        let base = NoiseParams::new(0.01, 0.001, 0.002).unwrap();
        let p0 = run_noisy(&c, &s, &base).unwrap().p_success;
        assert!(p0 < 1.0);
        for bumped in [
            NoiseParams { p_cx: 0.02, ..base },
            NoiseParams { p_1q: 0.005, ..base },
            NoiseParams { p_idle: 0.01, ..base },
        ] {
            let p1 = run_noisy(&c, &s, &bumped).unwrap().p_success;
            assert!(p1 < p0, "{p1} !< {p0}");
        }
    }

    #[test]
    fn idle_noise_counts_untouched_qubits() {
        // K2 with one block: no qubit idles during the single step.
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = schedule_traditional(&g);
        let params = AnsatzParams::new(vec![0.3], vec![0.2]).unwrap();
        let c = build_traditional(&g, &params, &s).unwrap();
        let only_idle = NoiseParams::new(0.0, 0.0, 0.1).unwrap();
        let r = run_noisy(&c, &s, &only_idle).unwrap().p_success;
        assert!(close(r, 1.0, 1e-12), "{r}");

        // On a path each of the two steps leaves one endpoint idle.
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = schedule_traditional(&g);
        let c = build_traditional(&g, &params, &s).unwrap();
        let r = run_noisy(&c, &s, &only_idle).unwrap().p_success;
        assert!(r < 1.0 - 1e-6, "{r}");
    }

    #[test]
    fn guards() {
        assert_eq!(NoiseParams::new(1.0, 0.0, 0.0), Err(SimError::BadNoise));
        assert_eq!(NoiseParams::new(-0.1, 0.0, 0.0), Err(SimError::BadNoise));
        let c = CircuitIR::<f64>::new(MAX_STATEVECTOR_QUBITS + 1);
        assert!(matches!(run_ideal(&c), Err(SimError::TooManyQubits { .. })));
        let g = generate_cycle(MAX_DENSITY_QUBITS + 1).unwrap();
        let s = schedule_traditional(&g);
        let c = CircuitIR::<f64>::new(MAX_DENSITY_QUBITS + 1);
        assert!(matches!(
            run_noisy(&c, &s, &NoiseParams::default()),
            Err(SimError::TooManyQubits { .. })
        ));
    }
}
