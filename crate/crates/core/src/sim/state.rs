use num_complex::Complex;

use super::kernels;
use super::SimError;
use crate::circuit::{CircuitIR, Gate};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Largest register [`run_ideal`] will allocate.
pub const MAX_STATEVECTOR_QUBITS: usize = 20;

/// Pure state over `n_qubits`, little-endian: amplitude `i` belongs to the
/// basis state whose qubit `q` equals bit `q` of `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[index] = Complex::new(T::one(), T::zero());
        StateVector { n_qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Option<Self> {
        if !amps.len().is_power_of_two() {
            return None;
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Some(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn apply(&mut self, gate: &Gate<T>) {
        match (gate, kernels::matrix(gate)) {
            (Gate::Cx { control, target }, _) => kernels::apply_cx(&mut self.amps, *control, *target),
            (g, Some(m)) => {
                let q = g.qubits().next().expect("single-qubit gate");
                kernels::apply_1q(&mut self.amps, q, &m);
            }
            (_, None) => unreachable!("only CX lacks a 2x2 matrix"),
        }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }

    /// |⟨self|other⟩|², insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }
}

/// Noiseless evolution of `c` from `|0…0⟩`.
pub fn run_ideal<T: Scalar>(c: &CircuitIR<T>) -> Result<StateVector<T>, SimError> {
    if c.n_qubits() > MAX_STATEVECTOR_QUBITS {
        return Err(SimError::TooManyQubits {
            n: c.n_qubits(),
            max: MAX_STATEVECTOR_QUBITS,
        });
    }
    let mut sv = StateVector::basis(c.n_qubits(), 0);
    for g in c.gates() {
        sv.apply(g);
    }
    Ok(sv)
}

/// Number of edges of `g` cut by the bipartition encoded in `bits`.
pub fn cut_value(g: &Graph, bits: usize) -> usize {
    g.edges()
        .iter()
        .filter(|e| ((bits >> e.u) ^ (bits >> e.v)) & 1 == 1)
        .count()
}

/// Expectation of the Max-Cut Hamiltonian: Σ |aᵢ|² · cut(i).
pub fn expected_cut<T: Scalar>(sv: &StateVector<T>, g: &Graph) -> Result<T, SimError> {
    if sv.n_qubits != g.n() {
        return Err(SimError::DimensionMismatch {
            state: sv.n_qubits,
            graph: g.n(),
        });
    }
    Ok(sv
        .amps
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, a)| {
            acc + a.norm_sqr() * T::lit(cut_value(g, i) as f64)
        }))
}
