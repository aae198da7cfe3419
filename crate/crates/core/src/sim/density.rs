use num_complex::Complex;

use super::kernels;
use super::state::StateVector;
use crate::circuit::Gate;
use crate::scalar::Scalar;

/// Mixed state on `n` qubits.
///
/// Stored as a flat buffer of `4^n` entries where entry `(r << n) | c` is
/// `ρ[r][c]`. Viewed as a `2n`-qubit vector, `U ρ U†` is `U` on the high copy
/// of a qubit and `conj(U)` on the low copy, so the statevector kernels
/// apply unchanged.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T> {
    n_qubits: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector<T>) -> Self {
        let n = psi.n_qubits();
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in a {
            data.extend(a.iter().map(|c| r * c.conj()));
        }
        DensityMatrix { n_qubits: n, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `ρ[row][col]`.
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[(row << self.n_qubits) | col]
    }

    pub fn trace(&self) -> Complex<T> {
        let dim = 1usize << self.n_qubits;
        (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.get(i, i)
        })
    }

    pub fn apply(&mut self, gate: &Gate<T>) {
        let n = self.n_qubits;
        match *gate {
            Gate::Cx { control, target } => {
                kernels::apply_cx(&mut self.data, control + n, target + n);
                kernels::apply_cx(&mut self.data, control, target);
            }
            _ => {
                let m = kernels::matrix(gate).expect("single-qubit gate");
                let q = gate.qubits().next().expect("single-qubit gate");
                kernels::apply_1q(&mut self.data, q + n, &m);
                kernels::apply_1q(&mut self.data, q, &kernels::conj(&m));
            }
        }
    }

    /// Depolarizing channel on `qubits`:
    /// `ρ ↦ (1 - p) ρ + p · Tr_S(ρ) ⊗ I_S / 2^|S|`.
    pub fn depolarize(&mut self, qubits: &[usize], p: T) {
        if p == T::zero() {
            return;
        }
        let n = self.n_qubits;
        let k = qubits.len();
        let d = 1usize << k;
        // spread the k-bit pattern s over the chosen qubit positions
        let spread = |s: usize, offset: usize| -> usize {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| s >> j & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | 1 << (q + offset))
        };
        let row_bits: Vec<usize> = (0..d).map(|s| spread(s, n)).collect();
        let col_bits: Vec<usize> = (0..d).map(|s| spread(s, 0)).collect();
        let mask = row_bits[d - 1] | col_bits[d - 1];

        let keep = T::one() - p;
        let mix = p / T::lit(d as f64);
        for base in 0..self.data.len() {
            if base & mask != 0 {
                continue;
            }
            let traced = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, s| {
                acc + self.data[base | row_bits[s] | col_bits[s]]
            });
            for (s, rb) in row_bits.iter().enumerate() {
                for (t, cb) in col_bits.iter().enumerate() {
                    let idx = base | rb | cb;
                    let mut v = self.data[idx] * keep;
                    if s == t {
                        v = v + traced * mix;
                    }
                    self.data[idx] = v;
                }
            }
        }
    }

    /// ⟨ψ|ρ|ψ⟩ (real part; the imaginary part vanishes for Hermitian ρ).
    pub fn overlap(&self, psi: &StateVector<T>) -> T {
        let a = psi.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (r, ar) in a.iter().enumerate() {
            let mut row = Complex::new(T::zero(), T::zero());
            for (c, ac) in a.iter().enumerate() {
                row = row + self.get(r, c) * ac;
            }
            acc = acc + ar.conj() * row;
        }
        acc.re
    }
}
