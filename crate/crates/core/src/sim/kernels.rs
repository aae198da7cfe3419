//! In-place gate kernels over little-endian amplitude buffers: bit `q` of an
//! index is the value of qubit `q`.

use num_complex::Complex;

use crate::circuit::Gate;
use crate::scalar::Scalar;

pub(crate) type Mat2<T> = [[Complex<T>; 2]; 2];

/// 2x2 unitary of a single-qubit gate; `None` for CX.
pub(crate) fn matrix<T: Scalar>(gate: &Gate<T>) -> Option<Mat2<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let half = T::lit(0.5);
    match *gate {
        Gate::H(_) => {
            let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
            Some([[h, h], [h, -h]])
        }
        Gate::Rx(_, theta) => {
            let (s, c) = (theta * half).sin_cos();
            let c = Complex::new(c, T::zero());
            let s = Complex::new(T::zero(), -s);
            Some([[c, s], [s, c]])
        }
        Gate::Rz(_, theta) => {
            let phase = Complex::from_polar(T::one(), theta * half);
            Some([[phase.conj(), zero], [zero, phase]])
        }
        Gate::Cx { .. } => None,
    }
}

pub(crate) fn conj<T: Scalar>(m: &Mat2<T>) -> Mat2<T> {
    [
        [m[0][0].conj(), m[0][1].conj()],
        [m[1][0].conj(), m[1][1].conj()],
    ]
}

pub(crate) fn apply_1q<T: Scalar>(amps: &mut [Complex<T>], bit: usize, m: &Mat2<T>) {
    let stride = 1usize << bit;
    // diagonal gates (RZ) only rescale
    if m[0][1] == Complex::new(T::zero(), T::zero()) && m[1][0] == m[0][1] {
        for (i, a) in amps.iter_mut().enumerate() {
            *a = *a * if i & stride == 0 { m[0][0] } else { m[1][1] };
        }
        return;
    }
    for chunk in amps.chunks_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m[0][0] * x + m[0][1] * y;
            *b = m[1][0] * x + m[1][1] * y;
        }
    }
}

pub(crate) fn apply_cx<T: Scalar>(amps: &mut [Complex<T>], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    for i in 0..amps.len() {
        if i & cm != 0 && i & tm == 0 {
            amps.swap(i, i | tm);
        }
    }
}
