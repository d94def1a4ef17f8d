//! Brute-force dense-matrix constructions in the computational /
//! occupation-number basis.
//!
//! Everything here is built from first principles (Kronecker products and
//! direct ladder-operator action on bitstrings) so it can serve as an
//! independent reference for the algebra, mapping, and simulator paths.
//! Dimensions grow as 2^n; intended for small problems only.

use ndarray::Array2;
use num_complex::Complex64;

use crate::fermion::FermionSum;
use crate::linalg;
use crate::pauli::{PauliOp, PauliString, PauliSum};

pub fn pauli_matrix(op: PauliOp) -> Array2<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match op {
        PauliOp::I => Array2::from_shape_vec((2, 2), vec![one, z, z, one]).unwrap(),
        PauliOp::X => Array2::from_shape_vec((2, 2), vec![z, one, one, z]).unwrap(),
        PauliOp::Y => Array2::from_shape_vec((2, 2), vec![z, -i, i, z]).unwrap(),
        PauliOp::Z => Array2::from_shape_vec((2, 2), vec![one, z, z, -one]).unwrap(),
    }
}

pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = a[[i, j]] * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Matrix of a Pauli string with qubit 0 as the least-significant bit of the
/// basis index (so the kron factor for the highest qubit comes first).
pub fn pauli_string_matrix(s: &PauliString) -> Array2<Complex64> {
    let n = s.num_qubits();
    let mut m = Array2::from_shape_vec((1, 1), vec![Complex64::new(1.0, 0.0)]).unwrap();
    for j in (0..n).rev() {
        m = kron(&m, &pauli_matrix(s.op(j)));
    }
    m
}

pub fn pauli_sum_matrix(s: &PauliSum) -> Array2<Complex64> {
    let dim = 1usize << s.num_qubits();
    let mut m = Array2::zeros((dim, dim));
    for (p, c) in s.iter() {
        m = m + pauli_string_matrix(p).mapv(|v| v * c);
    }
    m
}

/// Matrix of a fermionic operator sum in the occupation-number basis:
/// bit `m` of the basis index is the occupation of mode `m` (blocked
/// spin-orbitals, spin-up first), and `|b> = prod_{m in b, ascending} a^dag_m |vac>`.
pub fn fermion_sum_matrix(f: &FermionSum) -> Array2<Complex64> {
    let n_modes = 2 * f.num_orbitals();
    assert!(n_modes <= 20, "dense fermionic matrix limited to 20 modes");
    let dim = 1usize << n_modes;
    let mut m = Array2::zeros((dim, dim));
    for term in f.terms() {
        for b in 0..dim as u64 {
            let mut state = b;
            let mut sign = 1.0;
            let mut alive = true;
            for op in term.ops.iter().rev() {
                let mode = op.mode_index(f.num_orbitals()) as u64;
                let bit = 1u64 << mode;
                let below = state & (bit - 1);
                if op.dagger {
                    if state & bit != 0 {
                        alive = false;
                        break;
                    }
                    if below.count_ones() % 2 == 1 {
                        sign = -sign;
                    }
                    state |= bit;
                } else {
                    if state & bit == 0 {
                        alive = false;
                        break;
                    }
                    if below.count_ones() % 2 == 1 {
                        sign = -sign;
                    }
                    state &= !bit;
                }
            }
            if alive {
                m[[state as usize, b as usize]] += term.coeff * sign;
            }
        }
    }
    m
}

/// exp(i t H) for Hermitian H, via eigendecomposition.
pub fn expm_i_hermitian(h: &Array2<Complex64>, t: f64) -> Array2<Complex64> {
    let (vals, vecs) = linalg::eigh(h);
    let dim = h.nrows();
    let mut out = Array2::zeros((dim, dim));
    for (k, &lambda) in vals.iter().enumerate() {
        let phase = Complex64::new(0.0, t * lambda).exp();
        for i in 0..dim {
            for j in 0..dim {
                out[[i, j]] += phase * vecs[[i, k]] * vecs[[j, k]].conj();
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}
