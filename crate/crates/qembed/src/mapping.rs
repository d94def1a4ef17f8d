//! Fermion-to-qubit mappings: Jordan-Wigner, parity, and the two-qubit
//! symmetry reduction of the parity mapping.
//!
//! With blocked spin-orbitals (spin-up modes `[0, n_orb)`, spin-down
//! `[n_orb, 2 n_orb)`), the parity-basis qubit at `n_orb - 1` stores the
//! spin-up particle parity and the one at `2 n_orb - 1` the total parity.
//! For sector-preserving operators both carry only I or Z and can be
//! replaced by their eigenvalues, removing two qubits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{FermionOp, FermionSum};
use crate::pauli::{PauliOp, PauliString, PauliSum, DEFAULT_DROP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    JordanWigner,
    Parity,
    ParityReduced { n_alpha: usize, n_beta: usize },
}

impl Mapping {
    /// Qubits needed for `n_modes` spin-orbitals.
    pub fn num_qubits(&self, n_modes: usize) -> usize {
        match self {
            Mapping::JordanWigner | Mapping::Parity => n_modes,
            Mapping::ParityReduced { .. } => n_modes - 2,
        }
    }
}

fn jw_ladder(mode: usize, dagger: bool, n_modes: usize) -> PauliSum {
    // a^dag_j = 1/2 (prod_{k<j} Z_k)(X_j - i Y_j), a_j the conjugate
    let mut x_sites: Vec<(usize, PauliOp)> =
        (0..mode).map(|k| (k, PauliOp::Z)).collect();
    x_sites.push((mode, PauliOp::X));
    let mut y_sites: Vec<(usize, PauliOp)> =
        (0..mode).map(|k| (k, PauliOp::Z)).collect();
    y_sites.push((mode, PauliOp::Y));
    let sign = if dagger { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n_modes,
        [
            (PauliString::from_sites(n_modes, &x_sites), Complex64::new(0.5, 0.0)),
            (PauliString::from_sites(n_modes, &y_sites), Complex64::new(0.0, sign)),
        ],
    )
}

fn parity_ladder(mode: usize, dagger: bool, n_modes: usize) -> PauliSum {
    // a^dag_j = 1/2 (prod_{k>j} X_k)(X_j Z_{j-1} - i Y_j), a_j the conjugate
    let chain: Vec<(usize, PauliOp)> =
        (mode + 1..n_modes).map(|k| (k, PauliOp::X)).collect();
    let mut x_sites = chain.clone();
    x_sites.push((mode, PauliOp::X));
    if mode > 0 {
        x_sites.push((mode - 1, PauliOp::Z));
    }
    let mut y_sites = chain;
    y_sites.push((mode, PauliOp::Y));
    let sign = if dagger { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n_modes,
        [
            (PauliString::from_sites(n_modes, &x_sites), Complex64::new(0.5, 0.0)),
            (PauliString::from_sites(n_modes, &y_sites), Complex64::new(0.0, sign)),
        ],
    )
}

/// Map a fermionic operator sum onto qubits.
pub fn map_fermion_sum(f: &FermionSum, mapping: Mapping) -> Result<PauliSum> {
    let n_modes = f.num_modes();
    let ladder = |op: &FermionOp| -> PauliSum {
        let mode = op.mode_index(f.num_orbitals());
        match mapping {
            Mapping::JordanWigner => jw_ladder(mode, op.dagger, n_modes),
            Mapping::Parity | Mapping::ParityReduced { .. } => {
                parity_ladder(mode, op.dagger, n_modes)
            }
        }
    };

    let mut total = PauliSum::new(n_modes);
    for term in f.terms() {
        let mut prod = PauliSum::identity(n_modes, Complex64::new(1.0, 0.0));
        for op in &term.ops {
            prod = prod.multiply(&ladder(op))?;
            prod = prod.simplify(DEFAULT_DROP_TOL * 1e-3);
        }
        total = total.add(&prod.scaled(term.coeff));
    }
    let total = total.simplify(DEFAULT_DROP_TOL);

    match mapping {
        Mapping::JordanWigner | Mapping::Parity => Ok(total),
        Mapping::ParityReduced { n_alpha, n_beta } => {
            let n_orb = f.num_orbitals();
            reduce_parity_qubits(&total, n_orb, n_alpha, n_beta)
        }
    }
}

/// Remove the spin-up-parity and total-parity qubits from a parity-mapped
/// operator, substituting the sector eigenvalues.
fn reduce_parity_qubits(
    sum: &PauliSum,
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
) -> Result<PauliSum> {
    let n_modes = 2 * n_orb;
    assert_eq!(sum.num_qubits(), n_modes);
    let q_up = n_orb - 1;
    let q_tot = n_modes - 1;
    let eig_up = if n_alpha % 2 == 0 { 1.0 } else { -1.0 };
    let eig_tot = if (n_alpha + n_beta) % 2 == 0 { 1.0 } else { -1.0 };

    let mut out = PauliSum::new(n_modes - 2);
    for (p, c) in sum.iter() {
        let mut coeff = *c;
        for (q, eig) in [(q_up, eig_up), (q_tot, eig_tot)] {
            match p.op(q) {
                PauliOp::I => {}
                PauliOp::Z => coeff *= eig,
                other => {
                    return Err(Error::NotSectorPreserving(format!(
                        "{} on parity qubit {q} in term {p}",
                        other.to_char()
                    )))
                }
            }
        }
        let mut reduced = PauliString::identity(n_modes - 2);
        let mut dst = 0;
        for q in 0..n_modes {
            if q == q_up || q == q_tot {
                continue;
            }
            reduced.set_op(dst, p.op(q));
            dst += 1;
        }
        out.add_term(reduced, coeff);
    }
    Ok(out.simplify(DEFAULT_DROP_TOL))
}

/// Occupation bitstring of the blocked reference determinant: spin-up
/// orbitals `[0, n_alpha)` and spin-down orbitals `[0, n_beta)` occupied.
pub fn hf_occupation_bits(n_orb: usize, n_alpha: usize, n_beta: usize) -> u64 {
    assert!(n_alpha <= n_orb && n_beta <= n_orb);
    let up = if n_alpha == 0 { 0 } else { (1u64 << n_alpha) - 1 };
    let down = if n_beta == 0 { 0 } else { ((1u64 << n_beta) - 1) << n_orb };
    up | down
}

/// Prefix-parity transform of an occupation bitstring.
pub fn occupation_to_parity_bits(bits: u64, n_modes: usize) -> u64 {
    let mut out = 0u64;
    let mut acc = 0u64;
    for j in 0..n_modes {
        acc ^= (bits >> j) & 1;
        out |= acc << j;
    }
    out
}

/// Reference bitstring in the chosen mapping's qubit register.
pub fn reference_bits(mapping: Mapping, n_orb: usize, n_alpha: usize, n_beta: usize) -> u64 {
    let occ = hf_occupation_bits(n_orb, n_alpha, n_beta);
    match mapping {
        Mapping::JordanWigner => occ,
        Mapping::Parity => occupation_to_parity_bits(occ, 2 * n_orb),
        Mapping::ParityReduced { .. } => {
            let parity = occupation_to_parity_bits(occ, 2 * n_orb);
            let mut out = 0u64;
            let mut dst = 0;
            for q in 0..2 * n_orb {
                if q == n_orb - 1 || q == 2 * n_orb - 1 {
                    continue;
                }
                out |= ((parity >> q) & 1) << dst;
                dst += 1;
            }
            out
        }
    }
}
