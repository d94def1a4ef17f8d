//! Second-quantized active-space Hamiltonians: validation, frozen-core
//! projection, orbital rotation, qubit mapping, and standard observables.
//!
//! Two-electron integrals are stored in chemist convention,
//! `eri[[p, q, r, s]] = (pq|rs)`, so the Hamiltonian two-body term reads
//! `sum (pr|qs)/2 a^dag_{p s1} a^dag_{q s2} a_{s s2} a_{r s1}`.

use ndarray::{Array2, Array4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{self, FermionOp, FermionSum, Spin};
use crate::mapping::{map_fermion_sum, Mapping};
use crate::pauli::{PauliSum, DEFAULT_DROP_TOL};

pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ActiveSpaceHamiltonian {
    /// Constant energy (Hartree): frozen-core plus nuclear/embedding offset.
    pub e0: f64,
    /// One-body integrals, Hermitian.
    pub h: Array2<Complex64>,
    /// Two-body integrals, chemist convention `eri[[p,q,r,s]] = (pq|rs)`.
    pub eri: Array4<Complex64>,
    pub kpoint_label: String,
    /// Real, 8-fold-symmetric integrals (k = 0).
    pub gamma_point: bool,
}

impl ActiveSpaceHamiltonian {
    pub fn zero(n: usize, e0: f64, gamma_point: bool, kpoint_label: &str) -> Self {
        ActiveSpaceHamiltonian {
            e0,
            h: Array2::zeros((n, n)),
            eri: Array4::zeros((n, n, n, n)),
            kpoint_label: kpoint_label.to_string(),
            gamma_point,
        }
    }

    pub fn num_orbitals(&self) -> usize {
        self.h.nrows()
    }

    /// Set `h_pq` together with its Hermitian image.
    pub fn set_h(&mut self, p: usize, q: usize, v: Complex64) {
        self.h[[p, q]] = v;
        self.h[[q, p]] = v.conj();
    }

    /// Set `(pq|rs)` together with all of its symmetry images
    /// (4-fold, or 8-fold at the gamma point).
    pub fn set_eri(&mut self, p: usize, q: usize, r: usize, s: usize, v: Complex64) {
        for (idx, val) in eri_images(p, q, r, s, v, self.gamma_point) {
            self.eri[idx] = val;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_orbitals();
        for p in 0..n {
            for q in 0..n {
                if (self.h[[p, q]] - self.h[[q, p]].conj()).norm() > SYMMETRY_TOL {
                    return Err(Error::SymmetryViolation(format!(
                        "h[{p},{q}] not Hermitian"
                    )));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.eri[[p, q, r, s]];
                        if (v - self.eri[[r, s, p, q]]).norm() > SYMMETRY_TOL {
                            return Err(Error::SymmetryViolation(format!(
                                "(pq|rs) != (rs|pq) at ({p},{q},{r},{s})"
                            )));
                        }
                        if (v - self.eri[[q, p, s, r]].conj()).norm() > SYMMETRY_TOL {
                            return Err(Error::SymmetryViolation(format!(
                                "(pq|rs) != (qp|sr)* at ({p},{q},{r},{s})"
                            )));
                        }
                        if self.gamma_point {
                            if v.im.abs() > SYMMETRY_TOL {
                                return Err(Error::SymmetryViolation(format!(
                                    "complex integral at the gamma point ({p},{q},{r},{s})"
                                )));
                            }
                            if (v - self.eri[[q, p, r, s]]).norm() > SYMMETRY_TOL {
                                return Err(Error::SymmetryViolation(format!(
                                    "8-fold symmetry broken at ({p},{q},{r},{s})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        if self.gamma_point {
            for v in self.h.iter() {
                if v.im.abs() > SYMMETRY_TOL {
                    return Err(Error::SymmetryViolation(
                        "complex one-body integral at the gamma point".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The full fermionic operator, constant included.
    pub fn fermion_sum(&self) -> FermionSum {
        let n = self.num_orbitals();
        let cut = 1e-14;
        let mut f = FermionSum::new(n);
        f.add_constant(Complex64::new(self.e0, 0.0));
        for p in 0..n {
            for q in 0..n {
                let v = self.h[[p, q]];
                if v.norm() < cut {
                    continue;
                }
                for spin in Spin::both() {
                    f.add_term(
                        v,
                        vec![FermionOp::create(p, spin), FermionOp::annihilate(q, spin)],
                    )
                    .unwrap();
                }
            }
        }
        for p in 0..n {
            for r in 0..n {
                for q in 0..n {
                    for s in 0..n {
                        let v = self.eri[[p, r, q, s]]; // (pr|qs)
                        if v.norm() < cut {
                            continue;
                        }
                        let half = v * 0.5;
                        for s1 in Spin::both() {
                            for s2 in Spin::both() {
                                f.add_term(
                                    half,
                                    vec![
                                        FermionOp::create(p, s1),
                                        FermionOp::create(q, s2),
                                        FermionOp::annihilate(s, s2),
                                        FermionOp::annihilate(r, s1),
                                    ],
                                )
                                .unwrap();
                            }
                        }
                    }
                }
            }
        }
        f
    }

    /// Map onto qubits; the constant rides on the identity string.
    pub fn to_qubit_hamiltonian(&self, mapping: Mapping) -> Result<PauliSum> {
        map_fermion_sum(&self.fermion_sum(), mapping)
    }

    /// Fold the frozen doubly-occupied orbitals into the constant and an
    /// effective one-body potential, and restrict to the active orbitals.
    /// Active orbitals keep the order given in `space.active`.
    pub fn freeze_and_project(&self, space: &OrbitalSpace) -> Result<ActiveSpaceHamiltonian> {
        space.validate(self.num_orbitals())?;
        let frozen = &space.frozen_occ;
        let active = &space.active;

        let mut e0 = Complex64::new(self.e0, 0.0);
        for &i in frozen {
            e0 += 2.0 * self.h[[i, i]];
        }
        for &i in frozen {
            for &j in frozen {
                e0 += 2.0 * self.eri[[i, i, j, j]] - self.eri[[i, j, j, i]];
            }
        }
        if e0.im.abs() > 1e-8 {
            return Err(Error::SymmetryViolation(format!(
                "frozen-core constant has imaginary part {:.3e}",
                e0.im
            )));
        }

        let na = active.len();
        let mut out = ActiveSpaceHamiltonian::zero(
            na,
            e0.re,
            self.gamma_point,
            &self.kpoint_label,
        );
        for (ap, &p) in active.iter().enumerate() {
            for (aq, &q) in active.iter().enumerate() {
                let mut v = self.h[[p, q]];
                for &i in frozen {
                    v += 2.0 * self.eri[[p, q, i, i]] - self.eri[[p, i, i, q]];
                }
                out.h[[ap, aq]] = v;
            }
        }
        for (ap, &p) in active.iter().enumerate() {
            for (aq, &q) in active.iter().enumerate() {
                for (ar, &r) in active.iter().enumerate() {
                    for (a_s, &s) in active.iter().enumerate() {
                        out.eri[[ap, aq, ar, a_s]] = self.eri[[p, q, r, s]];
                    }
                }
            }
        }
        out.validate()?;
        Ok(out)
    }

    /// Transform to a new orbital basis `|p'> = sum_p c[[p, p']] |p>`.
    pub fn rotate_orbitals(&self, c: &Array2<Complex64>) -> Result<ActiveSpaceHamiltonian> {
        let n = self.num_orbitals();
        assert_eq!(c.dim(), (n, n));
        // unitarity check
        let mut max_dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut dot = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    dot += c[[k, i]].conj() * c[[k, j]];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((dot - expect).norm());
            }
        }
        if max_dev > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "rotation is not unitary (deviation {max_dev:.3e})"
            )));
        }

        let mut h_new = Array2::<Complex64>::zeros((n, n));
        for p1 in 0..n {
            for q1 in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..n {
                    for q in 0..n {
                        acc += c[[p, p1]].conj() * self.h[[p, q]] * c[[q, q1]];
                    }
                }
                h_new[[p1, q1]] = acc;
            }
        }

        // staged four-index transform; first index of each chemist pair is conjugated
        let mut t1 = Array4::<Complex64>::zeros((n, n, n, n));
        for p1 in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for p in 0..n {
                            acc += c[[p, p1]].conj() * self.eri[[p, q, r, s]];
                        }
                        t1[[p1, q, r, s]] = acc;
                    }
                }
            }
        }
        let mut t2 = Array4::<Complex64>::zeros((n, n, n, n));
        for p1 in 0..n {
            for q1 in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for q in 0..n {
                            acc += c[[q, q1]] * t1[[p1, q, r, s]];
                        }
                        t2[[p1, q1, r, s]] = acc;
                    }
                }
            }
        }
        let mut t3 = Array4::<Complex64>::zeros((n, n, n, n));
        for p1 in 0..n {
            for q1 in 0..n {
                for r1 in 0..n {
                    for s in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for r in 0..n {
                            acc += c[[r, r1]].conj() * t2[[p1, q1, r, s]];
                        }
                        t3[[p1, q1, r1, s]] = acc;
                    }
                }
            }
        }
        let mut eri_new = Array4::<Complex64>::zeros((n, n, n, n));
        for p1 in 0..n {
            for q1 in 0..n {
                for r1 in 0..n {
                    for s1 in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for s in 0..n {
                            acc += c[[s, s1]] * t3[[p1, q1, r1, s]];
                        }
                        eri_new[[p1, q1, r1, s1]] = acc;
                    }
                }
            }
        }

        // a complex rotation generally breaks gamma-point realness
        let gamma_still = self.gamma_point
            && c.iter().all(|v| v.im.abs() < 1e-14)
            && eri_new.iter().all(|v| v.im.abs() < SYMMETRY_TOL);
        Ok(ActiveSpaceHamiltonian {
            e0: self.e0,
            h: h_new,
            eri: eri_new,
            kpoint_label: self.kpoint_label.clone(),
            gamma_point: gamma_still,
        })
    }

    /// Mean-field energy of the blocked reference determinant with
    /// `n_alpha`/`n_beta` electrons in the lowest orbitals.
    pub fn determinant_energy(&self, n_alpha: usize, n_beta: usize) -> f64 {
        let mut e = Complex64::new(self.e0, 0.0);
        for (count, _spin) in [(n_alpha, Spin::Up), (n_beta, Spin::Down)] {
            for i in 0..count {
                e += self.h[[i, i]];
            }
        }
        // Coulomb over all pairs, exchange within equal spins
        for i in 0..n_alpha {
            for j in 0..n_alpha {
                e += 0.5 * (self.eri[[i, i, j, j]] - self.eri[[i, j, j, i]]);
            }
        }
        for i in 0..n_beta {
            for j in 0..n_beta {
                e += 0.5 * (self.eri[[i, i, j, j]] - self.eri[[i, j, j, i]]);
            }
        }
        for i in 0..n_alpha {
            for j in 0..n_beta {
                e += self.eri[[i, i, j, j]];
            }
        }
        e.re
    }
}

/// Symmetry orbit of a chemist-convention integral entry:
/// `(pq|rs) = (rs|pq) = (qp|sr)* = (sr|qp)*`, plus the in-pair swaps at the
/// gamma point where everything is real.
pub fn eri_images(
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    v: Complex64,
    gamma: bool,
) -> Vec<([usize; 4], Complex64)> {
    let vc = v.conj();
    let mut images = vec![
        ([p, q, r, s], v),
        ([r, s, p, q], v),
        ([q, p, s, r], vc),
        ([s, r, q, p], vc),
    ];
    if gamma {
        images.extend_from_slice(&[
            ([q, p, r, s], v),
            ([p, q, s, r], v),
            ([s, r, p, q], v),
            ([r, s, q, p], v),
        ]);
    }
    images
}

/// Orbital partition for frozen-core projection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitalSpace {
    pub frozen_occ: Vec<usize>,
    pub active: Vec<usize>,
    pub virtual_frozen: Vec<usize>,
    pub n_alpha_active: usize,
    pub n_beta_active: usize,
}

impl OrbitalSpace {
    /// Everything active, nothing frozen.
    pub fn full(n: usize, n_alpha: usize, n_beta: usize) -> Self {
        OrbitalSpace {
            frozen_occ: Vec::new(),
            active: (0..n).collect(),
            virtual_frozen: Vec::new(),
            n_alpha_active: n_alpha,
            n_beta_active: n_beta,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.active.is_empty() {
            return Err(Error::InvalidPartition("active space is empty".into()));
        }
        let mut seen = vec![false; n];
        for &i in self.frozen_occ.iter().chain(&self.active).chain(&self.virtual_frozen) {
            if i >= n {
                return Err(Error::InvalidPartition(format!("orbital {i} out of range")));
            }
            if seen[i] {
                return Err(Error::InvalidPartition(format!("orbital {i} listed twice")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidPartition(
                "partition does not cover all orbitals".into(),
            ));
        }
        if self.n_alpha_active > self.active.len() || self.n_beta_active > self.active.len() {
            return Err(Error::InvalidPartition(
                "active electron count exceeds active orbital count".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    N,
    Sz,
    S2,
}

/// Standard second-quantized observables.
pub fn observable(kind: ObservableKind, n_orb: usize) -> FermionSum {
    assert!(n_orb >= 1);
    match kind {
        ObservableKind::N => fermion::number_operator(n_orb),
        ObservableKind::Sz => fermion::sz_operator(n_orb),
        ObservableKind::S2 => fermion::s2_operator(n_orb),
    }
}

/// Mapped observable triple (N, Sz, S^2) in the same qubit register as a
/// mapped Hamiltonian.
pub fn mapped_observables(n_orb: usize, mapping: Mapping) -> Result<[PauliSum; 3]> {
    Ok([
        map_fermion_sum(&observable(ObservableKind::N, n_orb), mapping)?,
        map_fermion_sum(&observable(ObservableKind::Sz, n_orb), mapping)?,
        map_fermion_sum(&observable(ObservableKind::S2, n_orb), mapping)?,
    ])
}

/// Drop tolerance used when assembling qubit Hamiltonians.
pub fn qubit_drop_tol() -> f64 {
    DEFAULT_DROP_TOL
}
