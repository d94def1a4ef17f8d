//! Active-space quantum embedding toolkit.
//!
//! Given second-quantized active-space Hamiltonians (extended FCIDUMP files)
//! and volumetric density data (Gaussian cube files), this crate selects
//! active spaces by density-difference ranking with optional natural-orbital
//! refinement, solves them with exact diagonalization, VQE (qUCCSD and QCC
//! ansaetze), or entanglement forging on a dense statevector backend, and
//! aggregates twist-averaged reaction energy differences over k-point meshes.

pub mod ci;
pub mod dense;
pub mod error;
pub mod fcidump;
pub mod fermion;
pub mod linalg;
pub mod hamiltonian;
pub mod mapping;
pub mod toys;
pub mod mp2;
pub mod pauli;

pub use error::{Error, Result};
