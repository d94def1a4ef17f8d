//! Small synthetic problems with exactly valid symmetries, for tests,
//! demos, and the acceptance suite.

use ndarray::Array2;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::ActiveSpaceHamiltonian;

fn random_hermitian_factor(n: usize, real: bool, rng: &mut ChaCha8Rng, scale: f64) -> Array2<Complex64> {
    let mut a = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let re = rng.gen_range(-scale..scale);
            let im = if real || i == j { 0.0 } else { rng.gen_range(-scale..scale) };
            a[[i, j]] = Complex64::new(re, im);
            a[[j, i]] = Complex64::new(re, -im);
        }
    }
    a
}

/// Random valid active-space Hamiltonian. One-body integrals are spread out
/// so low orbitals are clearly bound; two-body integrals come from a sum of
/// Hermitian pair factors, which makes the chemist-convention symmetries
/// (and 8-fold realness at the gamma point) exact by construction.
pub fn random_hamiltonian(n: usize, gamma: bool, seed: u64) -> ActiveSpaceHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ham = ActiveSpaceHamiltonian::zero(n, rng.gen_range(-1.0..1.0), gamma, "toy");

    let offdiag = random_hermitian_factor(n, gamma, &mut rng, 0.15);
    for p in 0..n {
        for q in 0..n {
            ham.h[[p, q]] = offdiag[[p, q]];
        }
        ham.h[[p, p]] = Complex64::new(-2.0 + 0.9 * p as f64 + rng.gen_range(-0.05..0.05), 0.0);
    }

    // (pq|rs) = sum_L A_L[p,q] A_L[r,s] with Hermitian A_L
    let n_factors = 3;
    for _ in 0..n_factors {
        let a = random_hermitian_factor(n, gamma, &mut rng, 0.35);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        ham.eri[[p, q, r, s]] += a[[p, q]] * a[[r, s]];
                    }
                }
            }
        }
    }
    ham.validate().expect("constructed Hamiltonian is valid");
    ham
}

/// Random unitary via Gram-Schmidt on a random complex matrix.
pub fn random_unitary(n: usize, seed: u64) -> Array2<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for _ in 0..n {
        loop {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            for c in &cols {
                let overlap: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= overlap * ci;
                }
            }
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for vi in v.iter_mut() {
                    *vi /= norm;
                }
                cols.push(v);
                break;
            }
        }
    }
    let mut u = Array2::zeros((n, n));
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            u[[i, j]] = *v;
        }
    }
    u
}

/// The standard oracle-comparison suite: 2-4 orbitals, both gamma-like real
/// and k-like complex integrals, with electron counts filling half the space.
pub fn oracle_suite() -> Vec<(ActiveSpaceHamiltonian, usize, usize)> {
    vec![
        (random_hamiltonian(2, true, 101), 1, 1),
        (random_hamiltonian(2, false, 102), 1, 1),
        (random_hamiltonian(3, true, 103), 1, 1),
        (random_hamiltonian(3, false, 104), 2, 1),
        (random_hamiltonian(4, true, 105), 2, 2),
        (random_hamiltonian(4, false, 106), 2, 2),
    ]
}
