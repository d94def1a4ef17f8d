//! Closed-shell MP2 (doubles-only) against the blocked reference
//! determinant: pair-energy decompositions for orbital ranking and an
//! unrelaxed one-particle density for natural-orbital construction when
//! exact diagonalization is out of reach.
//!
//! The reference occupies orbitals `[0, n_occ)` doubly. Orbital energies
//! come from semicanonicalizing the Fock matrix within the occupied and
//! virtual blocks (the embedded one-body potential is generally not
//! diagonal); the occ x virt scores are mapped back onto the original
//! orbitals through the squared semicanonical coefficients so they can rank
//! the caller's (localized) virtuals.

use ndarray::Array2;
use num_complex::Complex64;

use crate::ci::OneRDM;
use crate::error::{Error, Result};
use crate::hamiltonian::ActiveSpaceHamiltonian;
use crate::linalg;

const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Mp2Result {
    /// Occupied-pair energies e_ij (n_occ x n_occ); each <= 0 for real
    /// integrals and sum = E2.
    pub pair_occ_occ: Array2<f64>,
    /// Occupied x virtual decomposition in the semicanonical basis; also
    /// sums to E2.
    pub occ_virt: Array2<f64>,
    /// occ_virt redistributed onto the original orbital basis.
    pub occ_virt_original: Array2<f64>,
    /// Total doubles correlation energy.
    pub e2: f64,
    /// Semicanonical orbital energies (occupied block then virtual block).
    pub orbital_energies: Vec<f64>,
}

impl Mp2Result {
    /// Importance of each original virtual orbital: sum_i |e_{i,a}|.
    pub fn virtual_scores(&self) -> Vec<f64> {
        let (n_occ, n_virt) = self.occ_virt_original.dim();
        (0..n_virt)
            .map(|a| (0..n_occ).map(|i| self.occ_virt_original[[i, a]].abs()).sum())
            .collect()
    }
}

/// Fock matrix of the closed-shell reference occupying `[0, n_occ)`.
fn fock_matrix(ham: &ActiveSpaceHamiltonian, n_occ: usize) -> Array2<Complex64> {
    let n = ham.num_orbitals();
    let mut f = ham.h.clone();
    for p in 0..n {
        for q in 0..n {
            for i in 0..n_occ {
                f[[p, q]] += 2.0 * ham.eri[[p, q, i, i]] - ham.eri[[p, i, i, q]];
            }
        }
    }
    f
}

/// Block-diagonal unitary that diagonalizes the occupied and virtual Fock
/// blocks separately, plus the resulting orbital energies.
fn semicanonicalize(
    ham: &ActiveSpaceHamiltonian,
    n_occ: usize,
) -> (Array2<Complex64>, Vec<f64>) {
    let n = ham.num_orbitals();
    let f = fock_matrix(ham, n_occ);
    let mut c = Array2::<Complex64>::zeros((n, n));
    let mut eps = vec![0.0; n];
    for (offset, len) in [(0usize, n_occ), (n_occ, n - n_occ)] {
        if len == 0 {
            continue;
        }
        let mut block = Array2::zeros((len, len));
        for i in 0..len {
            for j in 0..len {
                block[[i, j]] = f[[offset + i, offset + j]];
            }
        }
        let (vals, vecs) = linalg::eigh(&block);
        for k in 0..len {
            eps[offset + k] = vals[k];
            for i in 0..len {
                c[[offset + i, offset + k]] = vecs[[i, k]];
            }
        }
    }
    (c, eps)
}

pub fn mp2_pair_energies(ham: &ActiveSpaceHamiltonian, n_occ: usize) -> Result<Mp2Result> {
    let n = ham.num_orbitals();
    if n_occ > n {
        return Err(Error::InvalidArgument(format!(
            "n_occ {n_occ} exceeds orbital count {n}"
        )));
    }
    let n_virt = n - n_occ;
    let (c, eps) = semicanonicalize(ham, n_occ);
    let hsc = ham.rotate_orbitals(&c)?;

    let mut pair_occ_occ = Array2::<f64>::zeros((n_occ, n_occ));
    let mut occ_virt = Array2::<f64>::zeros((n_occ, n_virt));
    for i in 0..n_occ {
        for j in 0..n_occ {
            for a in 0..n_virt {
                for b in 0..n_virt {
                    let va = n_occ + a;
                    let vb = n_occ + b;
                    let t = hsc.eri[[i, va, j, vb]]; // (ia|jb)
                    let u = hsc.eri[[i, vb, j, va]]; // (ib|ja)
                    if t.norm() < 1e-14 && u.norm() < 1e-14 {
                        continue;
                    }
                    let delta = eps[i] + eps[j] - eps[va] - eps[vb];
                    if delta.abs() < DEGENERACY_TOL {
                        return Err(Error::DegenerateGap(delta));
                    }
                    let w = (t * (2.0 * t - u).conj()).re / delta;
                    pair_occ_occ[[i, j]] += w;
                    occ_virt[[i, a]] += w;
                }
            }
        }
    }
    let e2 = pair_occ_occ.iter().sum();

    // redistribute semicanonical (i, a) scores onto the original orbitals
    let mut occ_virt_original = Array2::<f64>::zeros((n_occ, n_virt));
    for i0 in 0..n_occ {
        for a0 in 0..n_virt {
            let mut acc = 0.0;
            for i in 0..n_occ {
                for a in 0..n_virt {
                    let wi = c[[i0, i]].norm_sqr();
                    let wa = c[[n_occ + a0, n_occ + a]].norm_sqr();
                    acc += wi * wa * occ_virt[[i, a]];
                }
            }
            occ_virt_original[[i0, a0]] = acc;
        }
    }

    Ok(Mp2Result { pair_occ_occ, occ_virt, occ_virt_original, e2, orbital_energies: eps })
}

/// Unrelaxed doubles-only MP2 one-particle density in the original orbital
/// basis (Hermitized; trace = 2 n_occ by construction).
pub fn mp2_one_rdm(ham: &ActiveSpaceHamiltonian, n_occ: usize) -> Result<OneRDM> {
    let n = ham.num_orbitals();
    let n_virt = n - n_occ;
    let (c, eps) = semicanonicalize(ham, n_occ);
    let hsc = ham.rotate_orbitals(&c)?;

    // t[i][j][a][b]
    let mut t = vec![Complex64::new(0.0, 0.0); n_occ * n_occ * n_virt * n_virt];
    let idx = |i: usize, j: usize, a: usize, b: usize| ((i * n_occ + j) * n_virt + a) * n_virt + b;
    for i in 0..n_occ {
        for j in 0..n_occ {
            for a in 0..n_virt {
                for b in 0..n_virt {
                    let num = hsc.eri[[i, n_occ + a, j, n_occ + b]];
                    if num.norm() < 1e-14 {
                        continue;
                    }
                    let delta = eps[i] + eps[j] - eps[n_occ + a] - eps[n_occ + b];
                    if delta.abs() < DEGENERACY_TOL {
                        return Err(Error::DegenerateGap(delta));
                    }
                    t[idx(i, j, a, b)] = num / delta;
                }
            }
        }
    }
    let tt = |i: usize, j: usize, a: usize, b: usize| {
        2.0 * t[idx(i, j, a, b)] - t[idx(i, j, b, a)]
    };

    let mut d = Array2::<Complex64>::zeros((n, n));
    for i in 0..n_occ {
        d[[i, i]] = Complex64::new(2.0, 0.0);
    }
    for i in 0..n_occ {
        for j in 0..n_occ {
            let mut corr = Complex64::new(0.0, 0.0);
            for k in 0..n_occ {
                for a in 0..n_virt {
                    for b in 0..n_virt {
                        corr += t[idx(i, k, a, b)].conj() * tt(j, k, a, b);
                    }
                }
            }
            d[[i, j]] -= corr;
        }
    }
    for a in 0..n_virt {
        for b in 0..n_virt {
            let mut corr = Complex64::new(0.0, 0.0);
            for i in 0..n_occ {
                for j in 0..n_occ {
                    for e in 0..n_virt {
                        corr += t[idx(i, j, a, e)].conj() * tt(i, j, b, e);
                    }
                }
            }
            d[[n_occ + a, n_occ + b]] += corr;
        }
    }
    // Hermitize, then rotate back: D_orig = conj(C) D' C^T
    let mut dh = Array2::<Complex64>::zeros((n, n));
    for p in 0..n {
        for q in 0..n {
            dh[[p, q]] = 0.5 * (d[[p, q]] + d[[q, p]].conj());
        }
    }
    let mut d_orig = Array2::<Complex64>::zeros((n, n));
    for p in 0..n {
        for q in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for p1 in 0..n {
                for q1 in 0..n {
                    acc += c[[p, p1]].conj() * dh[[p1, q1]] * c[[q, q1]];
                }
            }
            d_orig[[p, q]] = acc;
        }
    }
    Ok(OneRDM { d: d_orig })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toys;

    /// Independent route: spin-orbital antisymmetrized doubles sum.
    fn monolithic_mp2(ham: &ActiveSpaceHamiltonian, n_occ: usize) -> f64 {
        let n = ham.num_orbitals();
        let (c, eps) = semicanonicalize(ham, n_occ);
        let hsc = ham.rotate_orbitals(&c).unwrap();
        // spin-orbitals: (p, sigma) with sigma in {0, 1}
        let n_so = 2 * n;
        let occ: Vec<usize> = (0..n_so).filter(|&ps| ps / 2 < n_occ).collect();
        let virt: Vec<usize> = (0..n_so).filter(|&ps| ps / 2 >= n_occ).collect();
        let chem = |p: usize, q: usize, r: usize, s: usize| -> Complex64 {
            // <pq|rs> physicist = (pr|qs) chemist, with spin deltas
            if p % 2 == r % 2 && q % 2 == s % 2 {
                hsc.eri[[p / 2, r / 2, q / 2, s / 2]]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let mut e2 = 0.0;
        for &i in &occ {
            for &j in &occ {
                for &a in &virt {
                    for &b in &virt {
                        let anti = chem(i, j, a, b) - chem(i, j, b, a);
                        if anti.norm() < 1e-14 {
                            continue;
                        }
                        let delta = eps[i / 2] + eps[j / 2] - eps[a / 2] - eps[b / 2];
                        e2 += 0.25 * anti.norm_sqr() / delta;
                    }
                }
            }
        }
        e2
    }

    #[test]
    fn zero_two_body_gives_zero_pairs() {
        let mut ham = ActiveSpaceHamiltonian::zero(3, 0.0, true, "G");
        for p in 0..3 {
            ham.set_h(p, p, Complex64::new(-2.0 + p as f64, 0.0));
        }
        let r = mp2_pair_energies(&ham, 1).unwrap();
        assert_eq!(r.e2, 0.0);
        assert!(r.pair_occ_occ.iter().all(|&x| x == 0.0));
        assert!(r.occ_virt.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pair_sums_match_monolithic_oracle() {
        for (gamma, seed) in [(true, 1u64), (false, 2u64), (false, 3u64)] {
            let ham = toys::random_hamiltonian(4, gamma, seed);
            let r = mp2_pair_energies(&ham, 2).unwrap();
            let occ_sum: f64 = r.pair_occ_occ.iter().sum();
            let ov_sum: f64 = r.occ_virt.iter().sum();
            assert!((occ_sum - r.e2).abs() < 1e-12);
            assert!((ov_sum - r.e2).abs() < 1e-12);
            let oracle = monolithic_mp2(&ham, 2);
            assert!(
                (r.e2 - oracle).abs() < 1e-10,
                "seed {seed}: {} vs {}",
                r.e2,
                oracle
            );
        }
    }

    #[test]
    fn real_pair_energies_are_nonpositive() {
        let ham = toys::random_hamiltonian(4, true, 7);
        let r = mp2_pair_energies(&ham, 2).unwrap();
        for e in r.pair_occ_occ.iter() {
            assert!(*e <= 1e-14, "positive pair energy {e}");
        }
        assert!(r.e2 <= 0.0);
    }

    #[test]
    fn degenerate_gap_reported() {
        let mut ham = ActiveSpaceHamiltonian::zero(2, 0.0, true, "G");
        // h_11 tuned so the exchange shift makes the Fock gap vanish while
        // the amplitude numerator (01|01) stays finite
        ham.set_h(0, 0, Complex64::new(1.0, 0.0));
        ham.set_h(1, 1, Complex64::new(1.2, 0.0));
        ham.set_eri(0, 1, 0, 1, Complex64::new(0.2, 0.0));
        let err = mp2_pair_energies(&ham, 1);
        assert!(matches!(err, Err(Error::DegenerateGap(_))), "{err:?}");
    }

    #[test]
    fn mp2_rdm_trace_and_hermiticity() {
        for (gamma, seed) in [(true, 11u64), (false, 12u64)] {
            let ham = toys::random_hamiltonian(4, gamma, seed);
            let rdm = mp2_one_rdm(&ham, 2).unwrap();
            assert!((rdm.trace() - 4.0).abs() < 1e-10);
            for p in 0..4 {
                for q in 0..4 {
                    assert!((rdm.d[[p, q]] - rdm.d[[q, p]].conj()).norm() < 1e-12);
                }
            }
            let (vals, _) = crate::linalg::eigh(&rdm.d);
            for v in vals {
                assert!(v > -0.1 && v < 2.1, "occupation {v} out of range");
            }
        }
    }

    #[test]
    fn virtual_scores_shape() {
        let ham = toys::random_hamiltonian(5, true, 13);
        let r = mp2_pair_energies(&ham, 2).unwrap();
        let scores = r.virtual_scores();
        assert_eq!(scores.len(), 3);
        assert!(scores.iter().all(|&s| s >= 0.0));
    }
}
