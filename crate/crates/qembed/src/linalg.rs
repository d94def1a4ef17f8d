//! Thin wrappers around dense Hermitian eigendecomposition and SVD, plus a
//! matrix-free Lanczos for CI spaces too large to densify.

use nalgebra::DMatrix;
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

fn to_nalgebra(a: &Array2<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending,
/// eigenvectors as columns.
pub fn eigh(a: &Array2<Complex64>) -> (Vec<f64>, Array2<Complex64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return (Vec::new(), Array2::zeros((0, 0)));
    }
    let eig = to_nalgebra(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = Array2::zeros((n, n));
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vecs[[i, k]] = eig.eigenvectors[(i, src)];
        }
    }
    (vals, vecs)
}

/// Eigendecomposition of a real symmetric matrix; eigenvalues ascending.
pub fn eigh_real(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), Array2::zeros((0, 0)));
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = Array2::zeros((n, n));
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            vecs[[i, k]] = eig.eigenvectors[(i, src)];
        }
    }
    (vals, vecs)
}

/// SVD `m = u * diag(s) * v_dagger` with singular values descending.
pub fn svd(m: &Array2<Complex64>) -> (Array2<Complex64>, Vec<f64>, Array2<Complex64>) {
    let svd = to_nalgebra(m).svd(true, true);
    let u = svd.u.expect("svd computed with u");
    let vt = svd.v_t.expect("svd computed with v_t");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut u_out = Array2::zeros((u.nrows(), k));
    let mut vt_out = Array2::zeros((k, vt.ncols()));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..u.nrows() {
            u_out[[i, dst]] = u[(i, src)];
        }
        for j in 0..vt.ncols() {
            vt_out[[dst, j]] = vt[(src, j)];
        }
    }
    (u_out, s, vt_out)
}

/// Lowest eigenpair of a dense Hermitian matrix.
pub fn lowest_eigenpair(a: &Array2<Complex64>) -> (f64, Vec<Complex64>) {
    let (vals, vecs) = eigh(a);
    (vals[0], vecs.column(0).to_vec())
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest eigenpair of a Hermitian operator given only its action, via
/// Lanczos with full reorthogonalization. `start` seeds the Krylov space
/// (deterministic results for a deterministic start).
pub fn lowest_eigenpair_matfree<F>(
    dim: usize,
    mut matvec: F,
    start: &[Complex64],
    max_iter: usize,
    tol: f64,
) -> Result<(f64, Vec<Complex64>)>
where
    F: FnMut(&[Complex64]) -> Vec<Complex64>,
{
    assert_eq!(start.len(), dim);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let nrm = norm(start);
    if nrm < 1e-300 {
        return Err(Error::EigsolverFailure("zero start vector".into()));
    }
    let mut v: Vec<Complex64> = start.iter().map(|x| x / nrm).collect();
    basis.push(v.clone());

    let m_max = max_iter.min(dim);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for j in 0..m_max {
        let mut w = matvec(&v);
        let alpha = dot(&v, &w).re;
        alphas.push(alpha);
        // w -= alpha v + beta v_prev, then reorthogonalize against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        // Rayleigh-Ritz on the tridiagonal
        let m = alphas.len();
        let mut t = Array2::<f64>::zeros((m, m));
        for i in 0..m {
            t[[i, i]] = alphas[i];
            if i + 1 < m {
                t[[i, i + 1]] = betas[i];
                t[[i + 1, i]] = betas[i];
            }
        }
        let (tvals, tvecs) = eigh_real(&t);
        let theta = tvals[0];
        let beta_next = norm(&w);
        let resid = beta_next * tvecs[[m - 1, 0]].abs();
        if resid < tol || j + 1 == m_max || beta_next < 1e-14 {
            let mut x = vec![Complex64::new(0.0, 0.0); dim];
            for (k, b) in basis.iter().enumerate() {
                let c = Complex64::new(tvecs[[k, 0]], 0.0);
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            let xn = norm(&x);
            for xi in x.iter_mut() {
                *xi /= xn;
            }
            best = Some((theta, x));
            if resid < tol || beta_next < 1e-14 {
                break;
            }
        }
        betas.push(beta_next);
        v = w.iter().map(|x| x / beta_next).collect();
        basis.push(v.clone());
    }
    best.ok_or_else(|| Error::EigsolverFailure("lanczos produced no iterate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    fn random_hermitian(n: usize, seed: u64) -> Array2<Complex64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if i == j {
                    a[[i, j]] = Complex64::new(v.re, 0.0);
                } else {
                    a[[i, j]] = v;
                    a[[j, i]] = v.conj();
                }
            }
        }
        a
    }

    #[test]
    fn eigh_reconstructs() {
        let a = random_hermitian(12, 3);
        let (vals, vecs) = eigh(&a);
        for k in 1..vals.len() {
            assert!(vals[k] >= vals[k - 1]);
        }
        let mut recon = Array2::<Complex64>::zeros((12, 12));
        for k in 0..12 {
            for i in 0..12 {
                for j in 0..12 {
                    recon[[i, j]] += Complex64::new(vals[k], 0.0) * vecs[[i, k]] * vecs[[j, k]].conj();
                }
            }
        }
        let err = (&a - &recon).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn svd_descending_and_reconstructs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut m = Array2::zeros((4, 6));
        for v in m.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let (u, s, vt) = svd(&m);
        for k in 1..s.len() {
            assert!(s[k] <= s[k - 1]);
        }
        let mut recon = Array2::<Complex64>::zeros((4, 6));
        for i in 0..4 {
            for j in 0..6 {
                for k in 0..s.len() {
                    recon[[i, j]] += u[[i, k]] * Complex64::new(s[k], 0.0) * vt[[k, j]];
                }
            }
        }
        let err = (&m - &recon).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn lanczos_matches_dense_lowest() {
        let a = random_hermitian(60, 9);
        let (dense_val, _) = lowest_eigenpair(&a);
        let start: Vec<Complex64> =
            (0..60).map(|i| Complex64::new(1.0 + (i as f64) * 0.01, 0.0)).collect();
        let (val, vec) = lowest_eigenpair_matfree(
            60,
            |v| {
                let mut out = vec![Complex64::new(0.0, 0.0); 60];
                for i in 0..60 {
                    for j in 0..60 {
                        out[i] += a[[i, j]] * v[j];
                    }
                }
                out
            },
            &start,
            200,
            1e-10,
        )
        .unwrap();
        assert!((val - dense_val).abs() < 1e-8);
        // residual check
        let mut hv = vec![Complex64::new(0.0, 0.0); 60];
        for i in 0..60 {
            for j in 0..60 {
                hv[i] += a[[i, j]] * vec[j];
            }
        }
        let resid: f64 = hv
            .iter()
            .zip(&vec)
            .map(|(h, x)| (h - x * Complex64::new(val, 0.0)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-6);
    }
}
