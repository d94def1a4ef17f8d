//! Second-quantized fermionic operator sums over spin-orbitals.
//!
//! Modes follow the block convention: spatial orbital `p` with spin up is
//! mode `p`, with spin down mode `n_orb + p`. This keeps the spin-up /
//! spin-down bipartition a contiguous qubit split after mapping.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::DEFAULT_DROP_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn both() -> [Spin; 2] {
        [Spin::Up, Spin::Down]
    }
}

/// A single creation or annihilation operator on a spin-orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionOp {
    pub dagger: bool,
    pub orbital: usize,
    pub spin: Spin,
}

impl FermionOp {
    pub fn create(orbital: usize, spin: Spin) -> Self {
        FermionOp { dagger: true, orbital, spin }
    }

    pub fn annihilate(orbital: usize, spin: Spin) -> Self {
        FermionOp { dagger: false, orbital, spin }
    }

    /// Blocked spin-orbital index.
    pub fn mode_index(&self, n_orb: usize) -> usize {
        match self.spin {
            Spin::Up => self.orbital,
            Spin::Down => n_orb + self.orbital,
        }
    }

    pub fn adjoint(&self) -> FermionOp {
        FermionOp { dagger: !self.dagger, ..*self }
    }
}

/// One product term: coefficient times an ordered product of ladder
/// operators (leftmost acts last).
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    pub coeff: Complex64,
    pub ops: Vec<FermionOp>,
}

/// Sum of ladder-operator products over `n_orb` spatial orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionSum {
    n_orb: usize,
    terms: Vec<FermionTerm>,
}

impl FermionSum {
    pub fn new(n_orb: usize) -> Self {
        FermionSum { n_orb, terms: Vec::new() }
    }

    pub fn num_orbitals(&self) -> usize {
        self.n_orb
    }

    pub fn num_modes(&self) -> usize {
        2 * self.n_orb
    }

    pub fn terms(&self) -> &[FermionTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, coeff: Complex64, ops: Vec<FermionOp>) -> Result<()> {
        for op in &ops {
            if op.orbital >= self.n_orb {
                return Err(Error::ModeOutOfRange {
                    index: op.orbital,
                    n_modes: self.n_orb,
                });
            }
        }
        self.terms.push(FermionTerm { coeff, ops });
        Ok(())
    }

    /// Constant (identity) contribution.
    pub fn add_constant(&mut self, c: Complex64) {
        self.terms.push(FermionTerm { coeff: c, ops: Vec::new() });
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for t in &mut self.terms {
            t.coeff *= factor;
        }
        self
    }

    pub fn add(mut self, other: &FermionSum) -> Self {
        assert_eq!(self.n_orb, other.n_orb);
        self.terms.extend(other.terms.iter().cloned());
        self
    }

    pub fn adjoint(&self) -> FermionSum {
        let mut out = FermionSum::new(self.n_orb);
        for t in &self.terms {
            let ops: Vec<FermionOp> = t.ops.iter().rev().map(|o| o.adjoint()).collect();
            out.terms.push(FermionTerm { coeff: t.coeff.conj(), ops });
        }
        out
    }

    /// Expand anticommutators until every term has all creators (ascending
    /// mode) left of all annihilators (descending mode); merge duplicates and
    /// drop coefficients below `tol`.
    pub fn normal_ordered(&self, tol: f64) -> FermionSum {
        let n_orb = self.n_orb;
        let mode = |op: &FermionOp| op.mode_index(n_orb);
        let mut canonical: BTreeMap<Vec<(bool, usize)>, Complex64> = BTreeMap::new();
        let mut stack: Vec<FermionTerm> = self.terms.clone();

        'outer: while let Some(term) = stack.pop() {
            let ops = &term.ops;
            for i in 0..ops.len().saturating_sub(1) {
                let (a, b) = (ops[i], ops[i + 1]);
                let (ma, mb) = (mode(&a), mode(&b));
                if !a.dagger && b.dagger {
                    // a_p a^dag_q = delta_pq - a^dag_q a_p
                    let mut swapped = ops.clone();
                    swapped.swap(i, i + 1);
                    stack.push(FermionTerm { coeff: -term.coeff, ops: swapped });
                    if ma == mb {
                        let mut contracted = ops.clone();
                        contracted.drain(i..i + 2);
                        stack.push(FermionTerm { coeff: term.coeff, ops: contracted });
                    }
                    continue 'outer;
                }
                if a.dagger == b.dagger && ma == mb {
                    continue 'outer; // nilpotent: term vanishes
                }
                let out_of_order =
                    (a.dagger && b.dagger && ma > mb) || (!a.dagger && !b.dagger && ma < mb);
                if out_of_order {
                    let mut swapped = ops.clone();
                    swapped.swap(i, i + 1);
                    stack.push(FermionTerm { coeff: -term.coeff, ops: swapped });
                    continue 'outer;
                }
            }
            let key: Vec<(bool, usize)> = term.ops.iter().map(|o| (o.dagger, mode(o))).collect();
            *canonical.entry(key).or_insert(Complex64::new(0.0, 0.0)) += term.coeff;
        }

        let mut out = FermionSum::new(n_orb);
        for (key, coeff) in canonical {
            if coeff.norm() < tol {
                continue;
            }
            let ops: Vec<FermionOp> = key
                .iter()
                .map(|&(dagger, m)| {
                    let (orbital, spin) =
                        if m < n_orb { (m, Spin::Up) } else { (m - n_orb, Spin::Down) };
                    FermionOp { dagger, orbital, spin }
                })
                .collect();
            out.terms.push(FermionTerm { coeff, ops });
        }
        out
    }

    /// Whether the normal-ordered difference from the adjoint vanishes.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = self.clone().add(&self.adjoint().scaled(Complex64::new(-1.0, 0.0)));
        diff.normal_ordered(tol).is_empty()
    }
}

/// Total particle number over `n_orb` orbitals.
pub fn number_operator(n_orb: usize) -> FermionSum {
    let mut f = FermionSum::new(n_orb);
    for p in 0..n_orb {
        for spin in Spin::both() {
            f.add_term(
                Complex64::new(1.0, 0.0),
                vec![FermionOp::create(p, spin), FermionOp::annihilate(p, spin)],
            )
            .unwrap();
        }
    }
    f
}

/// z-component of total spin, (1/2) sum_p (n_up - n_down).
pub fn sz_operator(n_orb: usize) -> FermionSum {
    let mut f = FermionSum::new(n_orb);
    for p in 0..n_orb {
        f.add_term(
            Complex64::new(0.5, 0.0),
            vec![FermionOp::create(p, Spin::Up), FermionOp::annihilate(p, Spin::Up)],
        )
        .unwrap();
        f.add_term(
            Complex64::new(-0.5, 0.0),
            vec![FermionOp::create(p, Spin::Down), FermionOp::annihilate(p, Spin::Down)],
        )
        .unwrap();
    }
    f
}

/// Total-spin operator S^2 = S- S+ + Sz (Sz + 1), expanded to products.
pub fn s2_operator(n_orb: usize) -> FermionSum {
    let mut f = FermionSum::new(n_orb);
    // S- S+ with S+ = sum_p a^dag_{p,up} a_{p,down}
    for p in 0..n_orb {
        for q in 0..n_orb {
            f.add_term(
                Complex64::new(1.0, 0.0),
                vec![
                    FermionOp::create(p, Spin::Down),
                    FermionOp::annihilate(p, Spin::Up),
                    FermionOp::create(q, Spin::Up),
                    FermionOp::annihilate(q, Spin::Down),
                ],
            )
            .unwrap();
        }
    }
    // Sz^2
    let sz = sz_operator(n_orb);
    for a in sz.terms() {
        for b in sz.terms() {
            let mut ops = a.ops.clone();
            ops.extend(b.ops.iter().copied());
            f.add_term(a.coeff * b.coeff, ops).unwrap();
        }
    }
    // + Sz
    f.add(&sz)
}

/// Normal-order with the default tolerance.
pub fn normal_ordered_default(f: &FermionSum) -> FermionSum {
    f.normal_ordered(DEFAULT_DROP_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn anticommutator_identity() {
        // a_0 a^dag_0 + a^dag_0 a_0 = 1
        let mut f = FermionSum::new(1);
        f.add_term(c(1.0), vec![FermionOp::annihilate(0, Spin::Up), FermionOp::create(0, Spin::Up)])
            .unwrap();
        f.add_term(c(1.0), vec![FermionOp::create(0, Spin::Up), FermionOp::annihilate(0, Spin::Up)])
            .unwrap();
        let no = f.normal_ordered(1e-12);
        assert_eq!(no.terms().len(), 1);
        assert!(no.terms()[0].ops.is_empty());
        assert!((no.terms()[0].coeff - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn nilpotency() {
        let mut f = FermionSum::new(2);
        f.add_term(c(1.0), vec![FermionOp::create(1, Spin::Up), FermionOp::create(1, Spin::Up)])
            .unwrap();
        assert!(f.normal_ordered(1e-12).is_empty());
    }

    #[test]
    fn normal_ordering_preserves_matrix() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let n_orb = 2;
        let mut f = FermionSum::new(n_orb);
        for _ in 0..20 {
            let len = rng.gen_range(0..=4);
            let ops: Vec<FermionOp> = (0..len)
                .map(|_| FermionOp {
                    dagger: rng.gen_bool(0.5),
                    orbital: rng.gen_range(0..n_orb),
                    spin: if rng.gen_bool(0.5) { Spin::Up } else { Spin::Down },
                })
                .collect();
            f.add_term(
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                ops,
            )
            .unwrap();
        }
        let before = dense::fermion_sum_matrix(&f);
        let after = dense::fermion_sum_matrix(&f.normal_ordered(1e-14));
        assert!(dense::max_abs_diff(&before, &after) < 1e-11);
    }

    #[test]
    fn number_operator_counts() {
        let n = number_operator(2);
        let m = dense::fermion_sum_matrix(&n);
        // diagonal = popcount of the occupation index
        for b in 0..16usize {
            assert!((m[[b, b]].re - (b.count_ones() as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn hermiticity_check() {
        let n = number_operator(3);
        assert!(n.is_hermitian(1e-12));
        let mut f = FermionSum::new(1);
        f.add_term(c(1.0), vec![FermionOp::create(0, Spin::Up)]).unwrap();
        assert!(!f.is_hermitian(1e-12));
    }

    #[test]
    fn mode_out_of_range_rejected() {
        let mut f = FermionSum::new(2);
        let err = f.add_term(c(1.0), vec![FermionOp::create(2, Spin::Up)]);
        assert!(err.is_err());
    }
}
