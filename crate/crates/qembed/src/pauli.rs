//! Pauli-string and Pauli-sum algebra.
//!
//! Strings are stored as X/Z bitmasks over up to 64 qubits: bit `j` of the
//! masks corresponds to qubit `j`, with the site operator given by
//! `(x, z) = (0,0) -> I, (1,0) -> X, (1,1) -> Y, (0,1) -> Z`. Textual
//! notation writes qubit 0 leftmost, e.g. `"XYIZ"` puts X on qubit 0.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped on simplification.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliOp::I),
            'X' => Some(PauliOp::X),
            'Y' => Some(PauliOp::Y),
            'Z' => Some(PauliOp::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }
}

/// Power of the imaginary unit, `i^k` with `k` mod 4. Pauli products only
/// ever produce phases from this group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);

    pub fn from_power(k: i32) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Tensor product of single-qubit Paulis over `n` qubits, without a
/// coefficient or phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliString { n, x: 0, z: 0 }
    }

    pub fn from_ops(ops: &[PauliOp]) -> Self {
        let mut s = PauliString::identity(ops.len());
        for (j, &op) in ops.iter().enumerate() {
            s.set_op(j, op);
        }
        s
    }

    /// Build from the sparse site list `(qubit, op)`; unlisted sites are I.
    pub fn from_sites(n: usize, sites: &[(usize, PauliOp)]) -> Self {
        let mut s = PauliString::identity(n);
        for &(j, op) in sites {
            assert!(j < n, "qubit index out of range");
            s.set_op(j, op);
        }
        s
    }

    /// Parse textual notation, qubit 0 leftmost.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ops = Vec::with_capacity(text.len());
        for c in text.chars() {
            let op = PauliOp::from_char(c).ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("invalid Pauli character '{c}'"),
            })?;
            ops.push(op);
        }
        if ops.len() > MAX_QUBITS {
            return Err(Error::Parse {
                line: 0,
                msg: format!("more than {MAX_QUBITS} qubits"),
            });
        }
        Ok(PauliString::from_ops(&ops))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn op(&self, j: usize) -> PauliOp {
        debug_assert!(j < self.n);
        match ((self.x >> j) & 1, (self.z >> j) & 1) {
            (0, 0) => PauliOp::I,
            (1, 0) => PauliOp::X,
            (1, 1) => PauliOp::Y,
            _ => PauliOp::Z,
        }
    }

    pub fn set_op(&mut self, j: usize, op: PauliOp) {
        debug_assert!(j < self.n);
        let (xb, zb) = match op {
            PauliOp::I => (0, 0),
            PauliOp::X => (1, 0),
            PauliOp::Y => (1, 1),
            PauliOp::Z => (0, 1),
        };
        self.x = (self.x & !(1 << j)) | (xb << j);
        self.z = (self.z & !(1 << j)) | (zb << j);
    }

    /// Mask of qubits carrying X or Y.
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    /// Mask of qubits carrying Z or Y.
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Phase prefactor of the string's action on a basis state:
    /// `P|b> = i^{|x&z|} (-1)^{|b&z|} |b^x>`. This returns the constant
    /// `i^{|x&z|}` part; the sign depends on the basis state.
    pub fn y_phase(&self) -> Phase {
        Phase::from_power((self.x & self.z).count_ones() as i32)
    }

    /// Sitewise product `self * rhs` with the accumulated group phase.
    pub fn multiply(&self, rhs: &PauliString) -> Result<(PauliString, Phase)> {
        if self.n != rhs.n {
            return Err(Error::SizeMismatch(self.n, rhs.n));
        }
        let x3 = self.x ^ rhs.x;
        let z3 = self.z ^ rhs.z;
        // X^x Z^z bookkeeping: i^{x1.z1} i^{x2.z2} (-1)^{z1.x2} = i^k i^{x3.z3}
        let k = (self.x & self.z).count_ones() as i32 + (rhs.x & rhs.z).count_ones() as i32
            + 2 * (self.z & rhs.x).count_ones() as i32
            - (x3 & z3).count_ones() as i32;
        Ok((PauliString { n: self.n, x: x3, z: z3 }, Phase::from_power(k)))
    }

    pub fn commutes_with(&self, rhs: &PauliString) -> bool {
        let anti = (self.x & rhs.z).count_ones() + (self.z & rhs.x).count_ones();
        anti % 2 == 0
    }

    /// Split across qubits `[0, cut)` and `[cut, n)`.
    pub fn split_at(&self, cut: usize) -> (PauliString, PauliString) {
        assert!(cut <= self.n);
        let low_mask = if cut == 64 { u64::MAX } else { (1u64 << cut) - 1 };
        let left = PauliString { n: cut, x: self.x & low_mask, z: self.z & low_mask };
        let right = PauliString {
            n: self.n - cut,
            x: self.x >> cut,
            z: self.z >> cut,
        };
        (left, right)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            write!(f, "{}", self.op(j).to_char())?;
        }
        Ok(())
    }
}

/// Weighted sum of Pauli strings on a fixed qubit count.
///
/// Terms are keyed by string, so duplicates merge on insertion; iteration
/// order is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn new(n: usize) -> Self {
        PauliSum { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize, coeff: Complex64) -> Self {
        let mut s = PauliSum::new(n);
        s.add_term(PauliString::identity(n), coeff);
        s
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Self {
        let mut s = PauliSum::new(n);
        for (p, c) in terms {
            s.add_term(p, c);
        }
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, string: PauliString, coeff: Complex64) {
        assert_eq!(string.num_qubits(), self.n, "qubit count mismatch");
        *self.terms.entry(string).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn coeff(&self, string: &PauliString) -> Complex64 {
        self.terms.get(string).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    /// Drop terms with |coeff| < tol. Duplicates are already merged by
    /// construction, so the term count never increases.
    pub fn simplify(mut self, tol: f64) -> Self {
        assert!(tol >= 0.0);
        self.terms.retain(|_, c| c.norm() >= tol);
        self
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for c in self.terms.values_mut() {
            *c *= factor;
        }
        self
    }

    pub fn add(mut self, other: &PauliSum) -> Self {
        assert_eq!(self.n, other.n);
        for (p, c) in other.iter() {
            self.add_term(*p, *c);
        }
        self
    }

    /// Operator product, phases folded into coefficients.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let mut out = PauliSum::new(self.n);
        for (pa, ca) in self.iter() {
            for (pb, cb) in other.iter() {
                let (p, phase) = pa.multiply(pb)?;
                out.add_term(p, ca * cb * phase.to_complex());
            }
        }
        Ok(out)
    }

    /// Hermitian iff every coefficient is real (strings are Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn max_imag_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut out = PauliSum::new(self.n);
        for (p, c) in self.iter() {
            out.add_term(*p, c.conj());
        }
        out
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 * {}", PauliString::identity(self.n));
        }
        let mut first = true;
        for (p, c) in self.iter() {
            if !first {
                writeln!(f)?;
            }
            write!(f, "({:+.12e}{:+.12e}i) * {}", c.re, c.im, p)?;
            first = false;
        }
        Ok(())
    }
}
