//! Dense statevector simulation: basis-state preparation, Pauli-string
//! exponentials, hop gates, exact and sampled expectations, and cross-state
//! transition elements.
//!
//! Basis index bit `j` is qubit `j`; bitstring text writes qubit 0 leftmost.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliOp, PauliString, PauliSum};

pub const DEFAULT_QUBIT_CAP: usize = 24;

#[derive(Debug, Clone)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

pub fn bits_to_text(bits: u64, n: usize) -> String {
    (0..n).map(|j| if bits >> j & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn text_to_bits(text: &str) -> Result<(u64, usize)> {
    let mut bits = 0u64;
    let mut n = 0;
    for (j, c) in text.chars().enumerate() {
        match c {
            '0' => {}
            '1' => bits |= 1 << j,
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("invalid bitstring character '{c}'"),
                })
            }
        }
        n = j + 1;
    }
    Ok((bits, n))
}

impl Statevector {
    pub fn zero_state(n: usize) -> Self {
        Statevector::basis_state(n, 0)
    }

    pub fn basis_state(n: usize, bits: u64) -> Self {
        assert!(n <= DEFAULT_QUBIT_CAP, "qubit count {n} above cap {DEFAULT_QUBIT_CAP}");
        assert!(n == 64 || bits < (1u64 << n), "bitstring wider than register");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        amps[bits as usize] = Complex64::new(1.0, 0.0);
        Statevector { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n {
            return Err(Error::SizeMismatch(amps.len(), 1usize << n));
        }
        Ok(Statevector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: u64) -> Complex64 {
        self.amps[bits as usize]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        debug_assert_eq!(self.n, other.n);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// psi <- cos(theta) psi + i sin(theta) P psi  (i.e. e^{i theta P}).
    pub fn apply_pauli_exp(&mut self, p: &PauliString, theta: f64) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch(p.num_qubits(), self.n));
        }
        let (c, s) = (theta.cos(), theta.sin());
        let is = Complex64::new(0.0, s);
        let x = p.x_mask();
        let z = p.z_mask();
        let y_phase = p.y_phase().to_complex();
        let sign = |b: u64| -> f64 {
            if (b & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        if x == 0 {
            for (b, amp) in self.amps.iter_mut().enumerate() {
                let ph = y_phase * sign(b as u64);
                *amp = (Complex64::new(c, 0.0) + is * ph) * *amp;
            }
        } else {
            for b in 0..self.amps.len() as u64 {
                let t = b ^ x;
                if t < b {
                    continue; // handle each pair once
                }
                let (ab, at) = (self.amps[b as usize], self.amps[t as usize]);
                // P|b> = y_phase * sign(b) |t>, P|t> = y_phase * sign(t) |b>
                self.amps[t as usize] = c * at + is * y_phase * sign(b) * ab;
                self.amps[b as usize] = c * ab + is * y_phase * sign(t) * at;
            }
        }
        Ok(())
    }

    /// Two-qubit hop gate: identity on |00>, planar rotation mixing
    /// |01> and |10>, and a -1 phase on |11>. The first qubit of the pair is
    /// the least-significant bit of the 2-qubit subspace index.
    pub fn apply_hop(&mut self, q1: usize, q2: usize, phi: f64) -> Result<()> {
        if q1 >= self.n || q2 >= self.n || q1 == q2 {
            return Err(Error::InvalidArgument(format!(
                "hop pair ({q1},{q2}) invalid for {} qubits",
                self.n
            )));
        }
        let m1 = 1u64 << q1;
        let m2 = 1u64 << q2;
        let (c, s) = (phi.cos(), phi.sin());
        for b in 0..self.amps.len() as u64 {
            if b & (m1 | m2) != 0 {
                continue;
            }
            let i01 = (b | m1) as usize; // bit q1 set: low-order index 1
            let i10 = (b | m2) as usize;
            let i11 = (b | m1 | m2) as usize;
            let (a01, a10) = (self.amps[i01], self.amps[i10]);
            self.amps[i01] = c * a01 - s * a10;
            self.amps[i10] = s * a01 + c * a10;
            self.amps[i11] = -self.amps[i11];
        }
        Ok(())
    }

    /// Apply a single-qubit matrix [[u00,u01],[u10,u11]].
    fn apply_single_qubit(&mut self, q: usize, u: [[Complex64; 2]; 2]) {
        let m = 1u64 << q;
        for b in 0..self.amps.len() as u64 {
            if b & m != 0 {
                continue;
            }
            let b1 = (b | m) as usize;
            let (a0, a1) = (self.amps[b as usize], self.amps[b1]);
            self.amps[b as usize] = u[0][0] * a0 + u[0][1] * a1;
            self.amps[b1] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    /// <psi|P|psi> for a single string.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<Complex64> {
        if p.num_qubits() != self.n {
            return Err(Error::SizeMismatch(p.num_qubits(), self.n));
        }
        Ok(transition_string(self, self, p))
    }

    /// Exact <psi|O|psi>.
    pub fn expectation(&self, o: &PauliSum) -> Result<Complex64> {
        if o.num_qubits() != self.n {
            return Err(Error::SizeMismatch(o.num_qubits(), self.n));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, c) in o.iter() {
            acc += c * transition_string(self, self, p);
        }
        Ok(acc)
    }

    /// Observable value of a Hermitian operator; the imaginary residual must
    /// be numerical noise.
    pub fn expectation_real(&self, o: &PauliSum) -> Result<f64> {
        let v = self.expectation(o)?;
        if v.im.abs() > 1e-8 {
            return Err(Error::NotHermitian(format!(
                "expectation has imaginary part {:.3e}",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Sampled estimate of a Hermitian observable: strings are grouped into
    /// qubit-wise-commuting sets, each measured with `shots` multinomial
    /// samples in its shared eigenbasis. Returns (estimate, stderr).
    pub fn sampled_expectation(&self, o: &PauliSum, shots: usize, seed: u64) -> Result<(f64, f64)> {
        if o.num_qubits() != self.n {
            return Err(Error::SizeMismatch(o.num_qubits(), self.n));
        }
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        if !o.is_hermitian(1e-10) {
            return Err(Error::NotHermitian("sampled observable must be Hermitian".into()));
        }
        let mut constant = 0.0;
        let mut groups: Vec<Vec<(PauliString, f64)>> = Vec::new();
        'term: for (p, c) in o.iter() {
            if p.is_identity() {
                constant += c.re;
                continue;
            }
            for group in groups.iter_mut() {
                if group.iter().all(|(q, _)| qubitwise_compatible(p, q)) {
                    group.push((*p, c.re));
                    continue 'term;
                }
            }
            groups.push(vec![(*p, c.re)]);
        }

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut estimate = constant;
        let mut variance = 0.0;
        for group in &groups {
            // shared measurement basis
            let mut basis = vec![PauliOp::I; self.n];
            for (p, _) in group {
                for j in 0..self.n {
                    match p.op(j) {
                        PauliOp::I => {}
                        op => basis[j] = op,
                    }
                }
            }
            let mut rotated = self.clone();
            let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            for (j, op) in basis.iter().enumerate() {
                match op {
                    PauliOp::X => rotated.apply_single_qubit(
                        j,
                        [[inv_sqrt2, inv_sqrt2], [inv_sqrt2, -inv_sqrt2]],
                    ),
                    PauliOp::Y => rotated.apply_single_qubit(
                        j,
                        [
                            [inv_sqrt2, inv_sqrt2 * Complex64::new(0.0, -1.0)],
                            [inv_sqrt2, inv_sqrt2 * Complex64::new(0.0, 1.0)],
                        ],
                    ),
                    _ => {}
                }
            }
            // cumulative distribution over outcomes
            let mut cdf = Vec::with_capacity(rotated.amps.len());
            let mut acc = 0.0;
            for a in &rotated.amps {
                acc += a.norm_sqr();
                cdf.push(acc);
            }
            let total = acc;

            let supports: Vec<u64> =
                group.iter().map(|(p, _)| p.x_mask() | p.z_mask()).collect();
            let mut mean = 0.0;
            let mut m2 = 0.0;
            for k in 0..shots {
                let u: f64 = rng.gen_range(0.0..total);
                let outcome = cdf.partition_point(|&c| c <= u) as u64;
                let mut v = 0.0;
                for ((_, coeff), support) in group.iter().zip(&supports) {
                    let sign = if (outcome & support).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    v += coeff * sign;
                }
                let delta = v - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (v - mean);
            }
            estimate += mean;
            if shots > 1 {
                variance += m2 / (shots - 1) as f64 / shots as f64;
            }
        }
        Ok((estimate, variance.sqrt()))
    }
}

fn qubitwise_compatible(a: &PauliString, b: &PauliString) -> bool {
    for j in 0..a.num_qubits() {
        let (pa, pb) = (a.op(j), b.op(j));
        if pa != PauliOp::I && pb != PauliOp::I && pa != pb {
            return false;
        }
    }
    true
}

fn transition_string(bra: &Statevector, ket: &Statevector, p: &PauliString) -> Complex64 {
    let x = p.x_mask();
    let z = p.z_mask();
    let y_phase = p.y_phase().to_complex();
    let mut acc = Complex64::new(0.0, 0.0);
    for b in 0..ket.amps.len() as u64 {
        let a = ket.amps[b as usize];
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += bra.amps[(b ^ x) as usize].conj() * y_phase * sign * a;
    }
    acc
}

/// Exact <bra|O|ket>.
pub fn transition_element(
    bra: &Statevector,
    ket: &Statevector,
    o: &PauliSum,
) -> Result<Complex64> {
    if bra.num_qubits() != ket.num_qubits() {
        return Err(Error::SizeMismatch(bra.num_qubits(), ket.num_qubits()));
    }
    if o.num_qubits() != ket.num_qubits() {
        return Err(Error::SizeMismatch(o.num_qubits(), ket.num_qubits()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, c) in o.iter() {
        acc += c * transition_string(bra, ket, p);
    }
    Ok(acc)
}
