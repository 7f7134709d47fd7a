//! Dense statevectors over `n` work qubits.
//!
//! Amplitude index bit `q` is qubit `q` (qubit 0 is the least significant
//! bit); occupation 1 of spin-orbital `q` is qubit state `|1⟩`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Tolerance used to decide whether a state counts as normalized.
pub const NORM_TOL: f64 = 1e-9;

/// Residual imaginary parts of expectation values above this are errors.
pub const IMAG_TOL: f64 = 1e-10;

const DUMP_MAGIC: &[u8; 8] = b"FQESTATE";

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 30 {
            return Err(Error::Config(format!("unsupported qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Config(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 30 {
            return Err(Error::Config(format!("unsupported qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_real(n_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(n_qubits, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Hartree-Fock determinant: the `n_electrons` lowest spin-orbitals occupied.
    pub fn hartree_fock(n_qubits: usize, n_electrons: usize) -> Result<Self> {
        if n_electrons > n_qubits {
            return Err(Error::TooManyElectrons {
                electrons: n_electrons,
                qubits: n_qubits,
            });
        }
        Self::basis(n_qubits, (1usize << n_electrons) - 1)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: self.norm() })
        }
    }

    /// Rescales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if !(norm > f64::MIN_POSITIVE) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(norm)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// Renormalizes when the norm has drifted past [`NORM_TOL`]; returns
    /// whether a correction was applied.
    pub fn renormalize_if_drifted(&mut self) -> Result<bool> {
        if self.is_normalized() {
            Ok(false)
        } else {
            self.normalize()?;
            Ok(true)
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dims(other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²` for normalized states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_dims(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            Err(Error::QubitMismatch {
                expected: self.n_qubits,
                found: n,
            })
        } else {
            Ok(())
        }
    }

    /// `coeff · P|self⟩`, not normalized.
    pub fn apply_pauli_string(&self, p: &PauliString, coeff: f64) -> Result<StateVector> {
        self.check_dims(p.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        accumulate_pauli(&self.amps, &mut out, p, Complex64::new(coeff, 0.0));
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// `H|self⟩` and its Euclidean norm.
    pub fn apply_sum(&self, h: &PauliSum) -> Result<(StateVector, f64)> {
        self.check_dims(h.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for &(c, p) in h.iter() {
            accumulate_pauli(&self.amps, &mut out, &p, Complex64::new(c, 0.0));
        }
        let v = StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        };
        let norm = v.norm();
        Ok((v, norm))
    }

    /// `⟨self|H|self⟩` for a normalized state.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        self.check_dims(h.n_qubits())?;
        self.require_normalized()?;
        let e = self.raw_expectation(h);
        if e.im.abs() > IMAG_TOL {
            return Err(Error::NonHermitian { residual: e.im.abs() });
        }
        Ok(e.re)
    }

    /// `⟨self|H|self⟩ / ⟨self|self⟩` for any nonzero state.
    pub fn rayleigh_quotient(&self, h: &PauliSum) -> Result<f64> {
        self.check_dims(h.n_qubits())?;
        let nsq = self.norm_sqr();
        if !(nsq > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let e = self.raw_expectation(h) / nsq;
        if e.im.abs() > IMAG_TOL {
            return Err(Error::NonHermitian { residual: e.im.abs() });
        }
        Ok(e.re)
    }

    fn raw_expectation(&self, h: &PauliSum) -> Complex64 {
        let amps = &self.amps;
        let mut total = Complex64::new(0.0, 0.0);
        for &(c, p) in h.iter() {
            let x = p.x_mask() as usize;
            let z = p.z_mask();
            // ⟨s|P|s⟩ = i^{ny} Σ_j conj(s[j^x]) (−1)^{|j&z|} s[j]
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, a) in amps.iter().enumerate() {
                let t = amps[j ^ x].conj() * a;
                if (j as u64 & z).count_ones() & 1 == 1 {
                    acc -= t;
                } else {
                    acc += t;
                }
            }
            let phase = crate::pauli::Phase::from_power(p.y_count()).to_complex();
            total += acc * phase * c;
        }
        total
    }

    /// Writes the binary checkpoint: 8-byte magic, `n_qubits` as a
    /// little-endian `u64`, then interleaved little-endian `(re, im)` doubles.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.n_qubits as u64).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<StateVector> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..8] != DUMP_MAGIC {
            return Err(Error::Format("not a state dump (bad magic)".into()));
        }
        let n = u64::from_le_bytes(header[8..].try_into().expect("8 bytes")) as usize;
        if n == 0 || n > 30 {
            return Err(Error::Format(format!("state dump declares {n} qubits")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        let mut buf = [0u8; 16];
        for _ in 0..(1usize << n) {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
            amps.push(Complex64::new(re, im));
        }
        StateVector::from_amplitudes(n, amps)
    }
}

/// `dst += coeff · P · src` over full amplitude arrays.
pub(crate) fn accumulate_pauli(
    src: &[Complex64],
    dst: &mut [Complex64],
    p: &PauliString,
    coeff: Complex64,
) {
    let x = p.x_mask() as usize;
    let z = p.z_mask();
    let c = coeff * crate::pauli::Phase::from_power(p.y_count()).to_complex();
    for (j, a) in src.iter().enumerate() {
        if (j as u64 & z).count_ones() & 1 == 1 {
            dst[j ^ x] -= c * a;
        } else {
            dst[j ^ x] += c * a;
        }
    }
}
