//! Pauli strings and real linear combinations of them.
//!
//! A string on `n` qubits is stored in symplectic form: bit `q` of `x` and
//! `z` encode the letter on qubit `q` (`I = 00`, `X = 10`, `Z = 01`,
//! `Y = 11`). Qubit 0 is the leftmost letter in text form and the least
//! significant bit of a basis-state index.

mod io;

pub use io::{parse_json, parse_text, to_json, to_text, PauliDocument};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped when merging.
pub const MERGE_TOL: f64 = 1e-12;

/// Largest qubit count for which [`PauliSum::to_matrix`] will allocate.
pub const DEFAULT_MATRIX_CAP: usize = 14;

/// Maximum width of a [`PauliString`].
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    // Sort key: I < X < Y < Z.
    fn rank(self) -> u128 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }
}

/// A power of `i`: the phase picked up when multiplying Pauli strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
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

/// A tensor product of single-qubit Pauli operators.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        Ok(PauliString {
            n: n_qubits as u8,
            x: 0,
            z: 0,
        })
    }

    /// Builds a string from an explicit letter per qubit.
    pub fn from_paulis(ops: &[Pauli]) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidPauli(String::new()));
        }
        check_width(ops.len())?;
        let mut s = PauliString {
            n: ops.len() as u8,
            x: 0,
            z: 0,
        };
        for (q, &p) in ops.iter().enumerate() {
            s.set(q, p);
        }
        Ok(s)
    }

    /// Builds an `n`-qubit string with the listed non-identity letters.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n_qubits)?;
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::InvalidPauli(format!("qubit {q} out of range")));
            }
            s.set(q, p);
        }
        Ok(s)
    }

    pub(crate) fn from_masks(n_qubits: usize, x: u64, z: u64) -> Self {
        PauliString {
            n: n_qubits as u8,
            x,
            z,
        }
    }

    fn set(&mut self, q: usize, p: Pauli) {
        let (xb, zb) = p.bits();
        let bit = 1u64 << q;
        self.x = if xb { self.x | bit } else { self.x & !bit };
        self.z = if zb { self.z | bit } else { self.z & !bit };
    }

    pub fn n_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Only I and Z letters.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn paulis(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n_qubits()).map(|q| self.get(q))
    }

    fn sort_key(&self) -> u128 {
        self.paulis().fold(0u128, |k, p| (k << 2) | p.rank())
    }

    /// Operator product `self · rhs` as `phase · result`.
    pub fn multiply(&self, rhs: &PauliString) -> Result<(Phase, PauliString)> {
        if self.n != rhs.n {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits(),
                found: rhs.n_qubits(),
            });
        }
        // P = i^{|x&z|} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{|z1&x2|}.
        let x = self.x ^ rhs.x;
        let z = self.z ^ rhs.z;
        let k = (self.x & self.z).count_ones() + (rhs.x & rhs.z).count_ones()
            + 2 * (self.z & rhs.x).count_ones()
            + 3 * (x & z).count_ones();
        Ok((
            Phase::from_power(k),
            PauliString { n: self.n, x, z },
        ))
    }

    /// Dense `2^n × 2^n` matrix; index bit `q` is qubit `q`.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.n_qubits();
        if n > DEFAULT_MATRIX_CAP {
            return Err(Error::TooManyQubits {
                n,
                cap: DEFAULT_MATRIX_CAP,
            });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let (row, amp) = self.apply_to_basis(j);
            m[(row, j)] = amp;
        }
        Ok(m)
    }

    /// `P|j⟩ = amp · |row⟩`.
    pub fn apply_to_basis(&self, j: usize) -> (usize, Complex64) {
        let sign = if (j as u64 & self.z).count_ones() % 2 == 1 {
            2
        } else {
            0
        };
        let phase = Phase::from_power(self.y_count() + sign);
        (j ^ self.x as usize, phase.to_complex())
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        Err(Error::PauliWidth {
            max: MAX_QUBITS,
            found: n,
        })
    } else {
        Ok(())
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.paulis() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::InvalidPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_paulis(&ops)
    }
}

/// Operator product of two strings.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<(Phase, PauliString)> {
    a.multiply(b)
}

/// A Hermitian operator `Σ c_t P_t` in canonical form: strings are unique,
/// sorted, and every coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    /// The zero operator on `n_qubits`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        Ok(PauliSum {
            n_qubits,
            terms: Vec::new(),
        })
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Result<Self> {
        Self::new(n_qubits, vec![(coeff, PauliString::identity(n_qubits)?)])
    }

    /// Collects terms into canonical form.
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        check_width(n_qubits)?;
        for (_, p) in &terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    expected: n_qubits,
                    found: p.n_qubits(),
                });
            }
        }
        Ok(Self::merged(n_qubits, terms))
    }

    /// Parses `(coefficient, "XYZI")` pairs.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::ZeroOperator)?;
        let n = first.1.len();
        let parsed = terms
            .iter()
            .map(|&(c, s)| Ok((c, s.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, parsed)
    }

    fn merged(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Self {
        let mut acc: HashMap<PauliString, f64> = HashMap::with_capacity(terms.len());
        for (c, p) in terms {
            *acc.entry(p).or_insert(0.0) += c;
        }
        let mut terms: Vec<(f64, PauliString)> = acc
            .into_iter()
            .filter(|(_, c)| c.abs() >= MERGE_TOL)
            .map(|(p, c)| (c, p))
            .collect();
        terms.sort_by(|a, b| a.1.cmp(&b.1));
        PauliSum { n_qubits, terms }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(f64, PauliString)> {
        self.terms.iter()
    }

    /// Coefficient of the all-identity string (0 if absent).
    pub fn identity_coeff(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, p)| p.is_identity())
            .map_or(0.0, |(c, _)| *c)
    }

    /// Canonical form of an arbitrary collection of terms.
    pub fn merge(&self) -> PauliSum {
        Self::merged(self.n_qubits, self.terms.clone())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        let terms = self.terms.iter().chain(other.terms.iter()).copied().collect();
        Ok(Self::merged(self.n_qubits, terms))
    }

    pub fn scale(&self, factor: f64) -> PauliSum {
        let terms = self.terms.iter().map(|&(c, p)| (c * factor, p)).collect();
        Self::merged(self.n_qubits, terms)
    }

    /// `self + shift · I`.
    pub fn shifted(&self, shift: f64) -> PauliSum {
        let mut terms = self.terms.clone();
        terms.push((shift, PauliString::from_masks(self.n_qubits, 0, 0)));
        Self::merged(self.n_qubits, terms)
    }

    /// `I − γ·H`, the operator applied by one gradient-descent step.
    pub fn gradient_operator(&self, gamma: f64) -> Result<PauliSum> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(self.scale(-gamma).shifted(1.0))
    }

    /// Splits into the I/Z-only part and the part whose strings contain X or Y.
    pub fn split_diagonal(&self) -> (PauliSum, PauliSum) {
        let (diag, off): (Vec<_>, Vec<_>) = self.terms.iter().partition(|(_, p)| p.is_diagonal());
        (
            PauliSum {
                n_qubits: self.n_qubits,
                terms: diag,
            },
            PauliSum {
                n_qubits: self.n_qubits,
                terms: off,
            },
        )
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.is_diagonal())
    }

    /// Sum of |c_t|, an upper bound on the spectral radius.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Diagonal entries `⟨j|H|j⟩` for every basis state.
    pub fn diagonal(&self) -> Vec<f64> {
        let dim = 1usize << self.n_qubits;
        let mut d = vec![0.0; dim];
        for &(c, p) in self.terms.iter().filter(|(_, p)| p.is_diagonal()) {
            let z = p.z_mask();
            for (j, dj) in d.iter_mut().enumerate() {
                if (j as u64 & z).count_ones() % 2 == 1 {
                    *dj -= c;
                } else {
                    *dj += c;
                }
            }
        }
        d
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_capped(DEFAULT_MATRIX_CAP)
    }

    /// Pauli expansion `c_P = Tr(P M)/2^n` of a Hermitian matrix.
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Result<PauliSum> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() {
            return Err(Error::Format(format!("matrix is {}x{}, not 2^n square", dim, m.ncols())));
        }
        let n = dim.trailing_zeros() as usize;
        if n > 8 {
            return Err(Error::TooManyQubits { n, cap: 8 });
        }
        let mut terms = Vec::new();
        for x in 0..dim as u64 {
            for z in 0..dim as u64 {
                let p = PauliString::from_masks(n, x, z);
                let mut tr = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    let (row, amp) = p.apply_to_basis(k);
                    tr += amp * m[(k, row)];
                }
                let c = tr / dim as f64;
                if c.im.abs() > 1e-10 {
                    return Err(Error::ComplexCoefficient { re: c.re, im: c.im });
                }
                terms.push((c.re, p));
            }
        }
        Ok(Self::merged(n, terms))
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > cap {
            return Err(Error::TooManyQubits {
                n: self.n_qubits,
                cap,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for &(c, p) in &self.terms {
            for j in 0..dim {
                let (row, amp) = p.apply_to_basis(j);
                m[(row, j)] += amp * c;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, p) in &self.terms {
            writeln!(f, "{c:+.10} {p}")?;
        }
        Ok(())
    }
}
