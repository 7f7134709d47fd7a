//! Second-quantized Hamiltonians built from integral tables, and their
//! Jordan-Wigner images.
//!
//! Spin-orbital `j` maps to qubit `j`, occupied ↔ `|1⟩`, with the parity
//! string on all lower indices:
//! `a_j = ½(X_j + iY_j) Z_{j−1}⋯Z_0`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum, MERGE_TOL};

/// Symmetry checks on integral tables use this tolerance.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Imaginary residues of Jordan-Wigner coefficients above this signal a
/// non-Hermitian input.
pub const JW_IMAG_TOL: f64 = 1e-10;

/// Two-body index convention of an integral file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoBodyOrdering {
    /// `h_two[i,j,k,l] = ⟨ij|kl⟩`.
    Physicist,
    /// `h_two[i,j,k,l] = (ij|kl) = ⟨ik|jl⟩`.
    Chemist,
}

/// How spin-orbitals are laid out in an integral file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinLayout {
    /// `0α, 0β, 1α, 1β, …`
    Interleaved,
    /// `0α, 1α, …, 0β, 1β, …`
    Blocked,
}

/// One- and two-body coefficients of a second-quantized Hamiltonian over
/// `n_orbitals` spin-orbitals, in atomic units. Two-body entries are stored
/// physicist-ordered, `⟨ij|kl⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralTable {
    n_orbitals: usize,
    h_one: Vec<f64>,
    h_two: Vec<f64>,
    e_const: f64,
}

impl IntegralTable {
    pub fn new(n_orbitals: usize, h_one: Vec<f64>, h_two: Vec<f64>, e_const: f64) -> Result<Self> {
        if n_orbitals == 0 || n_orbitals > 32 {
            return Err(Error::Config(format!("unsupported orbital count {n_orbitals}")));
        }
        let n = n_orbitals;
        if h_one.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: h_one.len(),
            });
        }
        if h_two.len() != n * n * n * n {
            return Err(Error::LengthMismatch {
                expected: n * n * n * n,
                found: h_two.len(),
            });
        }
        let t = IntegralTable {
            n_orbitals,
            h_one,
            h_two,
            e_const,
        };
        t.validate()?;
        Ok(t)
    }

    /// A table with all-zero integrals.
    pub fn zeros(n_orbitals: usize, e_const: f64) -> Result<Self> {
        let n = n_orbitals;
        Self::new(n, vec![0.0; n * n], vec![0.0; n * n * n * n], e_const)
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn e_const(&self) -> f64 {
        self.e_const
    }

    pub fn one_body(&self, i: usize, j: usize) -> f64 {
        self.h_one[i * self.n_orbitals + j]
    }

    /// `⟨ij|kl⟩`.
    pub fn two_body(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.h_two[self.idx4(i, j, k, l)]
    }

    fn idx4(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        let n = self.n_orbitals;
        ((i * n + j) * n + k) * n + l
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_orbitals;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.one_body(i, j), self.one_body(j, i));
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::Symmetry(format!("h_one[{i}][{j}]={a} but h_one[{j}][{i}]={b}")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.two_body(i, j, k, l);
                        let swapped = self.two_body(j, i, l, k);
                        if (v - swapped).abs() > SYMMETRY_TOL {
                            return Err(Error::Symmetry(format!(
                                "<{i}{j}|{k}{l}>={v} but <{j}{i}|{l}{k}>={swapped}"
                            )));
                        }
                        let adjoint = self.two_body(k, l, i, j);
                        if (v - adjoint).abs() > SYMMETRY_TOL {
                            return Err(Error::Symmetry(format!(
                                "<{i}{j}|{k}{l}>={v} but <{k}{l}|{i}{j}>={adjoint} (not Hermitian)"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A single creation (`dagger`) or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub orbital: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(orbital: usize) -> Self {
        Ladder {
            orbital,
            dagger: true,
        }
    }

    pub fn annihilate(orbital: usize) -> Self {
        Ladder {
            orbital,
            dagger: false,
        }
    }
}

/// A real linear combination of ladder-operator products. The empty
/// product is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionOperator {
    n_orbitals: usize,
    terms: Vec<(f64, Vec<Ladder>)>,
}

impl FermionOperator {
    pub fn new(n_orbitals: usize, terms: Vec<(f64, Vec<Ladder>)>) -> Result<Self> {
        for (_, ops) in &terms {
            if let Some(bad) = ops.iter().find(|op| op.orbital >= n_orbitals) {
                return Err(Error::Config(format!(
                    "orbital {} out of range for {n_orbitals} orbitals",
                    bad.orbital
                )));
            }
        }
        Ok(FermionOperator { n_orbitals, terms })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn terms(&self) -> &[(f64, Vec<Ladder>)] {
        &self.terms
    }

    /// Terms are closed under conjugate-reversal with equal coefficients.
    pub fn is_hermitian(&self) -> bool {
        let mut coeffs: HashMap<&[Ladder], f64> = HashMap::new();
        for (c, ops) in &self.terms {
            *coeffs.entry(ops.as_slice()).or_insert(0.0) += c;
        }
        coeffs.iter().all(|(ops, &c)| {
            let adj: Vec<Ladder> = ops
                .iter()
                .rev()
                .map(|op| Ladder {
                    orbital: op.orbital,
                    dagger: !op.dagger,
                })
                .collect();
            let other = coeffs.get(adj.as_slice()).copied().unwrap_or(0.0);
            (c - other).abs() <= SYMMETRY_TOL
        })
    }
}

/// `Σ h_ij a†_i a_j + ½ Σ ⟨ij|kl⟩ a†_i a†_j a_l a_k + e_const`.
///
/// The annihilators of the two-body term are written in the order that
/// makes `⟨ij|kl⟩` the Coulomb matrix element (electron 1 goes `k → i`,
/// electron 2 goes `l → j`); no normal-ordering corrections are folded into
/// the one-body part.
pub fn hamiltonian_from_integrals(t: &IntegralTable) -> Result<FermionOperator> {
    t.validate()?;
    let n = t.n_orbitals;
    let mut terms = Vec::new();
    if t.e_const.abs() >= MERGE_TOL {
        terms.push((t.e_const, Vec::new()));
    }
    for i in 0..n {
        for j in 0..n {
            let h = t.one_body(i, j);
            if h.abs() >= MERGE_TOL {
                terms.push((h, vec![Ladder::create(i), Ladder::annihilate(j)]));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let h = 0.5 * t.two_body(i, j, k, l);
                    if h.abs() >= MERGE_TOL {
                        terms.push((
                            h,
                            vec![
                                Ladder::create(i),
                                Ladder::create(j),
                                Ladder::annihilate(l),
                                Ladder::annihilate(k),
                            ],
                        ));
                    }
                }
            }
        }
    }
    FermionOperator::new(n, terms)
}

type ComplexTerms = Vec<(Complex64, PauliString)>;

fn ladder_image(n: usize, op: Ladder) -> ComplexTerms {
    let j = op.orbital;
    let tail = (1u64 << j) - 1;
    let bit = 1u64 << j;
    let x = PauliString::from_masks(n, bit, tail);
    let y = PauliString::from_masks(n, bit, tail | bit);
    let iy = if op.dagger { -0.5 } else { 0.5 };
    vec![(Complex64::new(0.5, 0.0), x), (Complex64::new(0.0, iy), y)]
}

fn multiply_expansions(a: &ComplexTerms, b: &ComplexTerms) -> ComplexTerms {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (ca, pa) in a {
        for (cb, pb) in b {
            let (phase, p) = pa.multiply(pb).expect("same width");
            out.push((ca * cb * phase.to_complex(), p));
        }
    }
    out
}

/// Maps a Hermitian fermionic operator to a canonical [`PauliSum`].
pub fn jordan_wigner(f: &FermionOperator, n_orbitals: usize) -> Result<PauliSum> {
    if n_orbitals < f.n_orbitals {
        return Err(Error::Config(format!(
            "operator uses {} orbitals but only {n_orbitals} qubits requested",
            f.n_orbitals
        )));
    }
    let n = n_orbitals;
    let images: Vec<[ComplexTerms; 2]> = (0..n)
        .map(|j| [ladder_image(n, Ladder::annihilate(j)), ladder_image(n, Ladder::create(j))])
        .collect();
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
    let identity = PauliString::identity(n)?;
    for (c, ops) in &f.terms {
        let mut expansion: ComplexTerms = vec![(Complex64::new(*c, 0.0), identity)];
        for op in ops {
            expansion = multiply_expansions(&expansion, &images[op.orbital][op.dagger as usize]);
        }
        for (c, p) in expansion {
            *acc.entry(p).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
    let residual = acc.values().map(|c| c.im.abs()).fold(0.0, f64::max);
    if residual > JW_IMAG_TOL {
        return Err(Error::NonHermitian { residual });
    }
    PauliSum::new(n, acc.into_iter().map(|(p, c)| (c.re, p)).collect())
}

/// On-disk integral table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegralFile {
    pub n_orbitals: usize,
    pub ordering: TwoBodyOrdering,
    pub spin_layout: SpinLayout,
    pub e_const: f64,
    pub h_one: Vec<Vec<f64>>,
    /// Nonzero entries as `[i, j, k, l, value]`.
    pub h_two: Vec<[f64; 5]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_electrons: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Value>,
}

impl IntegralFile {
    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    /// Converts to an interleaved, physicist-ordered table. `ordering`
    /// overrides the file's declared two-body convention when given.
    pub fn to_table(&self, ordering: Option<TwoBodyOrdering>) -> Result<IntegralTable> {
        let n = self.n_orbitals;
        if self.h_one.len() != n || self.h_one.iter().any(|row| row.len() != n) {
            return Err(Error::Format(format!("h_one must be {n}x{n}")));
        }
        if self.spin_layout == SpinLayout::Blocked && n % 2 != 0 {
            return Err(Error::Format("blocked spin layout needs an even orbital count".into()));
        }
        // file index -> interleaved index
        let map = |p: usize| match self.spin_layout {
            SpinLayout::Interleaved => p,
            SpinLayout::Blocked => {
                let half = n / 2;
                if p < half {
                    2 * p
                } else {
                    2 * (p - half) + 1
                }
            }
        };
        let mut h_one = vec![0.0; n * n];
        for (i, row) in self.h_one.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                h_one[map(i) * n + map(j)] = v;
            }
        }
        let mut h_two = vec![0.0; n * n * n * n];
        let ordering = ordering.unwrap_or(self.ordering);
        for (entry, e) in self.h_two.iter().enumerate() {
            let mut idx = [0usize; 4];
            for (slot, &v) in idx.iter_mut().zip(&e[..4]) {
                if v < 0.0 || v.fract() != 0.0 || v as usize >= n {
                    return Err(Error::Parse {
                        line: entry + 1,
                        msg: format!("bad h_two index {v}"),
                    });
                }
                *slot = map(v as usize);
            }
            let [a, b, c, d] = idx;
            let (i, j, k, l) = match ordering {
                TwoBodyOrdering::Physicist => (a, b, c, d),
                // (ab|cd) = ⟨ac|bd⟩
                TwoBodyOrdering::Chemist => (a, c, b, d),
            };
            h_two[((i * n + j) * n + k) * n + l] = e[4];
        }
        IntegralTable::new(n, h_one, h_two, self.e_const)
    }
}
