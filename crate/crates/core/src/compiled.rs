//! Pauli sums regrouped by X-mask for repeated application.
//!
//! Every string with flip pattern `x` maps `|j⟩` to `|j ⊕ x⟩`, so a group
//! collapses to one diagonal vector `d_x[j] = Σ c·i^{ny}(−1)^{|j∧z|}` and
//! `(H|ψ⟩)[j ⊕ x] = Σ_x d_x[j] ψ[j]`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Phase, PauliSum};
use crate::state::StateVector;

/// Diagonal of one flip group. Real coefficients make `H` Hermitian, so
/// `d_x[j ⊕ x] = conj(d_x[j])` and only indices with the top bit of `x`
/// clear are stored, in increasing order. Groups whose strings all carry
/// an even number of `Y`s have a real diagonal.
#[derive(Debug, Clone, PartialEq)]
enum Diagonal {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
struct Group {
    x: usize,
    /// Highest set bit of `x`; zero for the diagonal group.
    top: usize,
    d: Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledSum {
    n_qubits: usize,
    groups: Vec<Group>,
}

/// Indices `j` with `j & top == 0`, in order; every index when `top == 0`.
fn low_indices(dim: usize, top: usize) -> impl Iterator<Item = usize> {
    let step = if top == 0 { dim } else { 2 * top };
    let width = if top == 0 { dim } else { top };
    (0..dim).step_by(step).flat_map(move |base| base..base + width)
}

impl CompiledSum {
    pub fn new(h: &PauliSum) -> Self {
        let n = h.n_qubits();
        let dim = 1usize << n;
        let mut by_x: BTreeMap<u64, Vec<(Complex64, u64)>> = BTreeMap::new();
        for &(c, p) in h.iter() {
            let w = Phase::from_power(p.y_count()).to_complex() * c;
            by_x.entry(p.x_mask()).or_default().push((w, p.z_mask()));
        }
        let groups = by_x
            .into_iter()
            .map(|(x, terms)| {
                let x = x as usize;
                let top = if x == 0 { 0 } else { 1usize << (usize::BITS - 1 - x.leading_zeros()) };
                let value = |j: usize| -> Complex64 {
                    terms
                        .iter()
                        .map(|&(w, z)| if (j as u64 & z).count_ones() & 1 == 1 { -w } else { w })
                        .sum()
                };
                let real = terms.iter().all(|(w, _)| w.im == 0.0);
                let d = if real {
                    Diagonal::Real(low_indices(dim, top).map(|j| value(j).re).collect())
                } else {
                    Diagonal::Complex(low_indices(dim, top).map(value).collect())
                };
                Group { x, top, d }
            })
            .collect();
        CompiledSum { n_qubits: n, groups }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    /// `dst += H src`.
    pub fn accumulate(&self, src: &[Complex64], dst: &mut [Complex64]) {
        let dim = src.len();
        for g in &self.groups {
            let x = g.x;
            match (&g.d, x) {
                (Diagonal::Real(d), 0) => {
                    for ((o, a), dj) in dst.iter_mut().zip(src).zip(d) {
                        *o += a * dj;
                    }
                }
                (Diagonal::Complex(d), 0) => {
                    for ((o, a), dj) in dst.iter_mut().zip(src).zip(d) {
                        *o += a * dj.re;
                    }
                }
                (Diagonal::Real(d), _) => {
                    for (base, db) in (0..dim).step_by(2 * g.top).zip(d.chunks_exact(g.top)) {
                        let (lo, hi) = dst[base..base + 2 * g.top].split_at_mut(g.top);
                        let (slo, shi) = src[base..base + 2 * g.top].split_at(g.top);
                        let xl = x ^ g.top;
                        for (r, dj) in db.iter().enumerate() {
                            hi[r ^ xl] += slo[r] * dj;
                            lo[r] += shi[r ^ xl] * dj;
                        }
                    }
                }
                (Diagonal::Complex(d), _) => {
                    for (base, db) in (0..dim).step_by(2 * g.top).zip(d.chunks_exact(g.top)) {
                        let (lo, hi) = dst[base..base + 2 * g.top].split_at_mut(g.top);
                        let (slo, shi) = src[base..base + 2 * g.top].split_at(g.top);
                        let xl = x ^ g.top;
                        for (r, dj) in db.iter().enumerate() {
                            hi[r ^ xl] += slo[r] * dj;
                            lo[r] += shi[r ^ xl] * dj.conj();
                        }
                    }
                }
            }
        }
    }

    fn check(&self, x: &StateVector) -> Result<()> {
        if x.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits,
                found: x.n_qubits(),
            });
        }
        Ok(())
    }

    /// `H|x⟩`, not normalized.
    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        self.check(x)?;
        let mut out = vec![Complex64::new(0.0, 0.0); x.dim()];
        self.accumulate(x.amplitudes(), &mut out);
        StateVector::from_amplitudes(self.n_qubits, out)
    }

    /// Each off-diagonal pair contributes `2·Re(conj(ψ[j⊕x]) d_x[j] ψ[j])`.
    fn raw_expectation(&self, amps: &[Complex64]) -> f64 {
        let dim = amps.len();
        let mut total = 0.0;
        for g in &self.groups {
            let x = g.x;
            match (&g.d, x) {
                (Diagonal::Real(d), 0) => {
                    total += amps.iter().zip(d).map(|(a, dj)| a.norm_sqr() * dj).sum::<f64>();
                }
                (Diagonal::Complex(d), 0) => {
                    total += amps.iter().zip(d).map(|(a, dj)| a.norm_sqr() * dj.re).sum::<f64>();
                }
                (Diagonal::Real(d), _) => {
                    let xl = x ^ g.top;
                    let mut pair = 0.0;
                    for (base, db) in (0..dim).step_by(2 * g.top).zip(d.chunks_exact(g.top)) {
                        let (lo, hi) = amps[base..base + 2 * g.top].split_at(g.top);
                        for (r, dj) in db.iter().enumerate() {
                            let (a, b) = (lo[r], hi[r ^ xl]);
                            pair += (b.re * a.re + b.im * a.im) * dj;
                        }
                    }
                    total += 2.0 * pair;
                }
                (Diagonal::Complex(d), _) => {
                    let xl = x ^ g.top;
                    let mut pair = 0.0;
                    for (base, db) in (0..dim).step_by(2 * g.top).zip(d.chunks_exact(g.top)) {
                        let (lo, hi) = amps[base..base + 2 * g.top].split_at(g.top);
                        for (r, dj) in db.iter().enumerate() {
                            let (a, b) = (lo[r], hi[r ^ xl]);
                            pair += (b.re * a.re + b.im * a.im) * dj.re - (b.re * a.im - b.im * a.re) * dj.im;
                        }
                    }
                    total += 2.0 * pair;
                }
            }
        }
        total
    }

    /// `⟨x|H|x⟩` for a normalized state.
    pub fn expectation(&self, x: &StateVector) -> Result<f64> {
        self.check(x)?;
        x.require_normalized()?;
        Ok(self.raw_expectation(x.amplitudes()))
    }
}
