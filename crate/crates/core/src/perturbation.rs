//! Rayleigh–Schrödinger corrections about the diagonal part of a qubit
//! Hamiltonian. `H0` holds the I/Z-only strings, `H'` everything else.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lcu;
use crate::pauli::PauliSum;
use crate::state::StateVector;

/// Energy gaps below this are treated as degenerate and skipped.
pub const GAP_TOL: f64 = 1e-8;

/// Largest tolerated fraction of skipped coupling terms.
pub const SKIP_BUDGET: f64 = 0.10;

/// Couplings with `|H'_mn|` below this are treated as absent.
const COUPLING_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// Denominators `E_n − E_m`.
    #[default]
    Standard,
    /// Energy denominators `E_m − E_n` and the double sum built from
    /// `H'_mn H'_kn`.
    Flipped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnperturbedGround {
    pub index: usize,
    pub energy: f64,
    /// Another basis state lies within [`GAP_TOL`] of the minimum.
    pub degenerate: bool,
}

/// Lowest diagonal entry of a diagonal `h0`; ties go to the lowest index.
pub fn unperturbed_ground(h0: &PauliSum) -> Result<UnperturbedGround> {
    if !h0.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    let diag = h0.diagonal();
    let (index, energy) = diag
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one basis state");
    let degenerate = diag
        .iter()
        .enumerate()
        .any(|(j, &e)| j != index && (e - energy).abs() < GAP_TOL);
    Ok(UnperturbedGround {
        index,
        energy,
        degenerate,
    })
}

#[derive(Debug, Clone)]
pub struct PerturbationReport {
    pub index: usize,
    pub e_zero: f64,
    pub h_nn: f64,
    /// `E^(0) + H'_nn`.
    pub e_first_literal: f64,
    pub e_first_rq: f64,
    pub e_second_rq: f64,
    pub e_second_series: f64,
    pub psi_first: StateVector,
    pub psi_second: StateVector,
    pub skipped_terms: usize,
    pub coupled_terms: usize,
    pub degenerate_ground: bool,
}

struct FirstOrder {
    /// `H'_mn` for every `m`, read off one application of `H'` to `|n⟩`.
    column: Vec<Complex64>,
    /// `H'_mn / (E_n − E_m)`, zero at `n` and at skipped entries.
    correction: Vec<Complex64>,
    skipped: usize,
    coupled: usize,
}

fn check_split(h0: &PauliSum, hp: &PauliSum) -> Result<()> {
    if h0.n_qubits() != hp.n_qubits() {
        return Err(Error::QubitMismatch {
            expected: h0.n_qubits(),
            found: hp.n_qubits(),
        });
    }
    if !h0.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    if let Some((_, p)) = hp.iter().find(|(_, p)| p.is_diagonal()) {
        return Err(Error::Config(format!("perturbation contains diagonal string {p}")));
    }
    Ok(())
}

fn first_order(diag: &[f64], hp: &PauliSum, n: usize) -> Result<FirstOrder> {
    let ket = StateVector::basis(hp.n_qubits(), n)?;
    let column = lcu::apply_via_circuit(&ket, hp)?.into_amplitudes();
    let en = diag[n];
    let mut correction = vec![Complex64::new(0.0, 0.0); column.len()];
    let (mut skipped, mut coupled) = (0, 0);
    for (m, h) in column.iter().enumerate() {
        if m == n || h.norm() < COUPLING_TOL {
            continue;
        }
        coupled += 1;
        let gap = en - diag[m];
        if gap.abs() < GAP_TOL {
            skipped += 1;
            continue;
        }
        correction[m] = h / gap;
    }
    Ok(FirstOrder {
        column,
        correction,
        skipped,
        coupled,
    })
}

fn over_budget(skipped: usize, coupled: usize) -> bool {
    coupled > 0 && skipped as f64 > SKIP_BUDGET * coupled as f64
}

/// `|n⟩ + Σ_{m≠n} H'_mn/(E_n − E_m)|m⟩`, normalized.
pub fn first_order_state(h0: &PauliSum, hp: &PauliSum, n: usize) -> Result<StateVector> {
    check_split(h0, hp)?;
    let diag = h0.diagonal();
    let fo = first_order(&diag, hp, n)?;
    if over_budget(fo.skipped, fo.coupled) {
        return Err(Error::DegenerateGround { tol: GAP_TOL });
    }
    let mut amps = fo.correction;
    amps[n] = Complex64::new(1.0, 0.0);
    StateVector::from_amplitudes(hp.n_qubits(), amps)?.normalized()
}

/// First- and second-order corrections about basis state `n`.
pub fn second_order(
    h0: &PauliSum,
    hp: &PauliSum,
    n: usize,
    convention: SignConvention,
) -> Result<PerturbationReport> {
    check_split(h0, hp)?;
    let nq = hp.n_qubits();
    let diag = h0.diagonal();
    let en = diag[n];
    let fo = first_order(&diag, hp, n)?;
    let h_nn = fo.column[n].re;
    if fo.column[n].norm() > 1e-12 {
        return Err(Error::Config(format!("H'_nn = {} is not zero", fo.column[n])));
    }

    let mut second_skipped = 0;
    let mut series = 0.0;
    for (m, h) in fo.column.iter().enumerate() {
        if m == n || fo.correction[m] == Complex64::new(0.0, 0.0) {
            continue;
        }
        series += h.norm_sqr() / (en - diag[m]);
    }
    if convention == SignConvention::Flipped {
        series = -series;
    }

    let c1 = &fo.correction;
    let norm_term = -0.5 * c1.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let double: Vec<Complex64> = match convention {
        SignConvention::Standard => {
            let v = StateVector::from_amplitudes(nq, c1.clone())?;
            let w = lcu::apply_via_circuit(&v, hp)?.into_amplitudes();
            w.iter()
                .enumerate()
                .map(|(m, wm)| {
                    if m == n || wm.norm() < COUPLING_TOL {
                        return Complex64::new(0.0, 0.0);
                    }
                    let gap = en - diag[m];
                    if gap.abs() < GAP_TOL {
                        second_skipped += 1;
                        Complex64::new(0.0, 0.0)
                    } else {
                        wm / gap
                    }
                })
                .collect()
        }
        SignConvention::Flipped => {
            let total: Complex64 = c1.iter().sum();
            c1.iter().map(|c| c * total).collect()
        }
    };

    let skipped = fo.skipped + second_skipped;
    if over_budget(fo.skipped, fo.coupled) {
        return Err(Error::SkipBudget {
            skipped,
            total: fo.coupled,
        });
    }

    let h = h0.add(hp)?;
    let mut first = c1.clone();
    first[n] = Complex64::new(1.0, 0.0);
    let psi_first = StateVector::from_amplitudes(nq, first.clone())?.normalized()?;
    let mut second: Vec<Complex64> = first.iter().zip(&double).map(|(a, b)| a + b).collect();
    second[n] += Complex64::new(norm_term, 0.0);
    let psi_second = StateVector::from_amplitudes(nq, second)?.normalized()?;

    Ok(PerturbationReport {
        index: n,
        e_zero: en,
        h_nn,
        e_first_literal: en + h_nn,
        e_first_rq: psi_first.expectation(&h)?,
        e_second_rq: psi_second.expectation(&h)?,
        e_second_series: en + series,
        psi_first,
        psi_second,
        skipped_terms: skipped,
        coupled_terms: fo.coupled,
        degenerate_ground: fo.skipped > 0,
    })
}

/// Splits `h` by Pauli letters and expands about the lowest diagonal entry.
pub fn perturb(h: &PauliSum, convention: SignConvention) -> Result<(UnperturbedGround, PerturbationReport)> {
    let (h0, hp) = h.split_diagonal();
    let ground = unperturbed_ground(&h0)?;
    let report = second_order(&h0, &hp, ground.index, convention)?;
    Ok((ground, report))
}
