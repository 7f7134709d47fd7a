//! One gradient step `|x⟩ ↦ H^g|x⟩ / ‖H^g|x⟩‖` realized as a linear
//! combination of unitaries.
//!
//! The circuit has four stages: the ancilla register is prepared in
//! `Σ β_i/C |i⟩`, slit `i` applies Pauli string `H^g_i` to the work register
//! under control of ancilla state `|i⟩`, Hadamards on every ancilla qubit
//! recombine the slits, and projecting the ancilla onto `|0…0⟩` leaves
//! `H^g|x⟩ / (C·√2^m)` in the work register.
//!
//! Composite states are laid out ancilla-major: index `a·2^n + w`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::compiled::CompiledSum;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::state::{accumulate_pauli, StateVector};

/// Above this many total qubits (`m + n`) [`lcu_step`] evaluates the
/// post-selected branch without materializing the composite register.
pub const COMPOSITE_QUBIT_CAP: usize = 18;

/// Coefficients and unit Pauli strings of `H^g = Σ β_i H^g_i`, padded with
/// zero-weight identity slits up to `2^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuDecomposition {
    betas: Vec<f64>,
    strings: Vec<PauliString>,
    n_terms: usize,
    big_c: f64,
    m_ancilla: usize,
    /// Grouped form of `H^g` for the streamed path.
    streamed: Option<CompiledSum>,
}

impl LcuDecomposition {
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    /// `M`, the number of nonzero terms before padding.
    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// `C = √(Σ β_i²)`.
    pub fn normalization(&self) -> f64 {
        self.big_c
    }

    pub fn m_ancilla(&self) -> usize {
        self.m_ancilla
    }

    pub fn n_slits(&self) -> usize {
        1 << self.m_ancilla
    }

    pub fn work_qubits(&self) -> usize {
        self.strings[0].n_qubits()
    }

    /// Closed-form estimate of elementary gates per step, `M·log₂M·log₂N`
    /// with `N = 2^n`; logarithms are clamped at 1.
    pub fn estimated_gate_count(&self) -> f64 {
        let m = self.n_terms as f64;
        m * m.log2().max(1.0) * (self.work_qubits() as f64).max(1.0)
    }

    /// Expected repetitions per step with oblivious amplitude amplification,
    /// `⌈√(2^m)⌉`.
    pub fn amplified_repetitions(&self) -> f64 {
        (self.n_slits() as f64).sqrt().ceil()
    }
}

/// Splits `hg` into signed coefficients and unit Pauli strings.
pub fn decompose(hg: &PauliSum) -> Result<LcuDecomposition> {
    if hg.is_empty() {
        return Err(Error::ZeroOperator);
    }
    let n_terms = hg.len();
    let m_ancilla = n_terms.next_power_of_two().trailing_zeros() as usize;
    let slots = 1usize << m_ancilla;
    let identity = PauliString::identity(hg.n_qubits())?;
    let mut betas = Vec::with_capacity(slots);
    let mut strings = Vec::with_capacity(slots);
    for &(c, p) in hg.iter() {
        betas.push(c);
        strings.push(p);
    }
    betas.resize(slots, 0.0);
    strings.resize(slots, identity);
    let big_c = betas.iter().map(|b| b * b).sum::<f64>().sqrt();
    let streamed = (m_ancilla + hg.n_qubits() > COMPOSITE_QUBIT_CAP).then(|| CompiledSum::new(hg));
    Ok(LcuDecomposition {
        betas,
        strings,
        n_terms,
        big_c,
        m_ancilla,
        streamed,
    })
}

/// Ancilla amplitudes `β_i / C`.
pub fn prepare_ancilla(d: &LcuDecomposition) -> Vec<Complex64> {
    d.betas
        .iter()
        .map(|b| Complex64::new(b / d.big_c, 0.0))
        .collect()
}

/// Ancilla ⊗ work register.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    ancilla_qubits: usize,
    work_qubits: usize,
    amps: Vec<Complex64>,
}

impl CompositeState {
    /// `|ancilla⟩ ⊗ |work⟩`.
    pub fn product(ancilla: &[Complex64], work: &StateVector) -> Result<Self> {
        if !ancilla.len().is_power_of_two() {
            return Err(Error::Config("ancilla length must be a power of two".into()));
        }
        let ancilla_qubits = ancilla.len().trailing_zeros() as usize;
        let w = work.amplitudes();
        let mut amps = Vec::with_capacity(ancilla.len() * w.len());
        for a in ancilla {
            amps.extend(w.iter().map(|x| a * x));
        }
        Ok(CompositeState {
            ancilla_qubits,
            work_qubits: work.n_qubits(),
            amps,
        })
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn work_qubits(&self) -> usize {
        self.work_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Work-register block conditioned on ancilla basis state `a`.
    pub fn block(&self, a: usize) -> &[Complex64] {
        let w = 1usize << self.work_qubits;
        &self.amps[a * w..(a + 1) * w]
    }

    /// Hadamard on every ancilla qubit: a Walsh-Hadamard transform over the
    /// block index with `1/√2` per qubit.
    fn hadamard_ancillas(&mut self) {
        let w = 1usize << self.work_qubits;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for q in 0..self.ancilla_qubits {
            let stride = 1usize << q;
            for a in 0..(1usize << self.ancilla_qubits) {
                if a & stride != 0 {
                    continue;
                }
                let (lo, hi) = (a * w, (a | stride) * w);
                for k in 0..w {
                    let u = self.amps[lo + k];
                    let v = self.amps[hi + k];
                    self.amps[lo + k] = (u + v) * s;
                    self.amps[hi + k] = (u - v) * s;
                }
            }
        }
    }
}

/// Controlled application of slit string `H^g_i` on the block of ancilla
/// state `|i⟩`. Padding slits are identities.
pub fn entangle(c: &CompositeState, d: &LcuDecomposition) -> Result<CompositeState> {
    if c.ancilla_qubits != d.m_ancilla || c.work_qubits != d.work_qubits() {
        return Err(Error::QubitMismatch {
            expected: d.m_ancilla + d.work_qubits(),
            found: c.ancilla_qubits + c.work_qubits,
        });
    }
    let w = 1usize << c.work_qubits;
    let mut amps = vec![Complex64::new(0.0, 0.0); c.amps.len()];
    for (i, p) in d.strings.iter().enumerate() {
        let src = &c.amps[i * w..(i + 1) * w];
        let dst = &mut amps[i * w..(i + 1) * w];
        accumulate_pauli(src, dst, p, Complex64::new(1.0, 0.0));
    }
    Ok(CompositeState {
        ancilla_qubits: c.ancilla_qubits,
        work_qubits: c.work_qubits,
        amps,
    })
}

/// Result of one post-selected LCU step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next_state: StateVector,
    /// Probability of measuring the ancilla in `|0…0⟩`.
    pub success_probability: f64,
    /// Expected attempts without amplification, `1/P_s`.
    pub direct_repetitions: f64,
    /// Repetitions charged with oblivious amplitude amplification.
    pub amplified_repetitions: f64,
    /// `‖H^g|x⟩‖` recovered from the branch norm, `√P_s · C · √2^m`.
    pub operator_norm: f64,
}

fn outcome_from_branch(
    branch: Vec<Complex64>,
    n_qubits: usize,
    d: &LcuDecomposition,
    x_norm_sq: f64,
) -> Result<StepOutcome> {
    let branch = StateVector::from_amplitudes(n_qubits, branch)?;
    let p = branch.norm_sqr() / x_norm_sq;
    if !(p > f64::MIN_POSITIVE) {
        return Err(Error::ZeroNorm);
    }
    let next_state = branch.normalized()?;
    Ok(StepOutcome {
        next_state,
        success_probability: p,
        direct_repetitions: 1.0 / p,
        amplified_repetitions: d.amplified_repetitions(),
        operator_norm: (p * x_norm_sq).sqrt() * d.big_c * (d.n_slits() as f64).sqrt(),
    })
}

/// Hadamards on the ancillas, then projection onto ancilla `|0…0⟩`.
/// `x_norm_sq` is the squared norm of the work state fed into the circuit.
pub fn combine_and_postselect(
    c: &CompositeState,
    d: &LcuDecomposition,
    x_norm_sq: f64,
) -> Result<StepOutcome> {
    if c.ancilla_qubits != d.m_ancilla {
        return Err(Error::QubitMismatch {
            expected: d.m_ancilla,
            found: c.ancilla_qubits,
        });
    }
    let mut combined = c.clone();
    combined.hadamard_ancillas();
    let branch = combined.block(0).to_vec();
    outcome_from_branch(branch, c.work_qubits, d, x_norm_sq)
}

/// Ancilla-zero branch computed slit by slit: projecting `H^{⊗m}` onto
/// `⟨0…0|` weights every slit by `1/√2^m`, so the branch is
/// `Σ_i (β_i/C)(1/√2^m) H^g_i|x⟩`.
fn projected_branch(x: &StateVector, d: &LcuDecomposition) -> Vec<Complex64> {
    let weight = 1.0 / (d.big_c * (d.n_slits() as f64).sqrt());
    let mut out = vec![Complex64::new(0.0, 0.0); x.dim()];
    match &d.streamed {
        Some(compiled) => {
            compiled.accumulate(x.amplitudes(), &mut out);
            for a in &mut out {
                *a *= weight;
            }
        }
        None => {
            for (b, p) in d.betas.iter().zip(&d.strings) {
                if *b != 0.0 {
                    accumulate_pauli(x.amplitudes(), &mut out, p, Complex64::new(b * weight, 0.0));
                }
            }
        }
    }
    out
}

/// Runs the four stages for a normalized work state.
pub fn lcu_step(x: &StateVector, hg: &PauliSum) -> Result<StepOutcome> {
    let d = decompose(hg)?;
    lcu_step_with(x, &d)
}

/// [`lcu_step`] with a precomputed decomposition.
pub fn lcu_step_with(x: &StateVector, d: &LcuDecomposition) -> Result<StepOutcome> {
    x.require_normalized()?;
    if x.n_qubits() != d.work_qubits() {
        return Err(Error::QubitMismatch {
            expected: d.work_qubits(),
            found: x.n_qubits(),
        });
    }
    if d.m_ancilla + x.n_qubits() > COMPOSITE_QUBIT_CAP {
        return outcome_from_branch(projected_branch(x, d), x.n_qubits(), d, 1.0);
    }
    let ancilla = prepare_ancilla(d);
    let composite = CompositeState::product(&ancilla, x)?;
    let entangled = entangle(&composite, d)?;
    combine_and_postselect(&entangled, d, 1.0)
}

/// `H|x⟩` for an arbitrary (unnormalized) vector, obtained from one circuit
/// use: the post-selected state is rescaled by the operator norm recovered
/// from the success probability. A zero operator or zero vector gives zero.
pub fn apply_via_circuit(x: &StateVector, h: &PauliSum) -> Result<StateVector> {
    let norm = x.norm();
    if h.is_empty() || norm == 0.0 {
        return StateVector::from_amplitudes(
            x.n_qubits(),
            vec![Complex64::new(0.0, 0.0); x.dim()],
        );
    }
    let unit = x.clone().normalized()?;
    match lcu_step(&unit, h) {
        Ok(out) => {
            let mut v = out.next_state;
            v.scale(Complex64::new(out.operator_norm * norm, 0.0));
            Ok(v)
        }
        Err(Error::ZeroNorm) => StateVector::from_amplitudes(
            x.n_qubits(),
            vec![Complex64::new(0.0, 0.0); x.dim()],
        ),
        Err(e) => Err(e),
    }
}

/// Attempts until the ancilla first reads `|0…0⟩` when each succeeds with
/// probability `p`. Only used for cost reporting; the state always comes
/// from exact projection.
pub fn sample_attempts<R: Rng>(p: f64, rng: &mut R) -> Result<u64> {
    let g = Geometric::new(p).map_err(|_| Error::Config(format!("success probability {p} outside (0, 1]")))?;
    if p == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(g.sample(rng) + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn sampled_attempts_average_inverse_probability() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_attempts(1.0, &mut rng).unwrap(), 1);
        let mean = (0..20000).map(|_| sample_attempts(0.25, &mut rng).unwrap() as f64).sum::<f64>() / 20000.0;
        assert!((mean - 4.0).abs() < 0.1, "{mean}");
        assert!(sample_attempts(0.0, &mut rng).is_err());
        assert!(sample_attempts(1.5, &mut rng).is_err());
    }

    fn plus() -> StateVector {
        StateVector::from_real(1, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    fn z_gradient() -> PauliSum {
        PauliSum::from_labels(&[(1.0, "Z")])
            .unwrap()
            .gradient_operator(1.0)
            .unwrap()
    }

    #[test]
    fn decompose_two_terms() {
        let d = decompose(&z_gradient()).unwrap();
        assert_eq!(d.betas(), &[1.0, -1.0]);
        assert!((d.normalization() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.m_ancilla(), 1);
        assert_eq!(d.n_terms(), 2);
    }

    #[test]
    fn decompose_single_term_and_zero() {
        let d = decompose(&PauliSum::from_labels(&[(0.5, "X")]).unwrap()).unwrap();
        assert_eq!((d.n_terms(), d.m_ancilla()), (1, 0));
        assert!(matches!(
            decompose(&PauliSum::zero(2).unwrap()),
            Err(Error::ZeroOperator)
        ));
    }

    #[test]
    fn decompose_pads_to_power_of_two() {
        let h = PauliSum::from_labels(&[(1.0, "ZI"), (0.5, "IZ"), (0.25, "XX")]).unwrap();
        let d = decompose(&h).unwrap();
        assert_eq!(d.n_slits(), 4);
        assert_eq!(d.betas()[3], 0.0);
        assert!(d.strings()[3].is_identity());
    }

    #[test]
    fn ancilla_amplitudes() {
        let a = prepare_ancilla(&decompose(&z_gradient()).unwrap());
        assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((a[1].re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn single_slit_is_plain_unitary() {
        let h = PauliSum::from_labels(&[(0.5, "X")]).unwrap();
        let out = lcu_step(&StateVector::basis(1, 0).unwrap(), &h).unwrap();
        assert!((out.next_state.amplitudes()[1].re - 1.0).abs() < 1e-15);
        assert!((out.success_probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entangle_blocks_for_z_gradient() {
        // Ancilla (1/√2, −1/√2) ⊗ |+⟩ → block 0 = |+⟩/√2, block 1 = −Z|+⟩/√2 = −|−⟩/√2.
        let d = decompose(&z_gradient()).unwrap();
        let c = CompositeState::product(&prepare_ancilla(&d), &plus()).unwrap();
        let e = entangle(&c, &d).unwrap();
        let b0 = e.block(0);
        let b1 = e.block(1);
        assert!((b0[0].re - 0.5).abs() < 1e-15 && (b0[1].re - 0.5).abs() < 1e-15);
        assert!((b1[0].re + 0.5).abs() < 1e-15 && (b1[1].re - 0.5).abs() < 1e-15);
        assert!((e.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn z_gradient_on_plus() {
        let out = lcu_step(&plus(), &z_gradient()).unwrap();
        assert!((out.next_state.amplitudes()[1].re - 1.0).abs() < 1e-14);
        assert!((out.success_probability - 0.5).abs() < 1e-14);
        assert!((out.direct_repetitions - 2.0).abs() < 1e-13);
        assert!((out.operator_norm - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn eigenvector_is_fixed_point() {
        let one = StateVector::basis(1, 1).unwrap();
        let out = lcu_step(&one, &z_gradient()).unwrap();
        assert!((out.next_state.amplitudes()[1].re - 1.0).abs() < 1e-14);
        assert!((out.operator_norm - 2.0).abs() < 1e-14);
    }

    #[test]
    fn annihilated_state_is_an_error() {
        // H = Z, γ = 1: H^g = I − Z kills |0⟩.
        let zero = StateVector::basis(1, 0).unwrap();
        assert!(matches!(lcu_step(&zero, &z_gradient()), Err(Error::ZeroNorm)));
    }

    #[test]
    fn streamed_branch_matches_composite() {
        let h = PauliSum::from_labels(&[(0.3, "XZ"), (-0.7, "ZI"), (0.2, "YY")]).unwrap();
        let x = StateVector::from_real(2, &[0.5, -0.5, 0.5, 0.5]).unwrap();
        let d = decompose(&h).unwrap();
        let full = lcu_step(&x, &h).unwrap();
        let streamed = outcome_from_branch(projected_branch(&x, &d), 2, &d, 1.0).unwrap();
        assert!((full.success_probability - streamed.success_probability).abs() < 1e-14);
        assert!(full.next_state.fidelity(&streamed.next_state).unwrap() > 1.0 - 1e-14);
        let grouped = LcuDecomposition {
            streamed: Some(CompiledSum::new(&h)),
            ..d.clone()
        };
        let fast = outcome_from_branch(projected_branch(&x, &grouped), 2, &grouped, 1.0).unwrap();
        assert!((full.success_probability - fast.success_probability).abs() < 1e-14);
        assert!(full.next_state.fidelity(&fast.next_state).unwrap() > 1.0 - 1e-14);
    }
}
