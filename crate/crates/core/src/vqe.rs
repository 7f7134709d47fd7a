//! Variational baseline: a layered RY + CZ-ring ansatz optimized by
//! finite-difference gradient descent.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};

use crate::compiled::CompiledSum;
use crate::descent::{IterationRecord, IterationTrace};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::StateVector;

/// Hardware-efficient ansatz: each layer is `RY(θ)` on every qubit followed
/// by controlled-Z gates on the ring `(0,1), (1,2), …, (n−1,0)`. Two qubits
/// get a single CZ and one qubit none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ansatz {
    pub n_qubits: usize,
    pub layers: usize,
}

impl Ansatz {
    pub fn new(n_qubits: usize, layers: usize) -> Self {
        Ansatz { n_qubits, layers }
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * self.layers
    }

    fn ring(&self) -> Vec<(usize, usize)> {
        match self.n_qubits {
            0 | 1 => vec![],
            2 => vec![(0, 1)],
            n => (0..n).map(|q| (q, (q + 1) % n)).collect(),
        }
    }
}

fn apply_ry(amps: &mut [Complex64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let bit = 1usize << q;
    for block in amps.chunks_exact_mut(2 * bit) {
        let (lo, hi) = block.split_at_mut(bit);
        for (a0, a1) in lo.iter_mut().zip(hi) {
            let (u, v) = (*a0, *a1);
            *a0 = u * c - v * s;
            *a1 = u * s + v * c;
        }
    }
}

fn apply_cz(amps: &mut [Complex64], a: usize, b: usize) {
    let mask = (1usize << a) | (1usize << b);
    for (j, amp) in amps.iter_mut().enumerate() {
        if j & mask == mask {
            *amp = -*amp;
        }
    }
}

/// `U(θ)|x0⟩`; parameter `layer·n + q` rotates qubit `q` in `layer`.
pub fn ansatz_state(a: &Ansatz, theta: &[f64], x0: &StateVector) -> Result<StateVector> {
    if theta.len() != a.n_params() {
        return Err(Error::LengthMismatch {
            expected: a.n_params(),
            found: theta.len(),
        });
    }
    if x0.n_qubits() != a.n_qubits {
        return Err(Error::QubitMismatch {
            expected: a.n_qubits,
            found: x0.n_qubits(),
        });
    }
    x0.require_normalized()?;
    let mut out = x0.clone();
    let amps = out.amplitudes_mut();
    let ring = a.ring();
    for layer in theta.chunks(a.n_qubits.max(1)) {
        for (q, &t) in layer.iter().enumerate() {
            apply_ry(amps, q, t);
        }
        for &(p, q) in &ring {
            apply_cz(amps, p, q);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqeConfig {
    pub layers: usize,
    pub gamma: f64,
    pub delta_theta: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Central instead of forward differences.
    pub central: bool,
    /// Optional relative-change stopping rule; `None` runs all iterations.
    pub threshold: Option<f64>,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            layers: 3,
            gamma: 1e-3,
            delta_theta: 1e-4,
            max_iters: 500,
            seed: 0,
            central: false,
            threshold: None,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.max_iters == 0 {
            return Err(Error::Config("layers and max_iters must be >= 1".into()));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidGamma(self.gamma));
        }
        if !(self.delta_theta > 0.0) {
            return Err(Error::Config(format!("delta_theta must be > 0, got {}", self.delta_theta)));
        }
        Ok(())
    }
}

/// Uniform draws in `[−0.1, 0.1]`, close to the identity circuit.
pub fn initial_angles(n_params: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-0.1, 0.1).expect("valid range");
    (0..n_params).map(|_| dist.sample(&mut rng)).collect()
}

/// `f(θ) = ⟨x(θ)|H|x(θ)⟩`.
pub fn energy(h: &CompiledSum, a: &Ansatz, theta: &[f64], x0: &StateVector) -> Result<f64> {
    h.expectation(&ansatz_state(a, theta, x0)?)
}

/// Finite-difference gradient; forward differences cost one extra
/// evaluation per coordinate, central two.
pub fn finite_difference_gradient(
    h: &CompiledSum,
    a: &Ansatz,
    theta: &[f64],
    x0: &StateVector,
    f0: f64,
    delta: f64,
    central: bool,
) -> Result<Vec<f64>> {
    let mut shifted = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            shifted[i] = theta[i] + delta;
            let plus = energy(h, a, &shifted, x0)?;
            let g = if central {
                shifted[i] = theta[i] - delta;
                let minus = energy(h, a, &shifted, x0)?;
                (plus - minus) / (2.0 * delta)
            } else {
                (plus - f0) / delta
            };
            shifted[i] = theta[i];
            Ok(g)
        })
        .collect()
}

/// Exact gradient from the shift rule for `RY` generators:
/// `∂f/∂θ_i = (f(θ + π/2·e_i) − f(θ − π/2·e_i)) / 2`.
pub fn shift_rule_gradient(h: &CompiledSum, a: &Ansatz, theta: &[f64], x0: &StateVector) -> Result<Vec<f64>> {
    let mut shifted = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            shifted[i] = theta[i] + FRAC_PI_2;
            let plus = energy(h, a, &shifted, x0)?;
            shifted[i] = theta[i] - FRAC_PI_2;
            let minus = energy(h, a, &shifted, x0)?;
            shifted[i] = theta[i];
            Ok((plus - minus) / 2.0)
        })
        .collect()
}

/// Runs `θ ← θ − γ∇f`. The trace's cost columns count circuit evaluations.
pub fn vqe_run(h: &PauliSum, x0: &StateVector, cfg: &VqeConfig) -> Result<IterationTrace> {
    cfg.validate()?;
    let a = Ansatz::new(h.n_qubits(), cfg.layers);
    let h = &CompiledSum::new(h);
    let mut theta = initial_angles(a.n_params(), cfg.seed);
    let per_iter = if cfg.central { 2 * a.n_params() } else { a.n_params() };
    let mut f = energy(h, &a, &theta, x0)?;
    let mut evals = 1.0;
    let record = |iter, energy, rel_change, evals| IterationRecord {
        iter,
        energy,
        rel_change,
        p_success: f64::NAN,
        cum_direct_cost: evals,
        cum_amplified_cost: f64::NAN,
        hardware_measured: true,
    };
    let mut records = vec![record(0, f, f64::NAN, evals)];
    let mut converged = false;
    for t in 1..=cfg.max_iters {
        let grad = finite_difference_gradient(h, &a, &theta, x0, f, cfg.delta_theta, cfg.central)?;
        for (th, g) in theta.iter_mut().zip(&grad) {
            *th -= cfg.gamma * g;
        }
        let next = energy(h, &a, &theta, x0)?;
        evals += (per_iter + 1) as f64;
        if !next.is_finite() {
            return Err(Error::Config(format!("VQE energy diverged at iteration {t}")));
        }
        let rel = if f == 0.0 { (f - next).abs() } else { (f - next).abs() / f.abs() };
        records.push(record(t, next, rel, evals));
        f = next;
        if cfg.threshold.is_some_and(|eps| rel < eps) {
            converged = true;
            break;
        }
    }
    Ok(IterationTrace {
        records,
        final_state: ansatz_state(&a, &theta, x0)?,
        converged,
        log10_sequential_cost: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_angles_keep_basis_states() {
        let a = Ansatz::new(3, 2);
        for j in 0..8 {
            let x0 = StateVector::basis(3, j).unwrap();
            let out = ansatz_state(&a, &[0.0; 6], &x0).unwrap();
            assert!((out.amplitudes()[j].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ry_pi_flips() {
        let a = Ansatz::new(1, 1);
        let out = ansatz_state(&a, &[PI], &StateVector::basis(1, 0).unwrap()).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch() {
        let a = Ansatz::new(2, 3);
        let x0 = StateVector::basis(2, 0).unwrap();
        assert!(matches!(
            ansatz_state(&a, &[0.0; 5], &x0),
            Err(Error::LengthMismatch { expected: 6, found: 5 })
        ));
    }

    #[test]
    fn single_qubit_z() {
        let h = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        let cfg = VqeConfig {
            layers: 1,
            gamma: 0.1,
            max_iters: 2000,
            seed: 5,
            ..Default::default()
        };
        let tr = vqe_run(&h, &StateVector::basis(1, 0).unwrap(), &cfg).unwrap();
        assert!((tr.final_energy() + 1.0).abs() < 1e-6, "{}", tr.final_energy());
    }

    #[test]
    fn angles_are_small_and_seeded() {
        let a = initial_angles(12, 3);
        assert_eq!(a, initial_angles(12, 3));
        assert!(a.iter().all(|t| t.abs() <= 0.1));
        assert_ne!(a, initial_angles(12, 4));
    }
}
