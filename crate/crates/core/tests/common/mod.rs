#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use fqe_core::pauli::{Pauli, PauliString, PauliSum};
use fqe_core::StateVector;

pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases: n,
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn random_string<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    let ops: Vec<Pauli> = (0..n)
        .map(|_| match rng.random_range(0..4) {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        })
        .collect();
    PauliString::from_paulis(&ops).unwrap()
}

/// `m` random strings with coefficients in [−1, 1] (duplicates merge).
pub fn random_sum<R: Rng>(rng: &mut R, n: usize, m: usize) -> PauliSum {
    let terms = (0..m)
        .map(|_| (rng.random_range(-1.0..1.0), random_string(rng, n)))
        .collect();
    PauliSum::new(n, terms).unwrap()
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::from_amplitudes(n, amps).unwrap().normalized().unwrap()
}

pub fn random_real_state<R: Rng>(rng: &mut R, n: usize) -> StateVector {
    let amps: Vec<f64> = (0..1usize << n).map(|_| rng.sample(StandardNormal)).collect();
    StateVector::from_real(n, &amps).unwrap().normalized().unwrap()
}

/// Random real orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    g.qr().q()
}

/// `Q diag(λ) Qᵀ` as a Pauli sum, together with `Q` (columns are eigenvectors).
pub fn hamiltonian_with_spectrum<R: Rng>(rng: &mut R, n: usize, spectrum: &[f64]) -> (PauliSum, DMatrix<f64>) {
    let dim = 1usize << n;
    assert_eq!(spectrum.len(), dim);
    let q = random_orthogonal(rng, dim);
    let m = &q * DMatrix::from_diagonal(&DVector::from_column_slice(spectrum)) * q.transpose();
    let h = PauliSum::from_matrix(&m.map(|v| Complex64::new(v, 0.0))).unwrap();
    (h, q)
}

pub fn dense(h: &PauliSum) -> DMatrix<Complex64> {
    h.to_matrix().unwrap()
}

pub fn to_dvector(x: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(x.amplitudes())
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Random negative-definite spectrum for `n` qubits, ascending, whose
/// contraction ratio at `γ = 1` is `r`.
pub fn negative_spectrum<R: Rng>(rng: &mut R, n: usize, r: f64) -> Vec<f64> {
    let l1 = rng.random_range(-6.0..-3.0);
    let l2 = 1.0 - r * (1.0 - l1);
    let mut s = vec![l1, l2];
    s.extend((2..1usize << n).map(|_| rng.random_range(l2..-0.01)));
    s.sort_by(f64::total_cmp);
    s
}

/// `‖x − e^{iφ}ψ‖` with the phase that aligns the two.
pub fn aligned_residual(x: &StateVector, psi: &StateVector) -> f64 {
    let ov = psi.inner(x).unwrap();
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    x.amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// States `x_0 … x_steps` of the descent, one circuit step at a time.
pub fn descent_states(h: &PauliSum, x0: &StateVector, gamma: f64, steps: usize) -> Vec<StateVector> {
    let cfg = fqe_core::descent::DescentConfig {
        gamma,
        threshold: f64::MIN_POSITIVE,
        max_iters: 1,
        ..Default::default()
    };
    let mut out = vec![x0.clone()];
    for _ in 0..steps {
        let next = fqe_core::descent::run(h, out.last().unwrap(), &cfg).unwrap().final_state;
        out.push(next);
    }
    out
}

/// `exp` of the least-squares slope of `ln(res_t)` over `t ≥ burn_in`
/// while the residual stays above `floor`.
pub fn observed_ratio(residuals: &[f64], burn_in: usize, floor: f64) -> Option<f64> {
    let (t, y): (Vec<f64>, Vec<f64>) = residuals
        .iter()
        .enumerate()
        .skip(burn_in)
        .take_while(|(_, r)| **r > floor)
        .map(|(t, r)| (t as f64, r.ln()))
        .unzip();
    (t.len() >= 5).then(|| slope(&t, &y).exp())
}

/// Slope of the first `t` with `res_t ≤ ε` against `ln(1/ε)`.
pub fn depth_slope(residuals: &[f64], eps: &[f64]) -> Option<f64> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &e in eps {
        let k = residuals.iter().position(|r| *r <= e)?;
        x.push((1.0 / e).ln());
        y.push(k as f64);
    }
    Some(slope(&x, &y))
}

/// `(h0, hp)` on `n` qubits: `h0` a random I/Z sum with a nondegenerate
/// minimum, `hp` random off-diagonal strings rescaled so that
/// `‖hp‖₁ = scale·‖h0‖₁`.
pub fn perturbation_instance<R: Rng>(rng: &mut R, n: usize, scale: f64) -> (PauliSum, PauliSum) {
    loop {
        let zs: Vec<(f64, PauliString)> = (0..2 * n)
            .map(|_| {
                let ops: Vec<Pauli> = (0..n).map(|_| if rng.random_bool(0.5) { Pauli::Z } else { Pauli::I }).collect();
                (rng.random_range(-1.0..1.0), PauliString::from_paulis(&ops).unwrap())
            })
            .collect();
        let h0 = PauliSum::new(n, zs).unwrap();
        let ground = fqe_core::perturbation::unperturbed_ground(&h0).unwrap();
        if h0.is_empty() || ground.degenerate {
            continue;
        }
        let offs: Vec<(f64, PauliString)> = (0..3 * n)
            .map(|_| (rng.random_range(-1.0..1.0), random_string(rng, n)))
            .filter(|(_, p)| !p.is_diagonal())
            .collect();
        let hp = PauliSum::new(n, offs).unwrap();
        if hp.is_empty() {
            continue;
        }
        let hp = hp.scale(scale * h0.one_norm() / hp.one_norm());
        return (h0, hp);
    }
}
