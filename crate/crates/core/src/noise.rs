//! Hamiltonian dephasing noise `Σ δα_i Z_i` and additive state noise.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::state::StateVector;

/// Chemical precision in Hartree.
pub const CHEMICAL_PRECISION: f64 = 1.6e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    #[default]
    None,
    /// Uniform on `[−a, a]`.
    Uniform,
    /// Normal with `σ = a/3`.
    Gaussian,
}

/// A noise channel: a distribution and its amplitude `a`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub amplitude: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec {
        kind: NoiseKind::None,
        amplitude: 0.0,
    };

    pub fn uniform(amplitude: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::Uniform,
            amplitude,
        }
    }

    pub fn gaussian(amplitude: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::Gaussian,
            amplitude,
        }
    }

    pub fn is_active(&self) -> bool {
        self.kind != NoiseKind::None && self.amplitude > 0.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        NoiseSpec {
            kind: self.kind,
            amplitude: self.amplitude * factor,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let a = self.amplitude;
        match self.kind {
            NoiseKind::None => 0.0,
            _ if a == 0.0 => 0.0,
            NoiseKind::Uniform => Uniform::new_inclusive(-a, a).expect("a > 0").sample(rng),
            NoiseKind::Gaussian => Normal::new(0.0, a / 3.0).expect("finite sigma").sample(rng),
        }
    }
}

/// Parses `none`, `uniform:0.01`, or `gaussian:0.02`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(NoiseSpec::NONE);
        }
        let (kind, amp) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("noise spec {s:?} is not <kind:amp>")))?;
        let kind = match kind.to_ascii_lowercase().as_str() {
            "none" => NoiseKind::None,
            "uniform" | "random" => NoiseKind::Uniform,
            "gaussian" | "normal" => NoiseKind::Gaussian,
            other => return Err(Error::Config(format!("unknown noise kind {other:?}"))),
        };
        let amplitude: f64 = amp
            .parse()
            .map_err(|_| Error::Config(format!("bad noise amplitude {amp:?}")))?;
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::Config(format!("noise amplitude must be >= 0, got {amplitude}")));
        }
        Ok(NoiseSpec { kind, amplitude })
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NoiseKind::None => write!(f, "none"),
            NoiseKind::Uniform => write!(f, "uniform:{}", self.amplitude),
            NoiseKind::Gaussian => write!(f, "gaussian:{}", self.amplitude),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Redraw {
    #[default]
    PerIteration,
    Once,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseConfig {
    pub hamiltonian: NoiseSpec,
    pub state: NoiseSpec,
    pub redraw: Redraw,
    pub seed: u64,
    /// Perturb imaginary parts of amplitudes as well as real parts.
    pub complex_state: bool,
}

impl NoiseConfig {
    pub fn is_active(&self) -> bool {
        self.hamiltonian.is_active() || self.state.is_active()
    }

    /// Independent stream `index` derived from the seed.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// `h + Σ_i δα_i Z_i` with one fresh draw per qubit.
pub fn perturb_hamiltonian<R: Rng>(h: &PauliSum, spec: &NoiseSpec, rng: &mut R) -> Result<PauliSum> {
    if !spec.is_active() {
        return Ok(h.clone());
    }
    let n = h.n_qubits();
    let mut terms: Vec<(f64, PauliString)> = h.terms().to_vec();
    for q in 0..n {
        let delta = spec.sample(rng);
        terms.push((delta, PauliString::from_sparse(n, &[(q, Pauli::Z)])?));
    }
    PauliSum::new(n, terms)
}

/// `(|x⟩ + |δx⟩)/‖…‖` with independent per-amplitude draws.
pub fn perturb_state<R: Rng>(
    x: &StateVector,
    spec: &NoiseSpec,
    complex: bool,
    rng: &mut R,
) -> Result<StateVector> {
    if !spec.is_active() {
        return Ok(x.clone());
    }
    let mut out = x.clone();
    for a in out.amplitudes_mut() {
        let re = spec.sample(rng);
        let im = if complex { spec.sample(rng) } else { 0.0 };
        *a += Complex64::new(re, im);
    }
    out.normalized()
}

/// Live noise stream for one run.
pub struct NoiseSession {
    cfg: NoiseConfig,
    rng: ChaCha8Rng,
    frozen_h: Option<PauliSum>,
}

impl NoiseSession {
    pub fn new(cfg: NoiseConfig, stream: u64) -> Self {
        NoiseSession {
            rng: cfg.rng(stream),
            cfg,
            frozen_h: None,
        }
    }

    pub fn config(&self) -> &NoiseConfig {
        &self.cfg
    }

    /// The Hamiltonian the circuit sees this iteration.
    pub fn hamiltonian(&mut self, h: &PauliSum) -> Result<PauliSum> {
        if !self.cfg.hamiltonian.is_active() {
            return Ok(h.clone());
        }
        match (&self.frozen_h, self.cfg.redraw) {
            (Some(frozen), Redraw::Once) => Ok(frozen.clone()),
            _ => {
                let noisy = perturb_hamiltonian(h, &self.cfg.hamiltonian, &mut self.rng)?;
                if self.cfg.redraw == Redraw::Once {
                    self.frozen_h = Some(noisy.clone());
                }
                Ok(noisy)
            }
        }
    }

    pub fn state(&mut self, x: &StateVector) -> Result<StateVector> {
        perturb_state(x, &self.cfg.state, self.cfg.complex_state, &mut self.rng)
    }
}

/// Classification of a noisy run against its noiseless reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVerdict {
    /// `|E_final − E_clean|`.
    pub final_error: f64,
    pub within_precision: bool,
    /// Energy variance over the trailing window.
    pub tail_variance: f64,
    pub oscillating: bool,
    /// Settled (small variance) but away from the noiseless fixed point.
    pub excited_level: bool,
}

impl NoiseVerdict {
    /// Non-convergence, oscillation, or convergence to another level.
    pub fn flagged(&self) -> bool {
        !self.within_precision || self.oscillating || self.excited_level
    }
}

/// Trailing window used for oscillation detection.
pub const TAIL_WINDOW: usize = 50;

fn tail_variance(energies: &[f64]) -> f64 {
    let tail = &energies[energies.len().saturating_sub(TAIL_WINDOW)..];
    if tail.len() < 2 {
        return 0.0;
    }
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    tail.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / tail.len() as f64
}

/// Compares a noisy energy trace with the noiseless one. A run oscillates
/// when its tail variance exceeds ten times the larger of the noiseless
/// tail variance and the squared chemical precision.
pub fn assess(noisy: &[f64], clean: &[f64]) -> NoiseVerdict {
    let e_clean = *clean.last().expect("non-empty trace");
    let e_noisy = *noisy.last().expect("non-empty trace");
    let final_error = (e_noisy - e_clean).abs();
    let within_precision = final_error <= CHEMICAL_PRECISION;
    let var = tail_variance(noisy);
    let floor = tail_variance(clean).max(CHEMICAL_PRECISION * CHEMICAL_PRECISION);
    let oscillating = var > 10.0 * floor;
    let tail = &noisy[noisy.len().saturating_sub(TAIL_WINDOW)..];
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let excited_level = !oscillating && (tail_mean - e_clean).abs() > CHEMICAL_PRECISION;
    NoiseVerdict {
        final_error,
        within_precision,
        tail_variance: var,
        oscillating,
        excited_level,
    }
}
