//! The iterated gradient-descent loop `x ← (I − γH)x / ‖…‖`, with its
//! stopping rule and the analytic depth and error bounds.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compiled::CompiledSum;
use crate::error::{Error, Result};
use crate::lcu::{self, LcuDecomposition};
use crate::noise::NoiseSession;
use crate::pauli::PauliSum;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every step runs the LCU circuit and post-selects.
    #[default]
    Circuit,
    /// Matrix-vector application of `I − γH`.
    Direct,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circuit" => Ok(Mode::Circuit),
            "direct" => Ok(Mode::Direct),
            _ => Err(Error::Config(format!("unknown mode {s:?} (circuit|direct)"))),
        }
    }
}

/// Records within this many iterations of `measure_near` are flagged as
/// energy evaluations a hardware run would perform.
pub const MEASURE_WINDOW: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentConfig {
    /// Learning rate γ.
    pub gamma: f64,
    /// Relative-change stopping threshold.
    pub threshold: f64,
    pub max_iters: usize,
    pub mode: Mode,
    /// `c` in `H + c·I`, applied before descent.
    pub spectral_shift: f64,
    /// Predicted depth around which energies would be measured on hardware.
    pub measure_near: Option<usize>,
}

impl Default for DescentConfig {
    fn default() -> Self {
        DescentConfig {
            gamma: 1.0,
            threshold: 1e-8,
            max_iters: 500,
            mode: Mode::Circuit,
            spectral_shift: 0.0,
            measure_near: None,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidGamma(self.gamma));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::Config(format!("threshold must be > 0, got {}", self.threshold)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        if !self.spectral_shift.is_finite() {
            return Err(Error::Config("spectral shift must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// `⟨x_t|H|x_t⟩` in Hartree, always with the noiseless `H`.
    pub energy: f64,
    /// `|E_{t−1} − E_t| / |E_{t−1}|`; NaN for the start state.
    pub rel_change: f64,
    /// Success probability of the step producing `x_t`; NaN for the start.
    pub p_success: f64,
    /// `Σ 1/P_s` so far.
    pub cum_direct_cost: f64,
    /// `Σ ⌈√2^m⌉` so far.
    pub cum_amplified_cost: f64,
    pub hardware_measured: bool,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub final_state: StateVector,
    pub converged: bool,
    /// `Σ log10(1/P_s)`: cost of running every step back to back without
    /// re-preparing intermediate states.
    pub log10_sequential_cost: f64,
}

impl IterationTrace {
    pub fn final_energy(&self) -> f64 {
        self.records.last().expect("trace holds the start state").energy
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }

    /// Steps taken before the stopping rule fired: if comparing `E_t` with
    /// `E_{t+1}` stops the run, `t` is reported. Unconverged runs report
    /// every step.
    pub fn iterations(&self) -> usize {
        let steps = self.records.len() - 1;
        if self.converged {
            steps - 1
        } else {
            steps
        }
    }

    /// First iteration whose energy lies within `tol` of `target` and stays there.
    pub fn first_within(&self, target: f64, tol: f64) -> Option<usize> {
        let mut first = None;
        for r in &self.records {
            if (r.energy - target).abs() <= tol {
                first.get_or_insert(r.iter);
            } else {
                first = None;
            }
        }
        first
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_trace_csv(&self.records, w)
    }
}

pub const TRACE_HEADER: &str = "iter,energy_au,rel_change,p_success,cum_direct_cost,cum_amplified_cost";

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.12e}")
    }
}

pub fn write_trace_csv<W: Write>(records: &[IterationRecord], mut w: W) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{:.12},{},{},{},{}",
            r.iter,
            r.energy,
            fmt_opt(r.rel_change),
            fmt_opt(r.p_success),
            fmt_opt(r.cum_direct_cost),
            fmt_opt(r.cum_amplified_cost)
        )?;
    }
    Ok(())
}

/// Cumulative ancilla attempts per record when every post-selection is
/// simulated as Bernoulli(`P_s`) trials; the start record costs nothing.
pub fn sampled_costs(records: &[IterationRecord], seed: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0;
    records
        .iter()
        .map(|r| {
            if !r.p_success.is_nan() {
                total += lcu::sample_attempts(r.p_success, &mut rng)?;
            }
            Ok(total)
        })
        .collect()
}

fn relative_change(prev: f64, next: f64) -> f64 {
    let diff = (prev - next).abs();
    if prev == 0.0 {
        diff
    } else {
        diff / prev.abs()
    }
}

struct Step {
    state: StateVector,
    p_success: f64,
    amplified: f64,
}

fn step(x: &StateVector, hg: &CompiledSum, d: &LcuDecomposition, mode: Mode) -> Result<Step> {
    match mode {
        Mode::Circuit => {
            let out = lcu::lcu_step_with(x, d)?;
            Ok(Step {
                state: out.next_state,
                p_success: out.success_probability,
                amplified: out.amplified_repetitions,
            })
        }
        Mode::Direct => {
            let mut y = hg.apply(x)?;
            let norm = y.norm();
            if !(norm > f64::MIN_POSITIVE) {
                return Err(Error::ZeroNorm);
            }
            let c = d.normalization();
            let p = norm * norm / (c * c * d.n_slits() as f64);
            y.normalize()?;
            Ok(Step {
                state: y,
                p_success: p,
                amplified: d.amplified_repetitions(),
            })
        }
    }
}

/// Noiseless descent from a normalized start state.
pub fn run(h: &PauliSum, x0: &StateVector, cfg: &DescentConfig) -> Result<IterationTrace> {
    run_inner(h, x0, cfg, None)
}

/// Descent where each step sees a freshly perturbed Hamiltonian and the
/// produced state is perturbed before the next step.
pub fn run_noisy(
    h: &PauliSum,
    x0: &StateVector,
    cfg: &DescentConfig,
    noise: &mut NoiseSession,
) -> Result<IterationTrace> {
    run_inner(h, x0, cfg, Some(noise))
}

fn run_inner(
    h: &PauliSum,
    x0: &StateVector,
    cfg: &DescentConfig,
    mut noise: Option<&mut NoiseSession>,
) -> Result<IterationTrace> {
    cfg.validate()?;
    if x0.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            expected: h.n_qubits(),
            found: x0.n_qubits(),
        });
    }
    x0.require_normalized()?;
    let measured = |t: usize| cfg.measure_near.is_some_and(|k| t.abs_diff(k) <= MEASURE_WINDOW);

    let clean_hg = h.shifted(cfg.spectral_shift).gradient_operator(cfg.gamma)?;
    let clean_d = lcu::decompose(&clean_hg)?;
    let clean_hg = CompiledSum::new(&clean_hg);
    let energy_op = CompiledSum::new(h);

    let mut x = x0.clone();
    let mut energy = energy_op.expectation(&x)?;
    let mut records = vec![IterationRecord {
        iter: 0,
        energy,
        rel_change: f64::NAN,
        p_success: f64::NAN,
        cum_direct_cost: 0.0,
        cum_amplified_cost: 0.0,
        hardware_measured: measured(0),
    }];
    let (mut direct, mut amplified, mut log_cost) = (0.0, 0.0, 0.0);
    let mut converged = false;

    for t in 1..=cfg.max_iters {
        let s = match noise.as_deref_mut() {
            Some(session) if session.config().hamiltonian.is_active() => {
                let noisy = session.hamiltonian(h)?;
                let hg = noisy.shifted(cfg.spectral_shift).gradient_operator(cfg.gamma)?;
                let d = lcu::decompose(&hg)?;
                match cfg.mode {
                    Mode::Direct => step(&x, &CompiledSum::new(&hg), &d, cfg.mode)?,
                    // the circuit path reads only the decomposition
                    Mode::Circuit => step(&x, &clean_hg, &d, cfg.mode)?,
                }
            }
            _ => step(&x, &clean_hg, &clean_d, cfg.mode)?,
        };
        x = match noise.as_deref_mut() {
            Some(session) => session.state(&s.state)?,
            None => s.state,
        };
        direct += 1.0 / s.p_success;
        amplified += s.amplified;
        log_cost -= s.p_success.log10();
        let next = energy_op.expectation(&x)?;
        let rel = relative_change(energy, next);
        records.push(IterationRecord {
            iter: t,
            energy: next,
            rel_change: rel,
            p_success: s.p_success,
            cum_direct_cost: direct,
            cum_amplified_cost: amplified,
            hardware_measured: measured(t),
        });
        energy = next;
        if rel < cfg.threshold {
            converged = true;
            break;
        }
    }
    if cfg.measure_near.is_none() {
        if let Some(last) = records.last_mut() {
            last.hardware_measured = true;
        }
    }
    Ok(IterationTrace {
        records,
        final_state: x,
        converged,
        log10_sequential_cost: log_cost,
    })
}

/// Contraction ratio `|1−γλ2| / |1−γλ1|`.
pub fn contraction_ratio(lambda1: f64, lambda2: f64, gamma: f64) -> f64 {
    (1.0 - gamma * lambda2).abs() / (1.0 - gamma * lambda1).abs()
}

/// Smallest `k` with `r^k · N ≤ ε`.
pub fn predicted_depth(lambda1: f64, lambda2: f64, gamma: f64, n_dim: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be > 0, got {eps}")));
    }
    let r = contraction_ratio(lambda1, lambda2, gamma);
    if !(r < 1.0) {
        return Err(Error::NoContraction { ratio: r });
    }
    let n = n_dim as f64;
    if eps >= n {
        return Ok(0);
    }
    if r == 0.0 {
        return Ok(1);
    }
    let mut k = ((n / eps).ln() / (1.0 / r).ln()).ceil().max(0.0) as usize;
    while k > 0 && r.powi(k as i32 - 1) * n <= eps {
        k -= 1;
    }
    while r.powi(k as i32) * n > eps {
        k += 1;
    }
    Ok(k)
}

/// Upper bound on `E_k − λ_1` after `k` steps from a state with eigenvector
/// amplitudes `a_i = |⟨ψ_i|x_0⟩|`, spectrum ascending with `λ_1` the ground
/// energy. The bound reads `r^k (n−1) w_2 Δ_2 / w_1` where `w_i = a_i²` are
/// the spectral weights entering the energy, `Δ_i = λ_i − λ_1`, `w_2 Δ_2` is
/// the largest excited-state term and `r = max_{i≥2} |1−γλ_i| / |1−γλ_1|`.
pub fn error_bound(spectrum: &[f64], overlaps: &[f64], gamma: f64, k: usize) -> Result<f64> {
    if spectrum.len() != overlaps.len() {
        return Err(Error::LengthMismatch {
            expected: spectrum.len(),
            found: overlaps.len(),
        });
    }
    if spectrum.is_empty() {
        return Err(Error::ZeroOperator);
    }
    let w1 = overlaps[0] * overlaps[0];
    if !(w1 > 0.0) {
        return Err(Error::ZeroOverlap);
    }
    let l1 = spectrum[0];
    let mu1 = (1.0 - gamma * l1).abs();
    let n = spectrum.len();
    if n == 1 {
        return Ok(0.0);
    }
    let r = spectrum[1..]
        .iter()
        .map(|&l| (1.0 - gamma * l).abs() / mu1)
        .fold(0.0, f64::max);
    if !(r < 1.0) {
        return Err(Error::NoContraction { ratio: r });
    }
    let lead = spectrum[1..]
        .iter()
        .zip(&overlaps[1..])
        .map(|(&l, &a)| a * a * (l - l1))
        .fold(0.0, f64::max);
    Ok(r.powi(k as i32) * (n - 1) as f64 * lead / w1)
}
