//! Browser demo: descent traces, dissociation curves and a VQE comparison
//! on the bundled H2 and LiH tables. Every export returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fqe_core::descent::{self, DescentConfig, Mode};
use fqe_core::perturbation::{perturb, SignConvention};
use fqe_core::vqe::{vqe_run, VqeConfig};
use fqe_core::workflow::{parse_molecule, reference_ground, Molecule};

const H2: &[(f64, &str)] = &[
    (0.5, include_str!("../../../data/h2_scan/h2_0.5.json")),
    (0.6, include_str!("../../../data/h2_scan/h2_0.6.json")),
    (0.7, include_str!("../../../data/h2_scan/h2_0.7.json")),
    (0.7314, include_str!("../../../data/h2_scan/h2_0.7314.json")),
    (0.8, include_str!("../../../data/h2_scan/h2_0.8.json")),
    (0.9, include_str!("../../../data/h2_scan/h2_0.9.json")),
    (1.0, include_str!("../../../data/h2_scan/h2_1.0.json")),
    (1.2, include_str!("../../../data/h2_scan/h2_1.2.json")),
    (1.5, include_str!("../../../data/h2_scan/h2_1.5.json")),
    (2.0, include_str!("../../../data/h2_scan/h2_2.0.json")),
];

const LIH: &[(f64, &str)] = &[
    (1.2, include_str!("../../../data/lih_scan/lih_1.2.json")),
    (1.4, include_str!("../../../data/lih_scan/lih_1.4.json")),
    (1.5065, include_str!("../../../data/lih_scan/lih_1.5065.json")),
    (1.7, include_str!("../../../data/lih_scan/lih_1.7.json")),
    (2.0, include_str!("../../../data/lih_scan/lih_2.0.json")),
];

fn scan(molecule: &str) -> Result<&'static [(f64, &'static str)], String> {
    match molecule.to_ascii_lowercase().as_str() {
        "h2" => Ok(H2),
        "lih" => Ok(LIH),
        other => Err(format!("unknown molecule {other:?} (h2 or lih)")),
    }
}

/// The scan point nearest `distance`, with its tabulated distance.
fn load(molecule: &str, distance: f64) -> Result<(f64, Molecule), String> {
    let (d, src) = scan(molecule)?
        .iter()
        .min_by(|a, b| (a.0 - distance).abs().total_cmp(&(b.0 - distance).abs()))
        .expect("scans are non-empty");
    Ok((*d, parse_molecule(src, None).map_err(|e| e.to_string())?))
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Serialize)]
pub struct Convergence {
    pub distance: f64,
    pub exact: f64,
    pub energy: Vec<f64>,
    pub p_success: Vec<Option<f64>>,
    pub converged: bool,
    pub note: String,
}

/// Descent trace from Hartree-Fock for the scan point nearest `distance`.
pub fn convergence(molecule: &str, distance: f64, gamma: f64, max_iters: usize, circuit: bool) -> Result<String, String> {
    let (distance, m) = load(molecule, distance)?;
    let x0 = m.start_state(None).map_err(|e| e.to_string())?;
    let cfg = DescentConfig {
        gamma,
        max_iters,
        mode: if circuit { Mode::Circuit } else { Mode::Direct },
        ..Default::default()
    };
    let tr = descent::run(&m.hamiltonian, &x0, &cfg).map_err(|e| e.to_string())?;
    let exact = reference_ground(&m.hamiltonian, m.n_electrons).map_err(|e| e.to_string())?;
    json(&Convergence {
        distance,
        exact: exact.energy,
        energy: tr.energies(),
        p_success: tr.records.iter().map(|r| finite(r.p_success)).collect(),
        converged: tr.converged,
        note: m.reference_note(),
    })
}

#[derive(Serialize)]
pub struct CurvePoint {
    pub distance: f64,
    pub exact: f64,
    pub zero: f64,
    pub first: f64,
    pub second: f64,
    pub fqe: f64,
}

/// Exact, perturbative and descent energies along the bundled scan.
pub fn dissociation(molecule: &str) -> Result<String, String> {
    let points = scan(molecule)?
        .iter()
        .map(|&(d, src)| {
            let m = parse_molecule(src, None).map_err(|e| e.to_string())?;
            let exact = reference_ground(&m.hamiltonian, m.n_electrons).map_err(|e| e.to_string())?;
            let (_, r) = perturb(&m.hamiltonian, SignConvention::Standard).map_err(|e| e.to_string())?;
            let x0 = m.start_state(None).map_err(|e| e.to_string())?;
            let cfg = DescentConfig { mode: Mode::Direct, ..Default::default() };
            let tr = descent::run(&m.hamiltonian, &x0, &cfg).map_err(|e| e.to_string())?;
            Ok(CurvePoint {
                distance: d,
                exact: exact.energy,
                zero: r.e_zero,
                first: r.e_first_rq,
                second: r.e_second_rq,
                fqe: tr.final_energy(),
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    json(&points)
}

#[derive(Serialize)]
pub struct Comparison {
    pub exact: f64,
    pub fqe: Vec<f64>,
    pub vqe: Vec<f64>,
    pub fqe_reach: Option<usize>,
    pub vqe_reach: Option<usize>,
}

/// Descent (γ = 1) against the VQE baseline at `vqe_gamma`, both from
/// Hartree-Fock; `reach` is the first iteration within 1e-3 of the exact
/// energy.
pub fn compare(molecule: &str, distance: f64, vqe_gamma: f64, iters: usize, seed: u64) -> Result<String, String> {
    let (_, m) = load(molecule, distance)?;
    let x0 = m.start_state(None).map_err(|e| e.to_string())?;
    let exact = reference_ground(&m.hamiltonian, m.n_electrons).map_err(|e| e.to_string())?.energy;
    let cfg = DescentConfig { max_iters: iters, mode: Mode::Direct, ..Default::default() };
    let fqe = descent::run(&m.hamiltonian, &x0, &cfg).map_err(|e| e.to_string())?;
    let vcfg = VqeConfig { gamma: vqe_gamma, max_iters: iters, seed, ..Default::default() };
    let vqe = vqe_run(&m.hamiltonian, &x0, &vcfg).map_err(|e| e.to_string())?;
    json(&Comparison {
        exact,
        fqe_reach: fqe.first_within(exact, 1e-3),
        vqe_reach: vqe.first_within(exact, 1e-3),
        fqe: fqe.energies(),
        vqe: vqe.energies(),
    })
}

#[wasm_bindgen(js_name = convergence)]
pub fn convergence_js(molecule: &str, distance: f64, gamma: f64, max_iters: usize, circuit: bool) -> Result<String, JsValue> {
    convergence(molecule, distance, gamma, max_iters, circuit).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = dissociation)]
pub fn dissociation_js(molecule: &str) -> Result<String, JsValue> {
    dissociation(molecule).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = compare)]
pub fn compare_js(molecule: &str, distance: f64, vqe_gamma: f64, iters: usize, seed: u32) -> Result<String, JsValue> {
    compare(molecule, distance, vqe_gamma, iters, seed.into()).map_err(|e| JsValue::from_str(&e))
}
