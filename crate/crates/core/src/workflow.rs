//! Input loading, reference energies, and the tabular outputs shared by the
//! command-line tool and the browser demo.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::fermion::{hamiltonian_from_integrals, jordan_wigner, IntegralFile, TwoBodyOrdering};
use crate::oracle::{self, Sector, DENSE_QUBIT_CAP};
use crate::pauli::{self, PauliSum};
use crate::state::StateVector;

/// A qubit Hamiltonian with whatever the input said about its origin.
#[derive(Debug, Clone)]
pub struct Molecule {
    pub hamiltonian: PauliSum,
    pub n_electrons: Option<usize>,
    pub metadata: BTreeMap<String, String>,
}

impl Molecule {
    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    /// One line describing where the numbers came from.
    pub fn provenance(&self) -> String {
        if self.metadata.is_empty() {
            return "provenance: unspecified".into();
        }
        let keys = ["molecule", "basis", "geometry", "method", "source"];
        let parts: Vec<String> = keys
            .iter()
            .filter_map(|k| self.metadata.get(*k).map(|v| format!("{k}={v}")))
            .collect();
        format!("provenance: {}", parts.join(", "))
    }

    /// How far energies from this input can be compared with published
    /// figures for the same molecule.
    pub fn reference_note(&self) -> String {
        let basis = self.metadata.get("basis").map(String::as_str);
        let active = self.metadata.get("active_spatial_orbitals").map(|a| {
            a.trim_matches(|c| c == '[' || c == ']').split(',').filter(|t| !t.trim().is_empty()).count()
        });
        let total = match basis {
            Some(b) if b.eq_ignore_ascii_case("sto-3g") => {
                self.metadata.get("atoms_angstrom").and_then(|a| minimal_basis_size(a))
            }
            _ => None,
        };
        match (active, total) {
            (Some(k), Some(t)) if k < t => format!(
                "reference: active-space Hamiltonian ({k} of {t} spatial orbitals); published full-basis energies \
                 are not reproduced from it, so results are checked against the exact oracle for this input"
            ),
            (Some(k), None) => format!(
                "reference: active-space Hamiltonian ({k} spatial orbitals); agreement with published energies is \
                 not expected, so results are checked against the exact oracle for this input"
            ),
            _ if basis.is_some() => "reference: complete-basis Hamiltonian; agreement with published energies \
                                     holds only for the same geometry and integrals, the exact oracle for this \
                                     input is the check"
                .into(),
            _ => "reference: no provenance given; results are checked against the exact oracle for this input".into(),
        }
    }

    /// Hartree-Fock determinant when the electron count is known, otherwise
    /// the basis state with the lowest diagonal energy.
    pub fn start_state(&self, n_electrons: Option<usize>) -> Result<StateVector> {
        let n = self.n_qubits();
        if let Some(ne) = n_electrons.or(self.n_electrons) {
            return StateVector::hartree_fock(n, ne);
        }
        let diag = self.hamiltonian.diagonal();
        let index = diag
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(j, _)| j);
        StateVector::basis(n, index)
    }
}

/// Spatial orbitals of a minimal basis for `"El x y z; El x y z"` atoms.
fn minimal_basis_size(atoms: &str) -> Option<usize> {
    atoms
        .split(';')
        .filter(|a| !a.trim().is_empty())
        .map(|a| {
            let z = match a.split_whitespace().next()? {
                "H" | "He" => 1,
                "Li" | "Be" | "B" | "C" | "N" | "O" | "F" | "Ne" => 5,
                "Na" | "Mg" | "Al" | "Si" | "P" | "S" | "Cl" | "Ar" => 9,
                _ => return None,
            };
            Some(z)
        })
        .sum()
}

fn flatten_provenance(v: &Value, out: &mut BTreeMap<String, String>) {
    if let Value::Object(map) = v {
        for (k, v) in map {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.insert(k.clone(), text);
        }
    }
}

/// Parses an integral table (JSON object), a Pauli JSON array, or Pauli
/// text, by content.
pub fn parse_molecule(src: &str, ordering: Option<TwoBodyOrdering>) -> Result<Molecule> {
    let trimmed = src.trim_start();
    if trimmed.starts_with('{') {
        let file = IntegralFile::from_json(src)?;
        let table = file.to_table(ordering)?;
        let f = hamiltonian_from_integrals(&table)?;
        let h = jordan_wigner(&f, table.n_orbitals())?;
        let mut metadata = BTreeMap::new();
        if let Some(p) = &file.provenance {
            flatten_provenance(p, &mut metadata);
        }
        return Ok(Molecule {
            hamiltonian: h,
            n_electrons: file.n_electrons,
            metadata,
        });
    }
    if trimmed.starts_with('[') {
        return Ok(Molecule {
            hamiltonian: pauli::parse_json(src)?,
            n_electrons: None,
            metadata: BTreeMap::new(),
        });
    }
    let doc = pauli::parse_text(src)?;
    Ok(Molecule {
        n_electrons: doc.electrons(),
        hamiltonian: doc.sum,
        metadata: doc.metadata,
    })
}

pub fn load_molecule(path: &Path, ordering: Option<TwoBodyOrdering>) -> Result<Molecule> {
    let src = std::fs::read_to_string(path)?;
    parse_molecule(&src, ordering)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMethod {
    Dense,
    /// Restricted to the `(N_α, N_β)` block of the start determinant.
    Sector { n_alpha: u32, n_beta: u32 },
}

impl std::fmt::Display for ReferenceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReferenceMethod::Dense => write!(f, "dense diagonalization"),
            ReferenceMethod::Sector { n_alpha, n_beta } => {
                write!(f, "diagonalization in the N_alpha={n_alpha}, N_beta={n_beta} sector")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub energy: f64,
    pub method: ReferenceMethod,
}

/// Exact ground energy the solvers are compared against. With a known
/// electron count the spin-resolved sector of the Hartree–Fock determinant
/// is diagonalized (descent from that determinant never leaves it);
/// otherwise the full space, up to [`DENSE_QUBIT_CAP`] qubits.
pub fn reference_ground(h: &PauliSum, n_electrons: Option<usize>) -> Result<Reference> {
    match n_electrons {
        Some(ne) if h.n_qubits() % 2 == 0 => {
            let n_alpha = ne.div_ceil(2) as u32;
            let n_beta = (ne / 2) as u32;
            let sector = Sector::spin_resolved(h.n_qubits(), n_alpha, n_beta);
            let s = oracle::sector_spectrum(h, &sector)?;
            Ok(Reference {
                energy: s.ground_energy(),
                method: ReferenceMethod::Sector { n_alpha, n_beta },
            })
        }
        Some(ne) => {
            let sector = Sector::particle_number(h.n_qubits(), ne as u32);
            let s = oracle::sector_spectrum(h, &sector)?;
            Ok(Reference {
                energy: s.ground_energy(),
                method: ReferenceMethod::Sector {
                    n_alpha: ne as u32,
                    n_beta: 0,
                },
            })
        }
        None if h.n_qubits() <= DENSE_QUBIT_CAP => Ok(Reference {
            energy: oracle::dense_ground(h)?.0,
            method: ReferenceMethod::Dense,
        }),
        None => Err(Error::TooManyQubits {
            n: h.n_qubits(),
            cap: DENSE_QUBIT_CAP,
        }),
    }
}

/// Splits `<molecule>_<distance>.json` into its parts.
pub fn parse_scan_name(file_name: &str) -> Option<(String, f64)> {
    let stem = file_name.strip_suffix(".json")?;
    let (mol, dist) = stem.rsplit_once('_')?;
    let d: f64 = dist.parse().ok()?;
    (!mol.is_empty() && d.is_finite()).then(|| (mol.to_string(), d))
}

/// A column-aligned table written as CSV, with blank cells for missing values.
pub fn aligned_csv(headers: &[String], columns: &[Vec<f64>]) -> String {
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = headers.join(",");
    out.push('\n');
    for r in 0..rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| c.get(r).filter(|v| !v.is_nan()).map(|v| format!("{v:.12}")).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Polylines of each series against `x`, with axes and a legend.
pub fn svg_plot(title: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 60.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
    let finite = |v: &&f64| v.is_finite();
    let (x0, x1) = bounds(x.iter().filter(finite));
    let (y0, y1) = bounds(series.iter().flat_map(|(_, s)| s.iter()).filter(finite));
    let sx = |v: f64| M + (v - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v - y0) / (y1 - y0) * (H - 2.0 * M);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{M} {M} L{M} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        b = H - M,
        r = W - M
    );
    let _ = writeln!(s, r#"<text x="{M}" y="{}" text-anchor="middle">{x0:.3}</text>"#, H - M + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x1:.3}</text>"#, W - M, H - M + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y0:.4}</text>"#, M - 4.0, H - M);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y1:.4}</text>"#, M - 4.0, M + 4.0);
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(ys)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b)))
            .collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#, pts.join(" "));
        let ly = M + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            W - M - 110.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds<'a>(vals: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
