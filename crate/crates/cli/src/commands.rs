use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use fqe_core::descent::{self, DescentConfig, IterationTrace};
use fqe_core::noise::{assess, NoiseConfig, NoiseSession, NoiseVerdict, CHEMICAL_PRECISION};
use fqe_core::pauli::{self, PauliDocument};
use fqe_core::perturbation::{perturb, PerturbationReport, SignConvention};
use fqe_core::vqe::{vqe_run, VqeConfig};
use fqe_core::workflow::{aligned_csv, load_molecule, parse_scan_name, reference_ground, svg_plot, Molecule, Reference};
use fqe_core::StateVector;

use crate::output::{self, csv, energy};
use crate::{Cli, Command, Global, JwArgs, NoiseArgs, PauliFormat, PerturbArgs, ScanArgs, ScanMethod, SolveArgs, VqeArgs};
use crate::EXIT_MAX_ITERS;

/// Oracle tolerance for "reached the ground state" in comparisons.
const REACH_TOL: f64 = 1e-3;

pub fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build()?;
    pool.install(|| match cli.command {
        Command::Solve(a) => solve(g, a),
        Command::Scan(a) => scan(g, a),
        Command::Perturb(a) => cmd_perturb(g, a),
        Command::VqeCompare(a) => vqe_compare(g, a),
        Command::NoiseSweep(a) => noise_sweep(g, a),
        Command::Jw(a) => jw(g, a),
    })
}

fn load(g: &Global, path: &Path) -> Result<Molecule> {
    load_molecule(path, g.ordering.map(Into::into)).with_context(|| format!("reading {}", path.display()))
}

fn descent_config(g: &Global) -> DescentConfig {
    DescentConfig {
        gamma: g.gamma,
        threshold: g.threshold,
        max_iters: g.max_iters,
        mode: g.mode.into(),
        spectral_shift: g.shift,
        measure_near: None,
    }
}

fn electrons(g: &Global, m: &Molecule) -> Option<usize> {
    g.electrons.or(m.n_electrons)
}

fn oracle(g: &Global, m: &Molecule) -> Option<Reference> {
    match reference_ground(&m.hamiltonian, electrons(g, m)) {
        Ok(r) => Some(r),
        Err(e) => {
            eprintln!("oracle unavailable ({e}); running without oracle columns");
            None
        }
    }
}

fn describe(m: &Molecule, path: &Path) {
    eprintln!(
        "{}: {} qubits, {} Pauli terms",
        path.display(),
        m.n_qubits(),
        m.hamiltonian.len()
    );
    eprintln!("{}", m.provenance());
    eprintln!("{}", m.reference_note());
}

fn solve(g: &Global, a: SolveArgs) -> Result<u8> {
    let m = load(g, &a.input)?;
    describe(&m, &a.input);
    let x0 = match &a.resume {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            StateVector::read_dump(BufReader::new(f)).with_context(|| format!("reading {}", p.display()))?
        }
        None => m.start_state(g.electrons)?,
    };
    let cfg = descent_config(g);
    let noise = NoiseConfig {
        hamiltonian: a.noise.noise_ham,
        state: a.noise.noise_state,
        redraw: a.noise.redraw(),
        seed: g.seed,
        ..Default::default()
    };
    let tr = if noise.is_active() {
        descent::run_noisy(&m.hamiltonian, &x0, &cfg, &mut NoiseSession::new(noise, 0))?
    } else {
        descent::run(&m.hamiltonian, &x0, &cfg)?
    };

    let mut body = Vec::new();
    tr.write_csv(&mut body)?;
    let body = String::from_utf8(body)?;
    let body = if a.sample {
        let attempts = descent::sampled_costs(&tr.records, g.seed)?;
        let mut lines = body.lines();
        let mut out = format!("{},cum_sampled_attempts\n", lines.next().unwrap_or_default());
        for (line, n) in lines.zip(attempts) {
            out.push_str(&format!("{line},{n}\n"));
        }
        out
    } else {
        body
    };
    let mut w = output::open(g.out.as_deref())?;
    w.write_all(body.as_bytes())?;
    w.flush()?;

    if let Some(p) = &a.dump_state {
        let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
        let mut f = BufWriter::new(f);
        tr.final_state.write_dump(&mut f)?;
        f.flush()?;
    }

    let last = tr.records.last().expect("trace holds the start state");
    eprintln!("final energy: {:.10} a.u.", tr.final_energy());
    if let Some(r) = oracle(g, &m) {
        eprintln!("oracle energy: {:.10} a.u. ({})", r.energy, r.method);
        let diff = tr.final_energy() - r.energy;
        eprintln!(
            "discrepancy: {diff:.3e} a.u. ({} chemical precision {CHEMICAL_PRECISION:e})",
            if diff.abs() <= CHEMICAL_PRECISION { "within" } else { "outside" }
        );
    }
    eprintln!(
        "iterations: {} ({})",
        tr.iterations(),
        if tr.converged { "converged" } else { "hit max-iters" }
    );
    eprintln!(
        "measurement cost: {:.6e} direct repetitions, {:.6e} amplified, 10^{:.3} sequential",
        last.cum_direct_cost, last.cum_amplified_cost, tr.log10_sequential_cost
    );
    Ok(if tr.converged { 0 } else { EXIT_MAX_ITERS })
}

fn hf_energy(m: &Molecule, electrons: Option<usize>) -> f64 {
    match electrons {
        Some(ne) => StateVector::hartree_fock(m.n_qubits(), ne)
            .and_then(|x| x.expectation(&m.hamiltonian))
            .unwrap_or(f64::NAN),
        None => f64::NAN,
    }
}

struct ScanPoint {
    distance: f64,
    path: PathBuf,
}

fn scan_points(dir: &Path) -> Result<Vec<ScanPoint>> {
    let mut points = Vec::new();
    let mut molecule: Option<String> = None;
    for entry in std::fs::read_dir(dir).with_context(|| format!("cannot read {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        let Some((mol, distance)) = parse_scan_name(name) else { continue };
        match &molecule {
            Some(m) if *m != mol => bail!("scan directory mixes molecules {m} and {mol}"),
            _ => molecule = Some(mol),
        }
        points.push(ScanPoint { distance, path });
    }
    if points.is_empty() {
        bail!("no <molecule>_<distance>.json files in {}", dir.display());
    }
    points.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(points)
}

fn scan(g: &Global, a: ScanArgs) -> Result<u8> {
    let points = scan_points(&a.dir)?;
    let molecules: Vec<Molecule> = points.iter().map(|p| load(g, &p.path)).collect::<Result<_>>()?;
    let n = molecules[0].n_qubits();
    if let Some((p, m)) = points.iter().zip(&molecules).find(|(_, m)| m.n_qubits() != n) {
        bail!(
            "inconsistent qubit counts in scan: {} has {} qubits, expected {n}",
            p.path.display(),
            m.n_qubits()
        );
    }
    eprintln!("{}", molecules[0].provenance());
    eprintln!("{}", molecules[0].reference_note());
    let cfg = descent_config(g);
    let sign: SignConvention = a.sign_convention.into();

    let rows: Vec<(Vec<f64>, bool)> = molecules
        .par_iter()
        .map(|m| -> Result<(Vec<f64>, bool)> {
            let exact = reference_ground(&m.hamiltonian, electrons(g, m)).map_or(f64::NAN, |r| r.energy);
            Ok(match a.method {
                ScanMethod::Exact => (vec![exact], true),
                ScanMethod::Fqe => {
                    let tr = descent::run(&m.hamiltonian, &m.start_state(g.electrons)?, &cfg)?;
                    (vec![exact, tr.final_energy(), tr.iterations() as f64], tr.converged)
                }
                ScanMethod::Perturb => {
                    let (_, r) = perturb(&m.hamiltonian, sign)?;
                    (
                        vec![exact, r.e_zero, r.e_first_rq, r.e_second_rq, hf_energy(m, electrons(g, m))],
                        true,
                    )
                }
            })
        })
        .collect::<Result<_>>()?;

    let headers: &[&str] = match a.method {
        ScanMethod::Exact => &["distance_angstrom", "e_exact"],
        ScanMethod::Fqe => &["distance_angstrom", "e_exact", "e_fqe", "iterations"],
        ScanMethod::Perturb => &["distance_angstrom", "e_exact", "e_zero", "e_first", "e_second", "e_hf"],
    };
    let table: Vec<Vec<String>> = points
        .iter()
        .zip(&rows)
        .map(|(p, (vals, _))| {
            let mut r = vec![p.distance.to_string()];
            r.extend(vals.iter().enumerate().map(|(i, &v)| {
                if a.method == ScanMethod::Fqe && i == 2 {
                    format!("{v}")
                } else {
                    energy(v)
                }
            }));
            r
        })
        .collect();
    let mut w = output::open(g.out.as_deref())?;
    w.write_all(csv(headers, &table).as_bytes())?;
    w.flush()?;

    if let Some(svg) = &a.svg {
        let x: Vec<f64> = points.iter().map(|p| p.distance).collect();
        let n_energy = if a.method == ScanMethod::Fqe { 2 } else { rows[0].0.len() };
        let series: Vec<(&str, Vec<f64>)> = (0..n_energy)
            .map(|i| (headers[i + 1], rows.iter().map(|(v, _)| v[i]).collect()))
            .collect();
        output::write_file(svg, &svg_plot("energy (a.u.) vs distance (angstrom)", &x, &series))?;
    }
    if let Some((d, e)) = points
        .iter()
        .zip(&rows)
        .map(|(p, (v, _))| (p.distance, v[0]))
        .filter(|(_, e)| e.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        eprintln!("lowest exact energy {e:.6} a.u. at {d} angstrom");
    }
    Ok(if rows.iter().all(|(_, c)| *c) { 0 } else { EXIT_MAX_ITERS })
}

fn cmd_perturb(g: &Global, a: PerturbArgs) -> Result<u8> {
    let m = load(g, &a.input)?;
    describe(&m, &a.input);
    let (ground, r) = perturb(&m.hamiltonian, a.sign_convention.into())?;
    let exact = oracle(g, &m).map_or(f64::NAN, |r| r.energy);
    let PerturbationReport {
        e_zero,
        h_nn,
        e_first_literal,
        e_first_rq,
        e_second_rq,
        e_second_series,
        coupled_terms,
        skipped_terms,
        ..
    } = r;
    let rows = vec![
        vec!["basis_index".into(), ground.index.to_string()],
        vec!["e_zero".into(), energy(e_zero)],
        vec!["h_nn".into(), energy(h_nn)],
        vec!["e_first_literal".into(), energy(e_first_literal)],
        vec!["e_first".into(), energy(e_first_rq)],
        vec!["e_second".into(), energy(e_second_rq)],
        vec!["e_second_series".into(), energy(e_second_series)],
        vec!["e_exact".into(), energy(exact)],
        vec!["e_hf".into(), energy(hf_energy(&m, electrons(g, &m)))],
        vec!["coupled_terms".into(), coupled_terms.to_string()],
        vec!["skipped_terms".into(), skipped_terms.to_string()],
    ];
    let mut w = output::open(g.out.as_deref())?;
    w.write_all(csv(&["quantity", "value"], &rows).as_bytes())?;
    w.flush()?;
    if ground.degenerate {
        eprintln!("warning: the unperturbed ground level is degenerate");
    }
    Ok(0)
}

fn vqe_compare(g: &Global, a: VqeArgs) -> Result<u8> {
    let m = load(g, &a.input)?;
    describe(&m, &a.input);
    let x0 = m.start_state(g.electrons)?;
    let cfg = descent_config(g);
    let vcfg = VqeConfig {
        layers: a.layers,
        gamma: a.vqe_gamma,
        delta_theta: a.delta_theta,
        max_iters: a.vqe_iters.unwrap_or(g.max_iters),
        seed: g.seed,
        central: a.central,
        threshold: None,
    };
    let (fqe, vqe) = rayon::join(
        || descent::run(&m.hamiltonian, &x0, &cfg),
        || vqe_run(&m.hamiltonian, &x0, &vcfg),
    );
    let (fqe, vqe) = (fqe?, vqe?);
    let col = |t: &IterationTrace, f: fn(&descent::IterationRecord) -> f64| t.records.iter().map(f).collect::<Vec<_>>();
    let iters = fqe.records.len().max(vqe.records.len());
    let csv = aligned_csv(
        &["iter", "fqe_energy_au", "vqe_energy_au", "fqe_cum_direct_cost", "vqe_cum_evaluations"].map(String::from),
        &[
            (0..iters).map(|i| i as f64).collect(),
            col(&fqe, |r| r.energy),
            col(&vqe, |r| r.energy),
            col(&fqe, |r| r.cum_direct_cost),
            col(&vqe, |r| r.cum_direct_cost),
        ],
    );
    let mut w = output::open(g.out.as_deref())?;
    w.write_all(csv.as_bytes())?;
    w.flush()?;

    eprintln!("descent final {:.10}, VQE final {:.10}", fqe.final_energy(), vqe.final_energy());
    if let Some(r) = oracle(g, &m) {
        let reach = |t: &IterationTrace| {
            t.first_within(r.energy, REACH_TOL)
                .map_or_else(|| "never".to_string(), |k| format!("iteration {k}"))
        };
        eprintln!("oracle {:.10}", r.energy);
        eprintln!("within {REACH_TOL:e} of the oracle: descent {}, VQE {}", reach(&fqe), reach(&vqe));
    }
    Ok(0)
}

fn noise_sweep(g: &Global, a: NoiseArgs) -> Result<u8> {
    let m = load(g, &a.input)?;
    describe(&m, &a.input);
    let x0 = m.start_state(g.electrons)?;
    let cfg = descent_config(g);
    let clean = descent::run(&m.hamiltonian, &x0, &cfg)?;
    let clean_e = clean.energies();
    let base = NoiseConfig {
        hamiltonian: a.noise.noise_ham,
        state: a.noise.noise_state,
        redraw: a.noise.redraw(),
        seed: g.seed,
        ..Default::default()
    };
    let runs: Vec<(Vec<f64>, NoiseVerdict)> = (0..a.seeds)
        .into_par_iter()
        .map(|s| -> Result<_> {
            let tr = descent::run_noisy(&m.hamiltonian, &x0, &cfg, &mut NoiseSession::new(base, s))?;
            let e = tr.energies();
            let v = assess(&e, &clean_e);
            Ok((e, v))
        })
        .collect::<Result<_>>()?;

    let mut headers = vec!["iter".to_string(), "noiseless".to_string()];
    headers.extend((0..a.seeds).map(|s| format!("stream_{s}")));
    let len = runs.iter().map(|(e, _)| e.len()).chain([clean_e.len()]).max().unwrap_or(0);
    let mut columns = vec![(0..len).map(|i| i as f64).collect(), clean_e.clone()];
    columns.extend(runs.iter().map(|(e, _)| e.clone()));
    let mut w = output::open(g.out.as_deref())?;
    w.write_all(aligned_csv(&headers, &columns).as_bytes())?;
    w.flush()?;

    if let Some(p) = &a.summary {
        let rows: Vec<Vec<String>> = runs
            .iter()
            .enumerate()
            .map(|(s, (_, v))| {
                vec![
                    s.to_string(),
                    format!("{:.6e}", v.final_error),
                    v.within_precision.to_string(),
                    format!("{:.6e}", v.tail_variance),
                    v.oscillating.to_string(),
                    v.excited_level.to_string(),
                    v.flagged().to_string(),
                ]
            })
            .collect();
        let headers = ["stream", "final_error", "within_precision", "tail_variance", "oscillating", "excited_level", "flagged"];
        output::write_file(p, &csv(&headers, &rows))?;
    }
    let within = runs.iter().filter(|(_, v)| v.within_precision).count();
    let flagged = runs.iter().filter(|(_, v)| v.flagged()).count();
    let oscillating = runs.iter().filter(|(_, v)| v.oscillating).count();
    eprintln!(
        "noise hamiltonian={} state={}: {within}/{} within {CHEMICAL_PRECISION:e} of the noiseless {:.10}, \
         {flagged} flagged ({oscillating} oscillating)",
        base.hamiltonian,
        base.state,
        a.seeds,
        clean.final_energy()
    );
    Ok(0)
}

fn jw(g: &Global, a: JwArgs) -> Result<u8> {
    let m = load(g, &a.input)?;
    let text = match a.format {
        PauliFormat::Json => pauli::to_json(&m.hamiltonian),
        PauliFormat::Text => {
            let mut doc = PauliDocument::new(m.hamiltonian.clone());
            doc.metadata = m.metadata.clone();
            if let Some(ne) = electrons(g, &m) {
                doc.metadata.insert("electrons".into(), ne.to_string());
            }
            pauli::to_text(&doc)
        }
    };
    let mut w = output::open(g.out.as_deref())?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    eprintln!("{} qubits, {} terms", m.n_qubits(), m.hamiltonian.len());
    Ok(0)
}
