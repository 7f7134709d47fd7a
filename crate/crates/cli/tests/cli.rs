use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn fqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqe")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap_or(f64::NAN)).collect()
}

fn summary_value(err: &str, key: &str) -> f64 {
    let line = err.lines().find(|l| l.starts_with(key)).unwrap();
    line[key.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

fn h2() -> String {
    data("h2_scan/h2_0.7314.json").to_string_lossy().into_owned()
}

#[test]
fn solve_h2_reaches_table_energy() {
    let o = fqe(&["solve", &h2()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let err = stderr(&o);
    let e = summary_value(&err, "final energy:");
    assert!((e - (-1.1373)).abs() <= 1.6e-3, "{e}");
    assert!(err.contains("oracle energy:") && err.contains("discrepancy:"));
    assert!(err.contains("provenance: molecule=H2"));
    assert!(err.contains("reference:"));
    let out = stdout(&o);
    assert!(out.starts_with("iter,energy_au,rel_change,p_success,cum_direct_cost,cum_amplified_cost\n"));
}

#[test]
fn modes_give_identical_traces() {
    let circuit = stdout(&fqe(&["solve", &h2(), "--mode", "circuit"]));
    let direct = stdout(&fqe(&["solve", &h2(), "--mode", "direct"]));
    for name in ["energy_au", "p_success"] {
        let (a, b) = (column(&circuit, name), column(&direct, name));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!(x.is_nan() && y.is_nan() || (x - y).abs() < 1e-12, "{name}: {x} vs {y}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(fqe(&["solve", &h2(), "--gamma", "0"]).status.code(), Some(3));
    assert_eq!(fqe(&["solve", &h2(), "--max-iters", "2"]).status.code(), Some(2));
    assert_eq!(fqe(&["solve", "/nonexistent/h2.json"]).status.code(), Some(3));
    assert_eq!(fqe(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(fqe(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_pauli_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "0.5 ZZ\n0.25 XQ\n").unwrap();
    let o = fqe(&["solve", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn sampled_attempts_column() {
    let o = fqe(&["solve", &h2(), "--sample", "--seed", "3"]);
    let out = stdout(&o);
    let attempts = column(&out, "cum_sampled_attempts");
    assert_eq!(attempts[0], 0.0);
    assert!(attempts.windows(2).all(|w| w[1] >= w[0] + 1.0));
    assert_eq!(out, stdout(&fqe(&["solve", &h2(), "--sample", "--seed", "3"])));
}

#[test]
fn dump_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("state.bin");
    let o = fqe(&["solve", &h2(), "--dump-state", dump.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let first = summary_value(&stderr(&o), "final energy:");
    let o = fqe(&["solve", &h2(), "--resume", dump.to_str().unwrap(), "--max-iters", "3"]);
    let energies = column(&stdout(&o), "energy_au");
    assert!((energies[0] - first).abs() < 1e-9);
}

#[test]
fn scan_exact_minimum_at_equilibrium() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let svg = dir.path().join("scan.svg");
    let o = fqe(&[
        "scan",
        data("h2_scan").to_str().unwrap(),
        "--method",
        "exact",
        "--out",
        out.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let d = column(&csv, "distance_angstrom");
    let e = column(&csv, "e_exact");
    let (i, min) = e.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    assert_eq!(d[i], 0.7314);
    assert!((min - (-1.1373)).abs() < 5e-4);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn single_file_scan_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data("h2_scan/h2_0.7314.json"), dir.path().join("h2_0.7314.json")).unwrap();
    let o = fqe(&["scan", dir.path().to_str().unwrap(), "--method", "fqe"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    assert!(out.starts_with("distance_angstrom,e_exact,e_fqe,iterations\n"));
}

#[test]
fn scan_rejects_mixed_qubit_counts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(data("h2_scan/h2_0.7314.json"), dir.path().join("x_0.7.json")).unwrap();
    std::fs::copy(data("lih_scan/lih_1.5065.json"), dir.path().join("x_1.5.json")).unwrap();
    let o = fqe(&["scan", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("inconsistent qubit counts"));
}

#[test]
fn perturbation_scan_near_equilibrium() {
    for dir in ["h2_scan", "lih_scan"] {
        let o = fqe(&["scan", data(dir).to_str().unwrap(), "--method", "perturb"]);
        let out = stdout(&o);
        assert!(out.starts_with("distance_angstrom,e_exact,e_zero,e_first,e_second,e_hf\n"));
        let d = column(&out, "distance_angstrom");
        let exact = column(&out, "e_exact");
        let second = column(&out, "e_second");
        let i = exact.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((exact[i] - second[i]).abs() <= 1.6e-3, "{dir} at {}", d[i]);
    }
}

#[test]
fn perturb_reports_table_values() {
    let out = stdout(&fqe(&["perturb", &h2()]));
    let get = |k: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(&format!("{k},"))).unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    for (k, want) in [("e_zero", -1.1171), ("e_first", -1.1372), ("e_second", -1.1372), ("e_exact", -1.1373)] {
        assert!((get(k) - want).abs() < 5e-4, "{k}");
    }
    let flipped = stdout(&fqe(&["perturb", &h2(), "--sign-convention", "flipped"]));
    assert_ne!(out, flipped);
}

#[test]
fn zero_noise_sweep_matches_noiseless() {
    let o = fqe(&["noise-sweep", &h2(), "--noise-ham", "uniform:0", "--noise-state", "gaussian:0", "--seeds", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let clean = column(&out, "noiseless");
    for s in 0..3 {
        assert_eq!(column(&out, &format!("stream_{s}")), clean);
    }
}

#[test]
fn noise_sweep_is_deterministic() {
    let args = ["noise-sweep", &h2(), "--noise-ham", "uniform:0.01", "--noise-state", "uniform:0.01", "--seeds", "20", "--max-iters", "200"];
    let a = fqe(&args);
    let b = fqe(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let err = stderr(&a);
    let line = err.lines().find(|l| l.starts_with("noise")).unwrap();
    let within: usize = line.split(": ").nth(1).unwrap().split('/').next().unwrap().parse().unwrap();
    assert!(within >= 18, "{line}");
}

#[test]
fn jw_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (format, name) in [("text", "h2.txt"), ("json", "h2.pauli.json")] {
        let p = dir.path().join(name);
        let o = fqe(&["jw", &h2(), "--format", format, "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let again = dir.path().join(format!("again-{name}"));
        fqe(&["jw", p.to_str().unwrap(), "--format", format, "--out", again.to_str().unwrap()]);
        let first = std::fs::read_to_string(&p).unwrap();
        let second = std::fs::read_to_string(&again).unwrap();
        if format == "text" {
            assert_eq!(first, second);
        }
        let o = fqe(&["solve", p.to_str().unwrap(), "--electrons", "2"]);
        assert_eq!(o.status.code(), Some(0));
        let e = summary_value(&stderr(&o), "final energy:");
        assert!((e - (-1.1372957)).abs() < 1e-6);
    }
}

#[test]
fn vqe_compare_emits_paired_columns() {
    let o = fqe(&["vqe-compare", &h2(), "--max-iters", "40", "--vqe-gamma", "0.05"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("iter,fqe_energy_au,vqe_energy_au,fqe_cum_direct_cost,vqe_cum_evaluations\n"));
    assert_eq!(out.lines().count(), 42);
    assert!(stderr(&o).contains("within 1e-3 of the oracle"));
}
