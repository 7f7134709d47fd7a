mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use fqe_core::fermion::{
    hamiltonian_from_integrals, jordan_wigner, FermionOperator, IntegralFile, IntegralTable, Ladder,
    SpinLayout, TwoBodyOrdering,
};
use fqe_core::oracle::fock_matrix;
use common::{eigenvalues, rng};

/// Random real table with `h_one` symmetric and `⟨ij|kl⟩ = ⟨ji|lk⟩ = ⟨kl|ij⟩`.
fn random_table<R: Rng>(r: &mut R, n: usize) -> IntegralTable {
    let mut h1 = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = r.random_range(-1.0..1.0);
            h1[i * n + j] = v;
            h1[j * n + i] = v;
        }
    }
    let idx = |i: usize, j: usize, k: usize, l: usize| ((i * n + j) * n + k) * n + l;
    let raw: Vec<f64> = (0..n * n * n * n).map(|_| r.random_range(-0.5..0.5)).collect();
    let mut h2 = vec![0.0; raw.len()];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    h2[idx(i, j, k, l)] =
                        (raw[idx(i, j, k, l)] + raw[idx(j, i, l, k)] + raw[idx(k, l, i, j)] + raw[idx(l, k, j, i)]) / 4.0;
                }
            }
        }
    }
    IntegralTable::new(n, h1, h2, r.random_range(-1.0..1.0)).unwrap()
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(common::cases(100))]

    #[test]
    fn jw_matrix_equals_fock_matrix(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let t = random_table(&mut r, n);
        let f = hamiltonian_from_integrals(&t).unwrap();
        let jw = jordan_wigner(&f, n).unwrap().to_matrix().unwrap();
        let fock = fock_matrix(&f, n).unwrap();
        prop_assert!(max_diff(&jw, &fock) < 1e-9);
        let (a, b) = (eigenvalues(&jw), eigenvalues(&fock));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn particle_number_blocks(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let t = random_table(&mut r, n);
        let m = jordan_wigner(&hamiltonian_from_integrals(&t).unwrap(), n).unwrap().to_matrix().unwrap();
        for i in 0..1usize << n {
            for j in 0..1usize << n {
                if i.count_ones() != j.count_ones() {
                    prop_assert!(m[(i, j)].norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn file_conventions_agree(seed in any::<u64>()) {
        // the same table written physicist/interleaved and chemist/blocked
        let n = 4;
        let mut r = rng(seed);
        let t = random_table(&mut r, n);
        let expected = jordan_wigner(&hamiltonian_from_integrals(&t).unwrap(), n).unwrap();
        let blocked_of = |p: usize| if p % 2 == 0 { p / 2 } else { n / 2 + p / 2 };
        let mut h_one = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                h_one[blocked_of(i)][blocked_of(j)] = t.one_body(i, j);
            }
        }
        let mut h_two = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        // ⟨ij|kl⟩ = (ik|jl)
                        let v = t.two_body(i, j, k, l);
                        let [a, b, c, d] = [i, k, j, l].map(|q| blocked_of(q) as f64);
                        h_two.push([a, b, c, d, v]);
                    }
                }
            }
        }
        let file = IntegralFile {
            n_orbitals: n,
            ordering: TwoBodyOrdering::Chemist,
            spin_layout: SpinLayout::Blocked,
            e_const: t.e_const(),
            h_one,
            h_two,
            n_electrons: None,
            provenance: None,
        };
        let json = serde_json::to_string(&file).unwrap();
        let back = IntegralFile::from_json(&json).unwrap().to_table(None).unwrap();
        let got = jordan_wigner(&hamiltonian_from_integrals(&back).unwrap(), n).unwrap();
        prop_assert_eq!(got.len(), expected.len());
        for ((c1, p1), (c2, p2)) in got.iter().zip(expected.iter()) {
            prop_assert_eq!(p1, p2);
            prop_assert!((c1 - c2).abs() < 1e-12);
        }
    }
}

#[test]
fn anticommutation_as_matrices() {
    for n in 1..=3 {
        for p in 0..n {
            for q in 0..n {
                let pq = FermionOperator::new(n, vec![(1.0, vec![Ladder::annihilate(p), Ladder::create(q)])]).unwrap();
                let qp = FermionOperator::new(n, vec![(1.0, vec![Ladder::create(q), Ladder::annihilate(p)])]).unwrap();
                let sum = fock_matrix(&pq, n).unwrap() + fock_matrix(&qp, n).unwrap();
                let dim = 1 << n;
                let expected = if p == q {
                    DMatrix::<Complex64>::identity(dim, dim)
                } else {
                    DMatrix::zeros(dim, dim)
                };
                assert!(max_diff(&sum, &expected) < 1e-15, "p={p} q={q}");
            }
        }
    }
}

#[test]
fn non_hermitian_operator_fails_jw() {
    let f = FermionOperator::new(2, vec![(1.0, vec![Ladder::create(0), Ladder::annihilate(1)])]).unwrap();
    assert!(jordan_wigner(&f, 2).is_err());
}
