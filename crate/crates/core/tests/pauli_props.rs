mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use fqe_core::pauli::{self, PauliDocument, PauliSum};
use common::{dense, random_string, random_sum, rng};

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(common::cases(200))]

    #[test]
    fn product_matrix_matches_matrix_product(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let a = random_string(&mut r, n);
        let b = random_string(&mut r, n);
        let (phase, c) = pauli::multiply(&a, &b).unwrap();
        let lhs = c.to_matrix().unwrap() * phase.to_complex();
        let rhs = a.to_matrix().unwrap() * b.to_matrix().unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn merging_preserves_the_operator(seed in any::<u64>(), n in 1usize..=4, m in 1usize..40) {
        let mut r = rng(seed);
        // duplicate every string to force merging
        let base = random_sum(&mut r, n, m);
        let mut raw: Vec<_> = base.terms().to_vec();
        raw.extend(base.terms().iter().map(|&(c, p)| (0.5 * c, p)));
        let merged = PauliSum::new(n, raw.clone()).unwrap();
        let mut expected = DMatrix::<Complex64>::zeros(1 << n, 1 << n);
        for (c, p) in &raw {
            expected += p.to_matrix().unwrap() * Complex64::new(*c, 0.0);
        }
        prop_assert!(max_diff(&dense(&merged), &expected) < 1e-12);
        prop_assert!(merged.len() <= base.len());
    }

    #[test]
    fn gradient_operator_matrix(seed in any::<u64>(), n in 1usize..=4, gamma in 0.01f64..3.0) {
        let mut r = rng(seed);
        let h = random_sum(&mut r, n, 12);
        let hg = h.gradient_operator(gamma).unwrap();
        let dim = 1 << n;
        let expected = DMatrix::<Complex64>::identity(dim, dim) - dense(&h) * Complex64::new(gamma, 0.0);
        prop_assert!(max_diff(&dense(&hg), &expected) < 1e-12);
    }

    #[test]
    fn diagonal_split(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let h = random_sum(&mut r, n, 20);
        let (h0, hp) = h.split_diagonal();
        let m0 = dense(&h0);
        let mp = dense(&hp);
        for i in 0..1 << n {
            for j in 0..1 << n {
                if i != j {
                    prop_assert!(m0[(i, j)].norm() < 1e-12);
                }
            }
            prop_assert!(mp[(i, i)].norm() < 1e-12);
        }
        prop_assert!(max_diff(&(m0 + mp), &dense(&h)) < 1e-12);
    }

    #[test]
    fn text_round_trip_is_identity(seed in any::<u64>(), n in 1usize..=6, m in 0usize..30) {
        let mut r = rng(seed);
        let h = random_sum(&mut r, n, m);
        let text = pauli::to_text(&PauliDocument::new(h.clone()));
        let back = pauli::parse_text(&text).unwrap();
        prop_assert_eq!(&back.sum, &h);
        if !h.is_empty() {
            prop_assert_eq!(pauli::parse_json(&pauli::to_json(&h)).unwrap(), h);
        }
    }

    #[test]
    fn matrix_decomposition_inverts_expansion(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let h = random_sum(&mut r, n, 10);
        let back = PauliSum::from_matrix(&dense(&h)).unwrap();
        prop_assert_eq!(back.len(), h.len());
        for ((c1, p1), (c2, p2)) in back.iter().zip(h.iter()) {
            prop_assert_eq!(p1, p2);
            prop_assert!((c1 - c2).abs() < 1e-12);
        }
    }
}

#[test]
fn complex_matrix_is_rejected_by_decomposition() {
    let mut m = DMatrix::<Complex64>::zeros(2, 2);
    m[(0, 1)] = Complex64::new(0.0, 1.0);
    assert!(PauliSum::from_matrix(&m).is_err());
}
