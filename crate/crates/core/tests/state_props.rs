mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::{dense, eigenvalues, random_state, random_string, random_sum, rng, to_dvector};
use fqe_core::compiled::CompiledSum;
use fqe_core::{PauliSum, StateVector};

proptest! {
    #![proptest_config(common::cases(64))]

    #[test]
    fn pauli_application_preserves_norm(seed in any::<u64>(), n in 1usize..=8) {
        let mut r = rng(seed);
        let s = random_state(&mut r, n);
        let p = random_string(&mut r, n);
        let out = s.apply_pauli_string(&p, 1.0).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_sum_matches_matrix(seed in any::<u64>(), n in 1usize..=8, m in 1usize..=24) {
        let mut r = rng(seed);
        let h = random_sum(&mut r, n, m);
        let s = random_state(&mut r, n);
        let (hs, norm) = s.apply_sum(&h).unwrap();
        let expected = dense(&h) * to_dvector(&s);
        for (a, b) in hs.amplitudes().iter().zip(expected.iter()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
        prop_assert!((norm - expected.norm()).abs() < 1e-10);
        let compiled = CompiledSum::new(&h).apply(&s).unwrap();
        for (a, b) in compiled.amplitudes().iter().zip(expected.iter()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn expectation_within_spectrum(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=32) {
        let mut r = rng(seed);
        let h = random_sum(&mut r, n, m);
        let s = random_state(&mut r, n);
        let ev = eigenvalues(&dense(&h));
        let e = s.expectation(&h).unwrap();
        prop_assert!(e >= ev[0] - 1e-10 && e <= ev[ev.len() - 1] + 1e-10);
        prop_assert!((CompiledSum::new(&h).expectation(&s).unwrap() - e).abs() < 1e-10);
        let v = to_dvector(&s);
        let direct = v.dotc(&(dense(&h) * &v));
        prop_assert!(direct.im.abs() < 1e-10);
        prop_assert!((direct.re - e).abs() < 1e-10);
    }

    #[test]
    fn dump_round_trip(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let s = random_state(&mut r, n);
        let mut buf = Vec::new();
        s.write_dump(&mut buf).unwrap();
        prop_assert_eq!(buf.len(), 16 + 16 * (1usize << n));
        prop_assert_eq!(StateVector::read_dump(buf.as_slice()).unwrap(), s);
    }
}

#[test]
fn gradient_operator_on_plus() {
    let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
    let hg = z.gradient_operator(1.0).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector::from_real(1, &[s, s]).unwrap();
    let (out, norm) = plus.apply_sum(&hg).unwrap();
    assert!((norm - 2f64.sqrt()).abs() < 1e-15);
    assert!(out.amplitudes()[0].norm() < 1e-15);
    assert!((out.amplitudes()[1] - Complex64::new(2.0 * s, 0.0)).norm() < 1e-15);
    assert!(plus.expectation(&z).unwrap().abs() < 1e-15);
}

#[test]
fn unnormalized_expectation_is_rejected() {
    let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
    let s = StateVector::from_real(1, &[1.0, 1.0]).unwrap();
    assert!(s.expectation(&z).is_err());
}
