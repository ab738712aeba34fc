mod common;

use common::*;
use proptest::prelude::*;
use qcos_core::*;

proptest! {
    #[test]
    fn dense_matrix_is_hermitian(h in hamiltonian_strategy(4, 8)) {
        let m = h.dense_matrix().unwrap();
        let diff = (&m - m.adjoint()).camax();
        prop_assert!(diff <= 1e-12, "deviation {diff}");
    }

    #[test]
    fn l1_bound_covers_spectrum(h in hamiltonian_strategy(4, 8)) {
        let d = diagonalize(&h).unwrap();
        prop_assert!(h.l1_norm_bound() + 1e-10 >= d.spectral_radius());
    }

    #[test]
    fn offset_shifts_every_eigenvalue(h in hamiltonian_strategy(3, 6), s in -3.0f64..3.0) {
        let base = diagonalize(&h).unwrap();
        let shifted = diagonalize(&h.offset(s).unwrap()).unwrap();
        for (a, b) in base.energies().iter().zip(shifted.energies()) {
            prop_assert!((a + s - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn display_round_trips(h in hamiltonian_strategy(4, 8)) {
        let reparsed = parse_hamiltonian(&h.to_string()).unwrap();
        prop_assert_eq!(&reparsed, &h);
        prop_assert_eq!(reparsed.to_string(), h.to_string());
    }

    #[test]
    fn matrix_free_action_matches_dense(h in hamiltonian_strategy(3, 6), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = seeded(seed);
        let psi: Vec<num_complex::Complex64> = (0..h.dimension())
            .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let dense = h.dense_matrix().unwrap() * nalgebra::DVector::from_vec(psi.clone());
        let applied = h.apply(&psi).unwrap();
        for (a, b) in applied.iter().zip(dense.iter()) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn fixture_file_parses() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/two_level.ham"
    ))
    .unwrap();
    assert_eq!(parse_hamiltonian(&text).unwrap(), fixture());
}

#[test]
fn errors_carry_line_numbers() {
    let err = parse_hamiltonian("1.0 Z0\n0.5 X0 Z0\n").unwrap_err();
    assert!(
        matches!(
            err,
            Error::DuplicateQubit { .. } | Error::Parse { line: 2, .. }
        ),
        "{err:?}"
    );
    let err = parse_hamiltonian("# header\nabc Z0\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
}
