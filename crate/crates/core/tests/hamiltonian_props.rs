mod common;

use antibp::hamiltonian::{parse_hamiltonian, tfim, Hamiltonian};
use approx::assert_abs_diff_eq;
use proptest::prelude::*;

fn pauli_text() -> impl Strategy<Value = String> {
    (1usize..=5).prop_flat_map(|n| {
        let term = (-10.0f64..10.0, proptest::collection::vec("[IXYZ]", n))
            .prop_map(|(c, ops)| format!("{c:e} {}", ops.concat()));
        proptest::collection::vec(term, 1..8).prop_map(|lines| lines.join("\n"))
    })
}

fn hamiltonian() -> impl Strategy<Value = Hamiltonian> {
    pauli_text().prop_map(|t| parse_hamiltonian(&t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(h in hamiltonian()) {
        let again = parse_hamiltonian(&h.to_text()).unwrap();
        prop_assert_eq!(again, h);
    }

    #[test]
    fn dense_matrix_is_hermitian_and_matches_kronecker_oracle(h in hamiltonian()) {
        let m = h.dense_matrix().unwrap();
        let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(herm <= 1e-13);
        let oracle = common::pauli_sum_matrix(&h);
        let diff = (&m - oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-13);
    }

    #[test]
    fn ground_energy_is_a_variational_lower_bound(h in hamiltonian(), seed in any::<u64>()) {
        let e0 = h.exact_ground_energy().unwrap();
        let mut r = common::rng(seed);
        for _ in 0..100 {
            let v = common::random_unit_vector(&mut r, 1 << h.n_qubits());
            prop_assert!(e0 <= common::oracle_energy(&h, &v) + 1e-12);
        }
    }

    #[test]
    fn ground_energy_scales_linearly(h in hamiltonian(), c in 0.01f64..20.0) {
        let e = h.exact_ground_energy().unwrap();
        let ec = h.scaled(c).exact_ground_energy().unwrap();
        prop_assert!((ec - c * e).abs() <= 1e-9 * (1.0 + c * e.abs()));
    }
}

#[test]
fn tfim_reference_values() {
    assert_abs_diff_eq!(tfim(1, 1.0, 1.0).unwrap().exact_ground_energy().unwrap(), -1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(
        tfim(2, 1.0, 1.0).unwrap().exact_ground_energy().unwrap(),
        -(5.0f64).sqrt(),
        epsilon = 1e-12
    );
    let classical = tfim(3, 1.0, 0.0).unwrap();
    assert_eq!(classical.terms().len(), 5);
    assert_abs_diff_eq!(classical.exact_ground_energy().unwrap(), -2.0, epsilon = 1e-12);
}

#[test]
fn leftmost_character_is_qubit_zero() {
    // X on qubit 0 flips the least significant index bit.
    let m = parse_hamiltonian("1.0 XI").unwrap().dense_matrix().unwrap();
    assert_eq!(m[(1, 0)].re, 1.0);
    assert_eq!(m[(2, 0)].re, 0.0);
}
