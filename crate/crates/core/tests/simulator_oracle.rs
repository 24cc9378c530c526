mod common;

use std::f64::consts::PI;

use antibp::hamiltonian::parse_hamiltonian;
use antibp::sim::{expectation, run, Circuit, Gate, Statevector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn max_amp_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn run_matches_dense_unitary_product() {
    let mut r = common::rng(11);
    for _ in 0..40 {
        let c = common::random_circuit(&mut r, 4, 30);
        let x = common::random_angles(&mut r, c.n_slots());
        let psi = run(&c, &x).unwrap();
        let oracle = common::oracle_state(&c, &x);
        assert!(max_amp_diff(psi.amplitudes(), oracle.as_slice()) <= 1e-12);
    }
}

#[test]
fn expectation_of_random_state_matches_dense_quadratic_form() {
    let mut r = common::rng(5);
    for _ in 0..10 {
        let h = common::random_hamiltonian(&mut r, 5, 8);
        let v = common::random_unit_vector(&mut r, 32);
        let state = Statevector::from_amplitudes(v.as_slice().to_vec()).unwrap();
        let e = expectation(&state, &h).unwrap();
        assert!((e - common::oracle_energy(&h, &v)).abs() <= 1e-10);
    }
}

#[test]
fn norm_survives_a_thousand_gates() {
    let mut r = common::rng(3);
    let c = common::random_circuit(&mut r, 6, 1000);
    let x = common::random_angles(&mut r, c.n_slots());
    assert!((run(&c, &x).unwrap().norm() - 1.0).abs() <= 1e-9);
}

#[test]
fn disjoint_gates_commute() {
    let mut r = common::rng(8);
    let prefix = common::random_circuit(&mut r, 4, 12);
    let mut x = common::random_angles(&mut r, prefix.n_slots());
    let (a, b) = (r.gen_range(-PI..PI), r.gen_range(-PI..PI));
    x.extend([a, b]);
    let n = prefix.n_slots();

    let mut fwd = prefix.clone();
    fwd.push(Gate::rx(0, n)).unwrap();
    fwd.push(Gate::rz(3, n + 1)).unwrap();
    let mut rev = prefix;
    rev.push(Gate::rz(3, n + 1)).unwrap();
    rev.push(Gate::rx(0, n)).unwrap();

    let d = max_amp_diff(run(&fwd, &x).unwrap().amplitudes(), run(&rev, &x).unwrap().amplitudes());
    assert!(d <= 1e-14);
}

#[test]
fn cp_pi_equals_cz_bit_exactly_on_basis_states() {
    for control_first in [true, false] {
        let (c0, t0) = if control_first { (0, 1) } else { (1, 0) };
        for basis in 0..4 {
            let mut amps = vec![Complex64::new(0.0, 0.0); 4];
            amps[basis] = Complex64::new(1.0, 0.0);
            let mut a = Statevector::from_amplitudes(amps.clone()).unwrap();
            let mut b = Statevector::from_amplitudes(amps).unwrap();
            a.apply_gate(&Gate::cp(c0, t0, 0), PI).unwrap();
            b.apply_gate(&Gate::cz(c0, t0), 0.0).unwrap();
            assert_eq!(a.amplitudes(), b.amplitudes());
        }
    }
}

#[test]
fn rx_pi_then_cz_hand_computation() {
    let c = Circuit::from_gates(2, [Gate::rx(0, 0), Gate::cz(0, 1)]).unwrap();
    let psi = run(&c, &[PI]).unwrap();
    let z0 = parse_hamiltonian("1.0 ZI").unwrap();
    let z1 = parse_hamiltonian("1.0 IZ").unwrap();
    assert!((expectation(&psi, &z0).unwrap() + 1.0).abs() < 1e-15);
    assert!((expectation(&psi, &z1).unwrap() - 1.0).abs() < 1e-15);
    // RX(pi)|0> = -i|1>; CZ leaves |q1=0, q0=1> alone.
    assert!((psi.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn any_circuit_preserves_norm_and_matches_oracle(
        seed in any::<u64>(),
        n in 1usize..=5,
        g in 0usize..40,
    ) {
        let mut r = common::rng(seed);
        let c = common::random_circuit(&mut r, n, g);
        let x = common::random_angles(&mut r, c.n_slots());
        let psi = run(&c, &x).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() <= 1e-9);
        let oracle = common::oracle_state(&c, &x);
        prop_assert!(max_amp_diff(psi.amplitudes(), oracle.as_slice()) <= 1e-12);
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>(), n in 2usize..=6, g in 0usize..30) {
        let mut r = common::rng(seed);
        let c = common::random_circuit(&mut r, n, g);
        prop_assert_eq!(Circuit::from_text(&c.to_text()).unwrap(), c);
    }
}
