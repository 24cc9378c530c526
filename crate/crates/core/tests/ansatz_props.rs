mod common;

use antibp::ansatz::{
    antibp_encode, identity_block, init_angles, random_layered, random_prune, INITIAL_LATENT,
};
use antibp::antibp::GatedParams;
use antibp::sim::{expectation, run, Gate, GateKind, Statevector};
use antibp::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn layered_gate_counts(n in 2usize..10, depth in 1usize..40, seed in any::<u64>()) {
        let c = random_layered(n, depth, seed).unwrap();
        prop_assert_eq!(c.gate_counts(), (n * depth, (n - 1) * depth));
        prop_assert_eq!(c.n_slots(), n * depth);
        let (ib, _) = identity_block(&c, &init_angles(c.n_slots(), seed)).unwrap();
        prop_assert_eq!(ib.gate_counts(), (2 * n * depth, 2 * (n - 1) * depth));
    }

    #[test]
    fn encoding_preserves_order_and_qubits(n in 2usize..6, depth in 1usize..10, seed in any::<u64>()) {
        let c = random_layered(n, depth, seed).unwrap();
        let gc = antibp_encode(&c).unwrap();
        prop_assert_eq!(gc.n_rotations(), n * depth);
        prop_assert_eq!(gc.n_entanglers(), (n - 1) * depth);
        for (g, e) in c.gates().iter().zip(gc.base.gates()) {
            prop_assert_eq!(g.qubits(), e.qubits());
            match g.kind() {
                GateKind::Cz => prop_assert_eq!(e.kind(), GateKind::Cp),
                k => prop_assert_eq!(e.kind(), k),
            }
        }
    }

    #[test]
    fn identity_block_starts_at_reference_state(seed in any::<u64>(), n in 2usize..6) {
        let mut r = common::rng(seed);
        let c = random_layered(n, 6, seed).unwrap();
        let theta = init_angles(c.n_slots(), seed);
        let (ib, x) = identity_block(&c, &theta).unwrap();
        let h = common::random_hamiltonian(&mut r, n, 6);
        let e = expectation(&run(&ib, &x).unwrap(), &h).unwrap();
        let e0 = expectation(&Statevector::zero(n).unwrap(), &h).unwrap();
        prop_assert!((e - e0).abs() <= 1e-10);
    }

    #[test]
    fn random_prune_keeps_requested_counts_in_order(seed in any::<u64>(), k1 in 0usize..=24, k2 in 0usize..=18) {
        let c = random_layered(4, 6, 1).unwrap();
        let p = random_prune(&c, k1, k2, seed).unwrap();
        prop_assert_eq!(p.gate_counts(), (k1, k2));
        prop_assert_eq!(p.n_slots(), k1);
        // kept gates appear in the source as an ordered subsequence
        let mut it = c.gates().iter();
        for g in p.gates() {
            prop_assert!(it.any(|s| s.qubits() == g.qubits() && s.kind() == g.kind()));
        }
        prop_assert_eq!(p, random_prune(&c, k1, k2, seed).unwrap());
    }
}

#[test]
fn table_shaped_counts() {
    let c = random_layered(14, 60, 0).unwrap();
    assert_eq!(c.gate_counts(), (840, 780));
    let gc = antibp_encode(&c).unwrap();
    assert_eq!((gc.n_rotations(), gc.n_entanglers()), (840, 780));
    assert_eq!(random_prune(&c, 428, 372, 3).unwrap().gate_counts(), (428, 372));
    assert!(matches!(
        random_prune(&c, 841, 0, 3),
        Err(Error::NotEnoughGates { .. })
    ));
    assert_eq!(random_layered(4, 60, 0).unwrap().gate_counts(), (240, 180));
}

#[test]
fn same_seed_same_circuit() {
    assert_eq!(random_layered(5, 20, 42).unwrap(), random_layered(5, 20, 42).unwrap());
    assert_ne!(random_layered(5, 20, 42).unwrap(), random_layered(5, 20, 43).unwrap());
    assert!(random_layered(1, 3, 0).is_err());
    assert!(random_layered(3, 0, 0).is_err());
}

#[test]
fn inverse_half_negates_angles() {
    let c = random_layered(3, 2, 5).unwrap();
    let theta = init_angles(c.n_slots(), 5);
    let (ib, x) = identity_block(&c, &theta).unwrap();
    let half = c.gates().len();
    let last = &ib.gates()[2 * half - 1];
    let first = &c.gates()[0];
    assert_eq!(last.qubits(), first.qubits());
    assert_eq!(x[last.slot().unwrap()], -theta[first.slot().unwrap()]);
}

#[test]
fn keep_everything_is_the_source_circuit() {
    let c = random_layered(4, 5, 2).unwrap();
    let (n1, n2) = c.gate_counts();
    assert_eq!(random_prune(&c, n1, n2, 9).unwrap(), c);
}

fn saturated(gc: &antibp::ansatz::GatedCircuit, theta: Vec<f64>, raw: f64) -> GatedParams {
    GatedParams {
        theta,
        a: vec![raw; gc.n_rotations()],
        b: vec![raw; gc.n_entanglers()],
        k: gc.k,
    }
}

#[test]
fn saturated_latents_reproduce_source_and_identity() {
    let c = random_layered(4, 8, 6).unwrap();
    let gc = antibp_encode(&c).unwrap();
    let theta = init_angles(c.n_slots(), 6);
    let source = run(&c, &theta).unwrap();

    // sigmoid(50 r) >= 1 - 1e-7 needs r >= ln(1e7)/50 ~ 0.3224
    for raw in [0.33, 0.5, 2.0] {
        let phi = gc.effective_angles(&saturated(&gc, theta.clone(), raw)).unwrap();
        let psi = run(&gc.base, &phi).unwrap();
        let d = psi
            .amplitudes()
            .iter()
            .zip(source.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(d <= 1e-6, "raw {raw}: {d}");
    }

    let phi = gc.effective_angles(&saturated(&gc, theta, -2.0)).unwrap();
    let psi = run(&gc.base, &phi).unwrap();
    assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn encoded_initial_params() {
    let c = random_layered(3, 2, 0).unwrap();
    let gc = antibp_encode(&c).unwrap();
    let theta = init_angles(c.n_slots(), 0);
    let p = gc.initial_params(&theta).unwrap();
    assert_eq!(p.theta, theta);
    assert!(p.a.iter().chain(&p.b).all(|&v| v == INITIAL_LATENT));
    assert!(antibp_encode(&gc.base).is_err());
    assert!(identity_block(&gc.base, &vec![0.0; gc.base.n_slots()]).is_err());
    assert!(matches!(gc.base.gates()[3], Gate::Cp { .. }));
}
