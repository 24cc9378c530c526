//! Dense Kronecker-product oracles and random instance generators shared by
//! the integration tests. Nothing here calls the crate's kernels.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use antibp::hamiltonian::{Hamiltonian, Pauli, PauliString, PauliTerm};
use antibp::sim::{Axis, Circuit, Gate};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

/// Qubit 0 is the least significant index bit, so it is the rightmost factor.
fn embed_1q(u: &DMatrix<Complex64>, q: usize, n: usize) -> DMatrix<Complex64> {
    let hi = DMatrix::<Complex64>::identity(1 << (n - q - 1), 1 << (n - q - 1));
    let lo = DMatrix::<Complex64>::identity(1 << q, 1 << q);
    hi.kronecker(&u.kronecker(&lo))
}

pub fn rotation_matrix(axis: Axis, phi: f64) -> DMatrix<Complex64> {
    let p = match axis {
        Axis::X => Pauli::X,
        Axis::Y => Pauli::Y,
        Axis::Z => Pauli::Z,
    };
    // exp(-i phi P / 2) = cos(phi/2) I - i sin(phi/2) P
    let id = pauli_matrix(Pauli::I);
    id * c((phi / 2.0).cos(), 0.0) + pauli_matrix(p) * c(0.0, -(phi / 2.0).sin())
}

fn controlled_phase(control: usize, target: usize, phi: f64, n: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut m = DMatrix::<Complex64>::identity(dim, dim);
    for b in 0..dim {
        if (b >> control) & 1 == 1 && (b >> target) & 1 == 1 {
            m[(b, b)] = Complex64::from_polar(1.0, phi);
        }
    }
    m
}

pub fn gate_matrix(g: &Gate, angle: f64, n: usize) -> DMatrix<Complex64> {
    match *g {
        Gate::Rot { axis, qubit, .. } => embed_1q(&rotation_matrix(axis, angle), qubit, n),
        Gate::Cp {
            control, target, ..
        } => controlled_phase(control, target, angle, n),
        Gate::Cz { control, target } => controlled_phase(control, target, PI, n),
    }
}

pub fn circuit_unitary(circ: &Circuit, angles: &[f64]) -> DMatrix<Complex64> {
    let n = circ.n_qubits();
    let mut u = DMatrix::<Complex64>::identity(1 << n, 1 << n);
    for g in circ.gates() {
        let a = g.slot().map_or(0.0, |s| angles[s]);
        u = gate_matrix(g, a, n) * u;
    }
    u
}

pub fn oracle_state(circ: &Circuit, angles: &[f64]) -> DVector<Complex64> {
    let u = circuit_unitary(circ, angles);
    u.column(0).into_owned()
}

/// Sum of coefficient-weighted Pauli tensor products, leftmost character on qubit 0.
pub fn pauli_sum_matrix(h: &Hamiltonian) -> DMatrix<Complex64> {
    let n = h.n_qubits();
    let mut m = DMatrix::<Complex64>::zeros(1 << n, 1 << n);
    for t in h.terms() {
        let mut p = DMatrix::<Complex64>::identity(1, 1);
        for &op in t.paulis.ops().iter().rev() {
            p = p.kronecker(&pauli_matrix(op));
        }
        m += p * c(t.coefficient, 0.0);
    }
    m
}

pub fn oracle_energy(h: &Hamiltonian, v: &DVector<Complex64>) -> f64 {
    let m = pauli_sum_matrix(h);
    (v.adjoint() * &m * v)[(0, 0)].re
}

pub fn random_hamiltonian(r: &mut impl Rng, n: usize, n_terms: usize) -> Hamiltonian {
    let terms = (0..n_terms)
        .map(|_| {
            let ops = (0..n)
                .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][r.gen_range(0..4)])
                .collect();
            PauliTerm {
                coefficient: r.gen_range(-1.0..1.0),
                paulis: PauliString::new(ops),
            }
        })
        .collect();
    Hamiltonian::new(terms).unwrap()
}

/// Mixed RX/RY/RZ/CP/CZ circuit with random qubits and control/target order.
pub fn random_circuit(r: &mut impl Rng, n: usize, n_gates: usize) -> Circuit {
    let mut circ = Circuit::new(n);
    for _ in 0..n_gates {
        let kind = if n >= 2 { r.gen_range(0..5) } else { r.gen_range(0..3) };
        if kind < 3 {
            let axis = [Axis::X, Axis::Y, Axis::Z][kind];
            circ.add_rotation(axis, r.gen_range(0..n)).unwrap();
        } else {
            let a = r.gen_range(0..n);
            let mut b = r.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            if kind == 3 {
                circ.add_cp(a, b).unwrap();
            } else {
                circ.add_cz(a, b).unwrap();
            }
        }
    }
    circ
}

/// Circuit of rotations and CZ only, as accepted by the encoders.
pub fn random_rot_cz_circuit(r: &mut impl Rng, n: usize, n_gates: usize) -> Circuit {
    let mut circ = Circuit::new(n);
    for _ in 0..n_gates {
        if n >= 2 && r.gen_bool(0.35) {
            let a = r.gen_range(0..n - 1);
            circ.add_cz(a, a + 1).unwrap();
        } else {
            let axis = [Axis::X, Axis::Y, Axis::Z][r.gen_range(0..3)];
            circ.add_rotation(axis, r.gen_range(0..n)).unwrap();
        }
    }
    circ
}

pub fn random_angles(r: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-PI..PI)).collect()
}

pub fn random_unit_vector(r: &mut impl Rng, dim: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// `|a - b| <= abs` or `|a - b| <= rel |b|`.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    let d = (a - b).abs();
    d <= abs || d <= rel * b.abs()
}
