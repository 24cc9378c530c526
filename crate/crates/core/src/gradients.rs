//! Adjoint differentiation of `E = <psi|H|psi>` and the sigmoid-gating chain rule.

use std::f64::consts::PI;

use crate::ansatz::{sigmoid, GatingLayout};
use crate::antibp::GatedParams;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::sim::{check_angles, gate_angle, Circuit, PauliInsertion, Statevector};

/// Gradient with respect to the raw gated parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientVector {
    pub d_theta: Vec<f64>,
    pub d_a: Vec<f64>,
    pub d_b: Vec<f64>,
}

impl GradientVector {
    pub fn norm(&self) -> f64 {
        self.d_theta
            .iter()
            .chain(&self.d_a)
            .chain(&self.d_b)
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }

    /// Concatenation `[d_theta, d_a, d_b]`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.d_theta.len() + self.d_a.len() + self.d_b.len());
        v.extend_from_slice(&self.d_theta);
        v.extend_from_slice(&self.d_a);
        v.extend_from_slice(&self.d_b);
        v
    }
}

/// Exact `dE/dphi` for every slot of `circuit`, via one forward and one backward sweep.
pub fn adjoint_gradient(circuit: &Circuit, h: &Hamiltonian, angles: &[f64]) -> Result<Vec<f64>> {
    energy_and_gradient(circuit, h, angles, &[]).map(|(_, g)| g)
}

/// Energy and per-slot gradient of a circuit with optional fixed Pauli insertions
/// (sorted by `after_gate`). Unused slots get a zero gradient.
pub fn energy_and_gradient(
    circuit: &Circuit,
    h: &Hamiltonian,
    angles: &[f64],
    insertions: &[PauliInsertion],
) -> Result<(f64, Vec<f64>)> {
    if circuit.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            left: circuit.n_qubits(),
            right: h.n_qubits(),
        });
    }
    check_angles(circuit, angles)?;
    let mut psi = crate::sim::run_with_insertions(circuit, angles, insertions)?;
    let mut lambda = Statevector::from_amplitudes(h.apply(psi.amplitudes()))?;
    let energy = psi.inner(&lambda).re;

    let mut grad = vec![0.0; circuit.n_slots()];
    let mut scratch = psi.clone();
    let mut pending = insertions.len();
    for (i, gate) in circuit.gates().iter().enumerate().rev() {
        while pending > 0 && insertions[pending - 1].after_gate == i {
            let ins = insertions[pending - 1];
            psi.apply_pauli(ins.qubit, ins.pauli);
            lambda.apply_pauli(ins.qubit, ins.pauli);
            pending -= 1;
        }
        let angle = gate_angle(gate, angles);
        if let Some(slot) = gate.slot() {
            scratch.amplitudes_mut().copy_from_slice(psi.amplitudes());
            scratch.apply_generator_unchecked(gate);
            grad[slot] = 2.0 * lambda.inner(&scratch).re;
        }
        psi.apply_inverse_unchecked(gate, angle);
        lambda.apply_inverse_unchecked(gate, angle);
    }
    Ok((energy, grad))
}

/// Maps `dE/dphi` per slot to gradients of `(theta, a, b)` where
/// `phi = sigmoid(k a) theta` for rotations and `phi = pi sigmoid(k b)` for entanglers.
pub fn chain_gating(
    de_dphi: &[f64],
    params: &GatedParams,
    layout: &GatingLayout,
) -> Result<GradientVector> {
    params.check_layout(layout)?;
    let n_slots = layout
        .rotation_slots
        .iter()
        .chain(&layout.entangler_slots)
        .map(|&s| s + 1)
        .max()
        .unwrap_or(0);
    if de_dphi.len() < n_slots {
        return Err(Error::LengthError {
            expected: n_slots,
            found: de_dphi.len(),
        });
    }
    let k = params.k;
    let mut out = GradientVector {
        d_theta: Vec::with_capacity(params.theta.len()),
        d_a: Vec::with_capacity(params.a.len()),
        d_b: Vec::with_capacity(params.b.len()),
    };
    for (i, &slot) in layout.rotation_slots.iter().enumerate() {
        let s = sigmoid(k * params.a[i]);
        let g = de_dphi[slot];
        out.d_theta.push(g * s);
        out.d_a.push(g * params.theta[i] * k * s * (1.0 - s));
    }
    for (j, &slot) in layout.entangler_slots.iter().enumerate() {
        let s = sigmoid(k * params.b[j]);
        out.d_b.push(de_dphi[slot] * PI * k * s * (1.0 - s));
    }
    Ok(out)
}

/// Central differences `(f(x + s e_i) - f(x - s e_i)) / 2s`.
///
/// Panics if `step` is not positive.
pub fn finite_diff_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], step: f64) -> Vec<f64> {
    assert!(step > 0.0, "finite-difference step must be positive");
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + step;
            let plus = f(&probe);
            probe[i] = x[i] - step;
            let minus = f(&probe);
            probe[i] = x[i];
            (plus - minus) / (2.0 * step)
        })
        .collect()
}
