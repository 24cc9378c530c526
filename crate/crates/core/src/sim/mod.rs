//! Dense statevector simulation.
//!
//! Amplitude index `b` encodes the computational basis state with qubit `q`
//! at bit `q` (qubit 0 is the least significant bit).

mod circuit;

pub use circuit::{Axis, Circuit, Gate, GateKind};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Pauli};

/// Default upper bound for [`Statevector::zero`].
pub const MAX_QUBITS: usize = 20;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n` qubits, `1 <= n <= MAX_QUBITS`.
    pub fn zero(n: usize) -> Result<Statevector> {
        Self::zero_with_limit(n, MAX_QUBITS)
    }

    pub fn zero_with_limit(n: usize, limit: usize) -> Result<Statevector> {
        if n == 0 {
            return Err(Error::TooFewQubits { n, min: 1 });
        }
        if n > limit {
            return Err(Error::TooManyQubits {
                what: "statevector",
                n,
                limit,
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Statevector { n_qubits: n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Statevector> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        Ok(Statevector {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_qubits(&self, gate: &Gate) -> Result<()> {
        let (qs, len) = gate.qubits();
        if qs[..len].iter().any(|&q| q >= self.n_qubits) || (len == 2 && qs[0] == qs[1]) {
            return Err(Error::InvalidGate(format!(
                "{gate} on a {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Applies `gate` at `angle` radians (ignored for CZ).
    pub fn apply_gate(&mut self, gate: &Gate, angle: f64) -> Result<()> {
        self.check_qubits(gate)?;
        self.apply_unchecked(gate, angle);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate, angle: f64) {
        match *gate {
            Gate::Rot {
                axis: Axis::Z,
                qubit,
                ..
            } => {
                let (s, c) = (0.5 * angle).sin_cos();
                self.apply_diag1(qubit, Complex64::new(c, -s), Complex64::new(c, s));
            }
            Gate::Rot { axis, qubit, .. } => {
                let (s, c) = (0.5 * angle).sin_cos();
                let m = match axis {
                    Axis::X => [
                        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                    ],
                    _ => [
                        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                    ],
                };
                self.apply_1q(qubit, &m);
            }
            Gate::Cp {
                control, target, ..
            } => {
                self.apply_phase11(control, target, unit_phase(angle));
            }
            Gate::Cz { control, target } => self.apply_phase11(control, target, -ONE),
        }
    }

    /// Applies the inverse of `gate` at `angle`.
    pub(crate) fn apply_inverse_unchecked(&mut self, gate: &Gate, angle: f64) {
        self.apply_unchecked(gate, -angle)
    }

    /// Multiplies by the generator `G` with `dU/dphi = G U`:
    /// `-i A / 2` for rotations, `i |11><11|` for CP.
    pub(crate) fn apply_generator_unchecked(&mut self, gate: &Gate) {
        match *gate {
            Gate::Rot { axis, qubit, .. } => {
                self.apply_pauli(qubit, axis_pauli(axis));
                let f = Complex64::new(0.0, -0.5);
                self.amps.iter_mut().for_each(|a| *a *= f);
            }
            Gate::Cp {
                control, target, ..
            } => {
                let mask = (1usize << control) | (1usize << target);
                for (b, a) in self.amps.iter_mut().enumerate() {
                    *a = if b & mask == mask {
                        Complex64::new(-a.im, a.re)
                    } else {
                        ZERO
                    };
                }
            }
            Gate::Cz { .. } => self.amps.iter_mut().for_each(|a| *a = ZERO),
        }
    }

    pub fn apply_pauli(&mut self, qubit: usize, p: Pauli) {
        let bit = 1usize << qubit;
        match p {
            Pauli::I => {}
            Pauli::X => self.for_pairs(qubit, std::mem::swap),
            Pauli::Y => self.for_pairs(qubit, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = Complex64::new(x1.im, -x1.re);
                *a1 = Complex64::new(-x0.im, x0.re);
            }),
            Pauli::Z => {
                for (b, a) in self.amps.iter_mut().enumerate() {
                    if b & bit != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    #[inline]
    fn for_pairs(&mut self, qubit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                f(a0, a1);
            }
        }
    }

    fn apply_1q(&mut self, qubit: usize, m: &[[Complex64; 2]; 2]) {
        let m = *m;
        self.for_pairs(qubit, |a0, a1| {
            let (x0, x1) = (*a0, *a1);
            *a0 = m[0][0] * x0 + m[0][1] * x1;
            *a1 = m[1][0] * x0 + m[1][1] * x1;
        });
    }

    fn apply_diag1(&mut self, qubit: usize, d0: Complex64, d1: Complex64) {
        self.for_pairs(qubit, |a0, a1| {
            *a0 *= d0;
            *a1 *= d1;
        });
    }

    fn apply_phase11(&mut self, q1: usize, q2: usize, phase: Complex64) {
        let mask = (1usize << q1) | (1usize << q2);
        for (b, a) in self.amps.iter_mut().enumerate() {
            if b & mask == mask {
                *a *= phase;
            }
        }
    }
}

pub(crate) fn axis_pauli(axis: Axis) -> Pauli {
    match axis {
        Axis::X => Pauli::X,
        Axis::Y => Pauli::Y,
        Axis::Z => Pauli::Z,
    }
}

/// `e^{i angle}`, exact at half and quarter turns so that CP(pi) equals CZ bit for bit.
fn unit_phase(angle: f64) -> Complex64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    match angle {
        a if a == PI || a == -PI => -ONE,
        a if a == FRAC_PI_2 => Complex64::new(0.0, 1.0),
        a if a == -FRAC_PI_2 => Complex64::new(0.0, -1.0),
        a => {
            let (s, c) = a.sin_cos();
            Complex64::new(c, s)
        }
    }
}

/// A Pauli error inserted immediately after gate `after_gate`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliInsertion {
    pub after_gate: usize,
    pub qubit: usize,
    pub pauli: Pauli,
}

pub(crate) fn check_angles(circuit: &Circuit, angles: &[f64]) -> Result<()> {
    if angles.len() != circuit.n_slots() {
        return Err(Error::LengthError {
            expected: circuit.n_slots(),
            found: angles.len(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn gate_angle(gate: &Gate, angles: &[f64]) -> f64 {
    gate.slot().map_or(0.0, |s| angles[s])
}

/// Runs `circuit` from `|0...0>` with `angles[slot]` feeding each parameterized gate.
pub fn run(circuit: &Circuit, angles: &[f64]) -> Result<Statevector> {
    run_with_insertions(circuit, angles, &[])
}

/// Like [`run`], additionally applying the given Pauli insertions, which must be
/// sorted by `after_gate`.
pub fn run_with_insertions(
    circuit: &Circuit,
    angles: &[f64],
    insertions: &[PauliInsertion],
) -> Result<Statevector> {
    check_angles(circuit, angles)?;
    let mut state = Statevector::zero(circuit.n_qubits())?;
    let mut next = insertions.iter().peekable();
    for (i, gate) in circuit.gates().iter().enumerate() {
        state.apply_unchecked(gate, gate_angle(gate, angles));
        while let Some(ins) = next.next_if(|ins| ins.after_gate == i) {
            state.apply_pauli(ins.qubit, ins.pauli);
        }
    }
    Ok(state)
}

/// `<psi|H|psi>`.
pub fn expectation(state: &Statevector, h: &Hamiltonian) -> Result<f64> {
    if state.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            left: state.n_qubits(),
            right: h.n_qubits(),
        });
    }
    let e = h.expectation_complex(state.amplitudes());
    debug_assert!(
        e.im.abs() <= 1e-10 * h.one_norm().max(1.0),
        "imaginary residue {} in expectation",
        e.im
    );
    Ok(e.re)
}
