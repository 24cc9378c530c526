//! Depolarizing noise.
//!
//! Each gate is followed, on every qubit it touches, by the channel
//! `rho -> (1 - p) rho + (p / 3) (X rho X + Y rho Y + Z rho Z)`. Statevector
//! trajectories unravel the channel by inserting a uniformly random Pauli with
//! probability `p`; [`density_matrix_expectation`] evolves it exactly for small
//! systems.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gradients::energy_and_gradient;
use crate::hamiltonian::{Hamiltonian, Pauli};
use crate::seeding;
use crate::sim::{
    check_angles, expectation, gate_angle, run_with_insertions, Axis, Circuit, Gate,
    PauliInsertion, Statevector,
};

/// Largest qubit count for [`density_matrix_expectation`].
pub const DENSITY_QUBIT_LIMIT: usize = 6;

/// Per-gate depolarizing probabilities. `p_2q` applies independently to each
/// qubit of a two-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub p_1q: f64,
    pub p_2q: f64,
}

impl NoiseModel {
    pub fn new(p_1q: f64, p_2q: f64) -> Result<NoiseModel> {
        for p in [p_1q, p_2q] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "noise probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(NoiseModel { p_1q, p_2q })
    }

    pub fn uniform(p: f64) -> Result<NoiseModel> {
        NoiseModel::new(p, p)
    }

    pub fn noiseless() -> NoiseModel {
        NoiseModel { p_1q: 0.0, p_2q: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_1q == 0.0 && self.p_2q == 0.0
    }

    fn for_gate(&self, gate: &Gate) -> f64 {
        if gate.is_two_qubit() {
            self.p_2q
        } else {
            self.p_1q
        }
    }
}

/// Draws the Pauli errors of one trajectory. The draws do not depend on the
/// angles, so one sample can be reused across parameter perturbations.
pub fn sample_insertions<R: Rng + ?Sized>(
    c: &Circuit,
    nm: &NoiseModel,
    rng: &mut R,
) -> Vec<PauliInsertion> {
    let mut out = Vec::new();
    for (i, gate) in c.gates().iter().enumerate() {
        let p = nm.for_gate(gate);
        let (qs, len) = gate.qubits();
        for &qubit in &qs[..len] {
            if rng.gen::<f64>() < p {
                let pauli = match rng.gen_range(0..3) {
                    0 => Pauli::X,
                    1 => Pauli::Y,
                    _ => Pauli::Z,
                };
                out.push(PauliInsertion {
                    after_gate: i,
                    qubit,
                    pauli,
                });
            }
        }
    }
    out
}

pub fn sample_trajectory<R: Rng + ?Sized>(
    c: &Circuit,
    angles: &[f64],
    nm: &NoiseModel,
    rng: &mut R,
) -> Result<Statevector> {
    check_angles(c, angles)?;
    let ins = sample_insertions(c, nm, rng);
    run_with_insertions(c, angles, &ins)
}

/// Trajectory `index` of the family keyed by `seed`.
pub fn trajectory_insertions(
    c: &Circuit,
    nm: &NoiseModel,
    seed: u64,
    index: u64,
) -> Vec<PauliInsertion> {
    sample_insertions(c, nm, &mut seeding::rng(seed, index))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyEstimate {
    pub mean: f64,
    pub stderr: f64,
}

fn mean_stderr(values: &[f64]) -> NoisyEstimate {
    if values.iter().all(|&v| v == values[0]) {
        return NoisyEstimate {
            mean: values[0],
            stderr: 0.0,
        };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if values.len() > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    NoisyEstimate { mean, stderr }
}

fn check_traj(n_traj: usize) -> Result<()> {
    if n_traj == 0 {
        return Err(Error::InvalidArgument(
            "at least one trajectory is required".into(),
        ));
    }
    Ok(())
}

/// Mean and standard error of `<H>` over `n_traj` trajectories; trajectory `i`
/// uses the RNG stream `(seed, i)`. Sums run in index order.
pub fn noisy_expectation(
    c: &Circuit,
    angles: &[f64],
    h: &Hamiltonian,
    nm: &NoiseModel,
    n_traj: usize,
    seed: u64,
) -> Result<NoisyEstimate> {
    check_traj(n_traj)?;
    check_angles(c, angles)?;
    if c.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            left: c.n_qubits(),
            right: h.n_qubits(),
        });
    }
    let energies = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let ins = trajectory_insertions(c, nm, seed, i);
            expectation(&run_with_insertions(c, angles, &ins)?, h)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_stderr(&energies))
}

/// Trajectory-averaged energy and exact per-trajectory gradient. Because the
/// error draws are angle-independent this equals the zero-step limit of
/// [`noisy_gradient`] with common random numbers.
pub fn trajectory_energy_and_gradient(
    c: &Circuit,
    angles: &[f64],
    h: &Hamiltonian,
    nm: &NoiseModel,
    n_traj: usize,
    seed: u64,
) -> Result<(NoisyEstimate, Vec<f64>)> {
    check_traj(n_traj)?;
    let per_traj = (0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let ins = trajectory_insertions(c, nm, seed, i);
            energy_and_gradient(c, h, angles, &ins)
        })
        .collect::<Result<Vec<_>>>()?;
    let energies: Vec<f64> = per_traj.iter().map(|(e, _)| *e).collect();
    let mut grad = vec![0.0; c.n_slots()];
    for (_, g) in &per_traj {
        for (acc, x) in grad.iter_mut().zip(g) {
            *acc += x;
        }
    }
    let scale = 1.0 / n_traj as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok((mean_stderr(&energies), grad))
}

/// How the `+` and `-` evaluations of a finite difference pick their trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedPairing {
    /// Same trajectory seeds for both sides.
    Common,
    /// Independent trajectory seeds for the two sides.
    Independent,
}

/// Central finite differences of [`noisy_expectation`] with common random numbers.
pub fn noisy_gradient(
    c: &Circuit,
    angles: &[f64],
    h: &Hamiltonian,
    nm: &NoiseModel,
    n_traj: usize,
    seed: u64,
    step: f64,
) -> Result<Vec<f64>> {
    noisy_gradient_with(c, angles, h, nm, n_traj, seed, step, SeedPairing::Common)
}

#[allow(clippy::too_many_arguments)]
pub fn noisy_gradient_with(
    c: &Circuit,
    angles: &[f64],
    h: &Hamiltonian,
    nm: &NoiseModel,
    n_traj: usize,
    seed: u64,
    step: f64,
    pairing: SeedPairing,
) -> Result<Vec<f64>> {
    if step <= 0.0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    check_traj(n_traj)?;
    check_angles(c, angles)?;
    let minus_seed = match pairing {
        SeedPairing::Common => seed,
        SeedPairing::Independent => seeding::derive(seed, 0x5EED),
    };
    let plus_ins: Vec<_> = (0..n_traj as u64)
        .map(|i| trajectory_insertions(c, nm, seed, i))
        .collect();
    let minus_ins: Vec<_> = (0..n_traj as u64)
        .map(|i| trajectory_insertions(c, nm, minus_seed, i))
        .collect();
    (0..c.n_slots())
        .into_par_iter()
        .map(|slot| {
            let mut x = angles.to_vec();
            let mut total = 0.0;
            for (pi, mi) in plus_ins.iter().zip(&minus_ins) {
                x[slot] = angles[slot] + step;
                let plus = expectation(&run_with_insertions(c, &x, pi)?, h)?;
                x[slot] = angles[slot] - step;
                let minus = expectation(&run_with_insertions(c, &x, mi)?, h)?;
                total += plus - minus;
            }
            Ok(total / (n_traj as f64 * 2.0 * step))
        })
        .collect()
}

/// Row/column vectorization of a density matrix: entry `(r, c)` lives at
/// index `r + (c << n)` of a `2n`-qubit statevector buffer.
struct DensityMatrix {
    n: usize,
    vec: Statevector,
}

impl DensityMatrix {
    fn zero(n: usize) -> Result<Self> {
        Ok(DensityMatrix {
            n,
            vec: Statevector::zero_with_limit(2 * n, 2 * DENSITY_QUBIT_LIMIT)?,
        })
    }

    /// `rho -> U rho U^dagger`: `U` on the row index, `conj(U)` on the column index.
    fn apply_gate(&mut self, gate: &Gate, angle: f64) {
        self.vec.apply_unchecked(gate, angle);
        let n = self.n;
        let (shifted, conj_angle) = match *gate {
            Gate::Rot {
                axis: Axis::Y,
                qubit,
                slot,
            } => (Gate::ry(qubit + n, slot), angle),
            Gate::Rot { axis, qubit, slot } => (
                Gate::Rot {
                    axis,
                    qubit: qubit + n,
                    slot,
                },
                -angle,
            ),
            Gate::Cp {
                control,
                target,
                slot,
            } => (Gate::cp(control + n, target + n, slot), -angle),
            Gate::Cz { control, target } => (Gate::cz(control + n, target + n), 0.0),
        };
        self.vec.apply_unchecked(&shifted, conj_angle);
    }

    fn conjugate_by_pauli(&self, qubit: usize, p: Pauli) -> Statevector {
        let mut out = self.vec.clone();
        out.apply_pauli(qubit, p);
        out.apply_pauli(qubit + self.n, p);
        if p == Pauli::Y {
            // conj(Y) = -Y
            out.amplitudes_mut().iter_mut().for_each(|a| *a = -*a);
        }
        out
    }

    fn depolarize(&mut self, qubit: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let terms = [Pauli::X, Pauli::Y, Pauli::Z].map(|q| self.conjugate_by_pauli(qubit, q));
        let keep = 1.0 - p;
        let w = p / 3.0;
        for (idx, a) in self.vec.amplitudes_mut().iter_mut().enumerate() {
            *a = *a * keep
                + (terms[0].amplitudes()[idx]
                    + terms[1].amplitudes()[idx]
                    + terms[2].amplitudes()[idx])
                    * w;
        }
    }

    fn expectation(&self, h: &Hamiltonian) -> f64 {
        let rho = self.vec.amplitudes();
        let n = self.n;
        let mut total = 0.0;
        for t in h.terms() {
            let x = t.paulis.x_mask() as usize;
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for s in 0..(1usize << n) {
                acc += t.paulis.phase_at(s) * rho[s + ((s ^ x) << n)];
            }
            total += t.coefficient * acc.re;
        }
        total
    }
}

/// Exact `tr(H rho)` under the per-gate depolarizing channel, for up to
/// [`DENSITY_QUBIT_LIMIT`] qubits.
pub fn density_matrix_expectation(
    c: &Circuit,
    angles: &[f64],
    h: &Hamiltonian,
    nm: &NoiseModel,
) -> Result<f64> {
    let n = c.n_qubits();
    if n > DENSITY_QUBIT_LIMIT {
        return Err(Error::TooManyQubits {
            what: "density matrix",
            n,
            limit: DENSITY_QUBIT_LIMIT,
        });
    }
    if n != h.n_qubits() {
        return Err(Error::QubitMismatch {
            left: n,
            right: h.n_qubits(),
        });
    }
    check_angles(c, angles)?;
    let mut rho = DensityMatrix::zero(n)?;
    for gate in c.gates() {
        rho.apply_gate(gate, gate_angle(gate, angles));
        let p = nm.for_gate(gate);
        let (qs, len) = gate.qubits();
        for &q in &qs[..len] {
            rho.depolarize(q, p);
        }
    }
    Ok(rho.expectation(h))
}
