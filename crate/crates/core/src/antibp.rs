//! Two-stage parameter/architecture co-optimization.
//!
//! Stage 1 trains rotation angles and gate latents jointly on a
//! [`GatedCircuit`]. [`prune`] then drops every gate whose activation
//! `sigmoid(k * latent)` is below the threshold, and Stage 2 fine-tunes the
//! angles of the remaining fixed circuit. [`vanilla_vqe`] is Stage 2 started
//! from random angles.

use std::fmt::Write as _;

use crate::ansatz::{init_angles, renumber, sigmoid, GatedCircuit, GatingLayout};
use crate::error::{Error, Result};
use crate::gradients::{chain_gating, energy_and_gradient};
use crate::hamiltonian::Hamiltonian;
use crate::noise::{trajectory_energy_and_gradient, NoiseModel};
use crate::seeding::{self, tag};
use crate::sim::{Circuit, Gate};

/// Angles and raw gate latents of a [`GatedCircuit`].
#[derive(Clone, Debug, PartialEq)]
pub struct GatedParams {
    pub theta: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub k: f64,
}

impl GatedParams {
    pub fn check_layout(&self, layout: &GatingLayout) -> Result<()> {
        if !(self.k > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "steepness must be positive, got {}",
                self.k
            )));
        }
        for (expected, found) in [
            (layout.rotation_slots.len(), self.theta.len()),
            (layout.rotation_slots.len(), self.a.len()),
            (layout.entangler_slots.len(), self.b.len()),
        ] {
            if expected != found {
                return Err(Error::LengthError { expected, found });
            }
        }
        Ok(())
    }

    pub fn rotation_activation(&self, i: usize) -> f64 {
        sigmoid(self.k * self.a[i])
    }

    pub fn entangler_activation(&self, j: usize) -> f64 {
        sigmoid(self.k * self.b[j])
    }

    /// Gates with activation at or above `tau`: `(rotations, entanglers)`.
    pub fn active_counts(&self, tau: f64) -> (usize, usize) {
        let a = (0..self.a.len())
            .filter(|&i| self.rotation_activation(i) >= tau)
            .count();
        let b = (0..self.b.len())
            .filter(|&j| self.entangler_activation(j) >= tau)
            .count();
        (a, b)
    }

    fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.theta.len() + self.a.len() + self.b.len());
        v.extend_from_slice(&self.theta);
        v.extend_from_slice(&self.a);
        v.extend_from_slice(&self.b);
        v
    }

    fn unflatten(&mut self, v: &[f64]) {
        let (t, rest) = v.split_at(self.theta.len());
        let (a, b) = rest.split_at(self.a.len());
        self.theta.copy_from_slice(t);
        self.a.copy_from_slice(a);
        self.b.copy_from_slice(b);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub active_1q: usize,
    pub active_2q: usize,
}

/// Per-epoch optimization log.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    pub records: Vec<EpochRecord>,
}

impl RunTrace {
    pub const CSV_HEADER: &'static str = "epoch,energy,grad_norm,active_1q,active_2q";

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_energy(&self) -> Option<f64> {
        self.records.last().map(|r| r.energy)
    }

    /// Header line plus one row per epoch.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{},{}",
                r.epoch, r.energy, r.grad_norm, r.active_1q, r.active_2q
            );
        }
        out
    }
}

/// Noisy training: gradients averaged over Pauli-error trajectories.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyTraining {
    pub model: NoiseModel,
    pub trajectories: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub prune_threshold: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub noise: Option<NoisyTraining>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 0.01,
            epochs: 300,
            seed: 0,
            prune_threshold: 0.5,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            noise: None,
        }
    }
}

impl OptimizerConfig {
    pub fn with_epochs(&self, epochs: usize) -> Self {
        OptimizerConfig {
            epochs,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.prune_threshold > 0.0 && self.prune_threshold < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "prune threshold must lie in (0, 1), got {}",
                self.prune_threshold
            )));
        }
        if let Some(n) = &self.noise {
            if n.trajectories == 0 {
                return Err(Error::InvalidArgument(
                    "noisy training needs at least one trajectory".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Adam with bias correction.
#[derive(Clone, Debug)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, cfg: &OptimizerConfig) -> Adam {
        Adam {
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.eps,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Energy and per-slot gradient, exact or trajectory-averaged.
fn objective(
    c: &Circuit,
    h: &Hamiltonian,
    angles: &[f64],
    cfg: &OptimizerConfig,
    noise_seed: u64,
) -> Result<(f64, Vec<f64>)> {
    match &cfg.noise {
        None => energy_and_gradient(c, h, angles, &[]),
        Some(n) => trajectory_energy_and_gradient(c, angles, h, &n.model, n.trajectories, noise_seed)
            .map(|(e, g)| (e.mean, g)),
    }
}

fn check_qubits(c: &Circuit, h: &Hamiltonian) -> Result<()> {
    if c.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            left: c.n_qubits(),
            right: h.n_qubits(),
        });
    }
    Ok(())
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Stage 1 from random angles (seeded by `cfg.seed`, the same draw that
/// [`vanilla_vqe`] uses for the source circuit) and latents at their initial value.
pub fn stage1(
    gc: &GatedCircuit,
    h: &Hamiltonian,
    cfg: &OptimizerConfig,
) -> Result<(GatedParams, RunTrace)> {
    let theta = init_angles(gc.source_n_slots, cfg.seed);
    let p0 = gc.initial_params(&theta)?;
    stage1_from(gc, h, p0, cfg)
}

/// Joint Adam descent on `(theta, a, b)` for `cfg.epochs` epochs.
pub fn stage1_from(
    gc: &GatedCircuit,
    h: &Hamiltonian,
    mut params: GatedParams,
    cfg: &OptimizerConfig,
) -> Result<(GatedParams, RunTrace)> {
    cfg.validate()?;
    check_qubits(&gc.base, h)?;
    params.check_layout(&gc.layout)?;
    let mut flat = params.flatten();
    let mut adam = Adam::new(flat.len(), cfg);
    let mut trace = RunTrace::default();
    let noise_seed = seeding::derive(cfg.seed, tag::STAGE1_NOISE);
    for epoch in 0..cfg.epochs {
        let phi = gc.effective_angles(&params)?;
        let (energy, de_dphi) =
            objective(&gc.base, h, &phi, cfg, seeding::derive(noise_seed, epoch as u64))?;
        if !energy.is_finite() {
            return Err(Error::Diverged { epoch, energy });
        }
        let grad = chain_gating(&de_dphi, &params, &gc.layout)?.flatten();
        let (active_1q, active_2q) = params.active_counts(cfg.prune_threshold);
        trace.records.push(EpochRecord {
            epoch,
            energy,
            grad_norm: l2(&grad),
            active_1q,
            active_2q,
        });
        adam.step(&mut flat, &grad);
        params.unflatten(&flat);
    }
    Ok((params, trace))
}

/// A hard-pruned circuit with its Stage-2 starting angles.
#[derive(Clone, Debug, PartialEq)]
pub struct PrunedCircuit {
    pub circuit: Circuit,
    pub theta0: Vec<f64>,
}

/// Keeps rotation `i` (with angle `theta_i`) iff `sigmoid(k a_i) >= tau`, and
/// entangler `j` as a plain CZ iff `sigmoid(k b_j) >= tau`.
pub fn prune(gc: &GatedCircuit, p: &GatedParams, tau: f64) -> Result<PrunedCircuit> {
    p.check_layout(&gc.layout)?;
    let mut rot_of_slot = vec![None; gc.base.n_slots()];
    for (i, &s) in gc.layout.rotation_slots.iter().enumerate() {
        rot_of_slot[s] = Some(i);
    }
    let mut ent_of_slot = vec![None; gc.base.n_slots()];
    for (j, &s) in gc.layout.entangler_slots.iter().enumerate() {
        ent_of_slot[s] = Some(j);
    }
    let mut kept = Vec::new();
    let mut theta0 = Vec::new();
    for gate in gc.base.gates() {
        let slot = gate.slot().ok_or(Error::UnsupportedGate("CZ"))?;
        match *gate {
            Gate::Rot { .. } => {
                let i = rot_of_slot[slot].ok_or_else(|| ungated(slot))?;
                if p.rotation_activation(i) >= tau {
                    kept.push(*gate);
                    theta0.push(p.theta[i]);
                }
            }
            Gate::Cp {
                control, target, ..
            } => {
                let j = ent_of_slot[slot].ok_or_else(|| ungated(slot))?;
                if p.entangler_activation(j) >= tau {
                    kept.push(Gate::cz(control, target));
                }
            }
            Gate::Cz { .. } => unreachable!(),
        }
    }
    let circuit = renumber(gc.base.n_qubits(), kept)?;
    Ok(PrunedCircuit { circuit, theta0 })
}

fn ungated(slot: usize) -> Error {
    Error::InvalidArgument(format!("slot {slot} has no latent in the gating layout"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    /// Angles at the best energy seen.
    pub angles: Vec<f64>,
    /// Best energy seen (a trajectory estimate when training is noisy).
    pub energy: f64,
    pub trace: RunTrace,
}

/// Fixed-architecture Adam descent on the angles of `c`, returning the best-seen
/// energy over all evaluated iterates (including the final one).
pub fn stage2(
    c: &Circuit,
    theta0: &[f64],
    h: &Hamiltonian,
    cfg: &OptimizerConfig,
) -> Result<VqeResult> {
    cfg.validate()?;
    check_qubits(c, h)?;
    crate::sim::check_angles(c, theta0)?;
    let mut x = theta0.to_vec();
    let mut adam = Adam::new(x.len(), cfg);
    let mut trace = RunTrace::default();
    let (n1, n2) = c.gate_counts();
    let noise_seed = seeding::derive(cfg.seed, tag::STAGE2_NOISE);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for epoch in 0..=cfg.epochs {
        let (energy, grad) =
            objective(c, h, &x, cfg, seeding::derive(noise_seed, epoch as u64))?;
        if !energy.is_finite() {
            return Err(Error::Diverged { epoch, energy });
        }
        if best.as_ref().is_none_or(|(e, _)| energy < *e) {
            best = Some((energy, x.clone()));
        }
        if epoch == cfg.epochs {
            break;
        }
        trace.records.push(EpochRecord {
            epoch,
            energy,
            grad_norm: l2(&grad),
            active_1q: n1,
            active_2q: n2,
        });
        adam.step(&mut x, &grad);
    }
    let (energy, angles) = best.expect("at least one evaluation");
    Ok(VqeResult {
        angles,
        energy,
        trace,
    })
}

/// Plain VQE on `c` from angles drawn with `cfg.seed`.
pub fn vanilla_vqe(c: &Circuit, h: &Hamiltonian, cfg: &OptimizerConfig) -> Result<VqeResult> {
    let theta0 = init_angles(c.n_slots(), cfg.seed);
    stage2(c, &theta0, h, cfg)
}
