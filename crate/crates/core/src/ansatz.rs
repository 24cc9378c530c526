//! Circuit families: the random layered ansatz, its identity-block variant,
//! sigmoid-gated encoding, and random pruning.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::Rng;

use crate::antibp::GatedParams;
use crate::error::{Error, Result};
use crate::seeding::{self, tag};
use crate::sim::{Axis, Circuit, Gate};

/// Default sigmoid steepness.
pub const DEFAULT_STEEPNESS: f64 = 50.0;

/// Initial raw latent value; `sigmoid(50 * 0.1) ~ 0.9933`.
pub const INITIAL_LATENT: f64 = 0.1;

/// Logistic function, stable for large `|x|`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `depth` blocks of one seeded random rotation per qubit followed by CZ on
/// each adjacent pair `(q, q + 1)`. Rotation slots are numbered in gate order.
pub fn random_layered(n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::TooFewQubits { n, min: 2 });
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let mut rng = seeding::rng(seed, tag::CIRCUIT);
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        for q in 0..n {
            let axis = match rng.gen_range(0..3) {
                0 => Axis::X,
                1 => Axis::Y,
                _ => Axis::Z,
            };
            c.add_rotation(axis, q)?;
        }
        for q in 0..n - 1 {
            c.add_cz(q, q + 1)?;
        }
    }
    Ok(c)
}

/// `n_slots` angles drawn uniformly from `[0, 2 pi)`.
pub fn init_angles(n_slots: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeding::rng(seed, tag::ANGLES);
    (0..n_slots).map(|_| rng.gen_range(0.0..2.0 * PI)).collect()
}

/// Appends the inverse of `c`: gates in reverse order, each rotation on a new slot
/// initialized to the negated angle, CZ unchanged. The result is the identity at
/// the returned angles while both halves remain independently trainable.
pub fn identity_block(c: &Circuit, theta: &[f64]) -> Result<(Circuit, Vec<f64>)> {
    crate::sim::check_angles(c, theta)?;
    let mut out = c.clone();
    let mut angles = theta.to_vec();
    for gate in c.gates().iter().rev() {
        match *gate {
            Gate::Rot {
                axis, qubit, slot, ..
            } => {
                out.add_rotation(axis, qubit)?;
                angles.push(-theta[slot]);
            }
            Gate::Cz { control, target } => out.add_cz(control, target)?,
            Gate::Cp { .. } => return Err(Error::UnsupportedGate("CP")),
        }
    }
    Ok((out, angles))
}

/// Which slot of a gated circuit each latent drives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GatingLayout {
    /// Slot of rotation `i`, controlled by latent `a[i]`.
    pub rotation_slots: Vec<usize>,
    /// Slot of entangler `j`, controlled by latent `b[j]`.
    pub entangler_slots: Vec<usize>,
}

/// A circuit whose rotations run at `sigmoid(k a_i) theta_i` and whose CZ gates
/// are replaced by `CP(pi sigmoid(k b_j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GatedCircuit {
    pub base: Circuit,
    pub layout: GatingLayout,
    pub k: f64,
    /// Slot in the source circuit that rotation `i` came from.
    pub source_slots: Vec<usize>,
    pub source_n_slots: usize,
}

impl GatedCircuit {
    pub fn n_rotations(&self) -> usize {
        self.layout.rotation_slots.len()
    }

    pub fn n_entanglers(&self) -> usize {
        self.layout.entangler_slots.len()
    }

    pub fn with_steepness(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    /// Gated parameters seeded from source-circuit angles with all latents at
    /// [`INITIAL_LATENT`].
    pub fn initial_params(&self, source_angles: &[f64]) -> Result<GatedParams> {
        if source_angles.len() != self.source_n_slots {
            return Err(Error::LengthError {
                expected: self.source_n_slots,
                found: source_angles.len(),
            });
        }
        Ok(GatedParams {
            theta: self.source_slots.iter().map(|&s| source_angles[s]).collect(),
            a: vec![INITIAL_LATENT; self.n_rotations()],
            b: vec![INITIAL_LATENT; self.n_entanglers()],
            k: self.k,
        })
    }

    /// Per-slot angles fed to `base`.
    pub fn effective_angles(&self, p: &GatedParams) -> Result<Vec<f64>> {
        p.check_layout(&self.layout)?;
        let mut phi = vec![0.0; self.base.n_slots()];
        for (i, &slot) in self.layout.rotation_slots.iter().enumerate() {
            phi[slot] = sigmoid(p.k * p.a[i]) * p.theta[i];
        }
        for (j, &slot) in self.layout.entangler_slots.iter().enumerate() {
            phi[slot] = PI * sigmoid(p.k * p.b[j]);
        }
        Ok(phi)
    }
}

/// Wraps every rotation and CZ of `c` in a sigmoid gate. Gate order and qubits are
/// unchanged; rotation `i` gets slot `i`, entangler `j` gets slot `n_rotations + j`.
pub fn antibp_encode(c: &Circuit) -> Result<GatedCircuit> {
    let (n_rot, n_ent) = c.gate_counts();
    let mut base = Circuit::new(c.n_qubits());
    base.reserve_slots(n_rot + n_ent);
    let mut layout = GatingLayout {
        rotation_slots: Vec::with_capacity(n_rot),
        entangler_slots: Vec::with_capacity(n_ent),
    };
    let mut source_slots = Vec::with_capacity(n_rot);
    for gate in c.gates() {
        match *gate {
            Gate::Rot { slot, .. } => {
                let new_slot = layout.rotation_slots.len();
                base.push(gate.with_slot(new_slot))?;
                layout.rotation_slots.push(new_slot);
                source_slots.push(slot);
            }
            Gate::Cz { control, target } => {
                let new_slot = n_rot + layout.entangler_slots.len();
                base.push(Gate::cp(control, target, new_slot))?;
                layout.entangler_slots.push(new_slot);
            }
            Gate::Cp { .. } => return Err(Error::UnsupportedGate("CP")),
        }
    }
    Ok(GatedCircuit {
        base,
        layout,
        k: DEFAULT_STEEPNESS,
        source_slots,
        source_n_slots: c.n_slots(),
    })
}

/// Keeps a uniformly random subset of `keep_1q` rotations and `keep_2q` two-qubit
/// gates, preserving order. Slots are renumbered densely in gate order.
pub fn random_prune(c: &Circuit, keep_1q: usize, keep_2q: usize, seed: u64) -> Result<Circuit> {
    let one: Vec<usize> = (0..c.gates().len())
        .filter(|&i| !c.gates()[i].is_two_qubit())
        .collect();
    let two: Vec<usize> = (0..c.gates().len())
        .filter(|&i| c.gates()[i].is_two_qubit())
        .collect();
    for (kind, requested, available) in [
        ("single-qubit", keep_1q, one.len()),
        ("two-qubit", keep_2q, two.len()),
    ] {
        if requested > available {
            return Err(Error::NotEnoughGates {
                kind,
                requested,
                available,
            });
        }
    }
    let mut rng = seeding::rng(seed, tag::PRUNE);
    let mut keep = vec![false; c.gates().len()];
    for i in sample(&mut rng, one.len(), keep_1q) {
        keep[one[i]] = true;
    }
    for i in sample(&mut rng, two.len(), keep_2q) {
        keep[two[i]] = true;
    }
    let kept = c
        .gates()
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(g, _)| *g);
    renumber(c.n_qubits(), kept)
}

/// Builds a circuit from `gates`, assigning parameterized gates fresh dense slots.
pub(crate) fn renumber(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
    let mut out = Circuit::new(n_qubits);
    let mut next = 0;
    for g in gates {
        if g.slot().is_some() {
            out.push(g.with_slot(next))?;
            next += 1;
        } else {
            out.push(g)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::tfim;
    use crate::sim::{expectation, run, GateKind, Statevector};

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(5.0) - 0.993_307_149_075_715_3).abs() < 1e-15);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!((sigmoid(-3.0) + sigmoid(3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn layered_gate_counts_match_reference_table() {
        assert_eq!(random_layered(14, 60, 0).unwrap().gate_counts(), (840, 780));
        assert_eq!(random_layered(4, 60, 0).unwrap().gate_counts(), (240, 180));
        for (n, d) in [(2, 1), (3, 7), (5, 11)] {
            let c = random_layered(n, d, 3).unwrap();
            assert_eq!(c.gate_counts(), (n * d, (n - 1) * d));
            assert_eq!(c.n_slots(), n * d);
        }
    }

    #[test]
    fn layered_is_seeded() {
        let a = random_layered(5, 10, 42).unwrap();
        assert_eq!(a, random_layered(5, 10, 42).unwrap());
        assert_ne!(a, random_layered(5, 10, 43).unwrap());
        let kinds: std::collections::HashSet<_> = a.gates().iter().map(|g| g.kind()).collect();
        assert!(kinds.contains(&GateKind::Rx));
        assert!(kinds.contains(&GateKind::Ry));
        assert!(kinds.contains(&GateKind::Rz));
        assert!(random_layered(1, 3, 0).is_err());
        assert!(random_layered(3, 0, 0).is_err());
    }

    #[test]
    fn layered_structure() {
        let c = random_layered(3, 2, 1).unwrap();
        let g = c.gates();
        assert_eq!(g.len(), 10);
        assert_eq!(g[3], Gate::cz(0, 1));
        assert_eq!(g[4], Gate::cz(1, 2));
        assert_eq!(g[5].slot(), Some(3));
    }

    #[test]
    fn angles_in_range_and_seeded() {
        let a = init_angles(500, 9);
        assert!(a.iter().all(|&x| (0.0..2.0 * PI).contains(&x)));
        assert_eq!(a, init_angles(500, 9));
    }

    #[test]
    fn identity_block_doubles_and_is_identity() {
        let c = random_layered(14, 60, 5).unwrap();
        let theta = init_angles(c.n_slots(), 5);
        let (idb, angles) = identity_block(&c, &theta).unwrap();
        assert_eq!(idb.gate_counts(), (1680, 1560));
        assert_eq!(angles.len(), idb.n_slots());

        let c = random_layered(4, 6, 2).unwrap();
        let theta = init_angles(c.n_slots(), 2);
        let (idb, angles) = identity_block(&c, &theta).unwrap();
        let s = run(&idb, &angles).unwrap();
        let zero = Statevector::zero(4).unwrap();
        assert!((s.inner(&zero).norm() - 1.0).abs() < 1e-12);
        // Last gate is the inverse of the first rotation.
        let last = idb.gates().last().unwrap();
        assert_eq!(last.kind(), c.gates()[0].kind());
        assert_eq!(angles[last.slot().unwrap()], -theta[0]);
    }

    #[test]
    fn identity_block_rejects_cp() {
        let c = Circuit::from_gates(2, [Gate::cp(0, 1, 0)]).unwrap();
        assert!(matches!(
            identity_block(&c, &[0.1]),
            Err(Error::UnsupportedGate("CP"))
        ));
    }

    #[test]
    fn encode_preserves_structure() {
        let c = random_layered(14, 60, 1).unwrap();
        let gc = antibp_encode(&c).unwrap();
        assert_eq!(gc.n_rotations(), 840);
        assert_eq!(gc.n_entanglers(), 780);
        assert_eq!(gc.base.gates().len(), c.gates().len());
        for (a, b) in c.gates().iter().zip(gc.base.gates()) {
            assert_eq!(a.qubits(), b.qubits());
            if a.kind() == GateKind::Cz {
                assert_eq!(b.kind(), GateKind::Cp);
            } else {
                assert_eq!(a.kind(), b.kind());
            }
        }
    }

    #[test]
    fn encode_limits() {
        let c = random_layered(3, 4, 8).unwrap();
        let theta = init_angles(c.n_slots(), 8);
        let gc = antibp_encode(&c).unwrap();
        let h = tfim(3, 1.0, 0.7).unwrap();

        let mut p = gc.initial_params(&theta).unwrap();
        p.a.iter_mut().for_each(|a| *a = 1.0);
        p.b.iter_mut().for_each(|b| *b = 1.0);
        let on = run(&gc.base, &gc.effective_angles(&p).unwrap()).unwrap();
        let orig = run(&c, &theta).unwrap();
        for (x, y) in on.amplitudes().iter().zip(orig.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }

        p.a.iter_mut().for_each(|a| *a = -1.0);
        p.b.iter_mut().for_each(|b| *b = -1.0);
        let off = run(&gc.base, &gc.effective_angles(&p).unwrap()).unwrap();
        let zero = Statevector::zero(3).unwrap();
        let e0 = expectation(&zero, &h).unwrap();
        assert!((expectation(&off, &h).unwrap() - e0).abs() < 1e-12);
    }

    #[test]
    fn encode_rejects_cp() {
        let c = Circuit::from_gates(2, [Gate::cp(0, 1, 0)]).unwrap();
        assert!(antibp_encode(&c).is_err());
    }

    #[test]
    fn random_prune_counts_and_order() {
        let c = random_layered(14, 60, 3).unwrap();
        let p = random_prune(&c, 428, 372, 11).unwrap();
        assert_eq!(p.gate_counts(), (428, 372));
        assert_eq!(p.n_slots(), 428);
        assert_eq!(p, random_prune(&c, 428, 372, 11).unwrap());
        assert_ne!(p, random_prune(&c, 428, 372, 12).unwrap());

        // Kept gates appear as a subsequence of the original.
        let mut it = c.gates().iter();
        for g in p.gates() {
            assert!(it.any(|o| o.kind() == g.kind() && o.qubits() == g.qubits()));
        }

        let all = random_prune(&c, 840, 780, 0).unwrap();
        assert_eq!(all, c);
        assert!(matches!(
            random_prune(&c, 841, 0, 0),
            Err(Error::NotEnoughGates { .. })
        ));
        assert!(random_prune(&c, 0, 781, 0).is_err());
    }
}
