use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cp,
    Cz,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cp => "CP",
            GateKind::Cz => "CZ",
        }
    }
}

/// One gate of a [`Circuit`]. Parameterized gates read their angle from
/// `angles[slot]` when the circuit is run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    /// `exp(-i phi A / 2)` for `A` in {X, Y, Z}.
    Rot { axis: Axis, qubit: usize, slot: usize },
    /// Controlled phase `diag(1, 1, 1, e^{i phi})`.
    Cp {
        control: usize,
        target: usize,
        slot: usize,
    },
    Cz { control: usize, target: usize },
}

impl Gate {
    pub fn rx(qubit: usize, slot: usize) -> Gate {
        Gate::Rot {
            axis: Axis::X,
            qubit,
            slot,
        }
    }

    pub fn ry(qubit: usize, slot: usize) -> Gate {
        Gate::Rot {
            axis: Axis::Y,
            qubit,
            slot,
        }
    }

    pub fn rz(qubit: usize, slot: usize) -> Gate {
        Gate::Rot {
            axis: Axis::Z,
            qubit,
            slot,
        }
    }

    pub fn cp(control: usize, target: usize, slot: usize) -> Gate {
        Gate::Cp {
            control,
            target,
            slot,
        }
    }

    pub fn cz(control: usize, target: usize) -> Gate {
        Gate::Cz { control, target }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Rot { axis: Axis::X, .. } => GateKind::Rx,
            Gate::Rot { axis: Axis::Y, .. } => GateKind::Ry,
            Gate::Rot { axis: Axis::Z, .. } => GateKind::Rz,
            Gate::Cp { .. } => GateKind::Cp,
            Gate::Cz { .. } => GateKind::Cz,
        }
    }

    pub fn slot(&self) -> Option<usize> {
        match *self {
            Gate::Rot { slot, .. } | Gate::Cp { slot, .. } => Some(slot),
            Gate::Cz { .. } => None,
        }
    }

    pub fn with_slot(self, new_slot: usize) -> Gate {
        match self {
            Gate::Rot { axis, qubit, .. } => Gate::Rot {
                axis,
                qubit,
                slot: new_slot,
            },
            Gate::Cp {
                control, target, ..
            } => Gate::Cp {
                control,
                target,
                slot: new_slot,
            },
            cz => cz,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        !matches!(self, Gate::Rot { .. })
    }

    /// Qubits touched by the gate, control first.
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::Rot { qubit, .. } => ([qubit, qubit], 1),
            Gate::Cp {
                control, target, ..
            }
            | Gate::Cz { control, target } => ([control, target], 2),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let (qs, len) = self.qubits();
        for &q in &qs[..len] {
            if q >= n_qubits {
                return Err(Error::InvalidGate(format!(
                    "{} on qubit {q} in a {n_qubits}-qubit circuit",
                    self.kind().name()
                )));
            }
        }
        if len == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidGate(format!(
                "{} with control == target == {}",
                self.kind().name(),
                qs[0]
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (qs, len) = self.qubits();
        write!(f, "{} {}", self.kind().name(), qs[0])?;
        if len == 2 {
            write!(f, ",{}", qs[1])?;
        }
        if let Some(slot) = self.slot() {
            write!(f, " slot={slot}")?;
        }
        Ok(())
    }
}

/// An ordered gate list over `n_qubits`. Each parameter slot is used by at most one gate.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_slots: usize,
    used: Vec<bool>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            n_slots: 0,
            used: Vec::new(),
        }
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    /// Widens the parameter vector to at least `n` slots.
    pub fn reserve_slots(&mut self, n: usize) {
        if n > self.n_slots {
            self.n_slots = n;
            self.used.resize(n, false);
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if let Some(slot) = gate.slot() {
            self.reserve_slots(slot + 1);
            if self.used[slot] {
                return Err(Error::InvalidGate(format!("slot {slot} used twice")));
            }
            self.used[slot] = true;
        }
        self.gates.push(gate);
        Ok(())
    }

    fn next_slot(&self) -> usize {
        self.n_slots
    }

    /// Appends a rotation on a fresh slot and returns the slot.
    pub fn add_rotation(&mut self, axis: Axis, qubit: usize) -> Result<usize> {
        let slot = self.next_slot();
        self.push(Gate::Rot { axis, qubit, slot })?;
        Ok(slot)
    }

    pub fn add_cp(&mut self, control: usize, target: usize) -> Result<usize> {
        let slot = self.next_slot();
        self.push(Gate::cp(control, target, slot))?;
        Ok(slot)
    }

    pub fn add_cz(&mut self, control: usize, target: usize) -> Result<()> {
        self.push(Gate::cz(control, target))
    }

    /// `(single-qubit gates, two-qubit gates)`.
    pub fn gate_counts(&self) -> (usize, usize) {
        let two = self.gates.iter().filter(|g| g.is_two_qubit()).count();
        (self.gates.len() - two, two)
    }

    /// Line-oriented text dump: a `# qubits=N slots=M` header, then one
    /// `GATE q[,q2] [slot=k]` line per gate.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits={} slots={}\n", self.n_qubits, self.n_slots);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses [`Circuit::to_text`] output. Without a header the qubit count is
    /// inferred from the largest index used.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut header: (Option<usize>, Option<usize>) = (None, None);
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                for field in comment.split_whitespace() {
                    if let Some(v) = field.strip_prefix("qubits=") {
                        header.0 = v.parse().ok();
                    } else if let Some(v) = field.strip_prefix("slots=") {
                        header.1 = v.parse().ok();
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            gates.push(parse_gate_line(line).map_err(|msg| Error::CircuitParse {
                line: line_no,
                msg,
            })?);
        }
        let n_qubits = header.0.unwrap_or_else(|| {
            gates
                .iter()
                .map(|g| {
                    let (qs, len) = g.qubits();
                    qs[..len].iter().copied().max().unwrap_or(0) + 1
                })
                .max()
                .unwrap_or(1)
        });
        let mut c = Circuit::from_gates(n_qubits, gates)?;
        if let Some(s) = header.1 {
            c.reserve_slots(s);
        }
        Ok(c)
    }
}

fn parse_gate_line(line: &str) -> std::result::Result<Gate, String> {
    let mut fields = line.split_whitespace();
    let name = fields.next().ok_or("empty line")?;
    let qubits_tok = fields.next().ok_or("missing qubit list")?;
    let mut slot = None;
    for f in fields {
        let v = f
            .strip_prefix("slot=")
            .ok_or_else(|| format!("unexpected token {f:?}"))?;
        slot = Some(v.parse::<usize>().map_err(|e| format!("bad slot {v:?}: {e}"))?);
    }
    let qs = qubits_tok
        .split(',')
        .map(|q| q.parse::<usize>().map_err(|e| format!("bad qubit {q:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let need_slot = || slot.ok_or_else(|| format!("{name} requires slot=<k>"));
    match (name.to_ascii_uppercase().as_str(), qs.as_slice()) {
        ("RX", &[q]) => Ok(Gate::rx(q, need_slot()?)),
        ("RY", &[q]) => Ok(Gate::ry(q, need_slot()?)),
        ("RZ", &[q]) => Ok(Gate::rz(q, need_slot()?)),
        ("CP", &[c, t]) => Ok(Gate::cp(c, t, need_slot()?)),
        ("CZ", &[c, t]) if slot.is_none() => Ok(Gate::cz(c, t)),
        ("CZ", _) if slot.is_some() => Err("CZ takes no slot".into()),
        _ => Err(format!("unknown gate or wrong arity: {line:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_gates() {
        let mut c = Circuit::new(2);
        assert!(c.push(Gate::rx(2, 0)).is_err());
        assert!(c.push(Gate::cz(1, 1)).is_err());
        c.push(Gate::rx(0, 0)).unwrap();
        assert!(c.push(Gate::ry(1, 0)).is_err(), "slot reuse");
    }

    #[test]
    fn counts_and_slots() {
        let mut c = Circuit::new(3);
        c.add_rotation(Axis::X, 0).unwrap();
        c.add_cz(0, 1).unwrap();
        let s = c.add_cp(1, 2).unwrap();
        assert_eq!(s, 1);
        assert_eq!(c.gate_counts(), (1, 2));
        assert_eq!(c.n_slots(), 2);
    }

    #[test]
    fn text_round_trip() {
        let c = Circuit::from_gates(
            3,
            [
                Gate::rx(0, 2),
                Gate::cz(0, 1),
                Gate::ry(2, 0),
                Gate::cp(2, 1, 1),
                Gate::rz(1, 3),
            ],
        )
        .unwrap();
        let text = c.to_text();
        assert!(text.contains("CZ 0,1\n"));
        assert!(text.contains("CP 2,1 slot=1\n"));
        assert_eq!(Circuit::from_text(&text).unwrap(), c);
    }

    #[test]
    fn text_without_header_infers_width() {
        let c = Circuit::from_text("RX 0 slot=0\nCZ 0,3\n").unwrap();
        assert_eq!(c.n_qubits(), 4);
        assert!(Circuit::from_text("RX 0\n").is_err());
        assert!(Circuit::from_text("CZ 0,1 slot=0\n").is_err());
        assert!(Circuit::from_text("FOO 0 slot=1\n").is_err());
    }
}
