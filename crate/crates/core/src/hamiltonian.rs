//! Pauli-sum observables.
//!
//! A [`Hamiltonian`] is a real-weighted sum of Pauli strings. The leftmost
//! character of a Pauli string acts on qubit 0, and qubit 0 is the least
//! significant bit of a basis-state index, so the string `"XI"` flips bit 0.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count accepted by the dense-matrix routines.
pub const DENSE_QUBIT_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis, stored as bit masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
    x_mask: u64,
    z_mask: u64,
    y_count: u32,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        let mut x_mask = 0u64;
        let mut z_mask = 0u64;
        let mut y_count = 0;
        for (q, op) in ops.iter().enumerate() {
            match op {
                Pauli::I => {}
                Pauli::X => x_mask |= 1 << q,
                Pauli::Z => z_mask |= 1 << q,
                Pauli::Y => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                    y_count += 1;
                }
            }
        }
        PauliString {
            ops,
            x_mask,
            z_mask,
            y_count,
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    /// `i^(number of Y factors)`, the global factor in `P|b> = phase * (-1)^(b.z) |b ^ x>`.
    pub fn y_phase(&self) -> Complex64 {
        match self.y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Matrix element `<b ^ x| P |b>` for basis index `b`.
    #[inline]
    pub fn phase_at(&self, b: usize) -> Complex64 {
        let y = self.y_phase();
        if (b as u64 & self.z_mask).count_ones() % 2 == 1 {
            -y
        } else {
            y
        }
    }
}

impl FromStr for PauliString {
    type Err = char;

    fn from_str(s: &str) -> std::result::Result<Self, char> {
        s.chars()
            .map(|c| Pauli::from_char(c).ok_or(c))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(PauliString::new)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            write!(f, "{}", op.as_char())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub paulis: PauliString,
}

/// A normalized Pauli sum: one term per distinct string, in first-occurrence order.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl Hamiltonian {
    /// Builds a Hamiltonian, merging duplicate strings by adding coefficients.
    /// Terms that cancel to zero are kept.
    pub fn new(terms: Vec<PauliTerm>) -> Result<Self> {
        let n_qubits = terms.first().ok_or(Error::EmptyHamiltonian)?.paulis.len();
        if n_qubits == 0 {
            return Err(Error::TooFewQubits { n: 0, min: 1 });
        }
        if n_qubits > 63 {
            return Err(Error::TooManyQubits {
                what: "Pauli string",
                n: n_qubits,
                limit: 63,
            });
        }
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(terms.len());
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for term in terms {
            if term.paulis.len() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: term.paulis.len(),
                });
            }
            if !term.coefficient.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient for {}",
                    term.paulis
                )));
            }
            match index.get(&term.paulis) {
                Some(&k) => merged[k].coefficient += term.coefficient,
                None => {
                    index.insert(term.paulis.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        Ok(Hamiltonian {
            n_qubits,
            terms: merged,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Returns `c * H`.
    pub fn scaled(&self, c: f64) -> Hamiltonian {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: c * t.coefficient,
                paulis: t.paulis.clone(),
            })
            .collect();
        Hamiltonian {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    /// Writes the file format read by [`parse_hamiltonian`]. Coefficients use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{:?} {}\n", t.coefficient, t.paulis));
        }
        out
    }

    /// Computes `H |psi>` for a dense amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for t in &self.terms {
            let x = t.paulis.x_mask() as usize;
            let z = t.paulis.z_mask();
            let y = t.paulis.y_phase() * t.coefficient;
            for (b, &a) in amps.iter().enumerate() {
                let odd = (b as u64 & z).count_ones() & 1 == 1;
                let v = y * a;
                out[b ^ x] += if odd { -v } else { v };
            }
        }
        out
    }

    /// `<psi|H|psi>` for a dense amplitude vector, returned with its imaginary residue.
    pub fn expectation_complex(&self, amps: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let x = t.paulis.x_mask() as usize;
            let z = t.paulis.z_mask();
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, &a) in amps.iter().enumerate() {
                let v = amps[b ^ x].conj() * a;
                if (b as u64 & z).count_ones() & 1 == 1 {
                    acc -= v;
                } else {
                    acc += v;
                }
            }
            total += acc * t.paulis.y_phase() * t.coefficient;
        }
        total
    }

    /// Dense `2^n x 2^n` matrix in the statevector basis (qubit 0 = least significant bit).
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::TooManyQubits {
                what: "dense matrix",
                n: self.n_qubits,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            let x = t.paulis.x_mask() as usize;
            for b in 0..dim {
                m[(b ^ x, b)] += t.paulis.phase_at(b) * t.coefficient;
            }
        }
        Ok(m)
    }

    /// Smallest eigenvalue of the dense matrix.
    pub fn exact_ground_energy(&self) -> Result<f64> {
        let m = self.dense_matrix()?;
        let real = m.iter().all(|z| z.im == 0.0);
        let lowest = if real {
            m.map(|z| z.re)
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        } else {
            m.symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        };
        Ok(lowest)
    }
}

/// Parses the plain-text Pauli-sum format: `<coefficient> <pauli-string>` per line,
/// `#` comments, blank lines ignored.
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let mut terms = Vec::new();
    let mut width: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (coef_tok, pauli_tok) = match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(p), None) => (c, p),
            _ => return Err(Error::MalformedLine { line: line_no }),
        };
        let coefficient: f64 = coef_tok
            .parse()
            .ok()
            .filter(|c: &f64| c.is_finite())
            .ok_or_else(|| Error::BadCoefficient {
                line: line_no,
                token: coef_tok.to_string(),
            })?;
        let paulis: PauliString = pauli_tok
            .parse()
            .map_err(|found| Error::BadPauli {
                line: line_no,
                found,
            })?;
        match width {
            None => width = Some(paulis.len()),
            Some(w) if w != paulis.len() => {
                return Err(Error::LengthMismatch {
                    line: line_no,
                    expected: w,
                    found: paulis.len(),
                })
            }
            _ => {}
        }
        terms.push(PauliTerm {
            coefficient,
            paulis,
        });
    }
    Hamiltonian::new(terms)
}

fn single_site(n: usize, sites: &[(usize, Pauli)]) -> PauliString {
    let mut ops = vec![Pauli::I; n];
    for &(q, p) in sites {
        ops[q] = p;
    }
    PauliString::new(ops)
}

/// Open-chain transverse-field Ising model `-J sum Z_i Z_{i+1} - h sum X_i`.
pub fn tfim(n: usize, coupling: f64, field: f64) -> Result<Hamiltonian> {
    if n == 0 {
        return Err(Error::TooFewQubits { n, min: 1 });
    }
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        terms.push(PauliTerm {
            coefficient: -coupling,
            paulis: single_site(n, &[(i, Pauli::Z), (i + 1, Pauli::Z)]),
        });
    }
    for i in 0..n {
        terms.push(PauliTerm {
            coefficient: -field,
            paulis: single_site(n, &[(i, Pauli::X)]),
        });
    }
    Hamiltonian::new(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_two_terms() {
        let h = parse_hamiltonian("1.0 ZZ\n0.5 XI").unwrap();
        assert_eq!(h.n_qubits(), 2);
        assert_eq!(h.terms().len(), 2);
        assert_eq!(h.terms()[1].paulis.to_string(), "XI");
        assert_eq!(h.terms()[1].coefficient, 0.5);
    }

    #[test]
    fn merges_cancelling_terms_and_keeps_zero() {
        let h = parse_hamiltonian("1.0 Z\n-1.0 Z").unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].coefficient, 0.0);
    }

    #[test]
    fn merge_keeps_first_occurrence_order() {
        let h = parse_hamiltonian("1 XX\n2 ZZ\n3 XX\n4 YY").unwrap();
        let names: Vec<_> = h.terms().iter().map(|t| t.paulis.to_string()).collect();
        assert_eq!(names, ["XX", "ZZ", "YY"]);
        assert_eq!(h.terms()[0].coefficient, 4.0);
    }

    #[test]
    fn comments_blank_lines_and_scientific_notation() {
        let text = "# header\n\n  -2.5e-1 XZ  # trailing\n1E2 YY\n";
        let h = parse_hamiltonian(text).unwrap();
        assert_eq!(h.terms()[0].coefficient, -0.25);
        assert_eq!(h.terms()[1].coefficient, 100.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_hamiltonian("0.5 ZQ"),
            Err(Error::BadPauli { line: 1, found: 'Q' })
        ));
        assert!(matches!(
            parse_hamiltonian("abc Z"),
            Err(Error::BadCoefficient { line: 1, .. })
        ));
        assert!(matches!(
            parse_hamiltonian("1 ZZ\n1 Z"),
            Err(Error::LengthMismatch { line: 2, .. })
        ));
        assert!(matches!(
            parse_hamiltonian("# nothing\n\n"),
            Err(Error::EmptyHamiltonian)
        ));
        assert!(matches!(
            parse_hamiltonian("1.0"),
            Err(Error::MalformedLine { line: 1 })
        ));
        assert!(matches!(
            parse_hamiltonian("inf Z"),
            Err(Error::BadCoefficient { .. })
        ));
    }

    #[test]
    fn dense_matrix_conventions() {
        let z = parse_hamiltonian("1.0 Z").unwrap().dense_matrix().unwrap();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        assert_eq!(z[(0, 1)], c(0.0, 0.0));

        // "XI" flips qubit 0, the least significant bit.
        let xi = parse_hamiltonian("1.0 XI").unwrap().dense_matrix().unwrap();
        for b in 0..4usize {
            for r in 0..4usize {
                let want = if r == b ^ 1 { 1.0 } else { 0.0 };
                assert_eq!(xi[(r, b)], c(want, 0.0));
            }
        }

        let y = parse_hamiltonian("1.0 Y").unwrap().dense_matrix().unwrap();
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
    }

    #[test]
    fn ground_energies() {
        let gz = |s: &str| parse_hamiltonian(s).unwrap().exact_ground_energy().unwrap();
        assert_abs_diff_eq!(gz("1.0 Z"), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gz("1.0 ZZ"), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gz("1.0 Y"), -1.0, epsilon = 1e-12);
        let e = tfim(2, 1.0, 1.0).unwrap().exact_ground_energy().unwrap();
        assert_abs_diff_eq!(e, -5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn tfim_shapes() {
        let h1 = tfim(1, 1.0, 1.0).unwrap();
        assert_eq!(h1.terms().len(), 1);
        assert_eq!(h1.terms()[0].coefficient, -1.0);
        assert_eq!(h1.terms()[0].paulis.to_string(), "X");
        assert_abs_diff_eq!(h1.exact_ground_energy().unwrap(), -1.0, epsilon = 1e-12);

        let h2 = tfim(2, 1.0, 1.0).unwrap();
        assert_eq!(h2.terms().len(), 3);

        let h3 = tfim(3, 1.0, 0.0).unwrap();
        let zz = h3
            .terms()
            .iter()
            .filter(|t| t.paulis.to_string().contains("ZZ"))
            .count();
        assert_eq!(zz, 2);
        assert_abs_diff_eq!(h3.exact_ground_energy().unwrap(), -2.0, epsilon = 1e-12);
        assert!(tfim(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn dense_limit_enforced() {
        let h = tfim(DENSE_QUBIT_LIMIT + 1, 1.0, 1.0).unwrap();
        assert!(matches!(h.dense_matrix(), Err(Error::TooManyQubits { .. })));
        assert!(h.exact_ground_energy().is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let h = parse_hamiltonian("0.3 XY\n-0.7 ZI\n0.2 YY\n1.1 IX").unwrap();
        let amps: Vec<Complex64> = (0..4)
            .map(|k| c(0.1 * k as f64 + 0.2, 0.3 - 0.05 * k as f64))
            .collect();
        let m = h.dense_matrix().unwrap();
        let got = h.apply(&amps);
        for r in 0..4 {
            let want: Complex64 = (0..4).map(|b| m[(r, b)] * amps[b]).sum();
            assert_abs_diff_eq!(got[r].re, want.re, epsilon = 1e-14);
            assert_abs_diff_eq!(got[r].im, want.im, epsilon = 1e-14);
        }
    }
}
