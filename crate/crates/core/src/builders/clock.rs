//! Clock Hamiltonians of classical reversible circuits.
//!
//! Layout: data qubit `k` is global qubit `k`, clock qubit `cl(j)` is
//! global qubit `N + j` for `j = 0..=L`. Time `t` is the unary clock state
//! with `cl(0..=t)` set and the rest clear.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::{BasisString, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, LocalTerm};
use crate::protocol::SatInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
    /// Acts as the identity on its single target; used for padding.
    Id,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not | GateKind::Id => 1,
            GateKind::Cnot => 2,
            GateKind::Toffoli => 3,
        }
    }
}

/// A reversible gate. Controls come first in `targets`; the last entry is
/// the flipped qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    /// The permutation on local indices, where bit `i` is `targets[i]`.
    pub fn local_permutation(&self, g: usize) -> usize {
        let k = self.targets.len();
        let last = 1 << (k - 1);
        match self.kind {
            GateKind::Id => g,
            GateKind::Not => g ^ 1,
            GateKind::Cnot | GateKind::Toffoli => {
                let controls = last - 1;
                if g & controls == controls {
                    g ^ last
                } else {
                    g
                }
            }
        }
    }

    /// Applies the gate to a packed data register.
    pub fn apply(&self, x: u64) -> u64 {
        let g = self
            .targets
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &q)| acc | ((((x >> q) & 1) as usize) << i));
        let h = self.local_permutation(g);
        self.targets.iter().enumerate().fold(x, |acc, (i, &q)| {
            (acc & !(1 << q)) | ((((h >> i) & 1) as u64) << q)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AncillaState {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
}

impl AncillaState {
    fn vector(self) -> [f64; 2] {
        match self {
            AncillaState::Zero => [1.0, 0.0],
            AncillaState::One => [0.0, 1.0],
            AncillaState::Plus => [std::f64::consts::FRAC_1_SQRT_2; 2],
        }
    }

    /// Classical values the ancilla takes with non-zero amplitude.
    pub fn branches(self) -> &'static [u64] {
        match self {
            AncillaState::Zero => &[0],
            AncillaState::One => &[1],
            AncillaState::Plus => &[0, 1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ancilla {
    pub qubit: usize,
    pub state: AncillaState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub qubit: usize,
    /// The accepting value of the measured qubit.
    #[serde(with = "bit_string")]
    pub accept_state: bool,
}

mod bit_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if *v { "1" } else { "0" })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match String::deserialize(d)?.as_str() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(D::Error::custom(format!("accept_state must be \"0\" or \"1\", got {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReversibleCircuit {
    pub data_qubits: usize,
    pub ancillas: Vec<Ancilla>,
    pub witness_qubits: Vec<usize>,
    pub gates: Vec<Gate>,
    pub measure: Option<Measurement>,
}

impl ReversibleCircuit {
    /// Every data qubit must be exactly one of ancilla or witness; gate
    /// targets must be distinct, in range and match the gate's arity.
    pub fn validate(&self) -> Result<()> {
        let n = self.data_qubits;
        if n == 0 {
            return Err(Error::invalid("data_qubits", "must be at least 1"));
        }
        if self.gates.is_empty() {
            return Err(Error::invalid("gates", "a circuit needs at least one gate"));
        }
        if n + self.gates.len() + 1 > MAX_QUBITS {
            return Err(Error::Capacity {
                n: n + self.gates.len() + 1,
                max: MAX_QUBITS,
            });
        }
        let mut role = vec![0u8; n];
        for (i, a) in self.ancillas.iter().enumerate() {
            if a.qubit >= n {
                return Err(Error::invalid(format!("ancillas[{i}].qubit"), "out of range"));
            }
            role[a.qubit] += 1;
        }
        for (i, &w) in self.witness_qubits.iter().enumerate() {
            if w >= n {
                return Err(Error::invalid(format!("witness_qubits[{i}]"), "out of range"));
            }
            role[w] += 1;
        }
        if let Some(q) = role.iter().position(|&r| r != 1) {
            return Err(Error::invalid(
                "data_qubits",
                format!("qubit {q} must be exactly one of ancilla or witness"),
            ));
        }
        for (i, g) in self.gates.iter().enumerate() {
            if g.targets.len() != g.kind.arity() {
                return Err(Error::invalid(
                    format!("gates[{i}].targets"),
                    format!("{:?} takes {} qubits", g.kind, g.kind.arity()),
                ));
            }
            if g.targets.iter().any(|&q| q >= n) {
                return Err(Error::invalid(format!("gates[{i}].targets"), "qubit out of range"));
            }
            if g.targets.iter().collect::<BTreeSet<_>>().len() != g.targets.len() {
                return Err(Error::invalid(format!("gates[{i}].targets"), "targets must be distinct"));
            }
        }
        if let Some(m) = &self.measure {
            if m.qubit >= n {
                return Err(Error::invalid("measure.qubit", "out of range"));
            }
        }
        Ok(())
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn layout(&self) -> ClockLayout {
        ClockLayout {
            data: self.data_qubits,
            gates: self.gates.len(),
        }
    }

    /// Runs every gate on a packed data register.
    pub fn simulate(&self, input: u64) -> u64 {
        self.gates.iter().fold(input, |x, g| g.apply(x))
    }

    /// Data registers the ancillas can start in, for a given witness
    /// assignment (bit `i` of `witness` sets `witness_qubits[i]`).
    pub fn inputs(&self, witness: u64) -> Vec<u64> {
        let base = self
            .witness_qubits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &q)| acc | (((witness >> i) & 1) << q));
        self.ancillas.iter().fold(vec![base], |acc, a| {
            acc.iter()
                .flat_map(|&x| a.state.branches().iter().map(move |&b| x | (b << a.qubit)))
                .collect()
        })
    }

    /// True when every branch of the input accepts. Circuits without a
    /// measurement accept everything.
    pub fn accepts_with_certainty(&self, witness: u64) -> bool {
        match &self.measure {
            None => true,
            Some(m) => self
                .inputs(witness)
                .into_iter()
                .all(|x| ((self.simulate(x) >> m.qubit) & 1 == 1) == m.accept_state),
        }
    }

    /// Classical witnesses accepted with certainty, by exhaustive search.
    pub fn certain_witnesses(&self) -> Vec<u64> {
        (0..1u64 << self.witness_qubits.len())
            .filter(|&w| self.accepts_with_certainty(w))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClockLayout {
    pub data: usize,
    pub gates: usize,
}

impl ClockLayout {
    pub fn n(&self) -> usize {
        self.data + self.gates + 1
    }

    pub fn data_qubit(&self, k: usize) -> usize {
        k
    }

    pub fn clock(&self, j: usize) -> usize {
        self.data + j
    }

    /// Packed global string for data register `d` at time `t`.
    pub fn encode(&self, d: u64, t: usize) -> u64 {
        d | (((1u64 << (t + 1)) - 1) << self.data)
    }
}

fn term_from(support: Vec<usize>, n: usize, entry: impl Fn(BasisString, BasisString) -> f64) -> Result<LocalTerm> {
    let dim = 1usize << support.len();
    let base = BasisString::from_raw(0, n);
    let m = DMatrix::from_fn(dim, dim, |r, c| entry(base.scatter(&support, r), base.scatter(&support, c)));
    LocalTerm::new(support, m)
}

fn sorted(qs: impl IntoIterator<Item = usize>) -> Vec<usize> {
    qs.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Propagation term for gate `j` (1-based) with local unitary `u` on the
/// gate's targets, indexed as in [`Gate::local_permutation`].
pub(crate) fn prop_term(layout: &ClockLayout, j: usize, targets: &[usize], u: &DMatrix<f64>) -> Result<LocalTerm> {
    let (prev, cur) = (layout.clock(j - 1), layout.clock(j));
    let next = (j < layout.gates).then(|| layout.clock(j + 1));
    let support = sorted(targets.iter().copied().chain([prev, cur]).chain(next));
    let gidx = |x: BasisString| x.gather(targets);
    let others_agree = |r: BasisString, c: BasisString| {
        r.agrees_outside(c, &sorted(targets.iter().copied().chain([cur])))
    };
    term_from(support, layout.n(), |r, c| {
        let active = |x: BasisString| x.bit(prev) && next.is_none_or(|q| !x.bit(q));
        if !active(r) || !active(c) || !others_agree(r, c) {
            return 0.0;
        }
        match (r.bit(cur), c.bit(cur)) {
            (a, b) if a == b => {
                if gidx(r) == gidx(c) {
                    0.5
                } else {
                    0.0
                }
            }
            // |1⟩⟨0| ⊗ U
            (true, false) => -0.5 * u[(gidx(r), gidx(c))],
            // |0⟩⟨1| ⊗ U†
            (false, true) => -0.5 * u[(gidx(c), gidx(r))],
            _ => unreachable!(),
        }
    })
}

pub(crate) fn permutation_matrix(g: &Gate) -> DMatrix<f64> {
    let d = 1 << g.targets.len();
    let mut u = DMatrix::zeros(d, d);
    for c in 0..d {
        u[(g.local_permutation(c), c)] = 1.0;
    }
    u
}

/// Clock terms with a caller-supplied unitary for each gate, in the order
/// init, prop, clock, meas.
pub(crate) fn clock_terms_with(
    c: &ReversibleCircuit,
    include_meas: bool,
    unitary: impl Fn(usize, &Gate) -> DMatrix<f64>,
) -> Result<(Vec<LocalTerm>, ClockLayout)> {
    c.validate()?;
    let layout = c.layout();
    let n = layout.n();
    let mut terms = Vec::new();
    let (c0, c1) = (layout.clock(0), layout.clock(1));
    for a in &c.ancillas {
        let phi = a.state.vector();
        let q = layout.data_qubit(a.qubit);
        terms.push(term_from(sorted([q, c0, c1]), n, |r, col| {
            let time0 = |x: BasisString| x.bit(c0) && !x.bit(c1);
            if !time0(r) || !time0(col) {
                return 0.0;
            }
            let (i, j) = (r.bit(q) as usize, col.bit(q) as usize);
            (i == j) as u8 as f64 - phi[i] * phi[j]
        })?);
    }
    for (j, g) in c.gates.iter().enumerate() {
        let targets: Vec<usize> = g.targets.iter().map(|&k| layout.data_qubit(k)).collect();
        terms.push(prop_term(&layout, j + 1, &targets, &unitary(j, g))?);
    }
    terms.push(term_from(vec![c0], n, |r, col| (r == col && !r.bit(c0)) as u8 as f64)?);
    for l in 1..=layout.gates {
        let (a, b) = (layout.clock(l - 1), layout.clock(l));
        terms.push(term_from(vec![a, b], n, |r, col| {
            (r == col && !r.bit(a) && r.bit(b)) as u8 as f64
        })?);
    }
    if include_meas {
        let m = c
            .measure
            .ok_or_else(|| Error::invalid("measure", "circuit has no measured qubit"))?;
        let (q, last) = (layout.data_qubit(m.qubit), layout.clock(layout.gates));
        terms.push(term_from(sorted([q, last]), n, |r, col| {
            (r == col && r.bit(q) != m.accept_state && r.bit(last)) as u8 as f64
        })?);
    }
    Ok((terms, layout))
}

/// The clock Hamiltonian of `c`, optionally with the output penalty.
pub fn clock_hamiltonian(c: &ReversibleCircuit, include_meas: bool) -> Result<(Hamiltonian, ClockLayout)> {
    let (terms, layout) = clock_terms_with(c, include_meas, |_, g| permutation_matrix(g))?;
    Ok((Hamiltonian::new(layout.n(), terms)?, layout))
}

/// Wraps the clock constraints of a measured circuit as a SAT instance and
/// checks the `{0, ½, 1}` projector class and the 6-locality bound.
pub fn circuit_to_6sat(c: &ReversibleCircuit, epsilon: f64) -> Result<(SatInstance, ClockLayout)> {
    if c.measure.is_none() {
        return Err(Error::invalid("measure", "a verifier circuit needs a measured qubit"));
    }
    let (h, layout) = clock_hamiltonian(c, true)?;
    for (a, t) in h.terms().iter().enumerate() {
        if t.locality() > 6 {
            return Err(Error::Invariant(format!("constraint {a} acts on {} qubits", t.locality())));
        }
        let pi = DMatrix::identity(t.dim(), t.dim()) - t.matrix();
        if pi.iter().any(|v| ![0.0, 0.5, 1.0].iter().any(|w| (v - w).abs() <= 1e-9)) {
            return Err(Error::Invariant(format!("constraint {a} has a projector entry outside {{0, 1/2, 1}}")));
        }
        if (&pi * &pi - &pi).abs().max() > 1e-9 {
            return Err(Error::Invariant(format!("constraint {a} is not of the form I - Π")));
        }
    }
    Ok((SatInstance::new(layout.n(), h.terms().to_vec(), epsilon)?, layout))
}

/// Appends `⌈L/δ⌉` identity gates on data qubit 0.
pub fn pad_identity(c: &ReversibleCircuit, delta: f64) -> Result<ReversibleCircuit> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!("padding precision must lie in (0, 1], got {delta}")));
    }
    let extra = (c.gates.len() as f64 / delta).ceil() as usize;
    let mut out = c.clone();
    out.gates.extend((0..extra).map(|_| Gate {
        kind: GateKind::Id,
        targets: vec![0],
    }));
    out.validate()?;
    Ok(out)
}

/// Normalized history state `Σ_t |ψ_t⟩|t⟩ / sqrt(L+1)` for a classical
/// witness, as a dense vector over all `2^n` strings.
pub fn history_state(c: &ReversibleCircuit, witness: u64) -> Result<DVector<f64>> {
    c.validate()?;
    let layout = c.layout();
    if layout.n() > crate::oracle::MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            n: layout.n(),
            max: crate::oracle::MAX_DENSE_QUBITS,
        });
    }
    let mut v = DVector::zeros(1 << layout.n());
    let inputs = c.inputs(witness);
    let amp = 1.0 / ((inputs.len() * (layout.gates + 1)) as f64).sqrt();
    for d0 in inputs {
        let mut d = d0;
        for t in 0..=layout.gates {
            if t > 0 {
                d = c.gates[t - 1].apply(d);
            }
            v[layout.encode(d, t) as usize] += amp;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dense_matrix, dense_spectrum, unique_ground_state};

    pub(crate) fn not_plus() -> ReversibleCircuit {
        ReversibleCircuit {
            data_qubits: 1,
            ancillas: vec![Ancilla {
                qubit: 0,
                state: AncillaState::Plus,
            }],
            witness_qubits: vec![],
            gates: vec![Gate {
                kind: GateKind::Not,
                targets: vec![0],
            }],
            measure: None,
        }
    }

    #[test]
    fn gate_permutations() {
        let t = Gate {
            kind: GateKind::Toffoli,
            targets: vec![2, 0, 1],
        };
        assert_eq!(t.apply(0b101), 0b111);
        assert_eq!(t.apply(0b100), 0b100);
        let c = Gate {
            kind: GateKind::Cnot,
            targets: vec![1, 0],
        };
        assert_eq!(c.apply(0b10), 0b11);
        assert_eq!(c.apply(0b01), 0b01);
    }

    #[test]
    fn not_gate_history_state() {
        let (h, layout) = clock_hamiltonian(&not_plus(), false).unwrap();
        assert_eq!(layout.n(), 3);
        let (psi, rep) = unique_ground_state(&h).unwrap();
        assert!(rep.lambda_min.abs() < 1e-12);
        assert_eq!(rep.ground_degeneracy, 1);
        // (|+⟩|10⟩ + |+⟩|11⟩)/√2 since NOT|+⟩ = |+⟩
        let want = history_state(&not_plus(), 0).unwrap();
        assert!((psi.to_dense() - want).abs().max() < 1e-9);
        assert!((psi.amplitude(BasisString::new(0b010, 3).unwrap()) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn witness_gives_degeneracy() {
        let c = ReversibleCircuit {
            data_qubits: 1,
            ancillas: vec![],
            witness_qubits: vec![0],
            gates: vec![Gate {
                kind: GateKind::Id,
                targets: vec![0],
            }],
            measure: None,
        };
        let (h, _) = clock_hamiltonian(&c, false).unwrap();
        assert_eq!(dense_spectrum(&h).unwrap().report.ground_degeneracy, 2);
    }

    #[test]
    fn rejecting_measurement_frustrates() {
        let c = ReversibleCircuit {
            data_qubits: 1,
            ancillas: vec![Ancilla {
                qubit: 0,
                state: AncillaState::Zero,
            }],
            witness_qubits: vec![],
            gates: vec![Gate {
                kind: GateKind::Not,
                targets: vec![0],
            }],
            measure: Some(Measurement {
                qubit: 0,
                accept_state: false,
            }),
        };
        assert!(!c.accepts_with_certainty(0));
        let (h, _) = clock_hamiltonian(&c, true).unwrap();
        assert!(dense_spectrum(&h).unwrap().report.lambda_min > 1e-3);
    }

    #[test]
    fn history_annihilated_by_every_term() {
        let c = ReversibleCircuit {
            data_qubits: 3,
            ancillas: vec![Ancilla {
                qubit: 2,
                state: AncillaState::Zero,
            }],
            witness_qubits: vec![0, 1],
            gates: vec![
                Gate {
                    kind: GateKind::Toffoli,
                    targets: vec![0, 1, 2],
                },
                Gate {
                    kind: GateKind::Cnot,
                    targets: vec![2, 0],
                },
            ],
            measure: Some(Measurement {
                qubit: 2,
                accept_state: true,
            }),
        };
        assert_eq!(c.certain_witnesses(), vec![3]);
        let (h, layout) = clock_hamiltonian(&c, true).unwrap();
        let v = history_state(&c, 3).unwrap();
        for t in h.terms() {
            let single = Hamiltonian::new(layout.n(), vec![t.clone()]).unwrap();
            assert!((dense_matrix(&single).unwrap() * &v).norm() < 1e-9);
        }
    }

    #[test]
    fn six_sat_class() {
        let c = ReversibleCircuit {
            data_qubits: 3,
            ancillas: vec![Ancilla {
                qubit: 2,
                state: AncillaState::Plus,
            }],
            witness_qubits: vec![0, 1],
            gates: vec![Gate {
                kind: GateKind::Toffoli,
                targets: vec![0, 1, 2],
            }],
            measure: Some(Measurement {
                qubit: 2,
                accept_state: true,
            }),
        };
        let (inst, _) = circuit_to_6sat(&c, 0.1).unwrap();
        assert!(inst.hamiltonian().max_locality() <= 6);
    }

    #[test]
    fn validation() {
        let mut c = not_plus();
        c.witness_qubits = vec![0];
        assert!(c.validate().is_err());
        let mut c = not_plus();
        c.gates[0].targets = vec![0, 0];
        assert!(c.validate().is_err());
        let mut c = not_plus();
        c.gates.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn padding() {
        let p = pad_identity(&not_plus(), 0.25).unwrap();
        assert_eq!(p.gate_count(), 5);
        assert!(pad_identity(&not_plus(), 0.0).is_err());
    }
}
