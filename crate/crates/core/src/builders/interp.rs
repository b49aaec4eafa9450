//! Clock Hamiltonians along a continuous family of circuits.
//!
//! Each permutation gate is reached from the identity by rotating every
//! pair of basis states it swaps through an angle `sπ/2`. A swap has
//! determinant -1 and so is not itself a rotation: at `s = 1` the path ends
//! at the gate up to the sign of one entry per swapped pair. The resulting
//! Hamiltonians are frustration-free but not stoquastic, so this path is
//! only for the dense oracle; the walk and the annealer refuse it.

use nalgebra::DMatrix;

use crate::anneal::PathFamily;
use crate::builders::clock::{clock_terms_with, Gate, ReversibleCircuit};
use crate::error::Result;
use crate::hamiltonian::LocalTerm;

#[derive(Clone, Debug)]
pub struct InterpolatedCircuitPath {
    circuit: ReversibleCircuit,
    include_meas: bool,
}

impl InterpolatedCircuitPath {
    pub fn new(circuit: ReversibleCircuit, include_meas: bool) -> Result<Self> {
        circuit.validate()?;
        Ok(InterpolatedCircuitPath { circuit, include_meas })
    }

    pub fn circuit(&self) -> &ReversibleCircuit {
        &self.circuit
    }
}

/// `U(s)`: rotation by `sπ/2` in every plane the gate swaps.
pub fn rotated_gate(g: &Gate, s: f64) -> DMatrix<f64> {
    let d = 1 << g.targets.len();
    let (c, sn) = ((s * std::f64::consts::FRAC_PI_2).cos(), (s * std::f64::consts::FRAC_PI_2).sin());
    let mut u = DMatrix::identity(d, d);
    for a in 0..d {
        let b = g.local_permutation(a);
        if a < b {
            u[(a, a)] = c;
            u[(b, b)] = c;
            u[(b, a)] = sn;
            u[(a, b)] = -sn;
        }
    }
    u
}

impl PathFamily for InterpolatedCircuitPath {
    fn n(&self) -> usize {
        self.circuit.layout().n()
    }

    fn terms_at(&self, s: f64) -> Result<Vec<LocalTerm>> {
        Ok(clock_terms_with(&self.circuit, self.include_meas, |_, g| rotated_gate(g, s))?.0)
    }
}
