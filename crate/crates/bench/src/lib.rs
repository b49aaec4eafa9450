//! Shared inputs for the benchmarks.

use stoqwalk::builders::{gibbs_sff, ClassicalHamiltonian};
use stoqwalk::hamiltonian::TAU_ZERO;
use stoqwalk::{Hamiltonian, ProjectorSet};

/// Gibbs Hamiltonian of an `n`-site Ising chain at inverse temperature 1.
pub fn ising(n: usize) -> Hamiltonian {
    let hc = ClassicalHamiltonian::ising_chain(n, 1.0).expect("ising chain");
    gibbs_sff(&hc, 1.0).expect("gibbs").hamiltonian
}

pub fn projectors(h: &Hamiltonian) -> ProjectorSet {
    ProjectorSet::build(h, TAU_ZERO).expect("projectors")
}
