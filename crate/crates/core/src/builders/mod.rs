//! Constructors for stoquastic frustration-free instances.

pub mod clock;
pub mod gibbs;
pub mod interp;

pub use clock::{
    circuit_to_6sat, clock_hamiltonian, history_state, pad_identity, Ancilla, AncillaState, ClockLayout, Gate, GateKind,
    Measurement, ReversibleCircuit,
};
pub use gibbs::{gibbs_sff, ClassicalHamiltonian, ClassicalTerm, GibbsInstance, GibbsPath, GIBBS_MAX_LOCALITY};
pub use interp::InterpolatedCircuitPath;
