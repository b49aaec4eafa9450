//! Random walks, adiabatic simulation and Merlin-Arthur verification for
//! stoquastic frustration-free Hamiltonians on qubits.
//!
//! Everything is real-valued. Basis strings put qubit 0 in the low bit and
//! print most-significant qubit first.

pub mod anneal;
pub mod basis;
pub mod builders;
pub mod error;
pub mod fixtures;
pub mod hamiltonian;
pub mod io;
pub mod oracle;
pub mod projector;
pub mod protocol;
pub mod rng;
pub mod stats;
pub mod walk;

pub use basis::BasisString;
pub use error::{Error, Result};
pub use hamiltonian::{Hamiltonian, LocalTerm};
pub use projector::{Classification, KernelProjector, ProjectorSet};
pub use protocol::{SatInstance, Verdict, VerdictTranscript, Verifier, VerifierParams};
pub use walk::{WalkConfig, WalkTranscript, Walker};
