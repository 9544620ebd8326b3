//! Sector Hamiltonians, ground states and exact reduced density matrices.

mod lanczos;
mod rdms;
mod sparse;

pub use lanczos::{ground_state, GroundState, SolverOptions};
pub use rdms::{compute_rdms, ExactRdms, Wavefunction};
pub use sparse::{assemble_sector, SparseHamiltonian};
