//! Spin-orbital bases, determinants, second-quantized operators and
//! two-body Hamiltonians.

mod basis;
mod hamiltonian;
mod integrals;
mod state;

pub use basis::{binomial, Determinant, FockSector, Spin, SpinOrbitalBasis};
pub use hamiltonian::{
    build_hubbard, build_random_two_body, reduced_hamiltonian, ModelInfo, TwoBodyHamiltonian,
};
pub use integrals::{load_integrals, write_integrals};
pub use state::{apply_operator_string, FockVector, Ladder};
