//! Spectral analysis of reduced density matrices and the algebra of their
//! eigenoperators.

mod commutators;
mod convert;
mod eigen;
mod pairs;
mod rdm;

pub use commutators::{
    clamp_eigenvalues, commutator_coefficients, commutator_length, commutator_lengths, commutator_matrix, quadratic_length,
    CommutatorKind, CommutatorTensor,
};
pub use convert::{g_from_d, one_rdm_from_d, q_from_d};
pub use eigen::{eigendecompose, eigenoperators, EigenOperator, EigenSystem};
pub use pairs::{pair_count, pair_index, pair_list};
pub use rdm::{Rdm, RdmKind, PAIR_SCALE};
