//! Null spaces of RDMs, commutator-closure residuals, the I-descriptors,
//! eigenspace triangle inequalities and the null-space energy projection.

mod audit;
mod bounds;
mod energy;
mod nullspace;

pub use audit::{Audit, ClosureFamily, Descriptor, Descriptors, Grid, InequalityGrids, SUBSPACE_PAIR_LIMIT};
pub use bounds::{default_bounds, BoundOverrides, BoundSet};
pub use energy::{delta_e_null, projection_lengths, projector, EnergyProjection};
pub use nullspace::{null_space, NullSpace, DEFAULT_NULL_TOL};
