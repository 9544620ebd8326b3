//! Exact and variational two-electron reduced density matrices for small
//! fermionic systems, with geometric audits of their eigenoperator algebra.

pub mod algebra;
pub mod error;
pub mod exact;
pub mod fock;
pub mod geometry;
pub mod report;
pub mod sdp;
pub mod vrdm;

pub use error::{Error, Result};
pub use nalgebra;
