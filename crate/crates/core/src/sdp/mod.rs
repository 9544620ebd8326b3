//! Block-diagonal semidefinite programs in standard primal form
//!
//! ```text
//! minimize <C, X>  subject to  <A_i, X> = b_i,  X >= 0
//! ```
//!
//! with dual `maximize b^T y  subject to  sum_i y_i A_i + Z = C,  Z >= 0`,
//! solved by a primal-dual interior-point method.

mod problem;
mod solver;
mod text;

pub use problem::{Block, SdpProblem, SymEntry};
pub use solver::{residuals, solve, Residuals, SdpSolution, SolverConfig, Status};
pub use text::{read_problem, write_problem};
