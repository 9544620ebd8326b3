//! Variational 2-RDM: minimize the energy over D subject to positivity of
//! the D, Q, G, T1 and T2(') condition matrices.

mod assemble;
mod conditions;
mod io;
mod ops;
mod symmetry;

pub use assemble::{assemble, Assembled, BlockInfo};
pub use conditions::{condition_matrix, t_condition_maps, ConditionSet, Family};
pub use io::{read_rdm, write_rdm};
pub use ops::{expectation, normal_order, Atom, Expr};
pub use symmetry::{adapt, Charge, SymmetryAdaptation};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::algebra::{g_from_d, one_rdm_from_d, q_from_d, Rdm, RdmKind};
use crate::error::{Error, Result};
use crate::fock::TwoBodyHamiltonian;
use crate::sdp::{self, Residuals, SolverConfig, Status};

#[derive(Debug, Clone)]
pub struct VariationalResult {
    pub energy: f64,
    pub d: Rdm,
    pub g: Rdm,
    pub q: Rdm,
    pub gamma: DMatrix<f64>,
    pub status: Status,
    pub iterations: usize,
    pub residuals: Residuals,
    /// Smallest eigenvalue over all condition blocks at the solution.
    pub min_condition_eigenvalue: f64,
    /// Norm of the imaginary part dropped when rotating D back to sites.
    pub imag_norm: f64,
    pub n_blocks: usize,
    pub n_variables: usize,
}

/// Solves the variational problem and returns the site-basis RDMs.
pub fn variational_ground_state(
    ham: &TwoBodyHamiltonian,
    n: usize,
    conds: &ConditionSet,
    cfg: &SolverConfig,
) -> Result<VariationalResult> {
    let asm = assemble(ham, n, conds)?;
    let sol = sdp::solve(&asm.problem, cfg)?;
    if sol.status != Status::Optimal {
        return Err(Error::Solver(format!(
            "{:?} after {} iterations (primal {:e}, dual {:e}, gap {:e})",
            sol.status, sol.iterations, sol.residuals.primal, sol.residuals.dual, sol.residuals.gap
        )));
    }
    let l = ham.n_orbitals();
    let (d_full, imag_norm) = asm.symmetry.to_site(&asm.d_adapted(&sol.y));
    let d = Rdm::from_full(RdmKind::D, l, n, &d_full)?;
    let gamma = one_rdm_from_d(&d)?;
    let g = g_from_d(&d, &gamma)?;
    let q = q_from_d(&d, &gamma)?;
    let min_condition_eigenvalue = asm
        .slack_blocks(&sol.y)
        .into_iter()
        .map(|m| SymmetricEigen::new(m).eigenvalues.min())
        .fold(f64::INFINITY, f64::min);
    Ok(VariationalResult {
        energy: asm.energy(&sol.y),
        d,
        g,
        q,
        gamma,
        status: sol.status,
        iterations: sol.iterations,
        residuals: sol.residuals,
        min_condition_eigenvalue,
        imag_norm,
        n_blocks: asm.problem.blocks().len(),
        n_variables: asm.n_variables(),
    })
}

/// How well a given (site-basis) D satisfies the assembled problem.
#[derive(Debug, Clone, Copy)]
pub struct Feasibility {
    pub energy: f64,
    pub min_eigenvalue: f64,
    /// Entries of D the parametrization cannot represent (symmetry-forbidden
    /// or violating the trace).
    pub structural_residual: f64,
}

pub fn feasibility(asm: &Assembled, d_site: &Rdm) -> Result<Feasibility> {
    if d_site.kind() != RdmKind::D || d_site.n_electrons() != asm.n_electrons() {
        return Err(Error::Contract("feasibility check takes a D matrix with the assembled N".into()));
    }
    let full = asm.symmetry.to_adapted(&d_site.to_full())?;
    let y = asm.variables_of(&full);
    let structural_residual = (asm.d_adapted(&y) - &full).amax();
    let min_eigenvalue = asm
        .slack_blocks(&y)
        .into_iter()
        .map(|m| SymmetricEigen::new(m).eigenvalues.min())
        .fold(f64::INFINITY, f64::min);
    Ok(Feasibility { energy: asm.energy(&y), min_eigenvalue, structural_residual })
}
