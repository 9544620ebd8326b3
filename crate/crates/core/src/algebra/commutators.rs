use nalgebra::DMatrix;

use super::eigen::{EigenOperator, EigenSystem};
use super::rdm::RdmKind;
use crate::error::{Error, Result};

/// Structure-coefficient families of the eigenoperator algebra:
/// `[g, g] -> g`, `[g, d] -> d`, `[g, q] -> q` and `[q, d] -> g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommutatorKind {
    Gamma,
    Delta,
    Omega,
    Theta,
}

impl CommutatorKind {
    /// Operand kinds `(left, right)` and the kind of the result.
    pub fn signature(self) -> (RdmKind, RdmKind, RdmKind) {
        match self {
            CommutatorKind::Gamma => (RdmKind::G, RdmKind::G, RdmKind::G),
            CommutatorKind::Delta => (RdmKind::G, RdmKind::D, RdmKind::D),
            CommutatorKind::Omega => (RdmKind::G, RdmKind::Q, RdmKind::Q),
            CommutatorKind::Theta => (RdmKind::Q, RdmKind::D, RdmKind::G),
        }
    }
}

/// Coefficient matrix of `[a, b]` written in the operator form of the result
/// kind. `a`, `b` are the coefficient matrices of the operands. The `[q, d]`
/// commutator contains a constant, which is folded into the number operator
/// and is therefore only valid on the `n`-electron sector.
pub fn commutator_matrix(kind: CommutatorKind, a: &DMatrix<f64>, b: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    match kind {
        CommutatorKind::Gamma => b * a - a * b,
        CommutatorKind::Delta => {
            let vu = a * b;
            vu.transpose() - vu
        }
        CommutatorKind::Omega => {
            let wv = b * a;
            &wv - wv.transpose()
        }
        CommutatorKind::Theta => {
            let uw = b * a;
            let l = uw.nrows();
            let shift = if n == 0 { 0.0 } else { 2.0 * uw.trace() / n as f64 };
            uw * 4.0 - DMatrix::identity(l, l) * shift
        }
    }
}

/// `<O^+ O>` for `O` with coefficient matrix `c` (in the operator form of the
/// target kind) against the target's full-index matrix.
pub fn quadratic_length(c: &DMatrix<f64>, full: &DMatrix<f64>) -> f64 {
    let l = c.nrows();
    let v = nalgebra::DVector::from_fn(l * l, |p, _| c[(p / l, p % l)]);
    v.dot(&(full * &v))
}

/// Fock-space norm of `[a, b] |psi>` evaluated through the target RDM.
pub fn commutator_length(kind: CommutatorKind, a: &DMatrix<f64>, b: &DMatrix<f64>, target_full: &DMatrix<f64>, n: usize) -> f64 {
    quadratic_length(&commutator_matrix(kind, a, b, n), target_full).max(0.0).sqrt()
}

/// Coefficients `T[m][n][t]` expanding `[ops1[m], ops2[n]]` in the
/// eigenoperators of `target`.
#[derive(Debug, Clone)]
pub struct CommutatorTensor {
    pub kind: CommutatorKind,
    pub shape: (usize, usize, usize),
    pub values: Vec<f64>,
}

impl CommutatorTensor {
    pub fn get(&self, m: usize, n: usize, t: usize) -> f64 {
        let (_, b, c) = self.shape;
        self.values[(m * b + n) * c + t]
    }
}

pub fn commutator_coefficients(
    kind: CommutatorKind,
    ops1: &[EigenOperator],
    ops2: &[EigenOperator],
    target: &EigenSystem,
    n: usize,
) -> Result<CommutatorTensor> {
    let (k1, k2, kt) = kind.signature();
    if ops1.iter().any(|o| o.kind != k1) || ops2.iter().any(|o| o.kind != k2) || target.kind() != kt {
        return Err(Error::Contract(format!("operand kinds do not match the {kind:?} family")));
    }
    if kind == CommutatorKind::Theta && n == 0 {
        return Err(Error::Contract("the [q, d] expansion needs a nonzero electron count".into()));
    }
    let targets: Vec<DMatrix<f64>> = (0..target.len()).map(|t| target.coefficient_matrix(t)).collect();
    let norms: Vec<f64> = targets.iter().map(|t| t.norm_squared()).collect();
    let mut values = Vec::with_capacity(ops1.len() * ops2.len() * targets.len());
    for a in ops1 {
        for b in ops2 {
            let c = commutator_matrix(kind, &a.matrix, &b.matrix, n);
            for (t, nt) in targets.iter().zip(&norms) {
                values.push(t.dot(&c) / nt);
            }
        }
    }
    Ok(CommutatorTensor { kind, shape: (ops1.len(), ops2.len(), targets.len()), values })
}

/// Grid of lengths `sqrt(sum_t |T[m][n][t]|^2 lambda_t)`. Eigenvalues in
/// `[-1e-9, 0)` count as zero; anything more negative is rejected.
pub fn commutator_lengths(tensor: &CommutatorTensor, eigenvalues: &[f64]) -> Result<DMatrix<f64>> {
    let (a, b, c) = tensor.shape;
    if eigenvalues.len() != c {
        return Err(Error::Dimension(format!("{} eigenvalues for {c} target operators", eigenvalues.len())));
    }
    let lambda = clamp_eigenvalues(eigenvalues)?;
    Ok(DMatrix::from_fn(a, b, |m, n| {
        (0..c).map(|t| tensor.get(m, n, t).powi(2) * lambda[t]).sum::<f64>().sqrt()
    }))
}

pub fn clamp_eigenvalues(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            if v < -1e-9 {
                Err(Error::InvalidRdm(format!("eigenvalue {v:e} is below the numerical-zero threshold")))
            } else {
                Ok(v.max(0.0))
            }
        })
        .collect()
}
