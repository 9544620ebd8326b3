use nalgebra::DMatrix;

use super::rdm::{Rdm, RdmKind};
use crate::error::{Error, Result};

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn check(d: &Rdm, gamma: &DMatrix<f64>) -> Result<usize> {
    if d.kind() != RdmKind::D {
        return Err(Error::Contract("expected a D matrix".into()));
    }
    let l = d.n_orbitals();
    if gamma.nrows() != l || gamma.ncols() != l {
        return Err(Error::Dimension(format!("1-RDM must be {l}x{l}")));
    }
    Ok(l)
}

/// `G_{ij,kl} = delta_jl gamma_ik - D_{il,kj}`.
pub fn g_from_d(d: &Rdm, gamma: &DMatrix<f64>) -> Result<Rdm> {
    let l = check(d, gamma)?;
    let full = DMatrix::from_fn(l * l, l * l, |r, c| {
        let (i, j, k, m) = (r / l, r % l, c / l, c % l);
        delta(j, m) * gamma[(i, k)] - d.full_entry(i, m, k, j)
    });
    Rdm::new(RdmKind::G, l, d.n_electrons(), full)
}

/// Hole-hole matrix from normal ordering `a_i a_j a_l^+ a_k^+`.
pub fn q_from_d(d: &Rdm, gamma: &DMatrix<f64>) -> Result<Rdm> {
    let l = check(d, gamma)?;
    let full = DMatrix::from_fn(l * l, l * l, |r, c| {
        let (i, j, k, m) = (r / l, r % l, c / l, c % l);
        delta(i, k) * delta(j, m) - delta(i, m) * delta(j, k) - delta(j, m) * gamma[(k, i)]
            + delta(j, k) * gamma[(m, i)]
            + delta(i, m) * gamma[(k, j)]
            - delta(i, k) * gamma[(m, j)]
            + d.full_entry(k, m, i, j)
    });
    Rdm::from_full(RdmKind::Q, l, d.n_electrons(), &full)
}

/// `gamma_ik = sum_j D_{ij,kj} / (N - 1)`.
pub fn one_rdm_from_d(d: &Rdm) -> Result<DMatrix<f64>> {
    let n = d.n_electrons();
    if n < 2 {
        return Err(Error::Contract(format!("contraction needs N >= 2, got {n}")));
    }
    if d.kind() != RdmKind::D {
        return Err(Error::Contract("expected a D matrix".into()));
    }
    let l = d.n_orbitals();
    let g = DMatrix::from_fn(l, l, |i, k| (0..l).map(|j| d.full_entry(i, j, k, j)).sum::<f64>() / (n - 1) as f64);
    Ok((&g + g.transpose()) * 0.5)
}
