use nalgebra::DMatrix;
use serde::Serialize;

use super::nullspace::NullSpace;
use crate::algebra::{EigenSystem, Rdm, RdmKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyProjection {
    /// `tr(K P D_exact P)`.
    pub delta_e_null: f64,
    /// `E_var - E_exact`.
    pub delta_e: f64,
    /// `delta_e_null / |delta_e|`.
    pub ratio: f64,
    /// False when `|delta_e| < 1e-9` and the ratio is meaningless.
    pub reliable: bool,
}

/// Projector onto the span of the null eigenvectors, in the full `L^2` index.
pub fn projector(null: &NullSpace, es: &EigenSystem) -> DMatrix<f64> {
    let l = es.n_orbitals();
    let mut p = DMatrix::zeros(l * l, l * l);
    for &k in &null.indices {
        let u = es.full_vector(k);
        p += &u * u.transpose();
    }
    p
}

/// Exact energy content inside the null space of a variational D.
pub fn delta_e_null(
    null: &NullSpace,
    es_var: &EigenSystem,
    d_exact: &Rdm,
    k: &DMatrix<f64>,
    delta_e: f64,
) -> Result<EnergyProjection> {
    if null.kind != RdmKind::D || es_var.kind() != RdmKind::D || d_exact.kind() != RdmKind::D {
        return Err(Error::Contract("energy projection works on D matrices".into()));
    }
    let l = d_exact.n_orbitals();
    if k.nrows() != l * l || es_var.n_orbitals() != l {
        return Err(Error::Dimension("K and D live on different pair spaces".into()));
    }
    let p = projector(null, es_var);
    let projected = &p * d_exact.to_full() * &p;
    let value = k.component_mul(&projected).sum();
    let reliable = delta_e.abs() >= 1e-9;
    let ratio = if delta_e == 0.0 { 0.0 } else { value / delta_e.abs() };
    Ok(EnergyProjection { delta_e_null: value, delta_e, ratio, reliable })
}

/// `|P u_n|` for every exact eigenvector `u_n`, ascending eigenvalue order.
pub fn projection_lengths(null: &NullSpace, es_var: &EigenSystem, es_exact: &EigenSystem) -> Vec<f64> {
    let p = projector(null, es_var);
    (0..es_exact.len()).map(|k| (&p * es_exact.full_vector(k)).norm()).collect()
}
