use std::collections::BTreeMap;

use serde::Serialize;

use super::run::{DescriptorValues, NullDims};
use crate::algebra::{g_from_d, one_rdm_from_d, q_from_d, Rdm, RdmKind};
use crate::error::{Error, Result};
use crate::geometry::{default_bounds, Audit, BoundOverrides, ClosureFamily};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub trace: f64,
    /// Smallest eigenvalue of D, G and Q.
    pub min_eigenvalues: BTreeMap<String, f64>,
    pub null_dims: NullDims,
    #[serde(flatten)]
    pub descriptors: DescriptorValues,
    pub max_delta: BTreeMap<String, f64>,
    pub max_explicit_delta: BTreeMap<String, f64>,
    /// True when nothing flags a violation at the given tolerance.
    pub passes: bool,
}

/// Audits an externally supplied D (G and Q are derived from it).
pub fn check_rdm(d: &Rdm, null_tol: f64, bounds: &BoundOverrides, tol: f64) -> Result<CheckReport> {
    if d.kind() != RdmKind::D {
        return Err(Error::Contract("check takes a D matrix; G and Q are derived from it".into()));
    }
    let (l, n) = (d.n_orbitals(), d.n_electrons());
    let gamma = one_rdm_from_d(d)?;
    let (g, q) = (g_from_d(d, &gamma)?, q_from_d(d, &gamma)?);
    let mut min_eigenvalues = BTreeMap::new();
    for r in [d, &g, &q] {
        let m = nalgebra::SymmetricEigen::new(r.matrix().clone()).eigenvalues.min();
        min_eigenvalues.insert(r.kind().label().to_string(), m);
    }
    if let Some((k, v)) = min_eigenvalues.iter().find(|(_, v)| **v < -1e-9) {
        return Err(Error::InvalidRdm(format!("{k} has eigenvalue {v:e}; not positive semidefinite")));
    }
    let audit = Audit::new(d.clone(), g, q, null_tol)?;
    let ineq = audit.inequality_conditions(&default_bounds(l, n)?.with_overrides(bounds)?)?;
    let mut max_delta = BTreeMap::new();
    let mut max_explicit_delta = BTreeMap::new();
    for f in ClosureFamily::ALL {
        max_delta.insert(f.length_name().to_string(), ineq.get(f).max().map_or(f64::NEG_INFINITY, |m| m.0));
        max_explicit_delta
            .insert(f.length_name().to_string(), audit.explicit_violation(&ineq, f).map_or(f64::NEG_INFINITY, |m| m.0));
    }
    let descriptors = DescriptorValues::of(&audit);
    let passes = ClosureFamily::ALL.iter().all(|&f| descriptors.get(f) < tol) && ineq.max_violation() <= tol;
    Ok(CheckReport {
        schema_version: super::run::SCHEMA_VERSION,
        n_orbitals: l,
        n_electrons: n,
        trace: d.full_trace(),
        min_eigenvalues,
        null_dims: audit.null_dims().into(),
        descriptors,
        max_delta,
        max_explicit_delta,
        passes,
    })
}
