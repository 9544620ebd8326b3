use serde::Serialize;

use crate::algebra::{EigenSystem, RdmKind};

pub const DEFAULT_NULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullSpace {
    pub kind: RdmKind,
    pub indices: Vec<usize>,
    pub tol: f64,
}

impl NullSpace {
    pub fn dimension(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.contains(&k)
    }
}

/// Eigenpairs with `|lambda| < tol`.
pub fn null_space(es: &EigenSystem, tol: f64) -> NullSpace {
    let indices = es.values().iter().enumerate().filter(|(_, v)| v.abs() < tol).map(|(k, _)| k).collect();
    NullSpace { kind: es.kind(), indices, tol }
}
