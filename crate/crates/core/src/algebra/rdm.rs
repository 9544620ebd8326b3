use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::pairs::{pair_count, pair_index, pair_list};
use crate::error::{Error, Result};

/// Compressed D and Q matrices are expressed in the basis
/// `(e_ij - e_ji) / sqrt(2)`, so a compressed entry is `PAIR_SCALE` times the
/// full-index entry and compressed eigenvalues equal full-index eigenvalues.
pub const PAIR_SCALE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RdmKind {
    D,
    G,
    Q,
}

impl RdmKind {
    pub fn is_pair(self) -> bool {
        !matches!(self, RdmKind::G)
    }

    pub fn dimension(self, l: usize) -> usize {
        if self.is_pair() {
            pair_count(l)
        } else {
            l * l
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RdmKind::D => "D",
            RdmKind::G => "G",
            RdmKind::Q => "Q",
        }
    }
}

impl std::str::FromStr for RdmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" => Ok(RdmKind::D),
            "G" | "g" => Ok(RdmKind::G),
            "Q" | "q" => Ok(RdmKind::Q),
            other => Err(Error::InvalidRdm(format!("unknown matrix kind `{other}`"))),
        }
    }
}

/// A D, G or Q matrix. D and Q are stored compressed over pairs `i < j`; G
/// over the full `L^2` index `i * L + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm {
    kind: RdmKind,
    l: usize,
    n: usize,
    matrix: DMatrix<f64>,
}

impl Rdm {
    /// Wraps a matrix in the native basis of `kind`. Small asymmetries (from
    /// floating-point assembly) are averaged away; larger ones are rejected.
    pub fn new(kind: RdmKind, l: usize, n: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = kind.dimension(l);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension(format!(
                "{} matrix for L={l} must be {dim}x{dim}, got {}x{}",
                kind.label(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-10 * scale {
            return Err(Error::NotHermitian(asym));
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self { kind, l, n, matrix })
    }

    /// Builds from a full `L^2 x L^2` matrix. For D and Q the full matrix is
    /// projected onto the antisymmetric pair space.
    pub fn from_full(kind: RdmKind, l: usize, n: usize, full: &DMatrix<f64>) -> Result<Self> {
        if full.nrows() != l * l || full.ncols() != l * l {
            return Err(Error::Dimension(format!("full matrix for L={l} must be {0}x{0}", l * l)));
        }
        if !kind.is_pair() {
            return Self::new(kind, l, n, full.clone());
        }
        let pairs = pair_list(l);
        let m = DMatrix::from_fn(pairs.len(), pairs.len(), |p, q| {
            let (i, j) = pairs[p];
            let (k, s) = pairs[q];
            let f = |a: usize, b: usize, c: usize, d: usize| full[(a * l + b, c * l + d)];
            PAIR_SCALE * 0.25 * (f(i, j, k, s) - f(j, i, k, s) - f(i, j, s, k) + f(j, i, s, k))
        });
        Self::new(kind, l, n, m)
    }

    pub fn kind(&self) -> RdmKind {
        self.kind
    }

    pub fn n_orbitals(&self) -> usize {
        self.l
    }

    pub fn n_electrons(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Entry in the full-index convention, e.g. `<a_i^+ a_j^+ a_l a_k>` for D.
    pub fn full_entry(&self, i: usize, j: usize, k: usize, m: usize) -> f64 {
        let l = self.l;
        if !self.kind.is_pair() {
            return self.matrix[(i * l + j, k * l + m)];
        }
        if i == j || k == m {
            return 0.0;
        }
        let (p, sp) = if i < j { (pair_index(i, j, l), 1.0) } else { (pair_index(j, i, l), -1.0) };
        let (q, sq) = if k < m { (pair_index(k, m, l), 1.0) } else { (pair_index(m, k, l), -1.0) };
        sp * sq * self.matrix[(p, q)] / PAIR_SCALE
    }

    pub fn to_full(&self) -> DMatrix<f64> {
        let l = self.l;
        if !self.kind.is_pair() {
            return self.matrix.clone();
        }
        let mut full = DMatrix::zeros(l * l, l * l);
        let pairs = pair_list(l);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(k, m)) in pairs.iter().enumerate() {
                let v = self.matrix[(p, q)] / PAIR_SCALE;
                full[(i * l + j, k * l + m)] = v;
                full[(j * l + i, k * l + m)] = -v;
                full[(i * l + j, m * l + k)] = -v;
                full[(j * l + i, m * l + k)] = v;
            }
        }
        full
    }

    /// Trace in the full-index convention (`N(N-1)` for D).
    pub fn full_trace(&self) -> f64 {
        if self.kind.is_pair() {
            2.0 * self.matrix.trace() / PAIR_SCALE
        } else {
            self.matrix.trace()
        }
    }
}
