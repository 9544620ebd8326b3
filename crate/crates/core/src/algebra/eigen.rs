use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::pairs::pair_list;
use super::rdm::{Rdm, RdmKind, PAIR_SCALE};
use crate::error::{Error, Result};
use crate::fock::{apply_operator_string, FockVector, Ladder};

/// Eigenpairs of an RDM in its native basis, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    kind: RdmKind,
    l: usize,
    n: usize,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn kind(&self) -> RdmKind {
        self.kind
    }

    pub fn n_orbitals(&self) -> usize {
        self.l
    }

    pub fn n_electrons(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvectors as columns, in the compressed pair basis for D and Q.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// The `k`-th eigenvector reshaped into an `L x L` operator coefficient
    /// matrix (antisymmetric for D and Q).
    pub fn coefficient_matrix(&self, k: usize) -> DMatrix<f64> {
        coefficient_matrix(self.kind, self.l, &self.vectors.column(k).into_owned())
    }

    /// The `k`-th eigenvector in the full `L^2` index.
    pub fn full_vector(&self, k: usize) -> DVector<f64> {
        let m = self.coefficient_matrix(k);
        DVector::from_fn(self.l * self.l, |p, _| m[(p / self.l, p % self.l)])
    }

    /// Rebuilds the matrix from selected eigenpairs.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        &self.vectors * lambda * self.vectors.transpose()
    }

    /// Returns a copy whose eigenvectors within `indices` are replaced by
    /// `rotation` applied to them (columns of the rotation mix the subspace).
    pub fn rotated(&self, indices: &[usize], rotation: &DMatrix<f64>) -> Result<Self> {
        if rotation.nrows() != indices.len() || rotation.ncols() != indices.len() {
            return Err(Error::Dimension("rotation does not match subspace".into()));
        }
        let mut out = self.clone();
        for (b, &target) in indices.iter().enumerate() {
            let mut col = DVector::zeros(self.vectors.nrows());
            for (a, &src) in indices.iter().enumerate() {
                col.axpy(rotation[(a, b)], &self.vectors.column(src), 1.0);
            }
            out.vectors.set_column(target, &col);
        }
        Ok(out)
    }
}

fn coefficient_matrix(kind: RdmKind, l: usize, v: &DVector<f64>) -> DMatrix<f64> {
    if !kind.is_pair() {
        return DMatrix::from_fn(l, l, |i, j| v[i * l + j]);
    }
    // Scaled so that u^T D_full u reproduces the compressed eigenvalue.
    let f = PAIR_SCALE.sqrt() / 2.0;
    let mut m = DMatrix::zeros(l, l);
    for (p, &(i, j)) in pair_list(l).iter().enumerate() {
        m[(i, j)] = f * v[p];
        m[(j, i)] = -f * v[p];
    }
    m
}

/// Symmetric eigendecomposition with a deterministic convention: ascending
/// eigenvalues, each vector's largest-magnitude component positive, exact
/// ties ordered by the first differing component.
pub fn eigendecompose(r: &Rdm) -> Result<EigenSystem> {
    let m = r.matrix();
    let asym = (m - m.transpose()).amax();
    if asym > 1e-10 * m.amax().max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    let eig = SymmetricEigen::new(m.clone());
    let dim = m.nrows();
    let mut cols: Vec<(f64, DVector<f64>)> = (0..dim)
        .map(|k| {
            let mut v = eig.eigenvectors.column(k).into_owned();
            fix_phase(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    cols.sort_by(|a, b| match a.0.total_cmp(&b.0) {
        Ordering::Equal => a.1.iter().zip(b.1.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal),
        o => o,
    });
    let values = cols.iter().map(|c| c.0).collect();
    let vectors = DMatrix::from_fn(dim, dim, |i, k| cols[k].1[i]);
    Ok(EigenSystem { kind: r.kind(), l: r.n_orbitals(), n: r.n_electrons(), values, vectors })
}

fn fix_phase(v: &mut DVector<f64>) {
    let max = v.amax();
    if let Some(first) = v.iter().position(|x| x.abs() >= max - 1e-12) {
        if v[first] < 0.0 {
            v.neg_mut();
        }
    }
}

/// A pair operator built from an RDM eigenvector:
/// `g = sum v_ij a_j^+ a_i`, `d = sum u_ij a_j a_i`, `q = sum w_ij a_j^+ a_i^+`.
#[derive(Debug, Clone)]
pub struct EigenOperator {
    pub kind: RdmKind,
    pub matrix: DMatrix<f64>,
    pub eigenvalue: f64,
    pub index: usize,
}

impl EigenOperator {
    pub fn new(kind: RdmKind, matrix: DMatrix<f64>, eigenvalue: f64, index: usize) -> Self {
        Self { kind, matrix, eigenvalue, index }
    }

    /// Terms `(coefficient, [left, right])` of the operator.
    pub fn terms(&self) -> Vec<(f64, [Ladder; 2])> {
        let l = self.matrix.nrows();
        let mut out = Vec::new();
        for i in 0..l {
            for j in 0..l {
                let c = self.matrix[(i, j)];
                if c == 0.0 {
                    continue;
                }
                let ops = match self.kind {
                    RdmKind::G => [Ladder::Create(j), Ladder::Annihilate(i)],
                    RdmKind::D => [Ladder::Annihilate(j), Ladder::Annihilate(i)],
                    RdmKind::Q => [Ladder::Create(j), Ladder::Create(i)],
                };
                out.push((c, ops));
            }
        }
        out
    }

    pub fn apply(&self, psi: &FockVector) -> FockVector {
        let mut out = FockVector::new();
        for (c, ops) in self.terms() {
            out.axpy(c, &apply_operator_string(&ops, psi));
        }
        out
    }
}

pub fn eigenoperators(es: &EigenSystem) -> Vec<EigenOperator> {
    (0..es.len())
        .map(|k| EigenOperator::new(es.kind, es.coefficient_matrix(k), es.values[k], k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_psd(dim: usize, seed: u64) -> DMatrix<f64> {
        let mut x = seed;
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        });
        &a * a.transpose()
    }

    #[test]
    fn reconstruction_and_order() {
        let r = Rdm::new(RdmKind::D, 5, 2, random_psd(10, 3)).unwrap();
        let es = eigendecompose(&r).unwrap();
        assert!(es.values().windows(2).all(|w| w[0] <= w[1]));
        assert!((es.reconstruct() - r.matrix()).amax() < 1e-10);
        let gram = es.vectors().transpose() * es.vectors();
        assert!((gram - DMatrix::identity(10, 10)).amax() < 1e-12);
    }

    #[test]
    fn scaled_identity() {
        let r = Rdm::new(RdmKind::G, 3, 1, DMatrix::identity(9, 9) * 0.7).unwrap();
        let es = eigendecompose(&r).unwrap();
        assert!(es.values().iter().all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn pair_operators_are_antisymmetric_and_normalized() {
        let r = Rdm::new(RdmKind::Q, 5, 2, random_psd(10, 9)).unwrap();
        for op in eigenoperators(&eigendecompose(&r).unwrap()) {
            assert!((&op.matrix + op.matrix.transpose()).amax() < 1e-14);
            assert!((op.matrix.norm() - 1.0).abs() < 1e-12);
        }
    }
}
