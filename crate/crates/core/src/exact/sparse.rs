use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{FockSector, TwoBodyHamiltonian};

/// Hamiltonian restricted to one sector, in CSR form.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    sector: Arc<FockSector>,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

/// Assembles `<det'|H|det>` over the `(n, sz2)` sector. Terms that leave the
/// sector are an error, since the sector would not be invariant.
pub fn assemble_sector(ham: &TwoBodyHamiltonian, n: usize, sz2: Option<i32>) -> Result<SparseHamiltonian> {
    let sector = Arc::new(FockSector::new(ham.basis(), n, sz2)?);
    let l = ham.n_orbitals();
    let h = ham.one_body();
    let mut indptr = vec![0];
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut row: BTreeMap<usize, f64> = BTreeMap::new();
    let push = |row: &mut BTreeMap<usize, f64>, target, coef: f64| -> Result<()> {
        if coef == 0.0 {
            return Ok(());
        }
        match sector.position(target) {
            Some(j) => {
                *row.entry(j).or_insert(0.0) += coef;
                Ok(())
            }
            None if coef.abs() < 1e-14 => Ok(()),
            None => Err(Error::Validation("Hamiltonian couples the sector to states outside it".into())),
        }
    };
    for &det in sector.determinants() {
        row.clear();
        let occ: Vec<usize> = det.orbitals().collect();
        // one-body: h_ik a_i^+ a_k
        for &k in &occ {
            let (d1, s1) = det.annihilate(k).expect("occupied");
            for i in 0..l {
                if let Some((d2, s2)) = d1.create(i) {
                    push(&mut row, d2, h[(i, k)] * s1 * s2)?;
                }
            }
        }
        // two-body: V_ij,kl a_i^+ a_j^+ a_l a_k with i<j, k<l
        for (a, &k) in occ.iter().enumerate() {
            for &m in &occ[a + 1..] {
                let (d1, s1) = det.annihilate(k).expect("occupied");
                let (d2, s2) = d1.annihilate(m).expect("occupied");
                // a_l a_k |det> : apply a_k first, then a_l
                for i in 0..l {
                    for j in i + 1..l {
                        let v = ham.v2(i, j, k, m);
                        if v == 0.0 {
                            continue;
                        }
                        let Some((d3, s3)) = d2.create(j) else { continue };
                        let Some((d4, s4)) = d3.create(i) else { continue };
                        push(&mut row, d4, v * s1 * s2 * s3 * s4)?;
                    }
                }
            }
        }
        for (&j, &v) in row.iter() {
            indices.push(j);
            values.push(v);
        }
        indptr.push(indices.len());
    }
    Ok(SparseHamiltonian { sector, indptr, indices, values })
}

impl SparseHamiltonian {
    pub fn sector(&self) -> &Arc<FockSector> {
        &self.sector
    }

    pub fn dimension(&self) -> usize {
        self.sector.dimension()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = H x` (rows are `<det_row| H |det_col>`).
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        // CSR row r stores column r of H, i.e. the image of det r.
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, xr) in x.iter().enumerate() {
            if *xr == 0.0 {
                continue;
            }
            for p in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[p]] += self.values[p] * xr;
            }
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(x.len());
        self.matvec(x.as_slice(), y.as_mut_slice());
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for p in self.indptr[r]..self.indptr[r + 1] {
                m[(self.indices[p], r)] += self.values[p];
            }
        }
        m
    }

    /// Largest `|H_ij - H_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let d = self.to_dense();
        (&d - d.transpose()).amax()
    }
}
