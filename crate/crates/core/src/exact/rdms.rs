use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::algebra::{Rdm, RdmKind};
use crate::error::{Error, Result};
use crate::fock::{Determinant, FockSector, FockVector, Ladder};

/// Real amplitudes over the determinants of one sector.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    sector: Arc<FockSector>,
    coeffs: Vec<f64>,
}

impl Wavefunction {
    pub fn new(sector: Arc<FockSector>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != sector.dimension() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a sector of dimension {}",
                coeffs.len(),
                sector.dimension()
            )));
        }
        Ok(Self { sector, coeffs })
    }

    pub fn sector(&self) -> &Arc<FockSector> {
        &self.sector
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.coeffs.iter_mut().for_each(|c| *c /= n);
        }
        self
    }

    pub fn to_fock_vector(&self) -> FockVector {
        let mut v = FockVector::new();
        for (det, &c) in self.sector.determinants().iter().zip(&self.coeffs) {
            if c != 0.0 {
                v.add(*det, c);
            }
        }
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = (Determinant, f64)> + '_ {
        self.sector.determinants().iter().copied().zip(self.coeffs.iter().copied())
    }
}

#[derive(Debug, Clone)]
pub struct ExactRdms {
    pub d: Rdm,
    pub g: Rdm,
    pub q: Rdm,
    /// `gamma[(i, k)] = <a_i^+ a_k>`
    pub gamma: DMatrix<f64>,
}

/// Builds all reduced density matrices of a normalized state as Gram matrices
/// of the vectors `a_l a_k psi`, `a_l^+ a_k psi` and `a_l^+ a_k^+ psi`.
pub fn compute_rdms(psi: &Wavefunction) -> Result<ExactRdms> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(norm));
    }
    let l = psi.sector.n_orbitals();
    let n = psi.sector.n_electrons();
    let d_full = gram(psi, l * l, |p| {
        let (k, m) = (p / l, p % l);
        [Ladder::Annihilate(m), Ladder::Annihilate(k)]
    });
    let g_full = gram(psi, l * l, |p| {
        let (k, m) = (p / l, p % l);
        [Ladder::Create(m), Ladder::Annihilate(k)]
    });
    let q_full = gram(psi, l * l, |p| {
        let (k, m) = (p / l, p % l);
        [Ladder::Create(m), Ladder::Create(k)]
    });
    let gamma = gram(psi, l, |k| [Ladder::Annihilate(k)]);
    Ok(ExactRdms {
        d: Rdm::from_full(RdmKind::D, l, n, &d_full)?,
        g: Rdm::from_full(RdmKind::G, l, n, &g_full)?,
        q: Rdm::from_full(RdmKind::Q, l, n, &q_full)?,
        gamma,
    })
}

/// `M[a, b] = <phi_a | phi_b>` with `phi_a = ops(a) psi`.
fn gram<const K: usize>(psi: &Wavefunction, count: usize, ops: impl Fn(usize) -> [Ladder; K]) -> DMatrix<f64> {
    let mut index: HashMap<Determinant, usize> = HashMap::new();
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::with_capacity(count);
    for a in 0..count {
        let string = ops(a);
        let mut col = Vec::new();
        'dets: for (det, c) in psi.iter() {
            if c == 0.0 {
                continue;
            }
            let mut d = det;
            let mut s = c;
            for op in string.iter().rev() {
                match op.apply(d) {
                    Some((next, sign)) => {
                        d = next;
                        s *= sign;
                    }
                    None => continue 'dets,
                }
            }
            let next = index.len();
            let row = *index.entry(d).or_insert(next);
            col.push((row, s));
        }
        columns.push(col);
    }
    let mut phi = DMatrix::<f64>::zeros(index.len().max(1), count);
    for (a, col) in columns.iter().enumerate() {
        for &(row, s) in col {
            phi[(row, a)] += s;
        }
    }
    phi.transpose() * phi
}
