use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::rdms::Wavefunction;
use super::sparse::SparseHamiltonian;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Target for `||H psi - E psi||`.
    pub tol: f64,
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_limit: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, dense_limit: 2000, krylov_dim: 120, max_restarts: 200, seed: 0x5eed }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub wavefunction: Wavefunction,
    pub residual: f64,
    /// Number of sector eigenvalues within `1e-8` of the ground energy (dense
    /// path) or Ritz values within that window (Krylov path).
    pub degeneracy: usize,
}

/// Lowest eigenpair of a sector Hamiltonian.
pub fn ground_state(hs: &SparseHamiltonian, opts: &SolverOptions) -> Result<GroundState> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Contract(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let dim = hs.dimension();
    let (energy, mut vec, degeneracy) = if dim <= opts.dense_limit {
        dense_lowest(hs)
    } else {
        lanczos_lowest(hs, opts)?
    };
    fix_sign(&mut vec);
    let residual = (hs.apply(&vec) - &vec * energy).norm();
    if residual > opts.tol {
        return Err(Error::NoConvergence { iterations: 0, residual });
    }
    let wavefunction = Wavefunction::new(hs.sector().clone(), vec.as_slice().to_vec())?;
    Ok(GroundState { energy, wavefunction, residual, degeneracy })
}

fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}

fn dense_lowest(hs: &SparseHamiltonian) -> (f64, DVector<f64>, usize) {
    let eig = SymmetricEigen::new(hs.to_dense());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let window = 1e-8 * e0.abs().max(1.0);
    let degeneracy = order.iter().filter(|&&k| eig.eigenvalues[k] - e0 < window).count();
    (e0, eig.eigenvectors.column(order[0]).into_owned(), degeneracy)
}

fn lanczos_lowest(hs: &SparseHamiltonian, opts: &SolverOptions) -> Result<(f64, DVector<f64>, usize)> {
    let dim = hs.dimension();
    let m = opts.krylov_dim.min(dim).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = DVector::from_fn(dim, |_, _| rng.random::<f64>() - 0.5);
    start /= start.norm();
    let mut best_residual = f64::INFINITY;
    for _restart in 0..opts.max_restarts {
        let mut basis: Vec<DVector<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            let mut w = hs.apply(&basis[j]);
            let a = basis[j].dot(&w);
            alpha.push(a);
            // full reorthogonalization, twice
            for _ in 0..2 {
                for v in &basis {
                    let c = v.dot(&w);
                    w.axpy(-c, v, 1.0);
                }
            }
            let b = w.norm();
            if j + 1 == m || b < 1e-13 {
                break;
            }
            beta.push(b);
            basis.push(w / b);
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta = eig.eigenvalues[order[0]];
        let s = eig.eigenvectors.column(order[0]);
        let mut x = DVector::zeros(dim);
        for (v, c) in basis.iter().zip(s.iter()) {
            x.axpy(*c, v, 1.0);
        }
        x /= x.norm();
        let residual = (hs.apply(&x) - &x * theta).norm();
        best_residual = best_residual.min(residual);
        if residual <= opts.tol * 0.5 {
            let window = 1e-8 * theta.abs().max(1.0);
            let degeneracy = order.iter().filter(|&&q| eig.eigenvalues[q] - theta < window).count();
            return Ok((theta, x, degeneracy));
        }
        start = x;
    }
    Err(Error::NoConvergence { iterations: opts.max_restarts, residual: best_residual })
}
