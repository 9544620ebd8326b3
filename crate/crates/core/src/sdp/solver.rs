use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::problem::{inner, SdpProblem, SymEntry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Target for the largest of the three relative residuals.
    pub tol: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the boundary taken by each step.
    pub step_fraction: f64,
    /// Relative threshold below which an equality row counts as dependent.
    pub presolve_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_iterations: 150, step_fraction: 0.98, presolve_tol: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IterationLimit,
    NumericalFailure,
}

/// Relative residuals recomputed from the variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `|A(X) - b| / (1 + |b|)`
    pub primal: f64,
    /// `|C - A^*(y) - Z|_F / (1 + |C|_F)`
    pub dual: f64,
    /// `|<C,X> - b^T y| / (1 + |<C,X>| + |b^T y|)`
    pub gap: f64,
    pub min_eig_x: f64,
    pub min_eig_z: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: Status,
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    /// Constraint rows dropped by presolve as linearly dependent.
    pub dependent_rows: Vec<usize>,
}

fn frob(ms: &[DMatrix<f64>]) -> f64 {
    ms.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

fn min_eig(ms: &[DMatrix<f64>]) -> f64 {
    ms.iter()
        .map(|m| SymmetricEigen::new(m.clone()).eigenvalues.min())
        .fold(f64::INFINITY, f64::min)
}

/// Recomputes the residual metrics of `(X, y, Z)` for `p` from scratch.
pub fn residuals(p: &SdpProblem, x: &[DMatrix<f64>], y: &[f64], z: &[DMatrix<f64>]) -> Result<Residuals> {
    let dims: Vec<usize> = p.blocks().iter().map(|b| b.dim).collect();
    let ok = |ms: &[DMatrix<f64>]| ms.len() == dims.len() && ms.iter().zip(&dims).all(|(m, &d)| m.shape() == (d, d));
    if !ok(x) || !ok(z) || y.len() != p.n_constraints() {
        return Err(Error::Dimension("solution does not match the problem's blocks or constraints".into()));
    }
    let b = DVector::from_column_slice(p.rhs());
    let ax = DVector::from_fn(p.n_constraints(), |i, _| inner(&p.constraints()[i], x));
    let c = p.dense(p.objective());
    let mut rd = c.clone();
    for (row, &yi) in p.constraints().iter().zip(y) {
        for e in row {
            rd[e.block][(e.i, e.j)] -= yi * e.value;
            if e.i != e.j {
                rd[e.block][(e.j, e.i)] -= yi * e.value;
            }
        }
    }
    for (r, zb) in rd.iter_mut().zip(z) {
        *r -= zb;
    }
    let pobj = inner(p.objective(), x);
    let dobj = b.dot(&DVector::from_column_slice(y));
    Ok(Residuals {
        primal: (ax - &b).norm() / (1.0 + b.norm()),
        dual: frob(&rd) / (1.0 + frob(&c)),
        gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        min_eig_x: min_eig(x),
        min_eig_z: min_eig(z),
    })
}

/// Constraint data regrouped per block: `rows[b]` lists `(row, entries)`.
struct Layout {
    dims: Vec<usize>,
    rows: Vec<Vec<(usize, Vec<SymEntry>)>>,
    m: usize,
}

impl Layout {
    fn new(p: &SdpProblem, kept: &[usize]) -> Self {
        let dims: Vec<usize> = p.blocks().iter().map(|b| b.dim).collect();
        let mut rows: Vec<Vec<(usize, Vec<SymEntry>)>> = vec![Vec::new(); dims.len()];
        for (r, &orig) in kept.iter().enumerate() {
            let mut per_block: Vec<Vec<SymEntry>> = vec![Vec::new(); dims.len()];
            for e in &p.constraints()[orig] {
                per_block[e.block].push(*e);
            }
            for (b, es) in per_block.into_iter().enumerate() {
                if !es.is_empty() {
                    rows[b].push((r, es));
                }
            }
        }
        Self { dims, rows, m: kept.len() }
    }

    /// `A(X)`
    fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (b, rows) in self.rows.iter().enumerate() {
            for (r, es) in rows {
                out[*r] += es.iter().map(|e| e.weight() * x[b][(e.i, e.j)]).sum::<f64>();
            }
        }
        out
    }

    /// `A^*(y) = sum_i y_i A_i`
    fn adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for (b, rows) in self.rows.iter().enumerate() {
            for (r, es) in rows {
                let yr = y[*r];
                if yr == 0.0 {
                    continue;
                }
                for e in es {
                    out[b][(e.i, e.j)] += yr * e.value;
                    if e.i != e.j {
                        out[b][(e.j, e.i)] += yr * e.value;
                    }
                }
            }
        }
        out
    }

    /// Schur complement `M_ij = sum_b <A_i, W A_j W>`.
    fn schur(&self, w: &[DMatrix<f64>]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.m, self.m);
        for (b, rows) in self.rows.iter().enumerate() {
            let wb = &w[b];
            let n = wb.nrows();
            let mut waw = DMatrix::zeros(n, n);
            for (rj, ej) in rows {
                waw.fill(0.0);
                for e in ej {
                    let (ci, cj) = (wb.column(e.i), wb.column(e.j));
                    if e.i == e.j {
                        waw.ger(e.value, &ci, &ci, 1.0);
                    } else {
                        waw.ger(e.value, &ci, &cj, 1.0);
                        waw.ger(e.value, &cj, &ci, 1.0);
                    }
                }
                for (ri, ei) in rows {
                    if ri > rj {
                        continue;
                    }
                    let v: f64 = ei.iter().map(|e| e.weight() * waw[(e.i, e.j)]).sum();
                    m[(*ri, *rj)] += v;
                }
            }
        }
        m.fill_lower_triangle_with_upper_triangle();
        m
    }
}

/// Drops rows of the equality system that are numerically dependent on
/// earlier ones, using a pivoted Cholesky factorization of `A A^T`.
/// Returns `(kept, dropped)`.
fn presolve(p: &SdpProblem, tol: f64) -> (Vec<usize>, Vec<usize>) {
    let m = p.n_constraints();
    let mut by_key: std::collections::BTreeMap<(usize, usize, usize), Vec<(usize, f64)>> = Default::default();
    for (r, row) in p.constraints().iter().enumerate() {
        for e in row {
            let w = if e.i == e.j { 1.0 } else { 2.0f64.sqrt() };
            by_key.entry((e.block, e.i, e.j)).or_default().push((r, w * e.value));
        }
    }
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for list in by_key.values() {
        for &(a, va) in list {
            for &(b, vb) in list {
                gram[(a, b)] += va * vb;
            }
        }
    }
    let diag: Vec<f64> = (0..m).map(|i| gram[(i, i)]).collect();
    // Gram-Schmidt in the order given, against the kept rows.
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped = Vec::new();
    let mut factor: Vec<DVector<f64>> = Vec::new();
    for i in 0..m {
        let mut col = DVector::zeros(kept.len());
        for (a, &k) in kept.iter().enumerate() {
            let mut s = gram[(k, i)];
            for c in 0..a {
                s -= factor[a][c] * col[c];
            }
            col[a] = s / factor[a][a];
        }
        let residual = diag[i] - col.norm_squared();
        if diag[i] == 0.0 || residual <= tol * diag[i] {
            dropped.push(i);
            continue;
        }
        let mut f = col.clone().resize_vertically(kept.len() + 1, 0.0);
        f[kept.len()] = residual.sqrt();
        factor.push(f);
        kept.push(i);
    }
    (kept, dropped)
}

struct Scaling {
    g: Vec<DMatrix<f64>>,
    g_inv: Vec<DMatrix<f64>>,
    w: Vec<DMatrix<f64>>,
    d: Vec<DVector<f64>>,
}

/// Nesterov-Todd scaling `W = G G^T` with `W Z W = X` and
/// `G^T Z G = G^{-1} X G^{-T} = diag(d)`.
fn nt_scaling(x: &[DMatrix<f64>], z: &[DMatrix<f64>]) -> Option<Scaling> {
    let mut s = Scaling { g: vec![], g_inv: vec![], w: vec![], d: vec![] };
    for (xb, zb) in x.iter().zip(z) {
        let l = Cholesky::new(xb.clone())?.l();
        let mut inner = l.transpose() * zb * &l;
        inner = (&inner + inner.transpose()) * 0.5;
        let eig = SymmetricEigen::new(inner);
        if eig.eigenvalues.iter().any(|&v| v.is_nan() || v <= 0.0) {
            return None;
        }
        let q = eig.eigenvectors;
        let quarter = eig.eigenvalues.map(|v| v.powf(-0.25));
        let g = &l * &q * DMatrix::from_diagonal(&quarter);
        let l_inv = l.solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows()))?;
        let g_inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.powf(0.25))) * q.transpose() * l_inv;
        let w = &g * g.transpose();
        s.d.push(eig.eigenvalues.map(|v| v.sqrt()));
        s.g.push(g);
        s.g_inv.push(g_inv);
        s.w.push((&w + w.transpose()) * 0.5);
    }
    Some(s)
}

/// Largest `alpha <= 1` (scaled by the step fraction) keeping `X + alpha dX`
/// positive definite.
fn step_length(x: &[DMatrix<f64>], dx: &[DMatrix<f64>], fraction: f64) -> f64 {
    let mut alpha: f64 = 1.0;
    for (xb, dxb) in x.iter().zip(dx) {
        let Some(ch) = Cholesky::new(xb.clone()) else { return 0.0 };
        let l = ch.l();
        let Some(t) = l.solve_lower_triangular(dxb) else { return 0.0 };
        let Some(t) = l.solve_lower_triangular(&t.transpose()) else { return 0.0 };
        let t = (&t + t.transpose()) * 0.5;
        let lam = SymmetricEigen::new(t).eigenvalues.min();
        if lam < 0.0 {
            alpha = alpha.min(fraction * (-1.0 / lam));
        }
    }
    alpha
}

fn dot_blocks(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

/// Solves `p` by a primal-dual path-following method with NT scaling and
/// Mehrotra predictor-corrector steps. Infeasible starts are allowed.
pub fn solve(p: &SdpProblem, cfg: &SolverConfig) -> Result<SdpSolution> {
    p.validate()?;
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::Config(format!("solver tolerance must be positive, got {}", cfg.tol)));
    }
    let (kept, dropped) = presolve(p, cfg.presolve_tol);
    let lay = Layout::new(p, &kept);
    let b = DVector::from_fn(kept.len(), |i, _| p.rhs()[kept[i]]);
    let c = p.dense(p.objective());
    let n_total: usize = lay.dims.iter().sum();
    let nt = n_total as f64;

    let a_norm_max = p
        .constraints()
        .iter()
        .map(|r| r.iter().map(|e| e.value * e.weight()).sum::<f64>().max(0.0).sqrt())
        .fold(0.0, f64::max);
    let c_norm = frob(&c);
    let xi = (kept.iter().map(|&i| nt.sqrt() * (1.0 + p.rhs()[i].abs()) / (1.0 + a_norm_max)).fold(10.0f64, f64::max))
        .max(nt.sqrt());
    let eta = 10.0f64.max(nt.sqrt()).max(c_norm).max(a_norm_max);
    let mut x: Vec<DMatrix<f64>> = lay.dims.iter().map(|&d| DMatrix::identity(d, d) * xi).collect();
    let mut z: Vec<DMatrix<f64>> = lay.dims.iter().map(|&d| DMatrix::identity(d, d) * eta).collect();
    let mut y = DVector::zeros(kept.len());

    let b_norm = b.norm();
    let mut status = Status::IterationLimit;
    let mut iterations = 0;
    for it in 0..=cfg.max_iterations {
        iterations = it;
        let rp = &b - lay.apply(&x);
        let aty = lay.adjoint(&y);
        let rd: Vec<DMatrix<f64>> = c.iter().zip(&aty).zip(&z).map(|((cb, ab), zb)| cb - ab - zb).collect();
        let pobj = dot_blocks(&c, &x);
        let dobj = b.dot(&y);
        let rel_p = rp.norm() / (1.0 + b_norm);
        let rel_d = frob(&rd) / (1.0 + c_norm);
        let rel_g = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if rel_p.max(rel_d).max(rel_g) <= cfg.tol {
            status = Status::Optimal;
            break;
        }
        let scale = 1.0 + c_norm + b_norm;
        if dobj > 1e10 * scale && rel_d < 1e-6 {
            status = Status::PrimalInfeasible;
            break;
        }
        if pobj < -1e10 * scale && rel_p < 1e-6 {
            status = Status::DualInfeasible;
            break;
        }
        if it == cfg.max_iterations {
            break;
        }
        let mu = dot_blocks(&x, &z) / nt;
        let Some(sc) = nt_scaling(&x, &z) else {
            status = Status::NumericalFailure;
            break;
        };
        let mut schur = lay.schur(&sc.w);
        let mut chol = Cholesky::new(schur.clone());
        if chol.is_none() {
            let bump = 1e-14 * schur.diagonal().amax().max(1e-300);
            for i in 0..schur.nrows() {
                schur[(i, i)] += bump;
            }
            chol = Cholesky::new(schur);
        }
        let Some(chol) = chol else {
            status = Status::NumericalFailure;
            break;
        };
        let wrdw: Vec<DMatrix<f64>> = sc.w.iter().zip(&rd).map(|(w, r)| w * r * w).collect();
        let base = &rp + lay.apply(&wrdw);

        // Direction for a given right-hand side of the scaled complementarity.
        let direction = |rc: &[DMatrix<f64>]| {
            let rx: Vec<DMatrix<f64>> = rc
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let d = &sc.d[k];
                    let h = DMatrix::from_fn(d.len(), d.len(), |i, j| 2.0 * r[(i, j)] / (d[i] + d[j]));
                    &sc.g[k] * h * sc.g[k].transpose()
                })
                .collect();
            let dy = chol.solve(&(&base - lay.apply(&rx)));
            let atdy = lay.adjoint(&dy);
            let dz: Vec<DMatrix<f64>> = rd.iter().zip(&atdy).map(|(r, a)| r - a).collect();
            let dx: Vec<DMatrix<f64>> = rx
                .iter()
                .zip(&dz)
                .zip(&sc.w)
                .map(|((r, dzb), w)| {
                    let t = r - w * dzb * w;
                    (&t + t.transpose()) * 0.5
                })
                .collect();
            (dx, dy, dz)
        };

        let v2: Vec<DMatrix<f64>> = sc.d.iter().map(|d| DMatrix::from_diagonal(&d.map(|v| v * v))).collect();
        let rc_aff: Vec<DMatrix<f64>> = v2.iter().map(|m| -m).collect();
        let (dx_a, _, dz_a) = direction(&rc_aff);
        let ap = step_length(&x, &dx_a, 1.0);
        let ad = step_length(&z, &dz_a, 1.0);
        let x_a: Vec<DMatrix<f64>> = x.iter().zip(&dx_a).map(|(a, d)| a + d * ap).collect();
        let z_a: Vec<DMatrix<f64>> = z.iter().zip(&dz_a).map(|(a, d)| a + d * ad).collect();
        let mu_aff = dot_blocks(&x_a, &z_a) / nt;
        let sigma = (mu_aff / mu).max(0.0).powi(3).min(1.0);

        let rc: Vec<DMatrix<f64>> = (0..lay.dims.len())
            .map(|k| {
                let dxs = &sc.g_inv[k] * &dx_a[k] * sc.g_inv[k].transpose();
                let dzs = sc.g[k].transpose() * &dz_a[k] * &sc.g[k];
                let second = (&dxs * &dzs + &dzs * &dxs) * 0.5;
                DMatrix::identity(lay.dims[k], lay.dims[k]) * (sigma * mu) - &v2[k] - second
            })
            .collect();
        let (dx, dy, dz) = direction(&rc);
        let ap = step_length(&x, &dx, cfg.step_fraction);
        let ad = step_length(&z, &dz, cfg.step_fraction);
        for k in 0..x.len() {
            x[k] += &dx[k] * ap;
            z[k] += &dz[k] * ad;
            x[k] = (&x[k] + x[k].transpose()) * 0.5;
            z[k] = (&z[k] + z[k].transpose()) * 0.5;
        }
        y += dy * ad;
    }

    let mut y_full = vec![0.0; p.n_constraints()];
    for (r, &orig) in kept.iter().enumerate() {
        y_full[orig] = y[r];
    }
    let res = residuals(p, &x, &y_full, &z)?;
    if status == Status::Optimal && res.primal > cfg.tol.max(1e-12) * 10.0 {
        // dropped rows were inconsistent with the kept system
        status = Status::PrimalInfeasible;
    }
    Ok(SdpSolution {
        status,
        primal_objective: inner(p.objective(), &x),
        dual_objective: p.rhs().iter().zip(&y_full).map(|(a, b)| a * b).sum(),
        x,
        y: y_full,
        z,
        residuals: res,
        iterations,
        dependent_rows: dropped,
    })
}
