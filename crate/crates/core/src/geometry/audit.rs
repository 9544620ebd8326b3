use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::bounds::BoundSet;
use super::nullspace::{null_space, NullSpace};
use crate::algebra::{commutator_matrix, eigendecompose, CommutatorKind, EigenSystem, Rdm, RdmKind};
use crate::error::{Error, Result};

/// The four closure families, named by their operand spaces. Their lengths
/// are alpha (`[g, g]`), beta (`[q, d]`), gamma (`[g, d]`) and zeta (`[g, q]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClosureFamily {
    GG,
    QD,
    GD,
    GQ,
}

impl ClosureFamily {
    pub const ALL: [ClosureFamily; 4] = [ClosureFamily::GG, ClosureFamily::QD, ClosureFamily::GD, ClosureFamily::GQ];

    /// Kinds indexed by the grid rows `m` and columns `n`. For beta the rows
    /// are D eigenvectors and the columns Q eigenvectors.
    pub fn axes(self) -> (RdmKind, RdmKind) {
        match self {
            ClosureFamily::GG => (RdmKind::G, RdmKind::G),
            ClosureFamily::QD => (RdmKind::D, RdmKind::Q),
            ClosureFamily::GD => (RdmKind::G, RdmKind::D),
            ClosureFamily::GQ => (RdmKind::G, RdmKind::Q),
        }
    }

    pub fn length_name(self) -> &'static str {
        match self {
            ClosureFamily::GG => "alpha",
            ClosureFamily::QD => "beta",
            ClosureFamily::GD => "gamma",
            ClosureFamily::GQ => "zeta",
        }
    }
}

/// Values over a rectangular set of eigen-indices, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub row_kind: RdmKind,
    pub col_kind: RdmKind,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols.len() + c]
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest entry with its (eigen-index) position.
    pub fn max(&self) -> Option<(f64, usize, usize)> {
        self.max_where(|_, _| true)
    }

    /// Largest entry among eigen-index pairs accepted by `keep`.
    pub fn max_where(&self, keep: impl Fn(usize, usize) -> bool) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, &m) in self.rows.iter().enumerate() {
            for (c, &n) in self.cols.iter().enumerate() {
                if !keep(m, n) {
                    continue;
                }
                let v = self.get(r, c);
                if best.is_none_or(|b| v > b.0) {
                    best = Some((v, m, n));
                }
            }
        }
        best
    }
}

pub const SUBSPACE_PAIR_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Descriptor {
    /// Maximum length over null-pair indices in the deterministic eigenbasis.
    pub value: f64,
    pub argmax: Option<(usize, usize)>,
    /// True when one of the null spaces is empty; `value` is then 0.
    pub empty_domain: bool,
    /// `sqrt(sum of squared lengths)` over null pairs; basis independent.
    pub hs_norm: f64,
    /// Maximum of `|[x, y] psi|` over unit operators `x`, `y` in the two null
    /// spaces; basis independent. `None` when the domain has more than
    /// `SUBSPACE_PAIR_LIMIT` pairs, where the search cost (cubic in the pair
    /// count) is prohibitive.
    pub subspace_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Descriptors {
    pub alpha: Descriptor,
    pub beta: Descriptor,
    pub gamma: Descriptor,
    pub zeta: Descriptor,
}

impl Descriptors {
    pub fn get(&self, family: ClosureFamily) -> &Descriptor {
        match family {
            ClosureFamily::GG => &self.alpha,
            ClosureFamily::QD => &self.beta,
            ClosureFamily::GD => &self.gamma,
            ClosureFamily::GQ => &self.zeta,
        }
    }
}

/// `Delta(m, n) = lhs - rhs` of each eigenspace inequality; positive entries
/// are violations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityGrids {
    pub alpha: Grid,
    pub beta: Grid,
    pub gamma: Grid,
    pub zeta: Grid,
}

impl InequalityGrids {
    pub fn get(&self, family: ClosureFamily) -> &Grid {
        match family {
            ClosureFamily::GG => &self.alpha,
            ClosureFamily::QD => &self.beta,
            ClosureFamily::GD => &self.gamma,
            ClosureFamily::GQ => &self.zeta,
        }
    }

    pub fn max_violation(&self) -> f64 {
        ClosureFamily::ALL
            .iter()
            .filter_map(|&f| self.get(f).max().map(|m| m.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

struct Part {
    rdm: Rdm,
    es: EigenSystem,
    full: DMatrix<f64>,
    ops: Vec<DMatrix<f64>>,
    null: NullSpace,
}

impl Part {
    fn new(rdm: Rdm, es: EigenSystem, tol: f64) -> Self {
        let ops = (0..es.len()).map(|k| es.coefficient_matrix(k)).collect();
        let null = null_space(&es, tol);
        // Lengths are measured against the matrix with its numerically-zero
        // eigenvalues set to exactly zero; otherwise sqrt turns round-off of
        // order 1e-16 into lengths of order 1e-8.
        let l = rdm.n_orbitals();
        let mut full = DMatrix::zeros(l * l, l * l);
        for (k, &v) in es.values().iter().enumerate() {
            if !null.contains(k) {
                let u = es.full_vector(k);
                full.ger(v, &u, &u, 1.0);
            }
        }
        Self { rdm, es, full, ops, null }
    }
}

/// Spectral data of one consistent (D, G, Q) triple and every geometric
/// quantity derived from it.
pub struct Audit {
    n: usize,
    d: Part,
    g: Part,
    q: Part,
}

impl Audit {
    pub fn new(d: Rdm, g: Rdm, q: Rdm, tol: f64) -> Result<Self> {
        if d.kind() != RdmKind::D || g.kind() != RdmKind::G || q.kind() != RdmKind::Q {
            return Err(Error::Contract("audit expects D, G and Q in that order".into()));
        }
        let (l, n) = (d.n_orbitals(), d.n_electrons());
        if g.n_orbitals() != l || q.n_orbitals() != l || g.n_electrons() != n || q.n_electrons() != n {
            return Err(Error::Dimension("D, G and Q describe different systems".into()));
        }
        let (ed, eg, eq) = (eigendecompose(&d)?, eigendecompose(&g)?, eigendecompose(&q)?);
        Ok(Self { n, d: Part::new(d, ed, tol), g: Part::new(g, eg, tol), q: Part::new(q, eq, tol) })
    }

    /// Replaces one eigenbasis (for example a rotated null basis).
    pub fn with_eigensystem(mut self, es: EigenSystem) -> Result<Self> {
        let part = self.part_mut(es.kind());
        if es.n_orbitals() != part.rdm.n_orbitals() || es.len() != part.es.len() {
            return Err(Error::Dimension("eigensystem does not match the audited matrix".into()));
        }
        let tol = part.null.tol;
        *part = Part::new(part.rdm.clone(), es, tol);
        Ok(self)
    }

    fn part(&self, kind: RdmKind) -> &Part {
        match kind {
            RdmKind::D => &self.d,
            RdmKind::G => &self.g,
            RdmKind::Q => &self.q,
        }
    }

    fn part_mut(&mut self, kind: RdmKind) -> &mut Part {
        match kind {
            RdmKind::D => &mut self.d,
            RdmKind::G => &mut self.g,
            RdmKind::Q => &mut self.q,
        }
    }

    pub fn n_electrons(&self) -> usize {
        self.n
    }

    pub fn rdm(&self, kind: RdmKind) -> &Rdm {
        &self.part(kind).rdm
    }

    pub fn eigensystem(&self, kind: RdmKind) -> &EigenSystem {
        &self.part(kind).es
    }

    pub fn null(&self, kind: RdmKind) -> &NullSpace {
        &self.part(kind).null
    }

    pub fn null_dims(&self) -> (usize, usize, usize) {
        (self.d.null.dimension(), self.g.null.dimension(), self.q.null.dimension())
    }

    /// Coefficient matrix of the commutator for grid position `(m, n)` and
    /// the full-index matrix it is measured against.
    fn commutator(&self, family: ClosureFamily, m: usize, n: usize) -> (DMatrix<f64>, &DMatrix<f64>) {
        let ne = self.n;
        match family {
            ClosureFamily::GG => (commutator_matrix(CommutatorKind::Gamma, &self.g.ops[m], &self.g.ops[n], ne), &self.g.full),
            ClosureFamily::QD => (commutator_matrix(CommutatorKind::Theta, &self.q.ops[n], &self.d.ops[m], ne), &self.g.full),
            ClosureFamily::GD => (commutator_matrix(CommutatorKind::Delta, &self.g.ops[m], &self.d.ops[n], ne), &self.d.full),
            ClosureFamily::GQ => (commutator_matrix(CommutatorKind::Omega, &self.g.ops[m], &self.q.ops[n], ne), &self.q.full),
        }
    }

    /// `|[p_1, p_2] psi|` for the family's operators at `(m, n)`.
    pub fn length(&self, family: ClosureFamily, m: usize, n: usize) -> f64 {
        let (c, r) = self.commutator(family, m, n);
        quad(&c, r).max(0.0).sqrt()
    }

    /// Length restricted to null-space pairs.
    pub fn closure_residual(&self, family: ClosureFamily, m: usize, n: usize) -> Result<f64> {
        let (rk, ck) = family.axes();
        if !self.null(rk).contains(m) || !self.null(ck).contains(n) {
            return Err(Error::Contract(format!(
                "({m}, {n}) is not a null pair of the {}x{} family",
                rk.label(),
                ck.label()
            )));
        }
        Ok(self.length(family, m, n))
    }

    pub fn length_grid(&self, family: ClosureFamily, rows: &[usize], cols: &[usize]) -> Grid {
        let (row_kind, col_kind) = family.axes();
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &m in rows {
            for &n in cols {
                values.push(self.length(family, m, n));
            }
        }
        Grid { row_kind, col_kind, rows: rows.to_vec(), cols: cols.to_vec(), values }
    }

    pub fn null_grid(&self, family: ClosureFamily) -> Grid {
        let (rk, ck) = family.axes();
        self.length_grid(family, &self.null(rk).indices, &self.null(ck).indices)
    }

    pub fn full_grid(&self, family: ClosureFamily) -> Grid {
        let (rk, ck) = family.axes();
        let rows: Vec<usize> = (0..self.part(rk).es.len()).collect();
        let cols: Vec<usize> = (0..self.part(ck).es.len()).collect();
        self.length_grid(family, &rows, &cols)
    }

    pub fn descriptor(&self, family: ClosureFamily) -> Descriptor {
        let grid = self.null_grid(family);
        match grid.max() {
            None => Descriptor { value: 0.0, argmax: None, empty_domain: true, hs_norm: 0.0, subspace_max: None },
            Some((value, m, n)) => Descriptor {
                value,
                argmax: Some((m, n)),
                empty_domain: false,
                hs_norm: grid.values.iter().map(|v| v * v).sum::<f64>().sqrt(),
                subspace_max: (grid.values.len() <= SUBSPACE_PAIR_LIMIT)
                    .then(|| self.subspace_max(family, &grid.rows, &grid.cols)),
            },
        }
    }

    pub fn descriptors(&self) -> Descriptors {
        Descriptors {
            alpha: self.descriptor(ClosureFamily::GG),
            beta: self.descriptor(ClosureFamily::QD),
            gamma: self.descriptor(ClosureFamily::GD),
            zeta: self.descriptor(ClosureFamily::GQ),
        }
    }

    /// Maximizes `|sum_mn x_m y_n [p_m, p_n] psi|` over unit `x`, `y` by
    /// alternating top-eigenvector updates from every basis-pair start.
    fn subspace_max(&self, family: ClosureFamily, rows: &[usize], cols: &[usize]) -> f64 {
        let (a, b) = (rows.len(), cols.len());
        let mut comms = Vec::with_capacity(a * b);
        let mut target = None;
        for &m in rows {
            for &n in cols {
                let (c, r) = self.commutator(family, m, n);
                target = Some(r);
                comms.push(flatten(&c));
            }
        }
        let r = target.expect("nonempty domain");
        let images: Vec<DVector<f64>> = comms.iter().map(|c| r * c).collect();
        let w = DMatrix::from_fn(a * b, a * b, |p, q| comms[p].dot(&images[q]));
        let value = |x: &DVector<f64>, y: &DVector<f64>| {
            let mut s = 0.0;
            for p in 0..a * b {
                for q in 0..a * b {
                    s += x[p / b] * y[p % b] * x[q / b] * y[q % b] * w[(p, q)];
                }
            }
            s
        };
        let mut best: f64 = 0.0;
        for start in 0..a * b {
            let mut x = DVector::from_fn(a, |i, _| if i == start / b { 1.0 } else { 0.0 });
            let mut y = DVector::from_fn(b, |i, _| if i == start % b { 1.0 } else { 0.0 });
            let mut last = value(&x, &y);
            for _ in 0..200 {
                let mx = DMatrix::from_fn(a, a, |i, k| {
                    let mut s = 0.0;
                    for j in 0..b {
                        for m in 0..b {
                            s += y[j] * y[m] * w[(i * b + j, k * b + m)];
                        }
                    }
                    s
                });
                x = top_eigenvector(mx);
                let my = DMatrix::from_fn(b, b, |j, m| {
                    let mut s = 0.0;
                    for i in 0..a {
                        for k in 0..a {
                            s += x[i] * x[k] * w[(i * b + j, k * b + m)];
                        }
                    }
                    s
                });
                y = top_eigenvector(my);
                let now = value(&x, &y);
                let done = (now - last).abs() <= 1e-15 * now.abs().max(1e-300);
                last = now;
                if done {
                    break;
                }
            }
            best = best.max(last);
        }
        best.max(0.0).sqrt()
    }

    /// Largest inequality residual of `family` away from null-null pairs,
    /// where the inequality degenerates to the closure equality.
    pub fn explicit_violation(&self, grids: &InequalityGrids, family: ClosureFamily) -> Option<(f64, usize, usize)> {
        let (rk, ck) = family.axes();
        let (rn, cn) = (self.null(rk), self.null(ck));
        grids.get(family).max_where(|m, n| !(rn.contains(m) && cn.contains(n)))
    }

    /// Triangle-inequality residuals over the full eigenspaces.
    pub fn inequality_conditions(&self, bounds: &BoundSet) -> Result<InequalityGrids> {
        bounds.validate()?;
        let sqrt_eigs = |kind: RdmKind| -> Result<Vec<f64>> {
            Ok(crate::algebra::clamp_eigenvalues(self.part(kind).es.values())?.iter().map(|v| v.sqrt()).collect())
        };
        let (sd, sg, sq) = (sqrt_eigs(RdmKind::D)?, sqrt_eigs(RdmKind::G)?, sqrt_eigs(RdmKind::Q)?);
        let delta = |family: ClosureFamily, rhs: &dyn Fn(usize, usize) -> f64| {
            let mut g = self.full_grid(family);
            let nc = g.cols.len();
            for r in 0..g.rows.len() {
                for c in 0..nc {
                    g.values[r * nc + c] -= rhs(g.rows[r], g.cols[c]);
                }
            }
            g
        };
        let b = bounds;
        Ok(InequalityGrids {
            alpha: delta(ClosureFamily::GG, &|m, n| b.g_n.sqrt() * (sg[m] + sg[n])),
            beta: delta(ClosureFamily::QD, &|m, n| b.q_n_minus_2.sqrt() * sd[m] + b.d_n_plus_2.sqrt() * sq[n]),
            gamma: delta(ClosureFamily::GD, &|m, n| b.d_n.sqrt() * sg[m] + b.g_n_minus_2.sqrt() * sd[n]),
            zeta: delta(ClosureFamily::GQ, &|m, n| b.q_n.sqrt() * sg[m] + b.g_n_plus_2.sqrt() * sq[n]),
        })
    }
}

fn flatten(c: &DMatrix<f64>) -> DVector<f64> {
    let l = c.nrows();
    DVector::from_fn(l * l, |p, _| c[(p / l, p % l)])
}

fn quad(c: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    let v = flatten(c);
    v.dot(&(r * &v))
}

fn top_eigenvector(m: DMatrix<f64>) -> DVector<f64> {
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imax();
    eig.eigenvectors.column(k).into_owned()
}
