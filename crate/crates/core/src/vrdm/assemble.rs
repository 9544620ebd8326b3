use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::conditions::{ConditionSet, Family};
use super::ops::{Atom, Expr};
use super::symmetry::{adapt, Charge, SymmetryAdaptation};
use crate::algebra::{pair_index, pair_list};
use crate::error::{Error, Result};
use crate::fock::{Ladder, TwoBodyHamiltonian};
use crate::sdp::{SdpProblem, SymEntry};

/// Affine function `constant + sum coef * y_var` of the free variables.
#[derive(Debug, Clone, Default)]
struct Affine {
    constant: f64,
    coefs: Vec<(usize, f64)>,
}

impl Affine {
    fn add_scaled(&mut self, other: &Affine, s: f64) {
        self.constant += s * other.constant;
        self.coefs.extend(other.coefs.iter().map(|&(v, c)| (v, s * c)));
    }
}

/// Parametrization of D by its independent entries `D_{ij,kl}` (`i<j`,
/// `k<l`, pairs in the same symmetry block, upper triangle), with the first
/// diagonal entry eliminated through the trace `N(N-1)/2`.
#[derive(Debug, Clone)]
struct DLayout {
    l: usize,
    n: usize,
    /// (block, position) of every pair.
    place: Vec<(usize, usize)>,
    blocks: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    n_params: usize,
}

impl DLayout {
    fn new(sym: &SymmetryAdaptation, n: usize) -> Self {
        let l = sym.n_orbitals();
        let pairs = pair_list(l);
        let mut by_charge: BTreeMap<Charge, Vec<usize>> = BTreeMap::new();
        for (p, &(i, j)) in pairs.iter().enumerate() {
            by_charge.entry(sym.combine(&[(i, true), (j, true)])).or_default().push(p);
        }
        let blocks: Vec<Vec<usize>> = by_charge.into_values().collect();
        let mut place = vec![(0, 0); pairs.len()];
        let mut offsets = Vec::new();
        let mut total = 0;
        for (b, members) in blocks.iter().enumerate() {
            for (pos, &p) in members.iter().enumerate() {
                place[p] = (b, pos);
            }
            offsets.push(total);
            total += members.len() * (members.len() + 1) / 2;
        }
        Self { l, n, place, blocks, offsets, n_params: total }
    }

    fn n_free(&self) -> usize {
        self.n_params - 1
    }

    /// Parameter index of raw `D[p, q]`, if the pairs share a block.
    fn param(&self, p: usize, q: usize) -> Option<usize> {
        let (bp, a) = self.place[p];
        let (bq, b) = self.place[q];
        if bp != bq {
            return None;
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let n = self.blocks[bp].len();
        Some(self.offsets[bp] + a * n - a * (a + 1) / 2 + b)
    }

    fn diagonal_params(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (b, members) in self.blocks.iter().enumerate() {
            let n = members.len();
            for a in 0..n {
                out.push(self.offsets[b] + a * n - a * (a + 1) / 2 + a);
            }
        }
        out
    }

    fn trace(&self) -> f64 {
        (self.n * (self.n - 1)) as f64 / 2.0
    }

    /// Raw `D[p, q]` as an affine function of the free variables.
    fn d_affine(&self, p: usize, q: usize) -> Affine {
        match self.param(p, q) {
            None => Affine::default(),
            Some(0) => {
                let coefs = self.diagonal_params().into_iter().filter(|&k| k != 0).map(|k| (k - 1, -1.0)).collect();
                Affine { constant: self.trace(), coefs }
            }
            Some(k) => Affine { constant: 0.0, coefs: vec![(k - 1, 1.0)] },
        }
    }

    /// Full-index `D_{ij,kl}`.
    fn d_full_affine(&self, i: usize, j: usize, k: usize, m: usize) -> Affine {
        if i == j || k == m {
            return Affine::default();
        }
        let (p, s1) = if i < j { (pair_index(i, j, self.l), 1.0) } else { (pair_index(j, i, self.l), -1.0) };
        let (q, s2) = if k < m { (pair_index(k, m, self.l), 1.0) } else { (pair_index(m, k, self.l), -1.0) };
        let mut a = Affine::default();
        a.add_scaled(&self.d_affine(p, q), s1 * s2);
        a
    }

    fn gamma_affine(&self, i: usize, k: usize) -> Affine {
        let mut a = Affine::default();
        let w = 1.0 / (self.n - 1) as f64;
        for j in 0..self.l {
            a.add_scaled(&self.d_full_affine(i, j, k, j), w);
        }
        a
    }

    /// All raw parameters from free variables (the eliminated one restored).
    fn params_from_free(&self, y: &[f64]) -> Vec<f64> {
        let mut params = vec![0.0; self.n_params];
        params[1..].copy_from_slice(y);
        params[0] = self.trace() - self.diagonal_params().iter().filter(|&&k| k != 0).map(|&k| params[k]).sum::<f64>();
        params
    }

    fn full_from_params(&self, params: &[f64]) -> DMatrix<f64> {
        let l = self.l;
        let pairs = pair_list(l);
        let mut full = DMatrix::zeros(l * l, l * l);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(k, m)) in pairs.iter().enumerate() {
                let Some(idx) = self.param(p, q) else { continue };
                let v = params[idx];
                full[(i * l + j, k * l + m)] = v;
                full[(j * l + i, k * l + m)] = -v;
                full[(i * l + j, m * l + k)] = -v;
                full[(j * l + i, m * l + k)] = v;
            }
        }
        full
    }

    fn free_from_full(&self, full: &DMatrix<f64>) -> Vec<f64> {
        let l = self.l;
        let pairs = pair_list(l);
        let mut params = vec![0.0; self.n_params];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(k, m)) in pairs.iter().enumerate() {
                if let Some(idx) = self.param(p, q) {
                    params[idx] = full[(i * l + j, k * l + m)];
                }
            }
        }
        params[1..].to_vec()
    }
}

/// Block description of the assembled problem.
#[derive(Debug, Clone)]
pub struct BlockInfo {
    pub family: Family,
    pub charge: Charge,
    pub rows: Vec<Vec<Ladder>>,
}

/// A variational 2-RDM problem in SDP form. The free D parameters are the
/// dual variables `y`; every condition block is a slack `Z = C - sum y A`.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub problem: SdpProblem,
    pub blocks: Vec<BlockInfo>,
    pub symmetry: SymmetryAdaptation,
    /// Hamiltonian expressed in the adapted orbital basis.
    pub adapted: TwoBodyHamiltonian,
    layout: DLayout,
    energy_constant: f64,
    energy_coefs: Vec<f64>,
}

impl Assembled {
    pub fn n_electrons(&self) -> usize {
        self.layout.n
    }

    pub fn n_variables(&self) -> usize {
        self.layout.n_free()
    }

    /// Energy of the D encoded by the free variables.
    pub fn energy(&self, y: &[f64]) -> f64 {
        self.energy_constant + self.energy_coefs.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Full-index D in the adapted basis.
    pub fn d_adapted(&self, y: &[f64]) -> DMatrix<f64> {
        self.layout.full_from_params(&self.layout.params_from_free(y))
    }

    /// Free variables of a full-index D given in the adapted basis.
    pub fn variables_of(&self, d_adapted: &DMatrix<f64>) -> Vec<f64> {
        self.layout.free_from_full(d_adapted)
    }

    /// Slack blocks `C - sum y A` for given variables.
    pub fn slack_blocks(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut z = self.problem.dense(self.problem.objective());
        for (row, &yv) in self.problem.constraints().iter().zip(y) {
            for e in row {
                z[e.block][(e.i, e.j)] -= yv * e.value;
                if e.i != e.j {
                    z[e.block][(e.j, e.i)] -= yv * e.value;
                }
            }
        }
        z
    }
}

fn expr_affine(e: &Expr, layout: &DLayout, gamma_cache: &mut BTreeMap<(usize, usize), Affine>) -> Affine {
    let mut out = Affine::default();
    for (atom, &c) in &e.terms {
        match *atom {
            Atom::One => out.constant += c,
            Atom::Gamma(i, k) => {
                let g = gamma_cache.entry((i, k)).or_insert_with(|| layout.gamma_affine(i, k));
                out.add_scaled(g, c);
            }
            Atom::D(i, j, k, m) => {
                let p = pair_index(i, j, layout.l);
                let q = pair_index(k, m, layout.l);
                out.add_scaled(&layout.d_affine(p, q), c);
            }
        }
    }
    out
}

/// Builds the SDP for the `n`-electron ground state of `ham` under `conds`.
pub fn assemble(ham: &TwoBodyHamiltonian, n: usize, conds: &ConditionSet) -> Result<Assembled> {
    let l = ham.n_orbitals();
    if n < 2 || n + 2 > l {
        return Err(Error::Validation(format!("variational problem needs 2 <= N <= L-2, got N={n}, L={l}")));
    }
    let (symmetry, adapted) = adapt(ham, conds.symmetry)?;
    let layout = DLayout::new(&symmetry, n);
    let mut gamma_cache = BTreeMap::new();

    // E = sum h_ik gamma_ik + sum_{i<j, k<l} V_ij,kl D_ij,kl
    let mut energy = Expr::default();
    let h = adapted.one_body();
    for i in 0..l {
        for k in 0..l {
            if h[(i, k)] != 0.0 {
                energy.add(Atom::Gamma(i, k), h[(i, k)]);
            }
        }
    }
    for (i, j) in pair_list(l) {
        for (k, m) in pair_list(l) {
            let v = adapted.v2(i, j, k, m);
            if v != 0.0 {
                energy.add(Atom::D(i, j, k, m), v);
            }
        }
    }
    let e_aff = expr_affine(&energy, &layout, &mut gamma_cache);
    let mut energy_coefs = vec![0.0; layout.n_free()];
    for &(v, c) in &e_aff.coefs {
        energy_coefs[v] += c;
    }

    let mut problem = SdpProblem::new();
    let mut blocks = Vec::new();
    let mut objective: Vec<SymEntry> = Vec::new();
    let mut per_var: Vec<Vec<SymEntry>> = vec![Vec::new(); layout.n_free()];
    for family in conds.families() {
        let mut by_charge: BTreeMap<Charge, Vec<Vec<Ladder>>> = BTreeMap::new();
        for row in family.rows(l) {
            let parts: Vec<(usize, bool)> = row.iter().map(|o| (o.orbital(), o.is_creation())).collect();
            by_charge.entry(symmetry.combine(&parts)).or_default().push(row);
        }
        for (charge, rows) in by_charge {
            let b = problem.add_block(format!("{}[sz2={},k={}]", family.name(), charge.sz2, charge.k), rows.len());
            for a in 0..rows.len() {
                for c in a..rows.len() {
                    let e = family.entry(&rows[a], &rows[c])?;
                    if e.terms.is_empty() {
                        continue;
                    }
                    let aff = expr_affine(&e, &layout, &mut gamma_cache);
                    if aff.constant != 0.0 {
                        objective.push(SymEntry::new(b, a, c, aff.constant));
                    }
                    for (v, coef) in aff.coefs {
                        per_var[v].push(SymEntry::new(b, a, c, -coef));
                    }
                }
            }
            blocks.push(BlockInfo { family, charge, rows });
        }
    }
    problem.add_objective(objective);
    for (v, entries) in per_var.into_iter().enumerate() {
        problem.add_constraint(entries, -energy_coefs[v]);
    }
    Ok(Assembled { problem, blocks, symmetry, adapted, layout, energy_constant: e_aff.constant, energy_coefs })
}
