use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub name: String,
    pub dim: usize,
}

/// One entry of a symmetric block matrix. An off-diagonal entry stands for
/// both `(i, j)` and `(j, i)`; entries are stored with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEntry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

impl SymEntry {
    pub fn new(block: usize, i: usize, j: usize, value: f64) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        Self { block, i, j, value }
    }

    /// Weight of this entry in a Frobenius inner product.
    pub(crate) fn weight(&self) -> f64 {
        if self.i == self.j {
            self.value
        } else {
            2.0 * self.value
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SdpProblem {
    blocks: Vec<Block>,
    objective: Vec<SymEntry>,
    constraints: Vec<Vec<SymEntry>>,
    rhs: Vec<f64>,
}

/// Sums duplicates and drops exact zeros, in (block, i, j) order.
pub(crate) fn merge(entries: impl IntoIterator<Item = SymEntry>) -> Vec<SymEntry> {
    let mut map: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
    for e in entries {
        let e = SymEntry::new(e.block, e.i, e.j, e.value);
        *map.entry((e.block, e.i, e.j)).or_insert(0.0) += e.value;
    }
    map.into_iter().filter(|(_, v)| *v != 0.0).map(|((b, i, j), v)| SymEntry { block: b, i, j, value: v }).collect()
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_block(&mut self, name: impl Into<String>, dim: usize) -> usize {
        self.blocks.push(Block { name: name.into(), dim });
        self.blocks.len() - 1
    }

    pub fn add_objective(&mut self, entries: impl IntoIterator<Item = SymEntry>) {
        let all = self.objective.drain(..).chain(entries).collect::<Vec<_>>();
        self.objective = merge(all);
    }

    pub fn add_constraint(&mut self, entries: impl IntoIterator<Item = SymEntry>, rhs: f64) -> usize {
        self.constraints.push(merge(entries));
        self.rhs.push(rhs);
        self.constraints.len() - 1
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn objective(&self) -> &[SymEntry] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Vec<SymEntry>] {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Checks indices and finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() || self.blocks.iter().any(|b| b.dim == 0) {
            return Err(Error::Validation("problem needs at least one nonempty block".into()));
        }
        let check = |e: &SymEntry| -> Result<()> {
            let Some(b) = self.blocks.get(e.block) else {
                return Err(Error::Validation(format!("entry refers to missing block {}", e.block)));
            };
            if e.j >= b.dim || !e.value.is_finite() {
                return Err(Error::Validation(format!(
                    "bad entry ({}, {}, {}) = {} for block of dimension {}",
                    e.block, e.i, e.j, e.value, b.dim
                )));
            }
            Ok(())
        };
        self.objective.iter().try_for_each(check)?;
        self.constraints.iter().flatten().try_for_each(check)?;
        if self.rhs.iter().any(|b| !b.is_finite()) {
            return Err(Error::Validation("non-finite right-hand side".into()));
        }
        Ok(())
    }

    /// Dense block matrices of a set of entries.
    pub fn dense(&self, entries: &[SymEntry]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.blocks.iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect();
        for e in entries {
            out[e.block][(e.i, e.j)] += e.value;
            if e.i != e.j {
                out[e.block][(e.j, e.i)] += e.value;
            }
        }
        out
    }

    /// Returns the same problem with blocks reordered: new block `k` is old
    /// block `order[k]`.
    pub fn permute_blocks(&self, order: &[usize]) -> Result<Self> {
        let mut inverse = vec![usize::MAX; self.blocks.len()];
        if order.len() != self.blocks.len() {
            return Err(Error::Dimension("block permutation has the wrong length".into()));
        }
        for (new, &old) in order.iter().enumerate() {
            if old >= self.blocks.len() || inverse[old] != usize::MAX {
                return Err(Error::Dimension("not a permutation".into()));
            }
            inverse[old] = new;
        }
        let remap = |es: &[SymEntry]| merge(es.iter().map(|e| SymEntry { block: inverse[e.block], ..*e }));
        Ok(Self {
            blocks: order.iter().map(|&o| self.blocks[o].clone()).collect(),
            objective: remap(&self.objective),
            constraints: self.constraints.iter().map(|c| remap(c)).collect(),
            rhs: self.rhs.clone(),
        })
    }
}

/// `<A, X>` for sparse symmetric `A`.
pub(crate) fn inner(entries: &[SymEntry], x: &[DMatrix<f64>]) -> f64 {
    entries.iter().map(|e| e.weight() * x[e.block][(e.i, e.j)]).sum()
}
