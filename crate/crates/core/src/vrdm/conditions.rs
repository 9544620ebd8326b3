use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ops::{adjoint, expectation, Expr};
use crate::algebra::{Rdm, RdmKind};
use crate::error::{Error, Result};
use crate::fock::Ladder;

/// Positivity conditions imposed on the variational 2-RDM. The D condition
/// is always present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionSet {
    pub q: bool,
    pub g: bool,
    pub t1: bool,
    pub t2: bool,
    pub t2p: bool,
    /// Block the problem by conserved Sz and lattice momentum.
    pub symmetry: bool,
}

impl ConditionSet {
    pub fn d_only() -> Self {
        Self { q: false, g: false, t1: false, t2: false, t2p: false, symmetry: true }
    }

    pub fn dqg() -> Self {
        Self { q: true, g: true, ..Self::d_only() }
    }

    pub fn full() -> Self {
        Self { q: true, g: true, t1: true, t2: true, t2p: true, symmetry: true }
    }

    /// Families that become PSD blocks. T2 is dropped when T2' is on, since
    /// it is a principal submatrix of T2'.
    pub fn families(&self) -> Vec<Family> {
        let mut f = vec![Family::D];
        if self.q {
            f.push(Family::Q);
        }
        if self.g {
            f.push(Family::G);
        }
        if self.t1 {
            f.push(Family::T1);
        }
        if self.t2p {
            f.push(Family::T2p);
        } else if self.t2 {
            f.push(Family::T2);
        }
        f
    }

    pub fn label(&self) -> String {
        let mut s = String::from("D");
        for (on, name) in [(self.q, "Q"), (self.g, "G"), (self.t1, "T1"), (self.t2, "T2"), (self.t2p, "T2'")] {
            if on {
                s.push(',');
                s.push_str(name);
            }
        }
        s
    }
}

/// Parses a comma-separated list such as `D,Q,G,T1,T2'`; symmetry stays on.
impl std::str::FromStr for ConditionSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = Self::d_only();
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name.to_ascii_uppercase().as_str() {
                "D" => {}
                "Q" => set.q = true,
                "G" => set.g = true,
                "T1" => set.t1 = true,
                "T2" => set.t2 = true,
                "T2'" | "T2P" => set.t2p = true,
                _ => return Err(Error::Validation(format!("unknown condition `{name}`"))),
            }
        }
        Ok(set)
    }
}

impl Default for ConditionSet {
    fn default() -> Self {
        Self::full()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    D,
    Q,
    G,
    T1,
    T2,
    T2p,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::D => "D",
            Family::Q => "Q",
            Family::G => "G",
            Family::T1 => "T1",
            Family::T2 => "T2",
            Family::T2p => "T2'",
        }
    }

    /// Row operators `O` of the condition matrix.
    pub fn rows(self, l: usize) -> Vec<Vec<Ladder>> {
        use Ladder::{Annihilate as A, Create as C};
        let mut rows = Vec::new();
        match self {
            Family::D => {
                for k in 0..l {
                    for m in k + 1..l {
                        rows.push(vec![A(m), A(k)]);
                    }
                }
            }
            Family::Q => {
                for k in 0..l {
                    for m in k + 1..l {
                        rows.push(vec![C(m), C(k)]);
                    }
                }
            }
            Family::G => {
                for k in 0..l {
                    for m in 0..l {
                        rows.push(vec![C(m), A(k)]);
                    }
                }
            }
            Family::T1 => {
                for i in 0..l {
                    for j in i + 1..l {
                        for k in j + 1..l {
                            rows.push(vec![A(i), A(j), A(k)]);
                        }
                    }
                }
            }
            Family::T2 | Family::T2p => {
                for i in 0..l {
                    for j in 0..l {
                        for k in j + 1..l {
                            rows.push(vec![C(i), A(j), A(k)]);
                        }
                    }
                }
                if self == Family::T2p {
                    for m in 0..l {
                        rows.push(vec![A(m)]);
                    }
                }
            }
        }
        rows
    }

    /// Entry `(a, b)` as an expectation value: `<O_a^+ O_b>` for two-index
    /// families, `<{O_a^+, O_b}>` between three-index rows, and the plain
    /// product whenever a T2' one-body row is involved.
    pub fn entry(self, a: &[Ladder], b: &[Ladder]) -> Result<Expr> {
        let ad = adjoint(a);
        let plain: Vec<Ladder> = ad.iter().chain(b).copied().collect();
        let anti = matches!(self, Family::T1 | Family::T2 | Family::T2p) && a.len() == 3 && b.len() == 3;
        let mut words = vec![(1.0, plain)];
        if anti {
            words.push((1.0, b.iter().chain(&ad).copied().collect()));
        }
        Ok(expectation(&words)?.prune(1e-14))
    }
}

/// Evaluates a condition family on given (full-index) D and 1-RDM.
pub fn condition_matrix(family: Family, d: &Rdm, gamma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if d.kind() != RdmKind::D {
        return Err(Error::Contract("condition maps take a D matrix".into()));
    }
    let l = d.n_orbitals();
    if gamma.shape() != (l, l) {
        return Err(Error::Dimension(format!("1-RDM must be {l}x{l}")));
    }
    let rows = family.rows(l);
    let mut m = DMatrix::zeros(rows.len(), rows.len());
    for a in 0..rows.len() {
        for b in a..rows.len() {
            let e = family.entry(&rows[a], &rows[b])?;
            let v = e.evaluate(|i, k| gamma[(i, k)], |i, j, k, s| d.full_entry(i, j, k, s));
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(m)
}

/// The T1, T2 and T2' matrices of `(D, gamma)` over all rows.
pub fn t_condition_maps(d: &Rdm, gamma: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    Ok((
        condition_matrix(Family::T1, d, gamma)?,
        condition_matrix(Family::T2, d, gamma)?,
        condition_matrix(Family::T2p, d, gamma)?,
    ))
}
