use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::{Spin, SpinOrbitalBasis};
use super::state::{apply_operator_string, FockVector, Ladder};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// Where a Hamiltonian came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelInfo {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    /// Number of sites of a translation-invariant ring, when the model is one.
    pub ring_sites: Option<usize>,
}

/// `H = sum_ij h_ij a_i^+ a_j + 1/4 sum_ijkl V_ij,kl a_i^+ a_j^+ a_l a_k`
/// with `V` antisymmetric in each index pair and `V_ij,kl = V_kl,ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyHamiltonian {
    basis: SpinOrbitalBasis,
    h: DMatrix<f64>,
    /// Pair-indexed: `v[(i*L + j, k*L + l)] = V_ij,kl`.
    v: DMatrix<f64>,
    info: ModelInfo,
}

impl TwoBodyHamiltonian {
    /// Validates hermiticity and antisymmetry of already antisymmetrized integrals.
    pub fn new(basis: SpinOrbitalBasis, h: DMatrix<f64>, v: DMatrix<f64>, info: ModelInfo) -> Result<Self> {
        let l = basis.len();
        if h.shape() != (l, l) || v.shape() != (l * l, l * l) {
            return Err(Error::Dimension(format!(
                "integrals of shape {:?}/{:?} for {l} orbitals",
                h.shape(),
                v.shape()
            )));
        }
        let ham = Self { basis, h, v, info };
        ham.validate()?;
        Ok(ham)
    }

    /// Builds from the coefficient tensor `c` of `sum c_ijkl a_i^+ a_j^+ a_l a_k`
    /// (any symmetry), antisymmetrizing it.
    pub fn from_operator_coefficients(
        basis: SpinOrbitalBasis,
        h: DMatrix<f64>,
        c: &DMatrix<f64>,
        info: ModelInfo,
    ) -> Result<Self> {
        let l = basis.len();
        if c.shape() != (l * l, l * l) {
            return Err(Error::Dimension("two-body coefficient tensor".into()));
        }
        let mut v = DMatrix::zeros(l * l, l * l);
        for i in 0..l {
            for j in i + 1..l {
                for k in 0..l {
                    for m in k + 1..l {
                        let x = c[(i * l + j, k * l + m)] - c[(j * l + i, k * l + m)] - c[(i * l + j, m * l + k)]
                            + c[(j * l + i, m * l + k)];
                        v[(i * l + j, k * l + m)] = x;
                        v[(j * l + i, k * l + m)] = -x;
                        v[(i * l + j, m * l + k)] = -x;
                        v[(j * l + i, m * l + k)] = x;
                    }
                }
            }
        }
        Self::new(basis, h, v, info)
    }

    pub fn zero(basis: SpinOrbitalBasis) -> Self {
        let l = basis.len();
        Self {
            basis,
            h: DMatrix::zeros(l, l),
            v: DMatrix::zeros(l * l, l * l),
            info: ModelInfo { name: "zero".into(), ..Default::default() },
        }
    }

    fn validate(&self) -> Result<()> {
        let l = self.n_orbitals();
        let mut worst = 0.0f64;
        for i in 0..l {
            for j in 0..l {
                worst = worst.max((self.h[(i, j)] - self.h[(j, i)]).abs());
            }
        }
        if worst > HERMITIAN_TOL {
            return Err(Error::Validation(format!("one-body integrals not Hermitian ({worst:e})")));
        }
        let (mut herm, mut anti) = (0.0f64, 0.0f64);
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    for m in 0..l {
                        let x = self.v2(i, j, k, m);
                        herm = herm.max((x - self.v2(k, m, i, j)).abs());
                        anti = anti.max((x + self.v2(j, i, k, m)).abs()).max((x + self.v2(i, j, m, k)).abs());
                    }
                }
            }
        }
        if herm > HERMITIAN_TOL {
            return Err(Error::Validation(format!("two-body integrals not Hermitian ({herm:e})")));
        }
        if anti > HERMITIAN_TOL {
            return Err(Error::Validation(format!("two-body integrals not antisymmetric ({anti:e})")));
        }
        Ok(())
    }

    pub fn basis(&self) -> SpinOrbitalBasis {
        self.basis
    }

    pub fn n_orbitals(&self) -> usize {
        self.basis.len()
    }

    pub fn one_body(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Pair-indexed antisymmetrized two-body integrals.
    pub fn two_body(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn v2(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n_orbitals();
        self.v[(i * n + j, k * n + l)]
    }

    pub fn info(&self) -> &ModelInfo {
        &self.info
    }

    /// True when no term changes the total Sz (requires spin labels).
    pub fn conserves_sz(&self) -> bool {
        let b = self.basis;
        if !b.is_spin_structured() {
            return false;
        }
        let l = self.n_orbitals();
        let sz = |i: usize| b.spin_label(i).map(Spin::sz2).unwrap_or(0);
        for i in 0..l {
            for j in 0..l {
                if sz(i) != sz(j) && self.h[(i, j)] != 0.0 {
                    return false;
                }
            }
        }
        for p in 0..l * l {
            for q in 0..l * l {
                if self.v[(p, q)] != 0.0 && sz(p / l) + sz(p % l) != sz(q / l) + sz(q % l) {
                    return false;
                }
            }
        }
        true
    }

    /// Direct application by operator strings; the reference against which the
    /// sector matrix is checked.
    pub fn apply(&self, psi: &FockVector) -> FockVector {
        let l = self.n_orbitals();
        let mut out = FockVector::new();
        for i in 0..l {
            for j in 0..l {
                let c = self.h[(i, j)];
                if c != 0.0 {
                    out.axpy(c, &apply_operator_string(&[Ladder::Create(i), Ladder::Annihilate(j)], psi));
                }
            }
        }
        for i in 0..l {
            for j in i + 1..l {
                for k in 0..l {
                    for m in k + 1..l {
                        let c = self.v2(i, j, k, m);
                        if c != 0.0 {
                            let ops = [Ladder::Create(i), Ladder::Create(j), Ladder::Annihilate(m), Ladder::Annihilate(k)];
                            out.axpy(c, &apply_operator_string(&ops, psi));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn expectation(&self, psi: &FockVector) -> f64 {
        psi.dot(&self.apply(psi)) / psi.dot(psi)
    }
}

/// 1D Hubbard chain with `sites` sites, hopping `t` and on-site repulsion `u`.
pub fn build_hubbard(sites: usize, t: f64, u: f64, periodic: bool) -> Result<TwoBodyHamiltonian> {
    if sites < 2 {
        return Err(Error::InvalidModel(format!("Hubbard model needs at least 2 sites, got {sites}")));
    }
    let basis = SpinOrbitalBasis::spin_structured(sites)?;
    let l = basis.len();
    let mut h = DMatrix::zeros(l, l);
    let bonds = if periodic { sites } else { sites - 1 };
    for s in 0..bonds {
        let r = (s + 1) % sites;
        for spin in [Spin::Up, Spin::Down] {
            let a = SpinOrbitalBasis::orbital(s, spin);
            let b = SpinOrbitalBasis::orbital(r, spin);
            h[(a, b)] -= t;
            h[(b, a)] -= t;
        }
    }
    let mut c = DMatrix::zeros(l * l, l * l);
    for s in 0..sites {
        let up = SpinOrbitalBasis::orbital(s, Spin::Up);
        let dn = SpinOrbitalBasis::orbital(s, Spin::Down);
        // U a_up^+ a_dn^+ a_dn a_up = U n_up n_dn
        c[(up * l + dn, up * l + dn)] += u;
    }
    let mut params = BTreeMap::new();
    params.insert("sites".into(), sites as f64);
    params.insert("t".into(), t);
    params.insert("U".into(), u);
    params.insert("periodic".into(), if periodic { 1.0 } else { 0.0 });
    let info = ModelInfo {
        name: "hubbard".into(),
        params,
        seed: None,
        ring_sites: periodic.then_some(sites),
    };
    TwoBodyHamiltonian::from_operator_coefficients(basis, h, &c, info)
}

/// Spin-free Hamiltonian with spatial one- and two-body elements drawn
/// uniformly from `[0, 1)` and symmetrized.
pub fn build_random_two_body(spatial_count: usize, seed: u64) -> Result<TwoBodyHamiltonian> {
    if spatial_count == 0 {
        return Err(Error::InvalidModel("random Hamiltonian needs at least one orbital".into()));
    }
    let n = spatial_count;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw_h: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
    let raw_w: Vec<f64> = (0..n * n * n * n).map(|_| rng.random::<f64>()).collect();
    let hs = DMatrix::from_fn(n, n, |p, q| 0.5 * (raw_h[p * n + q] + raw_h[q * n + p]));
    let w = |p: usize, q: usize, r: usize, s: usize| raw_w[((p * n + q) * n + r) * n + s];
    // <pq|rs> symmetric under (pq)(rs) swap and bra-ket exchange.
    let ws = |p: usize, q: usize, r: usize, s: usize| 0.25 * (w(p, q, r, s) + w(q, p, s, r) + w(r, s, p, q) + w(s, r, q, p));

    let basis = SpinOrbitalBasis::spin_structured(n)?;
    let l = basis.len();
    let orb = |p: usize, s: usize| 2 * p + s;
    let mut h = DMatrix::zeros(l, l);
    for p in 0..n {
        for q in 0..n {
            for s in 0..2 {
                h[(orb(p, s), orb(q, s))] = hs[(p, q)];
            }
        }
    }
    // 1/2 sum <pq|rs> a+_{p s} a+_{q t} a_{s t} a_{r s}
    let mut c = DMatrix::zeros(l * l, l * l);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let val = 0.5 * ws(p, q, r, s);
                    for sa in 0..2 {
                        for sb in 0..2 {
                            c[(orb(p, sa) * l + orb(q, sb), orb(r, sa) * l + orb(s, sb))] += val;
                        }
                    }
                }
            }
        }
    }
    let mut params = BTreeMap::new();
    params.insert("spatial_count".into(), n as f64);
    let info = ModelInfo { name: "random".into(), params, seed: Some(seed), ring_sites: None };
    TwoBodyHamiltonian::from_operator_coefficients(basis, h, &c, info)
}

/// Pair-space matrix `K` with `<H> = sum_{ij,kl} K_ij,kl D_ij,kl` for every
/// `n`-electron state, where `D_ij,kl = <a_i^+ a_j^+ a_l a_k>`. The one-body
/// part is folded in with weight `1/(n-1)` and `K` is antisymmetrized.
pub fn reduced_hamiltonian(ham: &TwoBodyHamiltonian, n: usize) -> Result<DMatrix<f64>> {
    if n < 2 {
        return Err(Error::Contract(format!("one-body fold undefined for N = {n}")));
    }
    let l = ham.n_orbitals();
    let h = ham.one_body();
    let w = 1.0 / (4.0 * (n as f64 - 1.0));
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut k = DMatrix::zeros(l * l, l * l);
    for i in 0..l {
        for j in 0..l {
            for a in 0..l {
                for b in 0..l {
                    let fold = h[(i, a)] * delta(j, b) - h[(j, a)] * delta(i, b) - h[(i, b)] * delta(j, a)
                        + h[(j, b)] * delta(i, a);
                    k[(i * l + j, a * l + b)] = 0.25 * ham.v2(i, j, a, b) + w * fold;
                }
            }
        }
    }
    Ok(k)
}
