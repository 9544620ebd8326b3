use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_hubbard, build_random_two_body, load_integrals, TwoBodyHamiltonian};
use crate::geometry::{BoundOverrides, DEFAULT_NULL_TOL};
use crate::sdp::SolverConfig;
use crate::vrdm::ConditionSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemSpec {
    Hubbard {
        sites: usize,
        t: f64,
        u: f64,
        #[serde(default = "default_true")]
        periodic: bool,
    },
    /// Spin-free random Hamiltonian over `spatial` orbitals.
    Random { spatial: usize, seed: u64 },
    /// Spin-orbital integral file (it carries its own electron count).
    Integrals { path: PathBuf },
}

fn default_true() -> bool {
    true
}

/// Which files a run writes besides the summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Artifacts {
    pub tables: bool,
    pub figures: bool,
    pub rdms: bool,
}

impl Default for Artifacts {
    fn default() -> Self {
        Self { tables: true, figures: true, rdms: false }
    }
}

impl Artifacts {
    pub fn all() -> Self {
        Self { tables: true, figures: true, rdms: true }
    }

    pub fn none() -> Self {
        Self { tables: false, figures: false, rdms: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `u` or `t` for Hubbard, `seed` for random models.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    /// Required unless the system is an integral file.
    #[serde(default)]
    pub n_electrons: Option<usize>,
    /// Twice Sz of the exact sector; lowest allowed value when absent.
    #[serde(default)]
    pub sz2: Option<i32>,
    #[serde(default)]
    pub conditions: ConditionSet,
    #[serde(default = "default_null_tol")]
    pub null_tol: f64,
    #[serde(default)]
    pub sdp: SolverConfig,
    #[serde(default)]
    pub bounds: BoundOverrides,
    /// Rows of the eigenvalue table.
    #[serde(default = "default_eigen_rows")]
    pub eigen_rows: usize,
    #[serde(default)]
    pub artifacts: Artifacts,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_null_tol() -> f64 {
    DEFAULT_NULL_TOL
}

fn default_eigen_rows() -> usize {
    10
}

impl ExperimentConfig {
    pub fn new(system: SystemSpec, n_electrons: Option<usize>) -> Self {
        Self {
            system,
            n_electrons,
            sz2: None,
            conditions: ConditionSet::default(),
            null_tol: DEFAULT_NULL_TOL,
            sdp: SolverConfig::default(),
            bounds: BoundOverrides::default(),
            eigen_rows: default_eigen_rows(),
            artifacts: Artifacts::default(),
            sweep: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Structural checks that need no computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        match &self.system {
            SystemSpec::Hubbard { sites, t, u, .. } => {
                if *sites < 2 {
                    return bad(format!("hubbard needs at least 2 sites, got {sites}"));
                }
                if !t.is_finite() || !u.is_finite() {
                    return bad("hubbard t and u must be finite".into());
                }
            }
            SystemSpec::Random { spatial, .. } => {
                if *spatial < 2 {
                    return bad(format!("random model needs at least 2 spatial orbitals, got {spatial}"));
                }
            }
            SystemSpec::Integrals { .. } => {}
        }
        if !matches!(self.system, SystemSpec::Integrals { .. }) && self.n_electrons.is_none() {
            return bad("n_electrons is required for model Hamiltonians".into());
        }
        if let (Some(n), Some(l)) = (self.n_electrons, self.n_orbitals_hint()) {
            if n < 2 || n + 2 > l {
                return bad(format!("need 2 <= N <= L-2, got N={n}, L={l}"));
            }
        }
        if let (Some(n), Some(s)) = (self.n_electrons, self.sz2) {
            if (n as i32 - s) % 2 != 0 || s.unsigned_abs() as usize > n {
                return bad(format!("2Sz = {s} is impossible for N = {n}"));
            }
        }
        if self.null_tol.is_nan() || self.null_tol <= 0.0 {
            return bad("null_tol must be positive".into());
        }
        let step_ok = self.sdp.step_fraction > 0.0 && self.sdp.step_fraction < 1.0;
        if self.sdp.tol.is_nan() || self.sdp.tol <= 0.0 || self.sdp.max_iterations == 0 || !step_ok {
            return bad("sdp settings need tol > 0, max_iterations > 0 and 0 < step_fraction < 1".into());
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return bad("sweep needs at least one value".into());
            }
            let ok = match (&self.system, sw.parameter.as_str()) {
                (SystemSpec::Hubbard { .. }, "u" | "t") => true,
                (SystemSpec::Random { .. }, "seed") => sw.values.iter().all(|v| *v >= 0.0 && v.fract() == 0.0),
                _ => false,
            };
            if !ok {
                return bad(format!("cannot sweep `{}` for this system", sw.parameter));
            }
        }
        Ok(())
    }

    fn n_orbitals_hint(&self) -> Option<usize> {
        match &self.system {
            SystemSpec::Hubbard { sites, .. } => Some(2 * sites),
            SystemSpec::Random { spatial, .. } => Some(2 * spatial),
            SystemSpec::Integrals { .. } => None,
        }
    }

    /// Builds the Hamiltonian and resolves the electron count.
    pub fn hamiltonian(&self) -> Result<(TwoBodyHamiltonian, usize)> {
        let (ham, file_n) = match &self.system {
            SystemSpec::Hubbard { sites, t, u, periodic } => (build_hubbard(*sites, *t, *u, *periodic)?, None),
            SystemSpec::Random { spatial, seed } => (build_random_two_body(*spatial, *seed)?, None),
            SystemSpec::Integrals { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
                let (ham, n) = load_integrals(&text)?;
                (ham, Some(n))
            }
        };
        let n = match (self.n_electrons, file_n) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Validation(format!("n_electrons = {a} but the integral file says {b}")));
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(Error::Validation("n_electrons is required".into())),
        };
        let l = ham.n_orbitals();
        if n < 2 || n + 2 > l {
            return Err(Error::Validation(format!("need 2 <= N <= L-2, got N={n}, L={l}")));
        }
        Ok((ham, n))
    }

    /// Exact sector label: the configured value, else the lowest `|2Sz|` for
    /// spin-resolved bases, else no restriction.
    pub fn sector_sz2(&self, ham: &TwoBodyHamiltonian, n: usize) -> Option<i32> {
        if !ham.basis().is_spin_structured() || !ham.conserves_sz() {
            return None;
        }
        Some(self.sz2.unwrap_or((n % 2) as i32))
    }

    /// Copy with the sweep parameter set to `value`.
    pub fn at_point(&self, parameter: &str, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.sweep = None;
        match (&mut cfg.system, parameter) {
            (SystemSpec::Hubbard { u, .. }, "u") => *u = value,
            (SystemSpec::Hubbard { t, .. }, "t") => *t = value,
            (SystemSpec::Random { seed, .. }, "seed") => *seed = value as u64,
            _ => return Err(Error::Validation(format!("cannot sweep `{parameter}` for this system"))),
        }
        Ok(cfg)
    }
}
