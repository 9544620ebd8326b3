use std::collections::BTreeMap;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::Artifact;
use crate::algebra::{eigendecompose, RdmKind};
use crate::error::Result;
use crate::exact::{assemble_sector, compute_rdms, ground_state, SolverOptions};
use crate::fock::{reduced_hamiltonian, ModelInfo};
use crate::geometry::{
    default_bounds, delta_e_null, projection_lengths, Audit, ClosureFamily, Descriptor, Grid, InequalityGrids,
};
use crate::sdp::{Residuals, Status};
use crate::vrdm::{variational_ground_state, write_rdm};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NullDims {
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "G")]
    pub g: usize,
    #[serde(rename = "Q")]
    pub q: usize,
}

impl From<(usize, usize, usize)> for NullDims {
    fn from((d, g, q): (usize, usize, usize)) -> Self {
        Self { d, g, q }
    }
}

/// The four closure descriptors under their table names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescriptorValues {
    #[serde(rename = "I_alpha")]
    pub alpha: f64,
    #[serde(rename = "I_beta")]
    pub beta: f64,
    #[serde(rename = "I_gamma")]
    pub gamma: f64,
    #[serde(rename = "I_zeta")]
    pub zeta: f64,
}

impl DescriptorValues {
    pub(super) fn of(a: &Audit) -> Self {
        let v = |f| a.descriptor(f).value;
        Self { alpha: v(ClosureFamily::GG), beta: v(ClosureFamily::QD), gamma: v(ClosureFamily::GD), zeta: v(ClosureFamily::GQ) }
    }

    pub fn get(&self, f: ClosureFamily) -> f64 {
        match f {
            ClosureFamily::GG => self.alpha,
            ClosureFamily::QD => self.beta,
            ClosureFamily::GD => self.gamma,
            ClosureFamily::GQ => self.zeta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSummary {
    pub status: Status,
    pub iterations: usize,
    pub residuals: Residuals,
    pub min_condition_eigenvalue: f64,
    pub n_blocks: usize,
    pub n_variables: usize,
    pub imag_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalitySummary {
    /// Largest Delta over every eigen-index pair of each condition.
    pub max_delta: BTreeMap<String, f64>,
    /// Largest Delta excluding null-null pairs.
    pub max_explicit_delta: BTreeMap<String, f64>,
    pub exact_max_delta: f64,
}

/// Table-style digest of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub system: ModelInfo,
    pub n_orbitals: usize,
    pub n_electrons: usize,
    pub sz2: Option<i32>,
    pub conditions: String,
    pub null_tol: f64,
    pub e_exact: f64,
    pub e_var: f64,
    pub delta_e: f64,
    pub delta_e_null: f64,
    pub ratio: f64,
    pub ratio_reliable: bool,
    pub null_dims: NullDims,
    pub exact_null_dims: NullDims,
    #[serde(flatten)]
    pub descriptors: DescriptorValues,
    pub exact_descriptors: DescriptorValues,
    pub descriptor_details: BTreeMap<String, Descriptor>,
    pub inequalities: InequalitySummary,
    pub exact_degeneracy: usize,
    pub solver: SolverSummary,
}

fn family_key(f: ClosureFamily) -> String {
    f.length_name().to_string()
}

/// Shortest round-trip form, with an exponent for very small or large values.
pub(super) fn num(x: f64) -> String {
    format!("{x:?}")
}

pub(super) fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| crate::Error::Validation(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Validation(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn grid_csv(g: &Grid, value_name: &str) -> Result<String> {
    let mut rows = Vec::with_capacity(g.values.len());
    for (r, &m) in g.rows.iter().enumerate() {
        for (c, &n) in g.cols.iter().enumerate() {
            rows.push(vec![m.to_string(), n.to_string(), num(g.get(r, c))]);
        }
    }
    csv_text(&["m", "n", value_name], rows)
}

/// Runs the exact and variational calculations and the geometric audit.
/// Artifacts are handed to `sink` as soon as they exist, so a failure in a
/// later stage leaves the earlier files behind.
pub fn run_experiment(cfg: &ExperimentConfig, sink: &mut dyn FnMut(Artifact) -> Result<()>) -> Result<Summary> {
    cfg.validate()?;
    let (ham, n) = cfg.hamiltonian()?;
    let l = ham.n_orbitals();
    let sz2 = cfg.sector_sz2(&ham, n);

    let hs = assemble_sector(&ham, n, sz2)?;
    let gs = ground_state(&hs, &SolverOptions::default())?;
    let exact = compute_rdms(&gs.wavefunction)?;
    let exact_audit = Audit::new(exact.d.clone(), exact.g.clone(), exact.q.clone(), cfg.null_tol)?;
    if cfg.artifacts.rdms {
        sink(Artifact::new("rdm_exact_D.txt", write_rdm(&exact.d)))?;
    }

    let var = variational_ground_state(&ham, n, &cfg.conditions, &cfg.sdp)?;
    if cfg.artifacts.rdms {
        sink(Artifact::new("rdm_var_D.txt", write_rdm(&var.d)))?;
    }
    let audit = Audit::new(var.d.clone(), var.g.clone(), var.q.clone(), cfg.null_tol)?;

    let delta_e = var.energy - gs.energy;
    let k = reduced_hamiltonian(&ham, n)?;
    let proj = delta_e_null(audit.null(RdmKind::D), audit.eigensystem(RdmKind::D), &exact.d, &k, delta_e)?;

    let bounds = default_bounds(l, n)?.with_overrides(&cfg.bounds)?;
    let ineq: InequalityGrids = audit.inequality_conditions(&bounds)?;
    let exact_ineq = exact_audit.inequality_conditions(&bounds)?;

    let mut max_delta = BTreeMap::new();
    let mut max_explicit_delta = BTreeMap::new();
    let mut descriptor_details = BTreeMap::new();
    for f in ClosureFamily::ALL {
        max_delta.insert(family_key(f), ineq.get(f).max().map_or(f64::NEG_INFINITY, |m| m.0));
        max_explicit_delta.insert(family_key(f), audit.explicit_violation(&ineq, f).map_or(f64::NEG_INFINITY, |m| m.0));
        descriptor_details.insert(family_key(f), audit.descriptor(f));
    }

    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        system: ham.info().clone(),
        n_orbitals: l,
        n_electrons: n,
        sz2,
        conditions: cfg.conditions.label(),
        null_tol: cfg.null_tol,
        e_exact: gs.energy,
        e_var: var.energy,
        delta_e,
        delta_e_null: proj.delta_e_null,
        ratio: proj.ratio,
        ratio_reliable: proj.reliable,
        null_dims: audit.null_dims().into(),
        exact_null_dims: exact_audit.null_dims().into(),
        descriptors: DescriptorValues::of(&audit),
        exact_descriptors: DescriptorValues::of(&exact_audit),
        descriptor_details,
        inequalities: InequalitySummary { max_delta, max_explicit_delta, exact_max_delta: exact_ineq.max_violation() },
        exact_degeneracy: gs.degeneracy,
        solver: SolverSummary {
            status: var.status,
            iterations: var.iterations,
            residuals: var.residuals,
            min_condition_eigenvalue: var.min_condition_eigenvalue,
            n_blocks: var.n_blocks,
            n_variables: var.n_variables,
            imag_norm: var.imag_norm,
        },
    };

    if cfg.artifacts.tables {
        let kinds = [RdmKind::D, RdmKind::G, RdmKind::Q];
        let vals: Vec<(Vec<f64>, Vec<f64>)> = kinds
            .iter()
            .map(|&k| (audit.eigensystem(k).values().to_vec(), exact_audit.eigensystem(k).values().to_vec()))
            .collect();
        let rows = (0..cfg.eigen_rows).map(|i| {
            let mut r = vec![(i + 1).to_string()];
            for (v, e) in &vals {
                let cell = |x: &Vec<f64>| x.get(i).map_or(String::new(), |y| num(*y));
                r.push(cell(v));
                r.push(cell(e));
            }
            r
        });
        sink(Artifact::new(
            "eigenvalues.csv",
            csv_text(&["index", "D_var", "D_exact", "G_var", "G_exact", "Q_var", "Q_exact"], rows)?,
        ))?;
    }

    if cfg.artifacts.figures {
        let es_exact = eigendecompose(&exact.d)?;
        let lengths = projection_lengths(audit.null(RdmKind::D), audit.eigensystem(RdmKind::D), &es_exact);
        let rows = lengths.iter().enumerate().map(|(i, p)| {
            vec![
                (i + 1).to_string(),
                num(es_exact.values()[i]),
                num(audit.eigensystem(RdmKind::D).values()[i]),
                num(*p),
            ]
        });
        sink(Artifact::new(
            "fig1a_projection.csv",
            csv_text(&["index", "lambda_exact", "lambda_var", "projection_length"], rows)?,
        ))?;
        for f in ClosureFamily::ALL {
            let name = format!("fig2_null_lengths_{}.csv", family_key(f));
            sink(Artifact::new(name, grid_csv(&audit.null_grid(f), f.length_name())?))?;
        }
        let beta = ineq.get(ClosureFamily::QD);
        let (nd, nq) = (audit.null(RdmKind::D), audit.null(RdmKind::Q));
        let (ld, lq) = (audit.eigensystem(RdmKind::D).values(), audit.eigensystem(RdmKind::Q).values());
        let mut rows = Vec::new();
        for (r, &m) in beta.rows.iter().enumerate() {
            for (c, &q) in beta.cols.iter().enumerate() {
                rows.push(vec![
                    m.to_string(),
                    q.to_string(),
                    num(ld[m]),
                    num(lq[q]),
                    num(audit.length(ClosureFamily::QD, m, q)),
                    num(beta.get(r, c)),
                    (nd.contains(m) && nq.contains(q)).to_string(),
                ]);
            }
        }
        sink(Artifact::new(
            "fig3_delta_beta.csv",
            csv_text(&["m", "n", "lambda_D", "lambda_Q", "beta", "delta_beta", "null_pair"], rows)?,
        ))?;
    }

    let json = serde_json::to_string_pretty(&summary).map_err(|e| crate::Error::Validation(format!("json: {e}")))?;
    sink(Artifact::new("summary.json", json + "\n"))?;
    Ok(summary)
}
