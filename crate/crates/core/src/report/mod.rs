//! End-to-end experiments: configuration, runs, sweeps and audits of
//! external RDM files, producing CSV and JSON artifacts in memory.

mod check;
mod config;
mod run;
mod sweep;

pub use check::{check_rdm, CheckReport};
pub use config::{Artifacts, ExperimentConfig, SweepSpec, SystemSpec};
pub use run::{run_experiment, DescriptorValues, InequalitySummary, NullDims, SolverSummary, Summary, SCHEMA_VERSION};
pub use sweep::{run_sweep, SweepPoint};

/// A named output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Self { name: name.into(), contents: contents.into() }
    }
}
