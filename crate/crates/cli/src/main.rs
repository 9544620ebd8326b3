use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rdmgeo::report::{check_rdm, run_experiment, run_sweep, Artifact, Artifacts, ExperimentConfig, SweepSpec, SystemSpec};
use rdmgeo::sdp::{read_problem, solve, SolverConfig};
use rdmgeo::vrdm::{read_rdm, ConditionSet};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "rdmgeo", version, about = "Exact and variational 2-RDMs with geometric N-representability audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact + variational calculation and audit of one system.
    Run(RunArgs),
    /// The same pipeline over a list of parameter values.
    Sweep(SweepArgs),
    /// Audit a D matrix read from an RDM file.
    Check(CheckArgs),
    /// Solve an SDP problem file.
    SolveSdp(SolveArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// hubbard, random or integrals.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long = "U")]
    u: Option<f64>,
    /// Open chain instead of a ring.
    #[arg(long)]
    open: bool,
    /// Spatial orbitals of the random model.
    #[arg(long)]
    spatial: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    integrals: Option<PathBuf>,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Twice Sz of the exact sector.
    #[arg(long)]
    sz2: Option<i32>,
    /// Comma-separated list, e.g. `D,Q,G,T1,T2'`.
    #[arg(long)]
    conditions: Option<String>,
    /// Disable Sz / momentum blocking of the variational problem.
    #[arg(long)]
    no_symmetry: bool,
    #[arg(long)]
    null_tol: Option<f64>,
    #[arg(long)]
    sdp_tol: Option<f64>,
    /// Write every artifact, including RDM files.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    system: SystemArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Parameter to vary: u or t (hubbard), seed (random).
    #[arg(long)]
    param: Option<String>,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    /// RDM file holding D.
    rdm: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    null_tol: f64,
    /// Threshold on descriptors and inequality residuals for `passes`.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file.
    problem: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

fn build_config(a: &SystemArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => {
            let Some(model) = &a.model else { bail!("either --config or --model is required") };
            let system = match model.as_str() {
                "hubbard" => SystemSpec::Hubbard { sites: a.sites.unwrap_or(6), t: 1.0, u: 0.0, periodic: true },
                "random" => SystemSpec::Random { spatial: a.spatial.unwrap_or(6), seed: 0 },
                "integrals" => match &a.integrals {
                    Some(p) => SystemSpec::Integrals { path: p.clone() },
                    None => bail!("--model integrals needs --integrals <file>"),
                },
                other => bail!("unknown model `{other}`"),
            };
            ExperimentConfig::new(system, None)
        }
    };
    match &mut cfg.system {
        SystemSpec::Hubbard { sites, t, u, periodic } => {
            *sites = a.sites.unwrap_or(*sites);
            *t = a.t.unwrap_or(*t);
            *u = a.u.unwrap_or(*u);
            *periodic &= !a.open;
        }
        SystemSpec::Random { spatial, seed } => {
            *spatial = a.spatial.unwrap_or(*spatial);
            *seed = a.seed.unwrap_or(*seed);
        }
        SystemSpec::Integrals { path } => {
            if let Some(p) = &a.integrals {
                *path = p.clone();
            }
        }
    }
    if a.n.is_some() {
        cfg.n_electrons = a.n;
    }
    if a.sz2.is_some() {
        cfg.sz2 = a.sz2;
    }
    if let Some(c) = &a.conditions {
        let symmetry = cfg.conditions.symmetry;
        cfg.conditions = ConditionSet { symmetry, ..c.parse::<ConditionSet>()? };
    }
    if a.no_symmetry {
        cfg.conditions.symmetry = false;
    }
    if let Some(t) = a.null_tol {
        cfg.null_tol = t;
    }
    if let Some(t) = a.sdp_tol {
        cfg.sdp.tol = t;
    }
    if a.all {
        cfg.artifacts = Artifacts::all();
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    schema_version: u32,
    command: String,
    status: &'static str,
    error: Option<String>,
    files: Vec<ManifestEntry>,
}

/// Writes artifacts atomically under `root` and records them for the manifest.
struct Output {
    root: PathBuf,
    files: Vec<ManifestEntry>,
}

impl Output {
    fn new(root: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, a: &Artifact) -> anyhow::Result<()> {
        let path = self.root.join(&a.name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("partial");
        std::fs::write(&tmp, &a.contents).with_context(|| format!("writing {}", tmp.display()))?;
        std::fs::rename(&tmp, &path)?;
        let digest = Sha256::digest(a.contents.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.files.push(ManifestEntry { path: a.name.clone(), bytes: a.contents.len(), sha256 });
        Ok(())
    }

    fn finish(mut self, command: &str, result: &anyhow::Result<()>) -> anyhow::Result<()> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            schema_version: rdmgeo::report::SCHEMA_VERSION,
            command: command.to_string(),
            status: if result.is_ok() { "complete" } else { "partial" },
            error: result.as_ref().err().map(|e| format!("{e:#}")),
            files: self.files,
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(self.root.join("manifest.json"), text)?;
        Ok(())
    }
}

fn json(value: &impl Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn with_output(out: &Path, command: &str, body: impl FnOnce(&mut Output) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let mut o = Output::new(out)?;
    let result = body(&mut o);
    o.finish(command, &result)?;
    result
}

fn sink<'a>(o: &'a mut Output) -> impl FnMut(Artifact) -> rdmgeo::Result<()> + 'a {
    move |a| o.write(&a).map_err(|e| rdmgeo::Error::Validation(format!("{e:#}")))
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(a) => {
            let cfg = build_config(&a.system)?;
            cfg.validate()?;
            with_output(&a.system.out, "run", |o| {
                o.write(&Artifact::new("config.json", json(&cfg)?))?;
                let s = run_experiment(&cfg, &mut sink(o))?;
                eprintln!(
                    "E_exact {:.12}  E_var {:.12}  dE {:.3e}  nulls D/G/Q {}/{}/{}",
                    s.e_exact, s.e_var, s.delta_e, s.null_dims.d, s.null_dims.g, s.null_dims.q
                );
                Ok(())
            })
        }
        Command::Sweep(a) => {
            let mut cfg = build_config(&a.system)?;
            if a.param.is_some() || !a.values.is_empty() {
                let Some(parameter) = a.param.clone() else { bail!("--values needs --param") };
                cfg.sweep = Some(SweepSpec { parameter, values: a.values.clone() });
            }
            cfg.validate()?;
            if cfg.sweep.is_none() {
                bail!("no sweep given: use --param/--values or a `sweep` config section");
            }
            let threads = a.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            with_output(&a.system.out, "sweep", |o| {
                o.write(&Artifact::new("config.json", json(&cfg)?))?;
                let points = run_sweep(&cfg, threads, &mut sink(o))?;
                let failed = points.iter().filter(|p| p.result.is_err()).count();
                if failed > 0 {
                    bail!("{failed} of {} sweep points failed; see sweep.csv", points.len());
                }
                Ok(())
            })
        }
        Command::Check(a) => {
            let text = std::fs::read_to_string(&a.rdm).with_context(|| format!("reading {}", a.rdm.display()))?;
            let d = read_rdm(&text)?;
            with_output(&a.out, "check", |o| {
                let report = check_rdm(&d, a.null_tol, &Default::default(), a.tol)?;
                o.write(&Artifact::new("check.json", json(&report)?))?;
                eprintln!("passes: {}", report.passes);
                Ok(())
            })
        }
        Command::SolveSdp(a) => {
            let text = std::fs::read_to_string(&a.problem).with_context(|| format!("reading {}", a.problem.display()))?;
            let problem = read_problem(&text)?;
            let mut cfg = SolverConfig::default();
            cfg.tol = a.tol.unwrap_or(cfg.tol);
            cfg.max_iterations = a.max_iterations.unwrap_or(cfg.max_iterations);
            with_output(&a.out, "solve-sdp", |o| {
                let sol = solve(&problem, &cfg)?;
                let blocks = |ms: &[rdmgeo::nalgebra::DMatrix<f64>]| -> Vec<Vec<Vec<f64>>> {
                    ms.iter().map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect()).collect()
                };
                let value = serde_json::json!({
                    "schema_version": rdmgeo::report::SCHEMA_VERSION,
                    "status": sol.status,
                    "primal_objective": sol.primal_objective,
                    "dual_objective": sol.dual_objective,
                    "iterations": sol.iterations,
                    "residuals": sol.residuals,
                    "dependent_rows": sol.dependent_rows,
                    "y": sol.y,
                    "x": blocks(&sol.x),
                    "z": blocks(&sol.z),
                });
                o.write(&Artifact::new("solution.json", json(&value)?))?;
                eprintln!("{:?}: objective {:.12}", sol.status, sol.primal_objective);
                if sol.status != rdmgeo::sdp::Status::Optimal {
                    bail!("solver stopped with status {:?}", sol.status);
                }
                Ok(())
            })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
