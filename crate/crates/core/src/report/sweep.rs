use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use super::config::ExperimentConfig;
use super::run::{csv_text, num, run_experiment, Summary};
use super::{Artifact, Artifacts};
use crate::error::{Error, Result};

/// Outcome of one sweep point; failures are kept rather than aborting.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub result: std::result::Result<Summary, String>,
}

type PointOutput = (std::result::Result<Summary, String>, Vec<Artifact>);

/// Runs every point of `cfg.sweep` on up to `threads` workers. Each point
/// emits its own `summary.json` under `points/<parameter>=<value>/`.
pub fn run_sweep(cfg: &ExperimentConfig, threads: usize, sink: &mut dyn FnMut(Artifact) -> Result<()>) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    let spec = cfg.sweep.clone().ok_or_else(|| Error::Validation("config has no sweep section".into()))?;
    let mut point_cfgs = Vec::new();
    for &v in &spec.values {
        let mut p = cfg.at_point(&spec.parameter, v)?;
        p.artifacts = Artifacts::none();
        point_cfgs.push(p);
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<PointOutput>>> = Mutex::new(vec![None; point_cfgs.len()]);
    let workers = threads.clamp(1, point_cfgs.len());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(pc) = point_cfgs.get(i) else { break };
                let mut files = Vec::new();
                let r = run_experiment(pc, &mut |a| {
                    files.push(a);
                    Ok(())
                });
                results.lock().expect("no worker panics while holding the lock")[i] = Some((r.map_err(|e| e.to_string()), files));
            });
        }
    });

    let mut points = Vec::new();
    for (v, slot) in spec.values.iter().zip(results.into_inner().expect("workers joined")) {
        let (result, files) = slot.expect("every point is processed");
        for a in files {
            sink(Artifact::new(format!("points/{}={}/{}", spec.parameter, v, a.name), a.contents))?;
        }
        points.push(SweepPoint { value: *v, result });
    }

    let rows = points.iter().map(|p| {
        let mut r = vec![num(p.value)];
        match &p.result {
            Ok(s) => {
                r.extend([s.e_exact, s.e_var, s.delta_e, s.delta_e_null, s.ratio].map(num));
                let d = &s.descriptors;
                r.extend([d.alpha, d.beta, d.gamma, d.zeta].map(num));
                r.push(format!("{}/{}/{}", s.null_dims.d, s.null_dims.g, s.null_dims.q));
                r.push(String::new());
            }
            Err(e) => {
                r.extend(std::iter::repeat_n(String::new(), 10));
                r.push(e.clone());
            }
        }
        r
    });
    let p = spec.parameter.as_str();
    let header = [p, "E_exact", "E_var", "delta_E", "delta_E_null", "ratio", "I_alpha", "I_beta", "I_gamma", "I_zeta", "null_dims", "error"];
    sink(Artifact::new("sweep.csv", csv_text(&header, rows)?))?;
    if cfg.artifacts.figures {
        let ok: Vec<(&f64, &Summary)> = points.iter().filter_map(|p| p.result.as_ref().ok().map(|s| (&p.value, s))).collect();
        let rows = ok.iter().map(|(v, s)| vec![num(**v), num(s.delta_e), num(s.delta_e_null)]);
        sink(Artifact::new("fig1b_energy.csv", csv_text(&[p, "delta_E", "delta_E_null"], rows)?))?;
        let rows = ok.iter().map(|(v, s)| {
            let d = &s.descriptors;
            vec![num(**v), num(d.alpha), num(d.beta), num(d.gamma), num(d.zeta)]
        });
        sink(Artifact::new("fig2d_descriptors.csv", csv_text(&[p, "I_alpha", "I_beta", "I_gamma", "I_zeta"], rows)?))?;
    }
    Ok(points)
}
