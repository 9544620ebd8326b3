//! Acceptance checks. Each test prints one `ACCEPT cNN PASS|FAIL|SKIP` line
//! to stderr (uncaptured) and then asserts.

mod common;

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{distance, random_rdms};
use nalgebra::{DMatrix, SymmetricEigen};
use rdmgeo::algebra::*;
use rdmgeo::exact::{assemble_sector, compute_rdms, ground_state, ExactRdms, GroundState, SolverOptions};
use rdmgeo::fock::{apply_operator_string, build_hubbard, build_random_two_body, FockVector, Ladder};
use rdmgeo::geometry::{default_bounds, Audit, ClosureFamily, DEFAULT_NULL_TOL};
use rdmgeo::report::{run_experiment, run_sweep, ExperimentConfig, Summary, SweepSpec, SystemSpec};
use rdmgeo::sdp::{self, SdpProblem, SolverConfig, Status, SymEntry};
use rdmgeo::vrdm::{condition_matrix, variational_ground_state, ConditionSet, Family};

const E_FCI: f64 = -1.664362733287;
const E_VAR: f64 = -1.695384327725;
const DELTA_E: f64 = -0.031021594438;
const DELTA_E_NULL: f64 = 0.013134139307;
const SWEEP_U: [f64; 8] = [1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 20.0, 40.0];

// Ten lowest eigenvalues of the exact D, G and Q for the 6-site ring at U/t = 10.
const EXACT_D: [f64; 10] = [
    0.0,
    0.000013764099,
    0.000558839696,
    0.000558839696,
    0.000649120541,
    0.000649120541,
    0.054771204301,
    0.054771204301,
    0.056628436116,
    0.059289055684,
];
const EXACT_G: [f64; 10] = [
    0.0,
    0.0,
    0.0,
    0.000006882049,
    0.000279419848,
    0.000279419848,
    0.000324560271,
    0.000324560271,
    0.026343666870,
    0.027040912995,
];
const EXACT_Q: [f64; 10] = EXACT_D;

fn report(id: &str, title: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr().lock(), "ACCEPT {id} {verdict} {title}: {detail}");
    assert!(pass, "{id} {title}: {detail}");
}

fn skip(id: &str, title: &str, why: &str) {
    let _ = writeln!(std::io::stderr().lock(), "ACCEPT {id} SKIP {title}: {why}");
}

fn hubbard_config(u: f64) -> ExperimentConfig {
    ExperimentConfig::new(SystemSpec::Hubbard { sites: 6, t: 1.0, u, periodic: true }, Some(6))
}

fn run_quiet(cfg: &ExperimentConfig) -> Summary {
    run_experiment(cfg, &mut |_| Ok(())).unwrap()
}

struct Exact {
    gs: GroundState,
    rdms: ExactRdms,
    elapsed: Duration,
}

fn exact() -> &'static Exact {
    static CELL: OnceLock<Exact> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let ham = build_hubbard(6, 1.0, 10.0, true).unwrap();
        let gs = ground_state(&assemble_sector(&ham, 6, Some(0)).unwrap(), &SolverOptions::default()).unwrap();
        let elapsed = start.elapsed();
        let rdms = compute_rdms(&gs.wavefunction).unwrap();
        Exact { gs, rdms, elapsed }
    })
}

fn variational() -> &'static (Summary, Duration) {
    static CELL: OnceLock<(Summary, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let s = run_quiet(&hubbard_config(10.0));
        (s, start.elapsed())
    })
}

fn sweep() -> &'static Vec<Summary> {
    static CELL: OnceLock<Vec<Summary>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut cfg = hubbard_config(10.0);
        cfg.sweep = Some(SweepSpec { parameter: "u".into(), values: SWEEP_U.to_vec() });
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        let mut pts = run_sweep(&cfg, threads, &mut |_| Ok(())).unwrap();
        pts.sort_by(|a, b| a.value.total_cmp(&b.value));
        pts.into_iter().map(|p| p.result.unwrap()).collect()
    })
}

fn argmax(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for (v, u) in values.into_iter().zip(SWEEP_U) {
        if v > best.0 {
            best = (v, u);
        }
    }
    best.1
}

#[test]
fn c01_fci_ground_energy() {
    let e = exact();
    let err = (e.gs.energy - E_FCI).abs();
    let pass = err < 1e-9 && e.elapsed < Duration::from_secs(10);
    report("c01", "FCI energy", pass, format!("E = {:.12}, |err| = {err:.1e}, {:.2?}", e.gs.energy, e.elapsed));
}

#[test]
fn c02_exact_rdm_spectra() {
    let r = &exact().rdms;
    let mut worst = 0.0f64;
    for (rdm, want) in [(&r.d, &EXACT_D), (&r.g, &EXACT_G), (&r.q, &EXACT_Q)] {
        let es = eigendecompose(rdm).unwrap();
        for (got, want) in es.values().iter().zip(want.iter()) {
            worst = worst.max((got - want).abs());
        }
    }
    report("c02", "exact D/G/Q spectra", worst < 1e-8, format!("max deviation over 30 eigenvalues {worst:.1e}"));
}

/// Coefficient matrices of S+, S- and Sz as `a_j^+ a_i` sums (row i, column j).
fn spin_generators(spatial: usize) -> [DMatrix<f64>; 3] {
    let l = 2 * spatial;
    let (mut up, mut down, mut z) = (DMatrix::zeros(l, l), DMatrix::zeros(l, l), DMatrix::zeros(l, l));
    for s in 0..spatial {
        up[(2 * s + 1, 2 * s)] = 1.0;
        down[(2 * s, 2 * s + 1)] = 1.0;
        z[(2 * s, 2 * s)] = 0.5;
        z[(2 * s + 1, 2 * s + 1)] = -0.5;
    }
    [up, down, z]
}

#[test]
fn c03_exact_null_structure() {
    let e = exact();
    let a = Audit::new(e.rdms.d.clone(), e.rdms.g.clone(), e.rdms.q.clone(), DEFAULT_NULL_TOL).unwrap();
    let dims = a.null_dims();
    let psi = e.gs.wavefunction.to_fock_vector();
    let ops = eigenoperators(a.eigensystem(RdmKind::G));
    let null = &a.null(RdmKind::G).indices;
    let action = null.iter().map(|&k| ops[k].apply(&psi).norm()).fold(0.0, f64::max);
    // Each spin generator must lie in the span of the null eigenoperators.
    let basis: Vec<DMatrix<f64>> = null.iter().map(|&k| ops[k].matrix.normalize()).collect();
    let mut outside = 0.0f64;
    for m in spin_generators(6) {
        let m = m.normalize();
        let mut rest = m.clone();
        for b in &basis {
            rest -= b * b.dot(&m);
        }
        outside = outside.max(rest.norm());
    }
    let pass = dims == (1, 3, 1) && action < 1e-8 && outside < 1e-8;
    report(
        "c03",
        "exact null structure",
        pass,
        format!("null dims {dims:?}, max |g_n psi| = {action:.1e}, spin generators outside null span {outside:.1e}"),
    );
}

#[test]
fn c04_variational_energy() {
    let (s, t) = variational();
    let (e_err, d_err) = ((s.e_var - E_VAR).abs(), (s.delta_e - DELTA_E).abs());
    let pass = e_err < 1e-6 && d_err < 1e-5 && *t < Duration::from_secs(1800);
    report(
        "c04",
        "variational energy",
        pass,
        format!("E_var = {:.12} (|err| {e_err:.1e}), dE = {:.12} (|err| {d_err:.1e}), {t:.2?}", s.e_var, s.delta_e),
    );
}

#[test]
fn c05_variational_null_counts() {
    let n = variational().0.null_dims;
    report("c05", "variational null dims", (n.d, n.g, n.q) == (6, 8, 6), format!("(D,G,Q) = ({}, {}, {})", n.d, n.g, n.q));
}

#[test]
fn c06_null_energy_projection() {
    let s = &variational().0;
    let err = (s.delta_e_null - DELTA_E_NULL).abs();
    let pct = 100.0 * s.ratio;
    let pass = err < 2e-3 && (pct - 42.0).abs() <= 3.0;
    report("c06", "dE_null and ratio", pass, format!("dE_null = {:.6} (|err| {err:.1e}), ratio {pct:.1}%", s.delta_e_null));
}

#[test]
fn c07_descriptors() {
    let d = variational().0.descriptors;
    let want = [0.0078, 0.021, 0.015, 0.014];
    let got = [d.alpha, d.beta, d.gamma, d.zeta];
    let within = got.iter().zip(want).all(|(g, w)| *g >= w / 2.0 && *g <= w * 2.0);
    // "gamma ~ zeta" read as both sitting strictly between alpha and beta.
    let order = d.beta > d.gamma.max(d.zeta) && d.gamma.min(d.zeta) > d.alpha;
    report("c07", "closure descriptors", within && order, format!("(a,b,g,z) = {got:.5?}, ordering {order}"));
}

#[test]
fn c08_sweep_shapes() {
    let pts = sweep();
    let peak_e = argmax(pts.iter().map(|s| s.delta_e.abs()));
    let peaks: Vec<f64> =
        ClosureFamily::ALL.iter().map(|&f| argmax(pts.iter().map(|s| s.descriptors.get(f)))).collect();
    let pass = peak_e == 8.0 && peaks.iter().all(|&u| u == 4.0);
    report("c08", "sweep shapes", pass, format!("|dE| peaks at U={peak_e}, descriptor peaks at {peaks:?}"));
}

#[test]
fn c09_inequality_grids() {
    let mut exact_max = sweep().iter().map(|s| s.inequalities.exact_max_delta).fold(f64::NEG_INFINITY, f64::max);
    let mut found = None;
    for seed in [1, 2] {
        let ham = build_random_two_body(4, seed).unwrap();
        let gs = ground_state(&assemble_sector(&ham, 4, Some(0)).unwrap(), &SolverOptions::default()).unwrap();
        let r = compute_rdms(&gs.wavefunction).unwrap();
        let bounds = default_bounds(8, 4).unwrap();
        let ex = Audit::new(r.d, r.g, r.q, DEFAULT_NULL_TOL).unwrap();
        exact_max = exact_max.max(ex.inequality_conditions(&bounds).unwrap().max_violation());

        let v = variational_ground_state(&ham, 4, &ConditionSet::full(), &SolverConfig::default()).unwrap();
        let a = Audit::new(v.d, v.g, v.q, DEFAULT_NULL_TOL).unwrap();
        let grid = a.inequality_conditions(&bounds).unwrap().get(ClosureFamily::QD).clone();
        let positive = grid.values.iter().filter(|&&x| x > 0.0).count();
        let (nq, nd) = (a.null(RdmKind::Q), a.null(RdmKind::D));
        let null_null = grid.max_where(|m, n| nq.contains(m) && nd.contains(n));
        if found.is_none() && positive > 0 && null_null.is_some_and(|(x, _, _)| x > 0.0) {
            found = Some((seed, positive, null_null.unwrap().0));
        }
    }
    let pass = exact_max <= 1e-8 && found.is_some();
    report(
        "c09",
        "inequality grids",
        pass,
        format!("exact max delta {exact_max:.1e}; random variational (seed, #beta>0, null-null max) {found:?}"),
    );
}

fn adjoint(word: &[Ladder]) -> Vec<Ladder> {
    word.iter().rev().map(|o| o.adjoint()).collect()
}

fn condition_oracle(family: Family, l: usize, psi: &FockVector) -> DMatrix<f64> {
    let rows = family.rows(l);
    let imgs: Vec<FockVector> = rows.iter().map(|r| apply_operator_string(r, psi)).collect();
    let adj: Vec<FockVector> = rows.iter().map(|r| apply_operator_string(&adjoint(r), psi)).collect();
    let anti = matches!(family, Family::T1 | Family::T2 | Family::T2p);
    DMatrix::from_fn(rows.len(), rows.len(), |a, b| {
        let mut v = imgs[a].dot(&imgs[b]);
        if anti && rows[a].len() == 3 && rows[b].len() == 3 {
            v += adj[b].dot(&adj[a]);
        }
        v
    })
}

fn commutator(a: &EigenOperator, b: &EigenOperator, psi: &FockVector) -> FockVector {
    let mut out = a.apply(&b.apply(psi));
    out.axpy(-1.0, &b.apply(&a.apply(psi)));
    out
}

#[test]
fn c10_oracle_equivalence() {
    let start = Instant::now();
    let (mut maps, mut coeffs, mut ortho, mut convert) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (l, n, seed) in [(4, 2, 31), (6, 3, 32)] {
        let (psi, r) = random_rdms(l, n, seed);
        let v = psi.to_fock_vector();
        for family in [Family::D, Family::Q, Family::G, Family::T1, Family::T2, Family::T2p] {
            let got = condition_matrix(family, &r.d, &r.gamma).unwrap();
            maps = maps.max((&got - condition_oracle(family, l, &v)).amax());
        }

        let gamma = one_rdm_from_d(&r.d).unwrap();
        convert = convert
            .max((g_from_d(&r.d, &gamma).unwrap().matrix() - r.g.matrix()).amax())
            .max((q_from_d(&r.d, &gamma).unwrap().matrix() - r.q.matrix()).amax());

        let (ed, eg, eq) = (eigendecompose(&r.d).unwrap(), eigendecompose(&r.g).unwrap(), eigendecompose(&r.q).unwrap());
        let (od, og, oq) = (eigenoperators(&ed), eigenoperators(&eg), eigenoperators(&eq));
        for ops in [&od, &og, &oq] {
            let imgs: Vec<FockVector> = ops.iter().map(|o| o.apply(&v)).collect();
            for (m, a) in imgs.iter().enumerate() {
                for (k, b) in imgs.iter().enumerate() {
                    let want = if m == k { ops[m].eigenvalue } else { 0.0 };
                    ortho = ortho.max((a.dot(b) - want).abs());
                }
            }
        }

        let cases: [(CommutatorKind, &[EigenOperator], &[EigenOperator], &EigenSystem, &[EigenOperator]); 4] = [
            (CommutatorKind::Gamma, &og, &og, &eg, &og),
            (CommutatorKind::Delta, &og, &od, &ed, &od),
            (CommutatorKind::Omega, &og, &oq, &eq, &oq),
            (CommutatorKind::Theta, &oq, &od, &eg, &og),
        ];
        for (kind, left, right, target, target_ops) in cases {
            let pick = |ops: &[EigenOperator]| -> Vec<EigenOperator> {
                ops.iter().step_by(1 + ops.len() / 6).cloned().collect()
            };
            let (a, b) = (pick(left), pick(right));
            let tensor = commutator_coefficients(kind, &a, &b, target, n).unwrap();
            let images: Vec<FockVector> = target_ops.iter().map(|o| o.apply(&v)).collect();
            for m in 0..a.len() {
                for k in 0..b.len() {
                    let mut expanded = FockVector::new();
                    for (t, img) in images.iter().enumerate() {
                        expanded.axpy(tensor.get(m, k, t), img);
                    }
                    coeffs = coeffs.max(distance(&commutator(&a[m], &b[k], &v), &expanded));
                }
            }
        }
    }
    let t = start.elapsed();
    let pass = maps < 1e-10 && coeffs < 1e-10 && ortho < 1e-10 && convert < 1e-12 && t < Duration::from_secs(120);
    report(
        "c10",
        "oracle equivalence",
        pass,
        format!("condition maps {maps:.1e}, commutator coefficients {coeffs:.1e}, orthogonality {ortho:.1e}, D->G/Q {convert:.1e}, {t:.2?}"),
    );
}

#[test]
fn c11_sdp_solver() {
    // min x subject to [[x, 1], [1, x]] >= 0 has optimum 1.
    let mut p = SdpProblem::new();
    let b = p.add_block("X", 2);
    p.add_objective([SymEntry::new(b, 0, 0, 0.5), SymEntry::new(b, 1, 1, 0.5)]);
    p.add_constraint([SymEntry::new(b, 0, 1, 0.5)], 1.0);
    p.add_constraint([SymEntry::new(b, 0, 0, 1.0), SymEntry::new(b, 1, 1, -1.0)], 0.0);
    let s = sdp::solve(&p, &SolverConfig::default()).unwrap();
    let analytic = if s.status == Status::Optimal { (s.primal_objective - 1.0).abs() } else { f64::INFINITY };

    let mut eig = 0.0f64;
    for seed in 0..5u64 {
        let mut x = seed.wrapping_add(0x9e37_79b9);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = DMatrix::from_fn(8, 8, |_, _| next());
        let c = (&a + a.transpose()) * 0.5;
        let mut p = SdpProblem::new();
        let b = p.add_block("X", 8);
        p.add_objective((0..8).flat_map(|i| (i..8).map(move |j| (i, j))).map(|(i, j)| SymEntry::new(b, i, j, c[(i, j)])));
        p.add_constraint((0..8).map(|i| SymEntry::new(b, i, i, 1.0)), 1.0);
        let s = sdp::solve(&p, &SolverConfig::default()).unwrap();
        eig = eig.max((s.primal_objective - SymmetricEigen::new(c).eigenvalues.min()).abs());
    }

    let ham = build_hubbard(6, 1.0, 10.0, true).unwrap();
    let sets = [ConditionSet::d_only(), ConditionSet::dqg(), ConditionSet { t1: true, ..ConditionSet::dqg() }, ConditionSet::full()];
    let energies: Vec<f64> = sets
        .iter()
        .map(|c| variational_ground_state(&ham, 6, c, &SolverConfig::default()).unwrap().energy)
        .collect();
    let monotone = energies.windows(2).all(|w| w[1] >= w[0] - 1e-8);
    let bound = energies.iter().all(|&e| e <= E_FCI + 1e-6);
    let pass = analytic < 1e-9 && eig < 1e-8 && monotone && bound;
    report(
        "c11",
        "SDP solver",
        pass,
        format!("2x2 {analytic:.1e}, eigenvalue problems {eig:.1e}, D/DQG/DQGT1/full energies {energies:.6?}"),
    );
}

#[test]
fn c12_lih() {
    let Some(path) = std::env::var_os("RDMGEO_LIH_INTEGRALS") else {
        skip("c12", "LiH", "integrals unavailable (set RDMGEO_LIH_INTEGRALS to an L=12, N=4 integral file)");
        return;
    };
    let mut cfg = ExperimentConfig::new(SystemSpec::Integrals { path: path.into() }, None);
    cfg.artifacts = rdmgeo::report::Artifacts::none();
    let s = run_quiet(&cfg);
    let err = (s.e_exact - -8.967211312701).abs();
    let pass = s.n_orbitals == 12 && s.n_electrons == 4 && err < 1e-7 && s.delta_e.abs() <= 1e-7;
    report("c12", "LiH", pass, format!("E_exact = {:.12} (|err| {err:.1e}), dE = {:.1e}", s.e_exact, s.delta_e));
}
