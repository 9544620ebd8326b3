mod common;

use std::sync::Arc;

use common::random_rdms;
use nalgebra::{DMatrix, SymmetricEigen};
use rdmgeo::exact::{assemble_sector, compute_rdms, ground_state, SolverOptions, Wavefunction};
use rdmgeo::fock::{apply_operator_string, build_hubbard, FockSector, FockVector, Ladder, SpinOrbitalBasis};
use rdmgeo::sdp::SolverConfig;
use rdmgeo::vrdm::*;

fn adjoint(word: &[Ladder]) -> Vec<Ladder> {
    word.iter().rev().map(|o| o.adjoint()).collect()
}

/// Condition matrix straight from Fock-space products.
fn oracle(family: Family, l: usize, psi: &FockVector) -> DMatrix<f64> {
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

fn min_eig(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.min()
}

const FAMILIES: [Family; 6] = [Family::D, Family::Q, Family::G, Family::T1, Family::T2, Family::T2p];

#[test]
fn condition_maps_match_fock_space_products() {
    for (l, n, seed) in [(4, 2, 3), (6, 3, 4), (6, 4, 5)] {
        let (psi, r) = random_rdms(l, n, seed);
        let v = psi.to_fock_vector();
        for family in FAMILIES {
            let got = condition_matrix(family, &r.d, &r.gamma).unwrap();
            let want = oracle(family, l, &v);
            assert!((&got - &want).amax() < 1e-10, "{} L={l} N={n}", family.name());
            assert!(min_eig(&got) > -1e-10, "{} not PSD", family.name());
        }
    }
}

#[test]
fn t_maps_are_psd_on_a_determinant() {
    let sector = Arc::new(FockSector::new(SpinOrbitalBasis::unstructured(4).unwrap(), 2, None).unwrap());
    let mut c = vec![0.0; sector.dimension()];
    c[2] = 1.0;
    let r = compute_rdms(&Wavefunction::new(sector, c).unwrap()).unwrap();
    let (t1, t2, t2p) = t_condition_maps(&r.d, &r.gamma).unwrap();
    for m in [t1, t2, t2p] {
        assert!((&m - m.transpose()).amax() == 0.0);
        assert!(min_eig(&m) > -1e-12);
    }
}

#[test]
fn t_maps_reject_mismatched_gamma() {
    let (_, r) = random_rdms(4, 2, 1);
    assert!(t_condition_maps(&r.d, &DMatrix::zeros(3, 3)).is_err());
    assert!(condition_matrix(Family::T1, &r.g, &r.gamma).is_err());
}

fn hubbard_exact(sites: usize, u: f64, n: usize) -> (rdmgeo::fock::TwoBodyHamiltonian, f64, rdmgeo::algebra::Rdm) {
    let ham = build_hubbard(sites, 1.0, u, true).unwrap();
    let gs = ground_state(&assemble_sector(&ham, n, Some(0)).unwrap(), &SolverOptions::default()).unwrap();
    let r = compute_rdms(&gs.wavefunction).unwrap();
    (ham, gs.energy, r.d)
}

#[test]
fn exact_d_is_feasible_with_and_without_symmetry() {
    let (ham, e, d) = hubbard_exact(4, 4.0, 4);
    for symmetry in [true, false] {
        let asm = assemble(&ham, 4, &ConditionSet { symmetry, ..ConditionSet::full() }).unwrap();
        let f = feasibility(&asm, &d).unwrap();
        assert!((f.energy - e).abs() < 1e-10);
        assert!(f.min_eigenvalue > -1e-9);
        assert!(f.structural_residual < 1e-9);
    }
}

#[test]
fn symmetry_blocking_splits_blocks_without_changing_the_optimum() {
    let ham = build_hubbard(4, 1.0, 4.0, true).unwrap();
    let cfg = SolverConfig::default();
    let on = variational_ground_state(&ham, 4, &ConditionSet::dqg(), &cfg).unwrap();
    let off = variational_ground_state(&ham, 4, &ConditionSet { symmetry: false, ..ConditionSet::dqg() }, &cfg).unwrap();
    assert!(on.n_blocks > off.n_blocks);
    assert!(on.n_variables < off.n_variables);
    assert!((on.energy - off.energy).abs() < 1e-7);
}

#[test]
fn relaxations_are_ordered_and_bound_the_exact_energy() {
    let (ham, e, _) = hubbard_exact(4, 4.0, 4);
    let cfg = SolverConfig::default();
    let sets = [
        ConditionSet::d_only(),
        ConditionSet::dqg(),
        ConditionSet { t1: true, ..ConditionSet::dqg() },
        ConditionSet { t1: true, t2: true, ..ConditionSet::dqg() },
        ConditionSet::full(),
    ];
    let mut last = f64::NEG_INFINITY;
    for conds in sets {
        let r = variational_ground_state(&ham, 4, &conds, &cfg).unwrap();
        assert!(r.energy >= last - 1e-8, "{}", conds.label());
        assert!(r.energy <= e + 1e-6, "{}", conds.label());
        assert!(r.min_condition_eigenvalue > -1e-9);
        last = r.energy;
    }
}

#[test]
fn noninteracting_ring_is_exact() {
    let ham = build_hubbard(6, 1.0, 0.0, true).unwrap();
    let r = variational_ground_state(&ham, 6, &ConditionSet::dqg(), &SolverConfig::default()).unwrap();
    assert!((r.energy + 8.0).abs() < 1e-7, "{}", r.energy);
}

#[test]
fn variational_rdms_are_consistent() {
    let ham = build_hubbard(4, 1.0, 4.0, true).unwrap();
    let r = variational_ground_state(&ham, 4, &ConditionSet::full(), &SolverConfig::default()).unwrap();
    assert!((r.d.full_trace() - 12.0).abs() < 1e-9);
    assert!((r.gamma.trace() - 4.0).abs() < 1e-9);
    let k = rdmgeo::fock::reduced_hamiltonian(&ham, 4).unwrap();
    assert!((k.component_mul(&r.d.to_full()).sum() - r.energy).abs() < 1e-8);
    assert!(min_eig(r.q.matrix()) > -1e-8 && min_eig(r.g.matrix()) > -1e-8);
}

#[test]
fn bad_electron_counts_are_rejected() {
    let ham = build_hubbard(3, 1.0, 1.0, true).unwrap();
    assert!(assemble(&ham, 1, &ConditionSet::full()).is_err());
    assert!(assemble(&ham, 5, &ConditionSet::full()).is_err());
}

#[test]
fn rdm_files_round_trip() {
    let (_, r) = random_rdms(6, 3, 8);
    for rdm in [&r.d, &r.g, &r.q] {
        let back = read_rdm(&write_rdm(rdm)).unwrap();
        assert_eq!(back.kind(), rdm.kind());
        assert_eq!(back.n_electrons(), 3);
        assert_eq!(back.matrix(), rdm.matrix());
    }
}

#[test]
fn malformed_rdm_files_are_rejected() {
    assert!(read_rdm("").is_err());
    assert!(read_rdm("RDM X 4 2\n").is_err());
    assert!(read_rdm("RDM D 4 2\n0 1 0 9 1.0\n").is_err());
    assert!(read_rdm("RDM D 4 2\n0 1 0 1\n").is_err());
    assert!(read_rdm("# comment\nRDM D 4 2\n0 1 0 1 1.0 # trailing\n").is_ok());
}
