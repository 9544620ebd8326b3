#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdmgeo::exact::{compute_rdms, ExactRdms, Wavefunction};
use rdmgeo::fock::{FockSector, FockVector, SpinOrbitalBasis};

/// Normalized random real state of `n` electrons in `l` spin orbitals.
pub fn random_state(l: usize, n: usize, seed: u64) -> Wavefunction {
    let sector = Arc::new(FockSector::new(SpinOrbitalBasis::unstructured(l).unwrap(), n, None).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..sector.dimension()).map(|_| rng.random::<f64>() - 0.5).collect();
    Wavefunction::new(sector, coeffs).unwrap().normalized()
}

pub fn random_rdms(l: usize, n: usize, seed: u64) -> (Wavefunction, ExactRdms) {
    let psi = random_state(l, n, seed);
    let r = compute_rdms(&psi).unwrap();
    (psi, r)
}

pub fn distance(a: &FockVector, b: &FockVector) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.norm()
}
