//! Orbital bases in which Sz and lattice momentum are additive labels, so the
//! variational problem splits into independent blocks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::TwoBodyHamiltonian;

/// Additive quantum numbers of a ladder-operator product: twice Sz and
/// crystal momentum modulo `modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Charge {
    pub sz2: i32,
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct SymmetryAdaptation {
    /// Column `p` holds the site-basis amplitudes of the adapted orbital `p`
    /// (`c_p^+ = sum_x U_xp a_x^+`). `None` means the identity.
    unitary: Option<DMatrix<Complex64>>,
    sz2: Vec<i32>,
    momentum: Vec<usize>,
    modulus: usize,
}

impl SymmetryAdaptation {
    pub fn trivial(l: usize) -> Self {
        Self { unitary: None, sz2: vec![0; l], momentum: vec![0; l], modulus: 1 }
    }

    pub fn n_orbitals(&self) -> usize {
        self.sz2.len()
    }

    pub fn uses_momentum(&self) -> bool {
        self.modulus > 1
    }

    pub fn uses_sz(&self) -> bool {
        self.sz2.iter().any(|&s| s != 0)
    }

    /// Label of `a_p^+`; `a_p` carries the negative.
    pub fn orbital_charge(&self, p: usize) -> Charge {
        Charge { sz2: self.sz2[p], k: self.momentum[p] }
    }

    pub fn combine(&self, parts: &[(usize, bool)]) -> Charge {
        let mut sz2 = 0;
        let mut k = 0usize;
        let m = self.modulus;
        for &(p, creation) in parts {
            if creation {
                sz2 += self.sz2[p];
                k = (k + self.momentum[p]) % m;
            } else {
                sz2 -= self.sz2[p];
                k = (k + m - self.momentum[p] % m) % m;
            }
        }
        Charge { sz2, k }
    }

    fn pair_transform(&self) -> Option<DMatrix<Complex64>> {
        self.unitary.as_ref().map(|u| u.kronecker(u))
    }

    /// Full-index D (or any pair matrix) from the site basis to the adapted
    /// basis. Fails if the result is not real.
    pub fn to_adapted(&self, full_site: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let Some(w) = self.pair_transform() else { return Ok(full_site.clone()) };
        let d = full_site.map(|v| Complex64::new(v, 0.0));
        let t = w.transpose() * d * w.map(|c| c.conj());
        split_real(&t, 1e-8)
    }

    /// Full-index pair matrix from the adapted basis back to the site basis,
    /// with the norm of the discarded imaginary part.
    pub fn to_site(&self, full_adapted: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
        let Some(w) = self.pair_transform() else { return (full_adapted.clone(), 0.0) };
        let d = full_adapted.map(|v| Complex64::new(v, 0.0));
        let t = w.map(|c| c.conj()) * d * w.transpose();
        (t.map(|c| c.re), t.map(|c| c.im).norm())
    }

    /// One-body matrix (expectation convention) back to the site basis.
    pub fn one_body_to_site(&self, gamma: &DMatrix<f64>) -> DMatrix<f64> {
        let Some(u) = &self.unitary else { return gamma.clone() };
        let g = gamma.map(|v| Complex64::new(v, 0.0));
        (u.map(|c| c.conj()) * g * u.transpose()).map(|c| c.re)
    }
}

fn split_real(m: &DMatrix<Complex64>, tol: f64) -> Result<DMatrix<f64>> {
    let imag = m.map(|c| c.im).amax();
    if imag > tol * m.map(|c| c.norm()).amax().max(1.0) {
        return Err(Error::Validation(format!("transformed matrix has imaginary part {imag:e}")));
    }
    Ok(m.map(|c| c.re))
}

fn conserved(ham: &TwoBodyHamiltonian, charge: impl Fn(&[(usize, bool)]) -> bool) -> bool {
    let l = ham.n_orbitals();
    let h = ham.one_body();
    for i in 0..l {
        for k in 0..l {
            if h[(i, k)].abs() > 1e-12 && !charge(&[(i, true), (k, false)]) {
                return false;
            }
        }
    }
    let v = ham.two_body();
    for r in 0..l * l {
        for c in 0..l * l {
            if v[(r, c)].abs() > 1e-12 && !charge(&[(r / l, true), (r % l, true), (c / l, false), (c % l, false)]) {
                return false;
            }
        }
    }
    true
}

/// Chooses the adapted basis for `ham` and returns it with the Hamiltonian
/// rewritten in that basis. Sz labels are used when the basis is
/// spin-structured and Sz is conserved; Bloch orbitals are used for
/// translation-invariant rings.
pub fn adapt(ham: &TwoBodyHamiltonian, enabled: bool) -> Result<(SymmetryAdaptation, TwoBodyHamiltonian)> {
    let l = ham.n_orbitals();
    let basis = ham.basis();
    if !enabled || !basis.is_spin_structured() || !ham.conserves_sz() {
        return Ok((SymmetryAdaptation::trivial(l), ham.clone()));
    }
    let sz2: Vec<i32> = (0..l).map(|p| basis.spin_label(p).map(|s| s.sz2()).unwrap_or(0)).collect();
    let sz_only = SymmetryAdaptation { unitary: None, sz2: sz2.clone(), momentum: vec![0; l], modulus: 1 };
    let Some(sites) = ham.info().ring_sites.filter(|&n| n >= 3 && 2 * n == l) else {
        return Ok((sz_only, ham.clone()));
    };
    // c_{k s}^+ = n^{-1/2} sum_x exp(2 pi i k x / n) a_{x s}^+
    let norm = 1.0 / (sites as f64).sqrt();
    let u = DMatrix::from_fn(l, l, |x, p| {
        if x % 2 != p % 2 {
            return Complex64::new(0.0, 0.0);
        }
        let (site, k) = (x / 2, p / 2);
        Complex64::from_polar(norm, 2.0 * PI * (k * site) as f64 / sites as f64)
    });
    let to_c = |m: &DMatrix<f64>| m.map(|v| Complex64::new(v, 0.0));
    let hk = u.adjoint() * to_c(ham.one_body()) * &u;
    let w = u.kronecker(&u);
    let vk = w.adjoint() * to_c(ham.two_body()) * &w;
    let (Ok(hk), Ok(vk)) = (split_real(&hk, 1e-10), split_real(&vk, 1e-10)) else {
        return Ok((sz_only, ham.clone()));
    };
    let clean = |m: DMatrix<f64>| m.map(|v| if v.abs() < 1e-13 { 0.0 } else { v });
    let (hk, vk) = (clean(hk), clean(vk));
    let hk = (&hk + hk.transpose()) * 0.5;
    let vk = (&vk + vk.transpose()) * 0.5;
    let momentum: Vec<usize> = (0..l).map(|p| p / 2).collect();
    let adapted = SymmetryAdaptation { unitary: Some(u), sz2, momentum, modulus: sites };
    let mut info = ham.info().clone();
    info.ring_sites = None;
    let hk_ham = TwoBodyHamiltonian::new(basis, hk, vk, info)?;
    let label_ok = |parts: &[(usize, bool)]| adapted.combine(parts) == Charge { sz2: 0, k: 0 };
    if !conserved(&hk_ham, label_ok) {
        return Ok((sz_only, ham.clone()));
    }
    Ok((adapted, hk_ham))
}
