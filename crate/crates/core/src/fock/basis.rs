use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Twice the spin projection: +1 for up, -1 for down.
    pub fn sz2(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

/// An ordered set of `L` spin orbitals.
///
/// When spin-structured, orbital `i` is spatial orbital `i / 2` with spin
/// `i % 2` (0 = up, 1 = down).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinOrbitalBasis {
    len: usize,
    spin_structured: bool,
}

impl SpinOrbitalBasis {
    pub const MAX_ORBITALS: usize = 64;

    pub fn spin_structured(spatial_count: usize) -> Result<Self> {
        let len = 2 * spatial_count;
        if spatial_count == 0 || len > Self::MAX_ORBITALS {
            return Err(Error::InvalidModel(format!(
                "spatial orbital count {spatial_count} out of range"
            )));
        }
        Ok(Self { len, spin_structured: true })
    }

    pub fn unstructured(len: usize) -> Result<Self> {
        if !(2..=Self::MAX_ORBITALS).contains(&len) {
            return Err(Error::InvalidModel(format!("orbital count {len} out of range")));
        }
        Ok(Self { len, spin_structured: false })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_spin_structured(&self) -> bool {
        self.spin_structured
    }

    pub fn spatial_count(&self) -> Option<usize> {
        self.spin_structured.then_some(self.len / 2)
    }

    pub fn spin_label(&self, i: usize) -> Option<Spin> {
        if !self.spin_structured || i >= self.len {
            return None;
        }
        Some(if i.is_multiple_of(2) { Spin::Up } else { Spin::Down })
    }

    pub fn orbital(spatial: usize, spin: Spin) -> usize {
        2 * spatial + if spin == Spin::Up { 0 } else { 1 }
    }
}

/// Occupation-number determinant stored as a bitmask; bit `i` set means
/// spin orbital `i` is occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Determinant(pub u64);

impl Determinant {
    pub fn from_orbitals(orbitals: &[usize]) -> Self {
        Determinant(orbitals.iter().fold(0u64, |m, &i| m | (1u64 << i)))
    }

    pub fn is_occupied(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn orbitals(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// (-1)^(number of occupied orbitals with index below `i`).
    pub fn sign_below(self, i: usize) -> f64 {
        let below = self.0 & ((1u64 << i) - 1);
        if below.count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn create(self, i: usize) -> Option<(Determinant, f64)> {
        if self.is_occupied(i) {
            return None;
        }
        Some((Determinant(self.0 | (1u64 << i)), self.sign_below(i)))
    }

    pub fn annihilate(self, i: usize) -> Option<(Determinant, f64)> {
        if !self.is_occupied(i) {
            return None;
        }
        Some((Determinant(self.0 & !(1u64 << i)), self.sign_below(i)))
    }

    /// Twice the total Sz for the interleaved spin ordering.
    pub fn sz2(self) -> i32 {
        let up = (self.0 & 0x5555_5555_5555_5555).count_ones() as i32;
        let down = (self.0 & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i32;
        up - down
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The ordered determinant basis of a fixed particle number (and optionally
/// fixed Sz) subspace.
#[derive(Debug, Clone)]
pub struct FockSector {
    basis: SpinOrbitalBasis,
    n: usize,
    sz2: Option<i32>,
    dets: Vec<Determinant>,
    index: HashMap<Determinant, usize>,
}

impl FockSector {
    /// `sz2` is twice the spin projection and requires a spin-structured basis.
    pub fn new(basis: SpinOrbitalBasis, n: usize, sz2: Option<i32>) -> Result<Self> {
        let l = basis.len();
        if n > l {
            return Err(Error::EmptySector(format!("{n} electrons in {l} orbitals")));
        }
        if sz2.is_some() && !basis.is_spin_structured() {
            return Err(Error::InvalidModel(
                "Sz sector requested on a basis without spin labels".into(),
            ));
        }
        let mut dets = Vec::new();
        enumerate_combinations(l, n, |mask| {
            let det = Determinant(mask);
            if sz2.is_none_or(|s| det.sz2() == s) {
                dets.push(det);
            }
        });
        if dets.is_empty() {
            return Err(Error::EmptySector(format!(
                "no determinants with N={n}, 2Sz={sz2:?} in {l} orbitals"
            )));
        }
        dets.sort();
        let index = dets.iter().enumerate().map(|(k, &d)| (d, k)).collect();
        Ok(Self { basis, n, sz2, dets, index })
    }

    pub fn basis(&self) -> SpinOrbitalBasis {
        self.basis
    }

    pub fn n_orbitals(&self) -> usize {
        self.basis.len()
    }

    pub fn n_electrons(&self) -> usize {
        self.n
    }

    pub fn sz2(&self) -> Option<i32> {
        self.sz2
    }

    pub fn dimension(&self) -> usize {
        self.dets.len()
    }

    pub fn determinants(&self) -> &[Determinant] {
        &self.dets
    }

    pub fn position(&self, det: Determinant) -> Option<usize> {
        self.index.get(&det).copied()
    }
}

fn enumerate_combinations(l: usize, n: usize, mut f: impl FnMut(u64)) {
    if n == 0 {
        f(0);
        return;
    }
    // Gosper's hack over l-bit masks with n bits set.
    let mut mask: u64 = (1u64 << n) - 1;
    let limit: u64 = if l == 64 { u64::MAX } else { 1u64 << l };
    while mask < limit {
        f(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        if r == 0 {
            break;
        }
        mask = (((r ^ mask) >> 2) / c) | r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_dimensions() {
        let basis = SpinOrbitalBasis::spin_structured(6).unwrap();
        assert_eq!(FockSector::new(basis, 6, None).unwrap().dimension(), binomial(12, 6));
        assert_eq!(FockSector::new(basis, 6, Some(0)).unwrap().dimension(), 400);
        assert_eq!(FockSector::new(basis, 5, Some(1)).unwrap().dimension(), 15 * 20);
    }

    #[test]
    fn signs_count_lower_occupied() {
        let det = Determinant::from_orbitals(&[0, 2, 5]);
        assert_eq!(det.sign_below(0), 1.0);
        assert_eq!(det.sign_below(3), 1.0);
        assert_eq!(det.sign_below(4), 1.0);
        assert_eq!(det.sign_below(6), -1.0);
        let (d, s) = det.annihilate(2).unwrap();
        assert_eq!(d, Determinant::from_orbitals(&[0, 5]));
        assert_eq!(s, -1.0);
        assert!(det.create(2).is_none());
        assert!(det.annihilate(1).is_none());
    }

    #[test]
    fn sz_of_interleaved_orbitals() {
        assert_eq!(Determinant::from_orbitals(&[0, 2, 3]).sz2(), 1);
        assert_eq!(Determinant::from_orbitals(&[1, 3]).sz2(), -2);
    }

    #[test]
    fn sz_requires_spin_labels() {
        let basis = SpinOrbitalBasis::unstructured(4).unwrap();
        assert!(FockSector::new(basis, 2, Some(0)).is_err());
    }
}
