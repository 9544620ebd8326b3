use std::collections::BTreeMap;

use super::basis::Determinant;

/// One fermionic ladder operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

impl Ladder {
    pub fn orbital(self) -> usize {
        match self {
            Ladder::Create(i) | Ladder::Annihilate(i) => i,
        }
    }

    pub fn is_creation(self) -> bool {
        matches!(self, Ladder::Create(_))
    }

    pub fn adjoint(self) -> Ladder {
        match self {
            Ladder::Create(i) => Ladder::Annihilate(i),
            Ladder::Annihilate(i) => Ladder::Create(i),
        }
    }

    /// Acts on a single determinant; `None` when the result vanishes.
    pub fn apply(self, det: Determinant) -> Option<(Determinant, f64)> {
        match self {
            Ladder::Create(i) => det.create(i),
            Ladder::Annihilate(i) => det.annihilate(i),
        }
    }
}

/// A sparse state in Fock space with deterministic (ordered) iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockVector {
    amps: BTreeMap<Determinant, f64>,
}

impl FockVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis_state(det: Determinant) -> Self {
        let mut v = Self::new();
        v.add(det, 1.0);
        v
    }

    pub fn add(&mut self, det: Determinant, value: f64) {
        *self.amps.entry(det).or_insert(0.0) += value;
    }

    pub fn get(&self, det: Determinant) -> f64 {
        self.amps.get(&det).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Determinant, f64)> + '_ {
        self.amps.iter().map(|(&d, &c)| (d, c))
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn dot(&self, other: &FockVector) -> f64 {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().map(|(d, c)| c * large.get(d)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for c in self.amps.values_mut() {
            *c *= factor;
        }
    }

    pub fn axpy(&mut self, alpha: f64, x: &FockVector) {
        for (d, c) in x.iter() {
            self.add(d, alpha * c);
        }
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }
}

/// Applies the operator product `ops[0] ops[1] ... ops[n-1]` to `psi`; the
/// rightmost operator acts first. Annihilating an empty orbital (or creating
/// into an occupied one) drops that component.
pub fn apply_operator_string(ops: &[Ladder], psi: &FockVector) -> FockVector {
    let mut out = FockVector::new();
    'dets: for (det, coef) in psi.iter() {
        let mut d = det;
        let mut c = coef;
        for op in ops.iter().rev() {
            match op.apply(d) {
                Some((next, sign)) => {
                    d = next;
                    c *= sign;
                }
                None => continue 'dets,
            }
        }
        out.add(d, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Ladder::*;

    fn random_state(l: usize, seed: u64) -> FockVector {
        // Every determinant of up to l orbitals with a deterministic pseudo-random amplitude.
        let mut v = FockVector::new();
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        for mask in 0..(1u64 << l) {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            v.add(Determinant(mask), ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5);
        }
        v
    }

    #[test]
    fn number_operator_keeps_occupied_determinant() {
        let det = Determinant::from_orbitals(&[1, 3]);
        let psi = FockVector::basis_state(det);
        let out = apply_operator_string(&[Create(3), Annihilate(3)], &psi);
        assert_eq!(out.get(det), 1.0);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn canonical_anticommutator() {
        let psi = random_state(4, 3);
        for i in 0..4 {
            for j in 0..4 {
                let a = apply_operator_string(&[Annihilate(i), Create(j)], &psi);
                let b = apply_operator_string(&[Create(j), Annihilate(i)], &psi);
                let mut sum = a.clone();
                sum.axpy(1.0, &b);
                let expected = if i == j { psi.clone() } else { FockVector::new() };
                assert!(sum.sub(&expected).norm() < 1e-14, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn pair_number_operator() {
        let psi = random_state(5, 9);
        for i in 0..5 {
            for j in 0..5 {
                if i == j {
                    continue;
                }
                let out = apply_operator_string(
                    &[Create(i), Create(j), Annihilate(j), Annihilate(i)],
                    &psi,
                );
                for (d, c) in psi.iter() {
                    let occ = (d.is_occupied(i) && d.is_occupied(j)) as u8 as f64;
                    assert!((out.get(d) - occ * c).abs() < 1e-15);
                }
            }
        }
    }
}
