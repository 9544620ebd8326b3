//! Normal ordering of fermionic words and their expectation values in terms
//! of the 1-RDM and the 2-RDM.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::Ladder;

/// Expectation-value building blocks. `D` holds canonical pairs
/// `(i, j), (k, l)` with `i < j`, `k < l` and stands for `<a_i^+ a_j^+ a_l a_k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    One,
    Gamma(usize, usize),
    D(usize, usize, usize, usize),
}

/// A linear combination of atoms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expr {
    pub terms: BTreeMap<Atom, f64>,
}

impl Expr {
    pub fn add(&mut self, atom: Atom, c: f64) {
        *self.terms.entry(atom).or_insert(0.0) += c;
    }

    pub fn add_expr(&mut self, other: &Expr, scale: f64) {
        for (&a, &c) in &other.terms {
            self.add(a, scale * c);
        }
    }

    pub fn prune(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.abs() > tol);
        self
    }

    pub fn evaluate(&self, gamma: impl Fn(usize, usize) -> f64, d: impl Fn(usize, usize, usize, usize) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                c * match *a {
                    Atom::One => 1.0,
                    Atom::Gamma(i, k) => gamma(i, k),
                    Atom::D(i, j, k, l) => d(i, j, k, l),
                }
            })
            .sum()
    }
}

pub fn adjoint(word: &[Ladder]) -> Vec<Ladder> {
    word.iter().rev().map(|o| o.adjoint()).collect()
}

/// Sorts in place, returning the permutation sign, or `None` on a repeated
/// index (the product then vanishes).
fn sort_with_sign(v: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for a in 1..v.len() {
        let mut b = a;
        while b > 0 && v[b - 1] > v[b] {
            v.swap(b - 1, b);
            sign = -sign;
            b -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Normal-ordered form `sum c (a^+ ... a^+)(a ... a)` with creators and
/// annihilators each in ascending index order.
pub fn normal_order(word: &[Ladder], coef: f64) -> BTreeMap<(Vec<usize>, Vec<usize>), f64> {
    let mut out: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    let mut stack = vec![(coef, word.to_vec())];
    while let Some((c, w)) = stack.pop() {
        let swap = (0..w.len().saturating_sub(1)).find(|&p| !w[p].is_creation() && w[p + 1].is_creation());
        match swap {
            Some(p) => {
                // a_x a_y^+ = delta_xy - a_y^+ a_x
                if w[p].orbital() == w[p + 1].orbital() {
                    let mut contracted = w.clone();
                    contracted.drain(p..p + 2);
                    stack.push((c, contracted));
                }
                let mut swapped = w;
                swapped.swap(p, p + 1);
                stack.push((-c, swapped));
            }
            None => {
                let mut cre: Vec<usize> = w.iter().filter(|o| o.is_creation()).map(|o| o.orbital()).collect();
                let mut ann: Vec<usize> = w.iter().filter(|o| !o.is_creation()).map(|o| o.orbital()).collect();
                let (Some(s1), Some(s2)) = (sort_with_sign(&mut cre), sort_with_sign(&mut ann)) else { continue };
                *out.entry((cre, ann)).or_insert(0.0) += c * s1 * s2;
            }
        }
    }
    out.retain(|_, c| *c != 0.0);
    out
}

/// Expectation value of a sum of words on a fixed-particle-number state.
/// Terms that change the particle number vanish; three-body and higher
/// terms must cancel.
pub fn expectation(words: &[(f64, Vec<Ladder>)]) -> Result<Expr> {
    let mut total: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
    for (c, w) in words {
        for (k, v) in normal_order(w, *c) {
            *total.entry(k).or_insert(0.0) += v;
        }
    }
    let mut e = Expr::default();
    for ((cre, ann), c) in total {
        if c.abs() < 1e-13 || cre.len() != ann.len() {
            continue;
        }
        match cre.len() {
            0 => e.add(Atom::One, c),
            1 => e.add(Atom::Gamma(cre[0], ann[0]), c),
            // a_i^+ a_j^+ a_p a_q = <.. a_l a_k> with l = p, k = q
            2 => e.add(Atom::D(cre[0], cre[1], ann[0], ann[1]), -c),
            _ => return Err(Error::Contract(format!("a {}-body term survives in a reduced condition", cre.len()))),
        }
    }
    Ok(e)
}
