/// Number of ordered pairs `i < j` over `l` orbitals.
pub fn pair_count(l: usize) -> usize {
    l * l.saturating_sub(1) / 2
}

/// Position of the pair `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_index(i: usize, j: usize, l: usize) -> usize {
    debug_assert!(i < j && j < l);
    i * (2 * l - i - 1) / 2 + (j - i - 1)
}

pub fn pair_list(l: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(l));
    for i in 0..l {
        for j in i + 1..l {
            out.push((i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_matches_enumeration() {
        for l in 2..9 {
            let pairs = pair_list(l);
            assert_eq!(pairs.len(), pair_count(l));
            for (p, &(i, j)) in pairs.iter().enumerate() {
                assert_eq!(pair_index(i, j, l), p);
            }
        }
    }
}
