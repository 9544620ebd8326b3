//! Plain-text RDM files: a `RDM kind L N` header followed by one
//! `i j k l value` line per nonzero full-index entry. `#` starts a comment.

use std::fmt::Write;

use nalgebra::DMatrix;

use crate::algebra::{Rdm, RdmKind};
use crate::error::{Error, Result};

pub fn write_rdm(rdm: &Rdm) -> String {
    let l = rdm.n_orbitals();
    let full = rdm.to_full();
    let mut s = format!("RDM {} {} {}\n", rdm.kind().label(), l, rdm.n_electrons());
    for r in 0..l * l {
        for c in 0..l * l {
            let v = full[(r, c)];
            if v != 0.0 {
                let _ = writeln!(s, "{} {} {} {} {:.17e}", r / l, r % l, c / l, c % l, v);
            }
        }
    }
    s
}

pub fn read_rdm(text: &str) -> Result<Rdm> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let (hl, header) = lines.next().ok_or_else(|| err(0, "empty RDM file"))?;
    let f: Vec<&str> = header.split_whitespace().collect();
    if f.len() != 4 || f[0] != "RDM" {
        return Err(err(hl, "expected `RDM kind L N`"));
    }
    let kind: RdmKind = f[1].parse().map_err(|_| err(hl, "unknown RDM kind"))?;
    let l: usize = f[2].parse().map_err(|_| err(hl, "bad L"))?;
    let n: usize = f[3].parse().map_err(|_| err(hl, "bad N"))?;
    let mut full = DMatrix::zeros(l * l, l * l);
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(err(ln, "expected `i j k l value`"));
        }
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&f[..4]) {
            *slot = tok.parse().map_err(|_| err(ln, "bad index"))?;
            if *slot >= l {
                return Err(err(ln, "index out of range"));
            }
        }
        let v: f64 = f[4].parse().map_err(|_| err(ln, "bad value"))?;
        full[(idx[0] * l + idx[1], idx[2] * l + idx[3])] = v;
    }
    Rdm::from_full(kind, l, n, &full)
}
