//! Plain-text problem format:
//!
//! ```text
//! SDP <constraints> <blocks>
//! BLOCK <index> <dim> [name]
//! RHS <b_1> ... <b_m>
//! <row> <block> <i> <j> <value>
//! ```
//!
//! Row 0 holds the objective, rows `1..=m` the constraints; blocks and matrix
//! indices are 0-based and each entry gives one triangle of a symmetric
//! matrix. `#` starts a comment.

use std::fmt::Write;

use super::problem::{SdpProblem, SymEntry};
use crate::error::{Error, Result};

pub fn write_problem(p: &SdpProblem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "SDP {} {}", p.n_constraints(), p.blocks().len());
    for (k, b) in p.blocks().iter().enumerate() {
        let _ = writeln!(s, "BLOCK {k} {} {}", b.dim, b.name);
    }
    s.push_str("RHS");
    for v in p.rhs() {
        let _ = write!(s, " {v:e}");
    }
    s.push('\n');
    let mut entry = |row: usize, e: &SymEntry| {
        let _ = writeln!(s, "{row} {} {} {} {:e}", e.block, e.i, e.j, e.value);
    };
    for e in p.objective() {
        entry(0, e);
    }
    for (r, row) in p.constraints().iter().enumerate() {
        for e in row {
            entry(r + 1, e);
        }
    }
    s
}

pub fn read_problem(text: &str) -> Result<SdpProblem> {
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty problem file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "SDP" {
        return Err(perr(ln, "expected `SDP <constraints> <blocks>`"));
    }
    let m: usize = h[1].parse().map_err(|_| perr(ln, "bad constraint count"))?;
    let nb: usize = h[2].parse().map_err(|_| perr(ln, "bad block count"))?;
    let mut p = SdpProblem::new();
    for k in 0..nb {
        let (ln, line) = lines.next().ok_or_else(|| perr(ln, "missing BLOCK line"))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 3 || f[0] != "BLOCK" || f[1].parse::<usize>().ok() != Some(k) {
            return Err(perr(ln, &format!("expected `BLOCK {k} <dim> [name]`")));
        }
        let dim: usize = f[2].parse().map_err(|_| perr(ln, "bad block dimension"))?;
        p.add_block(f[3..].join(" "), dim);
    }
    let (ln, line) = lines.next().ok_or_else(|| perr(ln, "missing RHS line"))?;
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.first() != Some(&"RHS") || f.len() != m + 1 {
        return Err(perr(ln, &format!("expected `RHS` followed by {m} values")));
    }
    let rhs: Vec<f64> = f[1..].iter().map(|v| v.parse().map_err(|_| perr(ln, "bad right-hand side"))).collect::<Result<_>>()?;
    let mut rows: Vec<Vec<SymEntry>> = vec![Vec::new(); m + 1];
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(perr(ln, "expected `row block i j value`"));
        }
        let idx = |k: usize| f[k].parse::<usize>().map_err(|_| perr(ln, "bad index"));
        let (row, block, i, j) = (idx(0)?, idx(1)?, idx(2)?, idx(3)?);
        let value: f64 = f[4].parse().map_err(|_| perr(ln, "bad value"))?;
        if row > m {
            return Err(perr(ln, &format!("row {row} exceeds the {m} declared constraints")));
        }
        rows[row].push(SymEntry::new(block, i, j, value));
    }
    let mut rows = rows.into_iter();
    p.add_objective(rows.next().unwrap_or_default());
    for (row, b) in rows.zip(rhs) {
        p.add_constraint(row, b);
    }
    p.validate()?;
    Ok(p)
}
