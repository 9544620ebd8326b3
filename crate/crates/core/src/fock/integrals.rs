//! Plain-text spin-orbital integral files.
//!
//! ```text
//! # comment
//! L 4 N 2
//! 1B i k value        # adds value * a_i^+ a_k
//! 2B i j k l value    # adds value * a_i^+ a_j^+ a_l a_k
//! ```
//!
//! Indices are 0-based spin-orbital indices. Entries accumulate and are taken
//! literally, so a Hermitian operator must list both `(i,k)` and `(k,i)`
//! one-body terms. Two-body terms are antisymmetrized on ingestion. An even
//! `L` is read as an interleaved spin basis (`2*spatial + spin`).

use std::fmt::Write;

use nalgebra::DMatrix;

use super::basis::SpinOrbitalBasis;
use super::hamiltonian::{ModelInfo, TwoBodyHamiltonian};
use crate::error::{Error, Result};

/// Parses an integral file; returns the Hamiltonian and the electron count.
pub fn load_integrals(text: &str) -> Result<(TwoBodyHamiltonian, usize)> {
    let mut header: Option<(usize, usize)> = None;
    let mut h = DMatrix::zeros(0, 0);
    let mut c = DMatrix::zeros(0, 0);
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        let Some((l, _)) = header else {
            if fields.len() != 4 || fields[0] != "L" || fields[2] != "N" {
                return Err(perr(format!("expected header `L <int> N <int>`, got `{line}`")));
            }
            let l: usize = fields[1].parse().map_err(|_| perr(format!("bad L `{}`", fields[1])))?;
            let n: usize = fields[3].parse().map_err(|_| perr(format!("bad N `{}`", fields[3])))?;
            if !(2..=SpinOrbitalBasis::MAX_ORBITALS).contains(&l) || n > l {
                return Err(perr(format!("unsupported L={l}, N={n}")));
            }
            header = Some((l, n));
            h = DMatrix::zeros(l, l);
            c = DMatrix::zeros(l * l, l * l);
            continue;
        };
        let index = |s: &str| -> Result<usize> {
            let i: usize = s.parse().map_err(|_| perr(format!("bad index `{s}`")))?;
            if i >= l {
                return Err(perr(format!("index {i} out of range for L={l}")));
            }
            Ok(i)
        };
        let value = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| perr(format!("bad value `{s}`")))
        };
        match fields[0] {
            "1B" if fields.len() == 4 => {
                let (i, k) = (index(fields[1])?, index(fields[2])?);
                h[(i, k)] += value(fields[3])?;
            }
            "2B" if fields.len() == 6 => {
                let (i, j) = (index(fields[1])?, index(fields[2])?);
                let (k, m) = (index(fields[3])?, index(fields[4])?);
                c[(i * l + j, k * l + m)] += value(fields[5])?;
            }
            _ => return Err(perr(format!("unrecognized line `{line}`"))),
        }
    }
    let (l, n) = header.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    let basis = if l % 2 == 0 {
        SpinOrbitalBasis::spin_structured(l / 2)?
    } else {
        SpinOrbitalBasis::unstructured(l)?
    };
    let info = ModelInfo { name: "integrals".into(), ..Default::default() };
    let ham = TwoBodyHamiltonian::from_operator_coefficients(basis, h, &c, info)?;
    Ok((ham, n))
}

/// Serializes a Hamiltonian so that `load_integrals` reproduces it.
pub fn write_integrals(ham: &TwoBodyHamiltonian, n: usize) -> String {
    let l = ham.n_orbitals();
    let mut out = String::new();
    let _ = writeln!(out, "# model: {}", ham.info().name);
    let _ = writeln!(out, "L {l} N {n}");
    let h = ham.one_body();
    for i in 0..l {
        for k in 0..l {
            if h[(i, k)] != 0.0 {
                let _ = writeln!(out, "1B {i} {k} {}", h[(i, k)]);
            }
        }
    }
    for i in 0..l {
        for j in i + 1..l {
            for k in 0..l {
                for m in k + 1..l {
                    let v = ham.v2(i, j, k, m);
                    if v != 0.0 {
                        let _ = writeln!(out, "2B {i} {j} {k} {m} {v}");
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_hubbard;

    #[test]
    fn hubbard_round_trip() {
        let ham = build_hubbard(6, 1.0, 10.0, true).unwrap();
        let text = write_integrals(&ham, 6);
        let (back, n) = load_integrals(&text).unwrap();
        assert_eq!(n, 6);
        assert_eq!(back.one_body(), ham.one_body());
        assert!((back.two_body() - ham.two_body()).amax() < 1e-15);
    }

    #[test]
    fn empty_body_is_zero_hamiltonian() {
        let (ham, n) = load_integrals("# nothing\nL 4 N 2\n\n").unwrap();
        assert_eq!(n, 2);
        assert_eq!(ham.one_body().amax(), 0.0);
        assert_eq!(ham.two_body().amax(), 0.0);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        match load_integrals("L 4 N 2\n1B 0 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match load_integrals("# c\nX 4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load_integrals("L 4 N 2\n1B 0 7 1.0\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn non_hermitian_rejected() {
        let err = load_integrals("L 4 N 2\n1B 0 1 0.5\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(load_integrals("L 4 N 2\n1B 0 1 0.5\n1B 1 0 0.5\n").is_ok());
    }
}
