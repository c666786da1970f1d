//! Plain-text density-matrix dumps.
//!
//! ```text
//! dim 2
//! 5.0000000000000000e-1+0.0000000000000000e0j 0.0000000000000000e0+0.0000000000000000e0j
//! 0.0000000000000000e0+0.0000000000000000e0j 5.0000000000000000e-1+0.0000000000000000e0j
//! ```
//!
//! Entries are row-major with 17 significant digits.

use super::density::DensityMatrix;
use super::linalg::CMat;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write;

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}j", z.re, sign, z.im.abs())
}

pub fn parse_complex(token: &str) -> Option<Complex64> {
    let body = token.strip_suffix('j')?;
    // split at the sign that separates real and imaginary parts: the last
    // '+'/'-' not following an exponent marker and not at position 0
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}

pub fn to_dump(rho: &DensityMatrix) -> String {
    let dim = rho.dim();
    let mut out = format!("dim {dim}\n");
    for r in 0..dim {
        let row: Vec<String> = (0..dim).map(|c| format_complex(rho.get(r, c))).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn from_dump(text: &str) -> Result<DensityMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty dump".into() })?;
    let dim: usize = header
        .trim()
        .strip_prefix("dim ")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| Error::Parse { line: 1, message: format!("expected `dim N`, found `{header}`") })?;
    let mut data = CMat::zeros(dim, dim);
    let mut rows = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if rows == dim {
            return Err(Error::Parse { line: lineno, message: "too many rows".into() });
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != dim {
            return Err(Error::Parse { line: lineno, message: format!("expected {dim} entries, found {}", tokens.len()) });
        }
        for (c, tok) in tokens.iter().enumerate() {
            data[(rows, c)] = parse_complex(tok)
                .ok_or_else(|| Error::Parse { line: lineno, message: format!("bad complex entry `{tok}`") })?;
        }
        rows += 1;
    }
    if rows != dim {
        return Err(Error::Parse { line: rows + 2, message: format!("expected {dim} rows, found {rows}") });
    }
    DensityMatrix::from_matrix(data)
}
