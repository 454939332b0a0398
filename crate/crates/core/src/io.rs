//! CSV matrices, label files and JSON matrix documents.
//!
//! CSV: one row per line, comma separated. Entries are real numbers or
//! complex tokens such as `1.5-2j` or `3j`. Blank lines are skipped.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parses `re`, `imj` or `re±imj`.
pub fn parse_complex(token: &str) -> Result<C64> {
    let t = token.trim();
    let bad = || parse_err(format!("cannot parse {t:?} as a number"));
    let Some(body) = t.strip_suffix('j') else {
        return t
            .parse::<f64>()
            .map(|re| C64::new(re, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[i..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// Shortest round-trip text for an entry (scientific notation for very
/// small or large magnitudes); plain real when the imaginary part is zero.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.im < 0.0 {
        format!("{:?}-{:?}j", z.re, -z.im)
    } else {
        format!("{:?}+{:?}j", z.re, z.im)
    }
}

pub fn parse_csv(text: &str) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| parse_err(format!("line {}: {e}", i + 1)))
        })
        .collect::<Result<_>>()?;
    let cols = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| parse_err("empty matrix"))?;
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(parse_err(format!(
            "row {} has {} entries, expected {cols}",
            i + 1,
            rows[i].len()
        )));
    }
    let n = rows.len();
    ComplexMatrix::from_vec(n, cols, rows.into_iter().flatten().collect())
}

pub fn to_csv(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let line: Vec<String> = m.row(r).iter().map(|&z| format_complex(z)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn read_csv(path: &Path) -> Result<ComplexMatrix> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn write_csv(path: &Path, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, to_csv(m))?;
    Ok(())
}

/// One integer label per line.
pub fn parse_labels(text: &str) -> Result<Vec<i64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<i64>()
                .map_err(|_| parse_err(format!("bad label {l:?}")))
        })
        .collect()
}

/// Responses as a single CSV row or column of real values.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let m = parse_csv(text)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(parse_err("expected a single row or column"));
    }
    m.as_slice()
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                Ok(z.re)
            } else {
                Err(parse_err("responses must be real"))
            }
        })
        .collect()
}

/// Lower-case hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Row-major matrix with separate real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(parse_err("re and im lengths differ"));
        }
        let data =
            j.re.iter()
                .zip(&j.im)
                .map(|(&a, &b)| C64::new(a, b))
                .collect();
        ComplexMatrix::from_vec(j.rows, j.cols, data)
    }
}
