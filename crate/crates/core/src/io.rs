//! File formats shared by the command line tools.
//!
//! Matrices are JSON objects `{"dim": d, "entries": [[re, im], ...]}` with the
//! `d * d` entries in row-major order. Numbers are printed with 12
//! significant digits.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::aberg::Fig1Row;
use crate::error::{Error, Result};
use crate::qmat::{CMatrix, DensityMatrix, Observable, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let z = m[(r, c)];
                entries.push([z.re, z.im]);
            }
        }
        Self { dim, entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.dim == 0 {
            return Err(Error::Parse("matrix dimension must be positive".into()));
        }
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Parse(format!(
                "expected {} entries for dim {}, found {}",
                self.dim * self.dim,
                self.dim,
                self.entries.len()
            )));
        }
        if self.entries.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        Ok(CMatrix::from_row_iterator(
            self.dim,
            self.dim,
            self.entries.iter().map(|&[re, im]| C64::new(re, im)),
        ))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    MatrixFile::parse(text)?.to_matrix()
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    DensityMatrix::new(parse_matrix(text)?)
}

pub fn parse_observable(text: &str) -> Result<Observable> {
    Observable::new(parse_matrix(text)?)
}

pub fn read_to_string(path: &std::path::Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// `x` with 12 significant digits, in the style of C's `%.12g`.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const FIG1_HEADER: &str = "M,global,local_sum,gap";

pub fn write_fig1_csv(mut out: impl Write, rows: &[Fig1Row]) -> Result<()> {
    writeln!(out, "{FIG1_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.m,
            fmt12(row.global),
            fmt12(row.local_sum),
            fmt12(row.gap)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_row_slice(2, 2, &[
            C64::new(0.5, 0.0),
            C64::new(0.25, -0.125),
            C64::new(0.25, 0.125),
            C64::new(0.5, 0.0),
        ]);
        let text = serde_json::to_string(&MatrixFile::from_matrix(&m)).unwrap();
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert!(parse_density(&text).is_ok());
    }

    #[test]
    fn malformed_matrices_are_rejected() {
        assert!(matches!(parse_matrix("{\"dim\": 2"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_matrix(r#"{"dim": 2, "entries": [[1, 0]]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_matrix(r#"{"dim": 0, "entries": []}"#),
            Err(Error::Parse(_))
        ));
        let not_hermitian = r#"{"dim": 2, "entries": [[0.5,0],[1,0],[0,0],[0.5,0]]}"#;
        assert!(matches!(parse_density(not_hermitian), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn twelve_digit_format() {
        assert_eq!(fmt12(0.25), "0.25");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(5.25), "5.25");
        assert_eq!(fmt12(-0.034992431398928), "-0.0349924313989");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(123456.0), "123456");
        assert_eq!(fmt12(1.5e-7), "1.5e-07");
        assert_eq!(fmt12(-2.0e13), "-2e+13");
        assert_eq!(fmt12(2.0 / 3.0 * 1e-5), "6.66666666667e-06");
        assert_eq!(fmt12(0.0001), "0.0001");
    }

    #[test]
    fn csv_layout() {
        let rows = [Fig1Row {
            m: 1,
            global: 0.0,
            local_sum: 0.0,
            gap: 0.0,
        }];
        let mut buf = Vec::new();
        write_fig1_csv(&mut buf, &rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "M,global,local_sum,gap\n1,0,0,0\n");
    }
}
