//! Matrix files: Matrix Market (array and coordinate, real/integer/pattern/
//! complex, all four symmetry kinds) and the dense JSON layout
//! `{"rows", "cols", "re", "im"}`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use eplab_core::numlin::{c64, DenseJson, Scalar};
use eplab_core::{DenseMatrix, Error};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mtx" | "mm" | "matrix-market" => Ok(Format::MatrixMarket),
            "json" => Ok(Format::Json),
            other => Err(format!(
                "unknown matrix format {other:?} (expected mtx or json)"
            )),
        }
    }
}

impl Format {
    pub fn sniff(path: &Path, explicit: Option<Format>) -> Result<Format, CliError> {
        if let Some(f) = explicit {
            return Ok(f);
        }
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
        {
            Some(ext) if ext == "mtx" => Ok(Format::MatrixMarket),
            Some(ext) if ext == "json" => Ok(Format::Json),
            _ => Err(CliError::Usage(format!(
                "cannot infer the format of {}; pass --format mtx|json",
                path.display()
            ))),
        }
    }
}

pub struct Loaded {
    pub matrix: DenseMatrix,
    pub bytes: Vec<u8>,
    pub format: Format,
}

pub fn read_matrix(path: &Path, explicit: Option<Format>) -> Result<Loaded, CliError> {
    let format = Format::sniff(path, explicit)?;
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))?;
    let matrix = parse(text, format)?;
    Ok(Loaded {
        matrix,
        bytes,
        format,
    })
}

pub fn write_matrix(path: &Path, a: &DenseMatrix, format: Format) -> Result<(), CliError> {
    std::fs::write(path, render(a, format)).map_err(|e| CliError::io(path, e))
}

pub fn parse(text: &str, format: Format) -> Result<DenseMatrix, Error> {
    match format {
        Format::MatrixMarket => parse_matrix_market(text),
        Format::Json => serde_json::from_str::<DenseJson>(text)
            .map_err(|e| Error::Parse(format!("dense JSON: {e}")))?
            .into_matrix(),
    }
}

pub fn render(a: &DenseMatrix, format: Format) -> String {
    match format {
        Format::MatrixMarket => render_matrix_market(a),
        Format::Json => {
            let mut s = serde_json::to_string(&DenseJson::from_matrix(a))
                .expect("dense JSON always serializes");
            s.push('\n');
            s
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(format!("Matrix Market: {}", msg.into()))
}

fn parse_matrix_market(text: &str) -> Result<DenseMatrix, Error> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty file"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(format!("bad header {header:?}")));
    }
    let dense = match tokens[2].as_str() {
        "array" => true,
        "coordinate" => false,
        other => return Err(parse_err(format!("unknown layout {other:?}"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(format!("unknown field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(format!("unknown symmetry {other:?}"))),
    };
    if dense && field == Field::Pattern {
        return Err(parse_err(
            "pattern field is only valid for coordinate layout",
        ));
    }

    let mut tokens = Tokens(
        lines
            .filter(|l| !l.trim_start().starts_with('%'))
            .flat_map(str::split_whitespace),
    );
    let rows = tokens.count("row count")?;
    let cols = tokens.count("column count")?;
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err("symmetric storage needs a square matrix"));
    }
    let nnz = if dense {
        0
    } else {
        tokens.count("entry count")?
    };

    let read_value = |tokens: &mut Tokens<_>| -> Result<Scalar, Error> {
        match field {
            Field::Pattern => Ok(c64(1.0, 0.0)),
            Field::Real | Field::Integer => Ok(c64(tokens.number()?, 0.0)),
            Field::Complex => {
                let re = tokens.number()?;
                Ok(c64(re, tokens.number()?))
            }
        }
    };

    let mut a = DenseMatrix::zeros(rows, cols);
    let place = |a: &mut DenseMatrix, i: usize, j: usize, v: Scalar| {
        a.set(i, j, a.get(i, j) + v);
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => a.set(j, i, a.get(j, i) + v),
                Symmetry::SkewSymmetric => a.set(j, i, a.get(j, i) - v),
                Symmetry::Hermitian => a.set(j, i, a.get(j, i) + v.conj()),
            }
        }
    };

    if dense {
        for j in 0..cols {
            let first = match symmetry {
                Symmetry::General => 0,
                Symmetry::SkewSymmetric => j + 1,
                _ => j,
            };
            for i in first..rows {
                let v = read_value(&mut tokens)?;
                place(&mut a, i, j, v);
            }
        }
    } else {
        for _ in 0..nnz {
            let i = tokens.index("row", rows)?;
            let j = tokens.index("column", cols)?;
            if symmetry == Symmetry::SkewSymmetric && i == j {
                return Err(parse_err(
                    "skew-symmetric storage cannot hold diagonal entries",
                ));
            }
            let v = read_value(&mut tokens)?;
            place(&mut a, i, j, v);
        }
    }
    if tokens.0.next().is_some() {
        return Err(parse_err("trailing data after the declared entries"));
    }
    if !a.is_finite() {
        return DenseMatrix::new(a.into_inner());
    }
    Ok(a)
}

struct Tokens<I>(I);

impl<'a, I: Iterator<Item = &'a str>> Tokens<I> {
    fn next(&mut self, what: &str) -> Result<&'a str, Error> {
        self.0
            .next()
            .ok_or_else(|| parse_err(format!("missing {what}")))
    }

    fn count(&mut self, what: &str) -> Result<usize, Error> {
        let tok = self.next(what)?;
        tok.parse()
            .map_err(|_| parse_err(format!("bad {what} {tok:?}")))
    }

    fn number(&mut self) -> Result<f64, Error> {
        let tok = self.next("entry")?;
        tok.parse()
            .map_err(|_| parse_err(format!("bad number {tok:?}")))
    }

    /// 1-based index checked against `bound`, returned 0-based.
    fn index(&mut self, what: &str, bound: usize) -> Result<usize, Error> {
        let k = self.count(what)?;
        if k == 0 || k > bound {
            return Err(parse_err(format!(
                "{what} index {k} out of range 1..={bound}"
            )));
        }
        Ok(k - 1)
    }
}

fn render_matrix_market(a: &DenseMatrix) -> String {
    let complex = a.row_major().iter().any(|z| z.im != 0.0);
    let mut out = String::new();
    let field = if complex { "complex" } else { "real" };
    let _ = writeln!(out, "%%MatrixMarket matrix array {field} general");
    let _ = writeln!(out, "{} {}", a.rows(), a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            let z = a.get(i, j);
            if complex {
                let _ = writeln!(out, "{:?} {:?}", z.re, z.im);
            } else {
                let _ = writeln!(out, "{:?}", z.re);
            }
        }
    }
    out
}
