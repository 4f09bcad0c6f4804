//! Matrix Market coordinate format reader and writer.
//!
//! Supported: `coordinate` storage with `real`, `integer` or `complex` fields and
//! `general` or `symmetric` symmetry. Symmetric files are expanded to general
//! storage; duplicate entries are summed.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<(Field, bool)> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(lineno, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!("storage '{}'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => return Err(Error::UnsupportedFormat(format!("field '{other}'"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::UnsupportedFormat(format!("symmetry '{other}'"))),
    };
    Ok((field, symmetric))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, lineno: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(lineno, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(lineno, format!("invalid {what}")))
}

/// Reads a Matrix Market coordinate file into a complex sparse matrix.
pub fn read_matrix_market<R: Read>(source: R) -> Result<SparseMatrix> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let (field, symmetric) = parse_header(&header?, lineno)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let Some((nrows, ncols, _)) = size else {
            let nrows = parse_num(toks.next(), lineno, "row count")?;
            let ncols = parse_num(toks.next(), lineno, "column count")?;
            let nnz = parse_num(toks.next(), lineno, "entry count")?;
            if toks.next().is_some() {
                return Err(parse_err(lineno, "trailing tokens in size line"));
            }
            size = Some((nrows, ncols, nnz));
            triplets.reserve(if symmetric { 2 * nnz } else { nnz });
            continue;
        };
        let i: usize = parse_num(toks.next(), lineno, "row index")?;
        let j: usize = parse_num(toks.next(), lineno, "column index")?;
        if i == 0 || j == 0 || i > nrows || j > ncols {
            return Err(parse_err(
                lineno,
                format!("index ({i}, {j}) outside declared {nrows}x{ncols}"),
            ));
        }
        let value = match field {
            Field::Real | Field::Integer => {
                Complex64::new(parse_num::<f64>(toks.next(), lineno, "value")?, 0.0)
            }
            Field::Complex => {
                let re = parse_num::<f64>(toks.next(), lineno, "real part")?;
                let im = parse_num::<f64>(toks.next(), lineno, "imaginary part")?;
                Complex64::new(re, im)
            }
        };
        if toks.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens in entry line"));
        }
        triplets.push((i - 1, j - 1, value));
        if symmetric && i != j {
            triplets.push((j - 1, i - 1, value));
        }
    }

    let (nrows, ncols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|(i, j, _)| i >= j).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(parse_err(
            0,
            format!("declared {nnz} entries but found {stored}"),
        ));
    }
    SparseMatrix::from_triplets(nrows, ncols, triplets)
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    read_matrix_market(File::open(path)?)
}

/// Writes `m` as a `complex general` coordinate file with shortest round-trip
/// floats, so reading it back reproduces the matrix exactly.
pub fn write_matrix_market<W: Write>(mut out: W, m: &SparseMatrix) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(out, "{} {} {:?} {:?}", i + 1, j + 1, v.re, v.im)?;
    }
    Ok(())
}

pub fn write_matrix_market_file(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    let mut file = std::io::BufWriter::new(File::create(path)?);
    write_matrix_market(&mut file, m)?;
    file.flush()?;
    Ok(())
}
