//! Matrix Market coordinate files (`real general`), used for diagnostic
//! dumps of the incidence matrix and the diagonals.

use std::fmt::Write as _;
use std::path::Path;

use crate::assembly::CsrMatrix;
use crate::error::{Error, Result};

pub fn format_matrix(m: &CsrMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz());
    for (i, j, v) in m.triplets() {
        let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, v);
    }
    out
}

/// Diagonal matrix with the given entries.
pub fn format_diagonal(d: &[f64]) -> String {
    let t: Vec<_> = d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
    format_matrix(&CsrMatrix::from_triplets(d.len(), d.len(), &t))
}

pub fn write_matrix(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_matrix(m))?;
    Ok(())
}

pub fn write_diagonal(d: &[f64], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_diagonal(d))?;
    Ok(())
}

/// Parses `coordinate real` files; `symmetric` files are expanded.
pub fn parse_matrix(text: &str, path: Option<&Path>) -> Result<CsrMatrix> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.map(Path::to_path_buf),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5
        || fields[0] != "%%matrixmarket"
        || fields[1] != "matrix"
        || fields[2] != "coordinate"
        || fields[3] != "real"
    {
        return Err(err(1, format!("unsupported header `{header}`")));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(err(1, format!("unsupported symmetry `{other}`"))),
    };
    let mut body = lines.filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('%'));
    let (sl, size) = body
        .next()
        .ok_or_else(|| err(2, "missing size line".into()))?;
    let size: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(sl + 1, format!("{e}")))?;
    let [nrows, ncols, nnz] = size[..] else {
        return Err(err(sl + 1, "expected `rows cols nnz`".into()));
    };
    let mut triplets = Vec::with_capacity(nnz);
    for (ln, line) in body {
        let mut it = line.split_whitespace();
        let mut index = |name: &str, bound: usize| -> Result<usize> {
            let v: usize = it
                .next()
                .ok_or_else(|| err(ln + 1, format!("missing {name}")))?
                .parse()
                .map_err(|e| err(ln + 1, format!("{e}")))?;
            if v == 0 || v > bound {
                return Err(err(ln + 1, format!("{name} {v} out of range")));
            }
            Ok(v - 1)
        };
        let i = index("row", nrows)?;
        let j = index("column", ncols)?;
        let v: f64 = it
            .next()
            .ok_or_else(|| err(ln + 1, "missing value".into()))?
            .parse()
            .map_err(|e| err(ln + 1, format!("{e}")))?;
        triplets.push((i, j, v));
        if symmetric && i != j {
            triplets.push((j, i, v));
        }
    }
    let entries = if symmetric {
        triplets.iter().filter(|t| t.0 >= t.1).count()
    } else {
        triplets.len()
    };
    if entries != nnz {
        return Err(err(
            sl + 1,
            format!("expected {nnz} entries, found {entries}"),
        ));
    }
    Ok(CsrMatrix::from_triplets(nrows, ncols, &triplets))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    parse_matrix(&std::fs::read_to_string(path)?, Some(path))
}
