use std::io::Write;
use std::path::Path;

use super::ExperimentRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "level,nE,dofs,condDiag,condP,lmin,lmax,seconds";

/// One CSV line without the newline. Floats use the shortest representation
/// that parses back to the same value.
pub fn format_row(row: &ExperimentRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        row.level,
        row.num_elements,
        row.num_dofs,
        row.cond_diag,
        row.cond_quasidiag,
        row.lambda_min,
        row.lambda_max,
        row.seconds
    )
}

pub fn write_csv(rows: &[ExperimentRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to write".into()));
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", format_row(row))?;
    }
    out.flush()?;
    Ok(())
}

pub fn parse_csv(text: &str, path: Option<&Path>) -> Result<Vec<ExperimentRow>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.map(Path::to_path_buf),
        line,
        message,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(err(1, format!("unexpected header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let ln = k + 2;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(err(ln, format!("expected 8 fields, found {}", f.len())));
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| err(ln, format!("`{s}`: {e}")))
        };
        let float = |s: &str| s.parse::<f64>().map_err(|e| err(ln, format!("`{s}`: {e}")));
        rows.push(ExperimentRow {
            level: int(f[0])?,
            num_elements: int(f[1])?,
            num_dofs: int(f[2])?,
            cond_diag: float(f[3])?,
            cond_quasidiag: float(f[4])?,
            lambda_min: float(f[5])?,
            lambda_max: float(f[6])?,
            seconds: float(f[7])?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ExperimentRow>> {
    let path = path.as_ref();
    parse_csv(&std::fs::read_to_string(path)?, Some(path))
}
