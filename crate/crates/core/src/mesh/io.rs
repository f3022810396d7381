//! Plain-text mesh format.
//!
//! ```text
//! dim nV nT
//! x_1 ... x_dim        (nV lines)
//! v_0 ... v_dim        (nT lines, 0-based vertex indices)
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use super::SimplicialMesh;
use crate::error::{Error, Result};

pub fn format_mesh(mesh: &SimplicialMesh) -> String {
    let mut out = format!(
        "{} {} {}\n",
        mesh.dim(),
        mesh.num_vertices(),
        mesh.num_elements()
    );
    for v in 0..mesh.num_vertices() {
        let line: Vec<String> = mesh.vertex(v).iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    for el in mesh.elements() {
        let line: Vec<String> = el.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_mesh(mesh: &SimplicialMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(format_mesh(mesh).as_bytes())?;
    Ok(())
}

/// Parses the text format and validates the result, including conformity.
pub fn parse_mesh(text: &str, path: Option<&Path>) -> Result<SimplicialMesh> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.map(Path::to_path_buf),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let header: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(ln, format!("bad header: {e}")))?;
    let [dim, nv, nt] = header[..] else {
        return Err(err(ln, "header must be `dim nV nT`".into()));
    };
    let mut coords = Vec::with_capacity(dim * nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(ln, "missing vertex line".into()))?;
        let row: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(ln, format!("bad coordinate: {e}")))?;
        if row.len() != dim {
            return Err(err(
                ln,
                format!("expected {dim} coordinates, got {}", row.len()),
            ));
        }
        coords.extend(row);
    }
    let mut elements = Vec::with_capacity((dim + 1) * nt);
    for _ in 0..nt {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(ln, "missing element line".into()))?;
        let row: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(ln, format!("bad vertex index: {e}")))?;
        if row.len() != dim + 1 {
            return Err(err(
                ln,
                format!("expected {} indices, got {}", dim + 1, row.len()),
            ));
        }
        elements.extend(row);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "trailing data".into()));
    }
    let mesh = SimplicialMesh::new(dim, coords, elements)?;
    mesh.check_conformity()?;
    Ok(mesh)
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<SimplicialMesh> {
    let path = path.as_ref();
    parse_mesh(&fs::read_to_string(path)?, Some(path))
}
