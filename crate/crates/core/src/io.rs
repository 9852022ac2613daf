//! Covariance input files and atomic output writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gauss::{Dims, GaussianSystem};
use crate::linalg::Matrix;

#[derive(Deserialize)]
struct JsonCovariance {
    dims: [usize; 3],
    sigma: Vec<Vec<f64>>,
}

/// Parses a headerless, row-major CSV matrix.
pub fn parse_csv_matrix(text: &str) -> Result<Matrix> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    rows_to_matrix(rows)
}

fn rows_to_matrix(rows: Vec<Vec<f64>>) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty covariance".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("covariance has {n} rows but a row of length {}", bad.len())));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Parses `{"dims": [dM, dX, dY], "sigma": [[...], ...]}`.
pub fn parse_json_covariance(text: &str) -> Result<(Matrix, Dims)> {
    let doc: JsonCovariance = serde_json::from_str(text)?;
    let [m, x, y] = doc.dims;
    Ok((rows_to_matrix(doc.sigma)?, Dims::new(m, x, y)))
}

/// Loads a covariance file. JSON is recognised by extension or a leading `{`;
/// anything else is CSV and needs `dims`. For JSON, `dims` overrides the file.
pub fn load_system(path: &Path, dims: Option<Dims>) -> Result<GaussianSystem> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{');
    let (matrix, dims) = if is_json {
        let (m, d) = parse_json_covariance(&text)?;
        (m, dims.unwrap_or(d))
    } else {
        let dims = dims.ok_or_else(|| Error::Parse("CSV covariance input needs --dims dM,dX,dY".into()))?;
        (parse_csv_matrix(&text)?, dims)
    };
    GaussianSystem::new(matrix, dims)
}

/// Writes via a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_parses_and_rejects_ragged() {
        let m = parse_csv_matrix("1, 0\n0, 2\n").unwrap();
        assert_eq!(m[(1, 1)], 2.0);
        assert!(parse_csv_matrix("1,0\n0\n").is_err());
        assert!(parse_csv_matrix("1,x\n0,1\n").is_err());
        assert!(parse_csv_matrix("").is_err());
    }

    #[test]
    fn json_parses() {
        let (m, d) = parse_json_covariance(r#"{"dims":[1,1,1],"sigma":[[1,0,0],[0,1,0],[0,0,1]]}"#).unwrap();
        assert_eq!(d, Dims::new(1, 1, 1));
        assert_eq!(m, Matrix::identity(3, 3));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
    }
}
