//! Matrix Market coordinate format (`real`, `general` or `symmetric`).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Reads a coordinate Matrix Market document.
///
/// `symmetric` files store the lower triangle; the result uses the crate's
/// upper-triangle symmetric storage.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::Parse { line: 1, msg: "missing %%MatrixMarket matrix header".into() });
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Parse { line: 1, msg: "only coordinate format is supported".into() });
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(Error::Parse { line: 1, msg: format!("unsupported field `{}`", tokens[3]) });
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(Error::Parse { line: 1, msg: format!("unsupported symmetry `{other}`") })
        }
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(bad("expected `rows cols nnz`"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid size"));
                size = Some((p(parts[0])?, p(parts[1])?, p(parts[2])?));
            }
            Some((nr, nc, _)) => {
                if parts.len() != 3 {
                    return Err(bad("expected `row col value`"));
                }
                let i: usize = parts[0].parse().map_err(|_| bad("invalid row index"))?;
                let j: usize = parts[1].parse().map_err(|_| bad("invalid column index"))?;
                let v: f64 = parts[2].parse().map_err(|_| bad("invalid value"))?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(bad("index out of range"));
                }
                trip.push((i - 1, j - 1, v));
            }
        }
    }
    let (nr, nc, nnz) = size.ok_or_else(|| Error::Parse { line: 0, msg: "missing size line".into() })?;
    if trip.len() != nnz {
        return Err(Error::Parse {
            line: 0,
            msg: format!("expected {nnz} entries, found {}", trip.len()),
        });
    }
    SparseMatrix::from_triplets(nr, nc, &trip, symmetric)
}

/// Writes a matrix in coordinate Matrix Market format with round-trip exact values.
pub fn write_matrix_market<W: Write>(m: &SparseMatrix, mut w: W) -> Result<()> {
    let kind = if m.is_symmetric() { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        // Symmetric files store the lower triangle.
        let (i, j) = if m.is_symmetric() { (j, i) } else { (i, j) };
        writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_symmetric_and_general() {
        let s = SparseMatrix::from_dense_symmetric(&[vec![0.1, 1.0 / 3.0], vec![1.0 / 3.0, -2.5e-300]]);
        let g = SparseMatrix::from_dense(&[vec![1.0, 0.0, 2.0], vec![0.0, std::f64::consts::PI, 0.0]]);
        for m in [s, g] {
            let mut buf = Vec::new();
            write_matrix_market(&m, &mut buf).unwrap();
            let back = read_matrix_market(&buf[..]).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn reads_lower_symmetric_entries_into_upper_storage() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 4\n2 1 2\n";
        let m = read_matrix_market(text.as_bytes()).unwrap();
        assert!(m.is_symmetric());
        assert_eq!(m.get(0, 1), 2.0);
    }

    #[test]
    fn rejects_count_mismatch() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 4\n";
        assert!(read_matrix_market(text.as_bytes()).is_err());
    }
}
