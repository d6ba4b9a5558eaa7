//! Problem files and result documents.
//!
//! A problem file is line oriented.  Blank lines and lines starting with `#`
//! are ignored.  The first remaining line is the magic `pqp-qp 1`; after it
//! come keyword sections in any order, except that `n` and `m` must precede
//! the sections whose length they fix:
//!
//! ```text
//! pqp-qp 1
//! n 2
//! m 1
//! Q 2            # nnz, then `i j value` lines, 0-based, upper triangle
//! 0 0 4
//! 1 1 2
//! q              # n values, one per line
//! 1
//! -1
//! A 2            # nnz, then `i j value` lines, 0-based
//! 0 0 1
//! 0 1 1
//! l              # m values; `inf` and `-inf` are allowed in bounds
//! -inf
//! u
//! 1
//! x              # optional warm start: n primal values
//! 0
//! 0
//! y              # optional warm start: m dual values
//! 0
//! ```
//!
//! Instead of triplets, a matrix may be read from a Matrix Market file with
//! `Q mtx <path>` (or `A mtx <path>`); relative paths are resolved against
//! the directory of the problem file.  Values are written in Rust's shortest
//! round-trip representation, so `read(write(p))` reproduces `p` bit for bit.
//!
//! A warm-start file holds just the optional sections: `pqp-qp 1`, `n`, `m`,
//! `x`, `y`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::problem::QpProblem;
use crate::solver::SolveResult;
use crate::sparse::{read_matrix_market, SparseMatrix};

/// First line of every problem file.
pub const MAGIC: &str = "pqp-qp 1";

/// A primal-dual starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Contents of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub problem: QpProblem,
    pub warm: Option<WarmStart>,
}

#[derive(Default)]
struct Sections {
    n: Option<usize>,
    m: Option<usize>,
    q_mat: Option<SparseMatrix>,
    q: Option<Vec<f64>>,
    a: Option<SparseMatrix>,
    l: Option<Vec<f64>>,
    u: Option<Vec<f64>>,
    x: Option<Vec<f64>>,
    y: Option<Vec<f64>>,
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    /// Next non-blank, non-comment line, trimmed, with its line number.
    fn next_content(&mut self) -> Result<Option<(usize, String)>> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                let t = t.split('#').next().unwrap_or("").trim();
                return Ok(Some((self.line, t.to_string())));
            }
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str) -> Result<(usize, String)> {
        let line = self.line;
        self.next_content()?.ok_or_else(|| Error::Parse { line: line + 1, msg: format!("unexpected end of file, expected {what}") })
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| parse_err(line, format!("invalid number `{s}`")))?;
    if v.is_nan() {
        return Err(parse_err(line, "NaN is not allowed"));
    }
    Ok(v)
}

fn parse_usize(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| parse_err(line, format!("invalid count `{s}`")))
}

fn read_vector<R: BufRead>(lines: &mut Lines<R>, len: usize, name: &str, allow_inf: bool) -> Result<Vec<f64>> {
    (0..len)
        .map(|_| {
            let (ln, t) = lines.expect(&format!("a value of `{name}`"))?;
            let v = parse_f64(ln, &t)?;
            if !allow_inf && v.is_infinite() {
                return Err(parse_err(ln, format!("`{name}` must be finite")));
            }
            Ok(v)
        })
        .collect()
}

fn read_triplets<R: BufRead>(
    lines: &mut Lines<R>,
    nnz: usize,
    nrows: usize,
    ncols: usize,
    symmetric: bool,
    name: &str,
) -> Result<SparseMatrix> {
    let mut trip = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let (ln, t) = lines.expect(&format!("a triplet of `{name}`"))?;
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 3 {
            return Err(parse_err(ln, format!("expected `i j value`, got `{t}`")));
        }
        let (i, j) = (parse_usize(ln, f[0])?, parse_usize(ln, f[1])?);
        if i >= nrows || j >= ncols {
            return Err(parse_err(ln, format!("entry ({i},{j}) outside {nrows}x{ncols}")));
        }
        if symmetric && i > j {
            return Err(parse_err(ln, format!("`{name}` entries must be in the upper triangle, got ({i},{j})")));
        }
        let v = parse_f64(ln, f[2])?;
        if v.is_infinite() {
            return Err(parse_err(ln, format!("`{name}` entries must be finite")));
        }
        trip.push((i, j, v));
    }
    SparseMatrix::from_triplets(nrows, ncols, &trip, symmetric)
}

fn read_mtx(base: Option<&Path>, path: &str, ln: usize) -> Result<SparseMatrix> {
    let p = PathBuf::from(path);
    let p = match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    };
    let f = File::open(&p).map_err(|e| parse_err(ln, format!("cannot open `{}`: {e}", p.display())))?;
    read_matrix_market(BufReader::new(f))
}

fn read_sections<R: BufRead>(reader: R, base: Option<&Path>) -> Result<Sections> {
    let mut lines = Lines { inner: reader.lines(), line: 0 };
    match lines.next_content()? {
        Some((_, t)) if t.split_whitespace().collect::<Vec<_>>() == MAGIC.split_whitespace().collect::<Vec<_>>() => {}
        Some((ln, t)) => return Err(parse_err(ln, format!("expected `{MAGIC}`, got `{t}`"))),
        None => return Err(parse_err(1, format!("empty file, expected `{MAGIC}`"))),
    }
    let mut s = Sections::default();
    while let Some((ln, t)) = lines.next_content()? {
        let f: Vec<&str> = t.split_whitespace().collect();
        let key = f[0];
        let dim = |v: Option<usize>, what: &str| v.ok_or_else(|| parse_err(ln, format!("`{what}` must be given before `{key}`")));
        let dup = |present: bool| {
            if present {
                Err(parse_err(ln, format!("duplicate section `{key}`")))
            } else {
                Ok(())
            }
        };
        match (key, f.len()) {
            ("n", 2) | ("m", 2) => {
                let v = parse_usize(ln, f[1])?;
                let slot = if key == "n" { &mut s.n } else { &mut s.m };
                dup(slot.is_some())?;
                *slot = Some(v);
            }
            ("Q", 2) | ("A", 2) | ("Q", 3) | ("A", 3) => {
                let n = dim(s.n, "n")?;
                let sym = key == "Q";
                let rows = if sym { n } else { dim(s.m, "m")? };
                dup(if sym { s.q_mat.is_some() } else { s.a.is_some() })?;
                let mat = if f.len() == 3 {
                    if f[1] != "mtx" {
                        return Err(parse_err(ln, format!("expected `{key} <nnz>` or `{key} mtx <path>`")));
                    }
                    let mat = read_mtx(base, f[2], ln)?;
                    if mat.nrows() != rows || mat.ncols() != n || mat.is_symmetric() != sym {
                        return Err(parse_err(ln, format!("matrix `{}` does not fit section `{key}`", f[2])));
                    }
                    mat
                } else {
                    read_triplets(&mut lines, parse_usize(ln, f[1])?, rows, n, sym, key)?
                };
                if sym {
                    s.q_mat = Some(mat);
                } else {
                    s.a = Some(mat);
                }
            }
            ("q", 1) | ("x", 1) => {
                let n = dim(s.n, "n")?;
                let slot = if key == "q" { &mut s.q } else { &mut s.x };
                dup(slot.is_some())?;
                *slot = Some(read_vector(&mut lines, n, key, false)?);
            }
            ("l", 1) | ("u", 1) | ("y", 1) => {
                let m = dim(s.m, "m")?;
                let allow_inf = key != "y";
                let slot = match key {
                    "l" => &mut s.l,
                    "u" => &mut s.u,
                    _ => &mut s.y,
                };
                dup(slot.is_some())?;
                *slot = Some(read_vector(&mut lines, m, key, allow_inf)?);
            }
            _ => return Err(parse_err(ln, format!("unknown section `{t}`"))),
        }
    }
    Ok(s)
}

fn warm_from(s: &mut Sections) -> Result<Option<WarmStart>> {
    match (s.x.take(), s.y.take()) {
        (Some(x), Some(y)) => Ok(Some(WarmStart { x, y })),
        (Some(x), None) => Ok(Some(WarmStart { x, y: vec![0.0; s.m.unwrap_or(0)] })),
        (None, Some(_)) => Err(parse_err(0, "a warm start `y` needs an `x` section")),
        (None, None) => Ok(None),
    }
}

fn parse_problem<R: BufRead>(reader: R, base: Option<&Path>) -> Result<ProblemFile> {
    let mut s = read_sections(reader, base)?;
    let missing = |what: &str| Error::Parse { line: 0, msg: format!("missing section `{what}`") };
    let n = s.n.ok_or_else(|| missing("n"))?;
    let m = s.m.ok_or_else(|| missing("m"))?;
    let warm = warm_from(&mut s)?;
    let problem = QpProblem::new(
        s.q_mat.take().unwrap_or_else(|| SparseMatrix::zeros(n, n, true)),
        s.q.take().ok_or_else(|| missing("q"))?,
        s.a.take().unwrap_or_else(|| SparseMatrix::zeros(m, n, false)),
        s.l.take().ok_or_else(|| missing("l"))?,
        s.u.take().ok_or_else(|| missing("u"))?,
    )?;
    Ok(ProblemFile { problem, warm })
}

/// Reads a problem file.  Matrix Market references are resolved against
/// the current directory.
pub fn read_problem<R: BufRead>(reader: R) -> Result<ProblemFile> {
    parse_problem(reader, None)
}

/// Reads a problem file from disk.
pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_problem(BufReader::new(f), path.parent())
}

/// Writes a problem file (with the warm start, when given).
pub fn write_problem<W: Write>(mut w: W, problem: &QpProblem, warm: Option<&WarmStart>) -> Result<()> {
    let (n, m) = (problem.n(), problem.m());
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "n {n}\nm {m}")?;
    for (name, mat) in [("Q", &problem.q_mat), ("A", &problem.a)] {
        let trip = mat.triplets();
        writeln!(w, "{name} {}", trip.len())?;
        for (i, j, v) in trip {
            writeln!(w, "{i} {j} {v:?}")?;
        }
    }
    let mut vector = |name: &str, v: &[f64]| -> Result<()> {
        writeln!(w, "{name}")?;
        for x in v {
            writeln!(w, "{x:?}")?;
        }
        Ok(())
    };
    vector("q", &problem.q)?;
    vector("l", &problem.l)?;
    vector("u", &problem.u)?;
    if let Some(ws) = warm {
        if ws.x.len() != n || ws.y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "warm start has |x| = {}, |y| = {}, expected {n} and {m}",
                ws.x.len(),
                ws.y.len()
            )));
        }
        vector("x", &ws.x)?;
        vector("y", &ws.y)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a problem file to disk.
pub fn save_problem(path: impl AsRef<Path>, problem: &QpProblem, warm: Option<&WarmStart>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_problem(BufWriter::new(f), problem, warm)
}

/// Reads a warm-start file (`pqp-qp 1`, `n`, `m`, `x`, optional `y`).
pub fn read_warm_start<R: BufRead>(reader: R) -> Result<WarmStart> {
    let mut s = read_sections(reader, None)?;
    if s.q_mat.is_some() || s.q.is_some() || s.a.is_some() || s.l.is_some() || s.u.is_some() {
        return Err(parse_err(0, "a warm-start file may only contain `n`, `m`, `x` and `y`"));
    }
    warm_from(&mut s)?.ok_or_else(|| parse_err(0, "missing section `x`"))
}

/// Writes a warm-start file.
pub fn write_warm_start<W: Write>(mut w: W, warm: &WarmStart) -> Result<()> {
    writeln!(w, "{MAGIC}\nn {}\nm {}", warm.x.len(), warm.y.len())?;
    writeln!(w, "x")?;
    for v in &warm.x {
        writeln!(w, "{v:?}")?;
    }
    writeln!(w, "y")?;
    for v in &warm.y {
        writeln!(w, "{v:?}")?;
    }
    w.flush()?;
    Ok(())
}

/// Renders a solve result as a pretty-printed JSON document.  Non-finite
/// numbers (which JSON cannot represent) are written as `null`.
pub fn result_json(result: &SolveResult) -> Result<String> {
    serde_json::to_string_pretty(result).map_err(|e| Error::Io(e.to_string()))
}
