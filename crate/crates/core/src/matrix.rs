//! Dense weight matrices and {0,1} edge sets, plus their file formats.
//!
//! Two input encodings are understood for both types:
//!
//! * JSON: `{"n": 3, "entries": [[0,1,0],[1,0,1],[0,1,0]]}` for a matrix or
//!   `{"n": 3, "pairs": [[1,2],[2,1]]}` for an edge set. Pair indices are
//!   1-based. Rectangular matrices may give `n_rows`/`n_cols` instead of `n`.
//! * Text: a matrix is one whitespace-separated row per line; an edge set
//!   starts with a `n <N>` line followed by one `i j` pair per line (1-based).
//!   Lines starting with `#` are ignored.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};

/// Largest supported dimension (rows or columns).
pub const MAX_DIM: usize = 8192;

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<f64>,
    symmetric: bool,
    zero_diagonal: bool,
}

impl WeightMatrix {
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<f64>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::Shape("matrix dimensions must be positive".into()));
        }
        for (what, value) in [("n_rows", n_rows), ("n_cols", n_cols)] {
            if value > MAX_DIM {
                return Err(Error::SizeCap {
                    what,
                    value,
                    cap: MAX_DIM,
                });
            }
        }
        if entries.len() != n_rows * n_cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                n_rows * n_cols,
                n_rows,
                n_cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_cols,
                col: pos % n_cols,
            });
        }
        let mut m = WeightMatrix {
            n_rows,
            n_cols,
            entries,
            symmetric: false,
            zero_diagonal: false,
        };
        m.refresh_flags();
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::new(n_rows, n_cols, vec![0.0; n_rows * n_cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn ones(n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::new(n_rows, n_cols, vec![1.0; n_rows * n_cols])
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                entries.push(f(i, j));
            }
        }
        Self::new(n_rows, n_cols, entries)
    }

    fn refresh_flags(&mut self) {
        self.symmetric = self.n_rows == self.n_cols
            && (0..self.n_rows)
                .all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)));
        self.zero_diagonal = (0..self.n_rows.min(self.n_cols)).all(|i| self.get(i, i) == 0.0);
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn has_zero_diagonal(&self) -> bool {
        self.zero_diagonal
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n_cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// True when every entry is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0 || x == 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest |a_ij| over i != j.
    pub fn max_abs_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n_rows {
            for (j, x) in self.row(i).iter().enumerate() {
                if i != j {
                    m = m.max(x.abs());
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> WeightMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.n_cols {
            for i in 0..self.n_rows {
                entries.push(self.get(i, j));
            }
        }
        let mut t = WeightMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            entries,
            symmetric: self.symmetric,
            zero_diagonal: self.zero_diagonal,
        };
        t.refresh_flags();
        t
    }

    /// Copy with the diagonal set to zero.
    pub fn without_diagonal(&self) -> WeightMatrix {
        let mut m = self.clone();
        for i in 0..self.n_rows.min(self.n_cols) {
            m.entries[i * self.n_cols + i] = 0.0;
        }
        m.refresh_flags();
        m
    }

    /// Principal submatrix on the indices not in `removed`. Returns `None` when
    /// nothing is left.
    pub fn principal_excluding(&self, removed: &[usize]) -> Option<WeightMatrix> {
        let n = self.n_rows.max(self.n_cols);
        let mut keep = vec![true; n];
        for &i in removed {
            if i < n {
                keep[i] = false;
            }
        }
        let rows: Vec<usize> = (0..self.n_rows).filter(|&i| keep[i]).collect();
        let cols: Vec<usize> = (0..self.n_cols).filter(|&j| keep[j]).collect();
        if rows.is_empty() || cols.is_empty() {
            return None;
        }
        Some(self.select(&rows, &cols))
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> WeightMatrix {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let r = self.row(i);
            entries.extend(cols.iter().map(|&j| r[j]));
        }
        let mut m = WeightMatrix {
            n_rows: rows.len(),
            n_cols: cols.len(),
            entries,
            symmetric: false,
            zero_diagonal: false,
        };
        m.refresh_flags();
        m
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_rows, self.n_cols, &self.entries)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Result<Self> {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Positions of the nonzero entries, row-major.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n_rows {
            for (j, &x) in self.row(i).iter().enumerate() {
                if x != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        if self.is_square() {
            json!({ "n": self.n_rows, "entries": self.rows() })
        } else {
            json!({ "n_rows": self.n_rows, "n_cols": self.n_cols, "entries": self.rows() })
        }
    }

    /// Whitespace text encoding; integral values are written as integers and
    /// everything else with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n_rows {
            let row: Vec<String> = self.row(i).iter().map(|&x| format_real(x)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in content_lines(text) {
            let row: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            rows.push(row.map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        Self::from_rows(&rows)
    }
}

pub(crate) fn format_real(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{:.16e}", x)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// A set E of ordered index pairs, kept sorted and deduplicated. Indices are
/// 0-based here and 1-based in every file format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl EdgeSet {
    pub fn new(n: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("edge set dimension must be positive".into()));
        }
        if n > MAX_DIM {
            return Err(Error::SizeCap {
                what: "n",
                value: n,
                cap: MAX_DIM,
            });
        }
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(invalid(format!(
                "pair ({}, {}) out of range for n = {n}",
                i + 1,
                j + 1
            )));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(EdgeSet { n, pairs })
    }

    /// Both orientations of every undirected edge `{i, j}`.
    pub fn from_undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let pairs = edges.iter().flat_map(|&(i, j)| [(i, j), (j, i)]).collect();
        Self::new(n, pairs)
    }

    /// The full rectangle rows × cols.
    pub fn block(n: usize, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Result<Self> {
        let pairs = rows
            .flat_map(|i| cols.clone().map(move |j| (i, j)))
            .collect();
        Self::new(n, pairs)
    }

    /// Support of a {0,1} matrix.
    pub fn from_matrix(a: &WeightMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape("edge sets are square".into()));
        }
        if !a.is_binary() {
            return Err(invalid("matrix is not {0,1}-valued"));
        }
        Self::new(a.n_rows(), a.support())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i, j)).is_ok()
    }

    /// The indicator matrix 1_E.
    pub fn indicator(&self) -> WeightMatrix {
        let mut entries = vec![0.0; self.n * self.n];
        for &(i, j) in &self.pairs {
            entries[i * self.n + j] = 1.0;
        }
        WeightMatrix::new(self.n, self.n, entries).expect("edge set dimensions already validated")
    }

    pub fn to_json(&self) -> Value {
        let pairs: Vec<[usize; 2]> = self.pairs.iter().map(|&(i, j)| [i + 1, j + 1]).collect();
        json!({ "n": self.n, "pairs": pairs })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for &(i, j) in &self.pairs {
            let _ = writeln!(out, "{} {}", i + 1, j + 1);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let n = match lines.next() {
            Some((_, l)) => {
                let mut it = l.split_whitespace();
                match (it.next(), it.next().map(str::parse::<usize>)) {
                    (Some("n"), Some(Ok(n))) => n,
                    _ => return Err(Error::Parse("edge set must start with `n <N>`".into())),
                }
            }
            None => return Err(Error::Parse("empty edge set".into())),
        };
        let mut pairs = Vec::new();
        for (lineno, line) in lines {
            let nums: std::result::Result<Vec<usize>, _> =
                line.split_whitespace().map(str::parse::<usize>).collect();
            match nums.map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?[..] {
                [i, j] if i >= 1 && j >= 1 => pairs.push((i - 1, j - 1)),
                _ => return Err(Error::Parse(format!("line {lineno}: expected `i j` (1-based)"))),
            }
        }
        Self::new(n, pairs)
    }
}

/// Parsed content of a matrix or edge-set file.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixInput {
    Weights(WeightMatrix),
    Edges(EdgeSet),
}

impl MatrixInput {
    pub fn into_matrix(self) -> WeightMatrix {
        match self {
            MatrixInput::Weights(m) => m,
            MatrixInput::Edges(e) => e.indicator(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            MatrixInput::Weights(m) => m.to_json(),
            MatrixInput::Edges(e) => e.to_json(),
        }
    }
}

#[derive(Deserialize, Serialize)]
struct JsonInput {
    n: Option<usize>,
    n_rows: Option<usize>,
    n_cols: Option<usize>,
    entries: Option<Vec<Vec<f64>>>,
    pairs: Option<Vec<[usize; 2]>>,
    /// Family instance files wrap the payload in an envelope.
    matrix: Option<Value>,
}

/// Parses either encoding; JSON is recognised by a leading `{`.
pub fn parse_input(text: &str) -> Result<MatrixInput> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let raw: JsonInput =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(inner) = raw.matrix {
            return parse_input(&inner.to_string());
        }
        match (raw.entries, raw.pairs) {
            (Some(rows), None) => {
                let m = WeightMatrix::from_rows(&rows)?;
                let expect_rows = raw.n_rows.or(raw.n);
                let expect_cols = raw.n_cols.or(raw.n);
                if expect_rows.is_some_and(|r| r != m.n_rows())
                    || expect_cols.is_some_and(|c| c != m.n_cols())
                {
                    return Err(Error::Parse("declared dimensions do not match entries".into()));
                }
                Ok(MatrixInput::Weights(m))
            }
            (None, Some(pairs)) => {
                let n = raw.n.ok_or_else(|| Error::Parse("edge set needs `n`".into()))?;
                if pairs.iter().any(|p| p[0] == 0 || p[1] == 0) {
                    return Err(Error::Parse("pair indices are 1-based".into()));
                }
                let pairs = pairs.iter().map(|p| (p[0] - 1, p[1] - 1)).collect();
                Ok(MatrixInput::Edges(EdgeSet::new(n, pairs)?))
            }
            _ => Err(Error::Parse(
                "expected exactly one of `entries` or `pairs`".into(),
            )),
        }
    } else if trimmed.starts_with("n ") || trimmed.starts_with("n\t") {
        Ok(MatrixInput::Edges(EdgeSet::from_text(text)?))
    } else {
        Ok(MatrixInput::Weights(WeightMatrix::from_text(text)?))
    }
}

pub fn read_input(path: &std::path::Path) -> Result<MatrixInput> {
    parse_input(&std::fs::read_to_string(path)?)
}
