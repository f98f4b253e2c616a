//! Dense and sparse complex square matrices.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Largest dimension written by [`Operator::to_integer_csv`].
pub const CSV_DIM_LIMIT: usize = 4096;

/// A dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        Ok(Operator(m))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Operator(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Operator::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        Operator(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Operator(self.0.adjoint())
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &Operator) -> Self {
        Operator(&self.0 * &rhs.0)
    }

    pub fn add(&self, rhs: &Operator) -> Self {
        Operator(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Operator) -> Self {
        Operator(&self.0 - &rhs.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Operator(&self.0 * s)
    }

    /// Tensor product `self ⊗ rhs`, with `self` on the more significant qubits.
    pub fn kron(&self, rhs: &Operator) -> Self {
        Operator(self.0.kronecker(&rhs.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Operator::identity(self.dim()))
    }

    /// `‖H − H†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in j..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Nonzero entries as sparse triplets.
    pub fn to_sparse(&self) -> SparseOperator {
        let n = self.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.0[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        SparseOperator { dim: n, entries }
    }

    /// Dense CSV with one matrix row per line. Every entry must be a real
    /// integer.
    pub fn to_integer_csv(&self) -> Result<String> {
        let n = self.dim();
        if n > CSV_DIM_LIMIT {
            return Err(Error::Invalid(format!(
                "dimension {n} exceeds the CSV limit of {CSV_DIM_LIMIT}"
            )));
        }
        let mut out = String::with_capacity(n * n * 2);
        for i in 0..n {
            for j in 0..n {
                let v = self.0[(i, j)];
                if v.im != 0.0 || v.re.fract() != 0.0 {
                    return Err(Error::Invalid(format!(
                        "entry ({i}, {j}) = {v} is not an integer"
                    )));
                }
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{}", v.re as i64).unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Phase-insensitive distance: `min_θ ‖a − e^{iθ} b‖_max`, with the phase
/// fixed by the largest entry of `b`.
pub fn distance_up_to_phase(a: &Operator, b: &Operator) -> f64 {
    let (mut best, mut idx) = (0.0, (0, 0));
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            let m = b.get(i, j).norm();
            if m > best {
                best = m;
                idx = (i, j);
            }
        }
    }
    if best == 0.0 {
        return a.max_abs_diff(b);
    }
    let ratio = a.get(idx.0, idx.1) / b.get(idx.0, idx.1);
    let phase = if ratio.norm() == 0.0 {
        ONE
    } else {
        ratio / ratio.norm()
    };
    a.max_abs_diff(&b.scale(phase))
}

/// A square matrix stored as `(row, col, value)` triplets, sorted row-major
/// with unique positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOperator {
    pub fn new(dim: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, j, _)| (i, j));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::Invalid(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        if let Some(&(i, j, _)) = entries.iter().find(|&&(i, j, _)| i >= dim || j >= dim) {
            return Err(Error::Invalid(format!(
                "entry ({i}, {j}) outside dimension {dim}"
            )));
        }
        Ok(SparseOperator { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries
            .binary_search_by_key(&(row, col), |&(i, j, _)| (i, j))
            .map(|k| self.entries[k].2)
            .unwrap_or(ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        SparseOperator {
            dim,
            entries: (0..dim).map(|i| (i, i, ONE)).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let entries = self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect();
        SparseOperator::new(self.dim, entries).expect("transpose keeps positions unique")
    }

    /// Sparse product `self · rhs`. Exact zeros produced by cancellation are
    /// dropped.
    pub fn mul(&self, rhs: &SparseOperator) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); rhs.dim];
        for &(k, j, v) in &rhs.entries {
            rows[k].push((j, v));
        }
        let mut acc: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for &(i, k, a) in &self.entries {
            for &(j, b) in &rows[k] {
                *acc.entry((i, j)).or_insert(ZERO) += a * b;
            }
        }
        let entries = acc
            .into_iter()
            .filter(|&(_, v)| v != ZERO)
            .map(|((i, j), v)| (i, j, v))
            .collect();
        SparseOperator {
            dim: self.dim,
            entries,
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut diff: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for &(i, j, v) in &self.entries {
            *diff.entry((i, j)).or_insert(ZERO) += v;
        }
        for &(i, j, v) in &other.entries {
            *diff.entry((i, j)).or_insert(ZERO) -= v;
        }
        diff.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Operator {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] = v;
        }
        Operator(m)
    }

    /// One `row col value` line per entry, 1-based, row-major. Real integer
    /// values are written as integers; other values as `re im`.
    pub fn to_triplet_text(&self) -> String {
        let mut out = String::new();
        for &(i, j, v) in &self.entries {
            if v.im == 0.0 && v.re.fract() == 0.0 && v.re.abs() < 1e15 {
                writeln!(out, "{} {} {}", i + 1, j + 1, v.re as i64).unwrap();
            } else {
                writeln!(out, "{} {} {:.16e} {:.16e}", i + 1, j + 1, v.re, v.im).unwrap();
            }
        }
        out
    }

    pub fn from_triplet_text(dim: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| Error::parse(n + 1, format!("bad number {s:?}: {e}")))
            };
            let idx = |s: &str| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(Error::parse(n + 1, format!("bad index {s:?}"))),
                }
            };
            let v = match toks.len() {
                3 => C64::new(num(toks[2])?, 0.0),
                4 => C64::new(num(toks[2])?, num(toks[3])?),
                _ => return Err(Error::parse(n + 1, "expected `row col value`")),
            };
            entries.push((idx(toks[0])?, idx(toks[1])?, v));
        }
        SparseOperator::new(dim, entries)
    }
}
