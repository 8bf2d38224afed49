//! Dense exact matrices with optional row labels and block metadata.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::poly::{AffineCoeff, ParamId, PolyError, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse matrix: {0}")]
    Parse(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A named contiguous range of rows (and the matching columns).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub label: String,
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    labels: Vec<String>,
    blocks: Vec<BlockSpan>,
}

pub type RationalMatrix = Matrix<Rational>;
pub type AffineMatrix = Matrix<AffineCoeff>;

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Matrix<T> {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
            labels: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Matrix<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            data,
            labels: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Matrix<T>, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Dimension("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
            labels: Vec::new(),
            blocks: Vec::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(k, v)| (k / self.cols.max(1), k % self.cols.max(1), v))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn blocks(&self) -> &[BlockSpan] {
        &self.blocks
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Matrix<T> {
        self.labels = labels;
        self
    }

    pub fn with_blocks(mut self, blocks: Vec<BlockSpan>) -> Matrix<T> {
        self.blocks = blocks;
        self
    }

    /// Drops labels and blocks, keeping only the entries.
    pub fn bare(&self) -> Matrix<T> {
        Matrix {
            labels: Vec::new(),
            blocks: Vec::new(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Matrix<T> {
        let mut out = Matrix::from_fn(keep.len(), keep.len(), |i, j| self.get(keep[i], keep[j]).clone());
        if !self.labels.is_empty() {
            out.labels = keep.iter().map(|&k| self.labels[k].clone()).collect();
        }
        out
    }

    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Matrix<T> {
        Matrix::from_fn(h, w, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            labels: self.labels.clone(),
            blocks: self.blocks.clone(),
        }
    }
}

impl<T: Clone + PartialEq> Matrix<T> {
    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Same entries, ignoring labels and blocks.
    pub fn same_entries(&self, other: &Matrix<T>) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }

    /// First `(i, j)` where the entries differ.
    pub fn first_difference(&self, other: &Matrix<T>) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        (0..self.data.len())
            .find(|&k| self.data[k] != other.data[k])
            .map(|k| (k / self.cols, k % self.cols))
    }
}

impl<T: Clone + fmt::Display> Matrix<T> {
    /// Canonical text: one row per line, entries separated by a single space.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// SHA-256 over the dimensions and canonical entry text.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}x{}\n", self.rows, self.cols));
        h.update(self.to_text());
        hex::encode(h.finalize())
    }
}

impl<T: Clone + FromStr> Matrix<T>
where
    T::Err: fmt::Display,
{
    /// Parses whitespace-separated rows (blank lines and `#` comments skipped).
    pub fn from_text(text: &str) -> Result<Matrix<T>, MatrixError> {
        let rows = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|tok| tok.parse::<T>().map_err(|e| MatrixError::Parse(format!("`{tok}`: {e}"))))
                    .collect::<Result<Vec<T>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(rows)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    blocks: Vec<BlockSpan>,
    entries: Vec<Vec<String>>,
}

impl<T: Clone + fmt::Display> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            labels: self.labels.clone(),
            blocks: self.blocks.clone(),
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(ToString::to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de, T: Clone + FromStr> Deserialize<'de> for Matrix<T>
where
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let rows = raw
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| s.parse::<T>().map_err(|e| D::Error::custom(format!("`{s}`: {e}"))))
                    .collect::<Result<Vec<T>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut m = Matrix::from_rows(rows).map_err(D::Error::custom)?;
        if m.rows != raw.rows || (m.rows > 0 && m.cols != raw.cols) {
            return Err(D::Error::custom("declared dimensions do not match entries"));
        }
        m.cols = raw.cols;
        if !raw.labels.is_empty() && raw.labels.len() != m.rows {
            return Err(D::Error::custom("label count does not match rows"));
        }
        m.labels = raw.labels;
        m.blocks = raw.blocks;
        Ok(m)
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        Matrix::filled(rows, cols, Rational::zero())
    }

    pub fn identity(n: usize) -> RationalMatrix {
        Matrix::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> RationalMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
        .expect("rectangular input")
    }

    pub fn all_ones(rows: usize, cols: usize) -> RationalMatrix {
        Matrix::filled(rows, cols, Rational::one())
    }

    pub fn diagonal(values: &[Rational]) -> RationalMatrix {
        Matrix::from_fn(values.len(), values.len(), |i, j| {
            if i == j { values[i].clone() } else { Rational::zero() }
        })
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Rational::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc += a * other.get(k, j);
                }
            }
            acc
        }))
    }

    pub fn add(&self, other: &RationalMatrix) -> Result<RationalMatrix, MatrixError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RationalMatrix) -> Result<RationalMatrix, MatrixError> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(
        &self,
        other: &RationalMatrix,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<RationalMatrix, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::Dimension("shapes differ".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| f(self.get(i, j), other.get(i, j))))
    }

    pub fn scale(&self, factor: &Rational) -> RationalMatrix {
        self.map(|v| v * factor)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &RationalMatrix) -> RationalMatrix {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn entry_sum(&self) -> Rational {
        self.data.iter().cloned().sum()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }
}

impl AffineMatrix {
    pub fn constant(m: &RationalMatrix) -> AffineMatrix {
        m.map(|v| AffineCoeff::constant(v.clone()))
    }

    /// Numeric matrix once every parameter is bound.
    pub fn evaluate(&self, values: &std::collections::BTreeMap<ParamId, Rational>) -> Result<RationalMatrix, MatrixError> {
        let data = self
            .data
            .iter()
            .map(|c| c.evaluate(values))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
            labels: self.labels.clone(),
            blocks: self.blocks.clone(),
        })
    }

    /// Numeric matrix if no entry carries a parameter.
    pub fn as_constant(&self) -> Option<RationalMatrix> {
        let data = self
            .data
            .iter()
            .map(|c| c.as_constant().cloned())
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
            labels: self.labels.clone(),
            blocks: self.blocks.clone(),
        })
    }

    pub fn entry_sum(&self) -> AffineCoeff {
        let mut acc = AffineCoeff::zero();
        for c in &self.data {
            acc.add_assign_ref(c);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn kron_and_mul() {
        let a = RationalMatrix::from_i64_rows(&[vec![4, 2], vec![2, 4]]);
        let j = RationalMatrix::all_ones(2, 2);
        let k = a.kron(&j);
        assert_eq!(k.rows(), 4);
        assert_eq!(*k.get(0, 1), rat(4));
        assert_eq!(*k.get(0, 2), rat(2));
        assert_eq!(*k.get(3, 3), rat(4));
        let i = RationalMatrix::identity(2);
        assert_eq!(a.mul(&i).unwrap(), a);
        assert!(a.mul(&RationalMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn text_and_json_roundtrip() {
        let m = RationalMatrix::from_text("1 -2/3\n-2/3 5\n").unwrap();
        assert!(m.is_symmetric());
        assert_eq!(m.to_text(), "1 -2/3\n-2/3 5\n");
        let labeled = m.clone().with_labels(vec!["p".into(), "q".into()]);
        let json = serde_json::to_string(&labeled).unwrap();
        let back: RationalMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, labeled);
        assert_eq!(back.hash(), m.hash());
    }

    #[test]
    fn submatrix_and_trace() {
        let m = RationalMatrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 5, 6], vec![3, 6, 9]]);
        let s = m.principal_submatrix(&[0, 2]);
        assert_eq!(s, RationalMatrix::from_i64_rows(&[vec![1, 3], vec![3, 9]]));
        assert_eq!(m.trace(), rat(15));
        assert_eq!(m.entry_sum(), rat(37));
        assert_eq!(m.transpose(), m);
    }

    #[test]
    fn affine_matrix_evaluates() {
        let m: AffineMatrix = Matrix::from_text("x1 2\n2 x1+1").unwrap();
        assert!(m.is_symmetric());
        assert!(m.as_constant().is_none());
        let vals = [(ParamId(1), rat(3))].into_iter().collect();
        assert_eq!(m.evaluate(&vals).unwrap(), RationalMatrix::from_i64_rows(&[vec![3, 2], vec![2, 4]]));
    }
}
