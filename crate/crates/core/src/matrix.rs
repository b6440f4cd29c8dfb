//! Dense matrices over exact rational scalars.
//!
//! Row-major storage, zero-based indexing inside the crate. The JSON form is
//! `{"rows": [["3", "1/2"], ...]}` with every entry a scalar string.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::exec;
use crate::ring::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Structural problems building a matrix.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, MatrixError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(MatrixError::Ragged {
                    row: i + 1,
                    got: row.len(),
                    expected: n_cols,
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    /// Test- and fixture-friendly constructor from integer rows.
    ///
    /// Panics on ragged input.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_integer(v)).collect())
                .collect(),
        )
        .expect("ragged integer rows")
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Scalar>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub(crate) fn from_flat(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| {
            if r == c {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
    }

    /// Square diagonal matrix from the given entries.
    pub fn diagonal(entries: &[Scalar]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |r, c| {
            if r == c {
                entries[r].clone()
            } else {
                Scalar::zero()
            }
        })
    }

    pub fn diagonal_int(entries: &[i64]) -> Self {
        let scalars: Vec<Scalar> = entries.iter().map(|&v| Scalar::from_integer(v)).collect();
        Matrix::diagonal(&scalars)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.data[row * self.cols + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, value: Scalar) {
        self.data[row * self.cols + col] = value;
    }

    /// Row-major view of all entries.
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Exact matrix product. Panics on an inner-dimension mismatch; the
    /// public operations validate shapes before multiplying.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "inner dimensions {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let cols = rhs.cols;
        let data = exec::flat_rows(self.rows, |r| {
            let mut out = Vec::with_capacity(cols);
            for c in 0..cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * rhs.get(k, c);
                }
                out.push(acc);
            }
            out
        });
        Matrix::from_flat(self.rows, cols, data)
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix::from_flat(self.rows, self.cols, data)
    }

    pub fn scale(&self, factor: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| a * factor).collect();
        Matrix::from_flat(self.rows, self.cols, data)
    }

    /// `self + c * I`; square only.
    pub fn add_scalar_diag(&self, c: &Scalar) -> Matrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out.get(i, i) + c;
            out.set_entry(i, i, v);
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut acc = Scalar::zero();
        for i in 0..self.rows {
            acc += self.get(i, i);
        }
        acc
    }

    /// Exact determinant by fraction-preserving Gaussian elimination.
    pub fn det(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Scalar::one();
        }
        let mut work: Vec<Vec<Scalar>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(pivot_row) = (col..n).find(|&r| !work[r][col].is_zero()) else {
                return Scalar::zero();
            };
            if pivot_row != col {
                work.swap(pivot_row, col);
                det = -det;
            }
            let pivot = work[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if work[r][col].is_zero() {
                    continue;
                }
                let factor = &work[r][col] / &pivot;
                for c in col..n {
                    let delta = &factor * &work[col][c];
                    work[r][c] -= &delta;
                }
            }
        }
        det
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Scalar::is_integer)
    }

    /// First non-integral entry as 1-based `(row, col)`, if any.
    pub fn first_non_integral(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_integer())
            .map(|idx| (idx / self.cols + 1, idx % self.cols + 1))
    }

    /// Integer entries in row-major order; `None` if any entry has a
    /// denominator.
    pub fn to_bigint_entries(&self) -> Option<Vec<BigInt>> {
        self.data.iter().map(Scalar::to_integer).collect()
    }

    pub fn to_f64_entries(&self) -> Vec<f64> {
        self.data.iter().map(Scalar::to_f64).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        self.get(r, c)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: Vec<Vec<Scalar>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Scalar>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        MatrixRepr { rows }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        Matrix::from_rows(repr.rows).map_err(de::Error::custom)
    }
}
