//! Dense real matrices with row-major storage.
//!
//! Every matrix in this crate is small (the kinematic problems are at most
//! 5×5, the property suites at most 16×16), so the type favours clarity over
//! blocking or SIMD.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A dense `rows × cols` matrix of `f64` stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from a row-major slice, rejecting non-finite entries.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix data"));
        }
        Ok(Self {
            rows,
            cols,
            data: data.to_vec(),
        })
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_slice(rows.len(), cols, &data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// A column vector.
    pub fn column(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub(crate) fn ensure_finite(&self, what: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what))
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|x| k * x)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Matrix product, checking conformity.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to a vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape(format!(
                "elementwise operation on {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest absolute entrywise difference; `f64::INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.try_sub(other).map_or(f64::INFINITY, |d| d.max_abs())
    }

    /// Frobenius norm of the difference; `f64::INFINITY` on shape mismatch.
    pub fn frobenius_diff(&self, other: &Matrix) -> f64 {
        self.try_sub(other)
            .map_or(f64::INFINITY, |d| d.frobenius_norm())
    }

    /// Copies the `rows × cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Matrix> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::Shape(format!(
                "block {rows}x{cols} at ({r0},{c0}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)]))
    }

    /// Assembles `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(tl: &Matrix, tr: &Matrix, bl: &Matrix, br: &Matrix) -> Result<Matrix> {
        if tl.rows != tr.rows || bl.rows != br.rows || tl.cols != bl.cols || tr.cols != br.cols {
            return Err(Error::Shape(format!(
                "blocks do not tile: {:?} {:?} / {:?} {:?}",
                tl.shape(),
                tr.shape(),
                bl.shape(),
                br.shape()
            )));
        }
        let (top, left) = (tl.rows, tl.cols);
        Ok(Matrix::from_fn(
            top + bl.rows,
            left + tr.cols,
            |i, j| match (i < top, j < left) {
                (true, true) => tl[(i, j)],
                (true, false) => tr[(i, j - left)],
                (false, true) => bl[(i - top, j)],
                (false, false) => br[(i - top, j - left)],
            },
        ))
    }

    /// Block-diagonal composition `diag(a, b)`.
    pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        Matrix::from_blocks(
            a,
            &Matrix::zeros(a.rows, b.cols),
            &Matrix::zeros(b.rows, a.cols),
            b,
        )
        .expect("block_diag shapes always tile")
    }

    /// The diagonal as a vector (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Left-multiplies by `diag(d)`, i.e. scales row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<Matrix> {
        if d.len() != self.rows {
            return Err(Error::Shape(format!(
                "{} row scales for {} rows",
                d.len(),
                self.rows
            )));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| {
            d[i] * self[(i, j)]
        }))
    }

    /// Right-multiplies by `diag(e)`, i.e. scales column `j` by `e[j]`.
    pub fn scale_cols(&self, e: &[f64]) -> Result<Matrix> {
        if e.len() != self.cols {
            return Err(Error::Shape(format!(
                "{} column scales for {} columns",
                e.len(),
                self.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)] * e[j]
        }))
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

/// Square diagonal matrix with the given diagonal.
pub fn diag_from(values: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(values.len(), values.len());
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = v;
    }
    m
}

/// `dim × dim` identity with a plane rotation by `theta` planted in the
/// `(axes.0, axes.1)` plane: `[[cos, -sin], [sin, cos]]`.
pub fn rotation_embed(theta: f64, dim: usize, axes: (usize, usize)) -> Result<Matrix> {
    let (p, q) = axes;
    if p == q || p >= dim || q >= dim {
        return Err(Error::InvalidInput(format!(
            "rotation axes ({p},{q}) invalid for dimension {dim}"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::NonFinite("rotation angle"));
    }
    let (s, c) = theta.sin_cos();
    let mut r = Matrix::identity(dim);
    r[(p, p)] = c;
    r[(p, q)] = -s;
    r[(q, p)] = s;
    r[(q, q)] = c;
    Ok(r)
}

/// Kronecker product: block `(i, j)` of the result is `a[i, j] · b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.ensure_finite("kron left operand")?;
    b.ensure_finite("kron right operand")?;
    let (p, q) = b.shape();
    Ok(Matrix::from_fn(a.rows * p, a.cols * q, |i, j| {
        a[(i / p, j / q)] * b[(i % p, j % q)]
    }))
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch, like indexing out of bounds. Use
// the `try_*`/`matmul` methods where shapes are not known statically.

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}
