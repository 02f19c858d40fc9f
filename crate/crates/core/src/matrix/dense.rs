use std::fmt;
use std::ops::Index;

use crate::error::{dim_err, Error, Result};
use crate::field::{PrimeField, SeededRng};

/// Row-major dense matrix over GF(p).
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    field: PrimeField,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} over GF({})", self.rows, self.cols, self.field.modulus())?;
        for i in 0..self.rows.min(16) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(16)])?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_err(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(&v) = data.iter().find(|&&v| v >= field.modulus()) {
            return Err(Error::InvalidArgument(format!(
                "entry {v} is not a canonical residue mod {}",
                field.modulus()
            )));
        }
        Ok(DenseMatrix { rows, cols, data, field })
    }

    /// Builds from rows of arbitrary integers, reducing each into `[0, p)`.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(dim_err("ragged rows"));
        }
        let data = rows.iter().flatten().map(|&v| field.reduce(v)).collect();
        Ok(DenseMatrix { rows: r, cols: c, data, field })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0; rows * cols], field }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn random(field: PrimeField, rows: usize, cols: usize, rng: &mut SeededRng) -> Self {
        let data = (0..rows * cols).map(|_| field.rand(rng)).collect();
        DenseMatrix { rows, cols, data, field }
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(field: PrimeField, diag: &[u64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(field, n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = field.reduce(d);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j]
    }

    /// Stores `v mod p` at `(i, j)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        self.data[i * self.cols + j] = self.field.reduce(v);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Copy of rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> DenseMatrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        let mut out = Self::zeros(self.field, r1 - r0, c1 - c0);
        for i in r0..r1 {
            out.row_mut(i - r0).copy_from_slice(&self.row(i)[c0..c1]);
        }
        out
    }

    /// Overwrites the region starting at `(r0, c0)` with `m`.
    pub fn set_submatrix(&mut self, r0: usize, c0: usize, m: &DenseMatrix) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols);
        for i in 0..m.rows {
            let cols = self.cols;
            self.data[(r0 + i) * cols + c0..(r0 + i) * cols + c0 + m.cols].copy_from_slice(m.row(i));
        }
    }

    /// Adds `m` into the region starting at `(r0, c0)`.
    pub fn add_submatrix(&mut self, r0: usize, c0: usize, m: &DenseMatrix) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols);
        let f = self.field;
        for i in 0..m.rows {
            let cols = self.cols;
            let dst = &mut self.data[(r0 + i) * cols + c0..(r0 + i) * cols + c0 + m.cols];
            f.add_assign(dst, m.row(i));
        }
    }

    pub fn hstack(parts: &[&DenseMatrix]) -> Result<DenseMatrix> {
        let first = parts.first().ok_or_else(|| dim_err("hstack of nothing"))?;
        let rows = first.rows;
        if parts.iter().any(|m| m.rows != rows || m.field != first.field) {
            return Err(dim_err("hstack row counts differ"));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(first.field, rows, cols);
        let mut c0 = 0;
        for m in parts {
            out.set_submatrix(0, c0, m);
            c0 += m.cols;
        }
        Ok(out)
    }

    pub fn vstack(parts: &[&DenseMatrix]) -> Result<DenseMatrix> {
        let first = parts.first().ok_or_else(|| dim_err("vstack of nothing"))?;
        let cols = first.cols;
        if parts.iter().any(|m| m.cols != cols || m.field != first.field) {
            return Err(dim_err("vstack column counts differ"));
        }
        let mut data = Vec::with_capacity(parts.iter().map(|m| m.data.len()).sum());
        for m in parts {
            data.extend_from_slice(&m.data);
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        Ok(DenseMatrix { rows, cols, data, field: first.field })
    }

    fn check_same_shape(&self, other: &DenseMatrix, what: &str) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.modulus(),
                right: other.field.modulus(),
            });
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(dim_err(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other, "add")?;
        let mut out = self.clone();
        self.field.add_assign(&mut out.data, &other.data);
        Ok(out)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other, "sub")?;
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data, field: f })
    }

    pub fn neg(&self) -> DenseMatrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.neg(a)).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data, field: f }
    }

    pub fn scale(&self, c: u64) -> DenseMatrix {
        let mut out = self.clone();
        self.field.scale_in_place(&mut out.data, self.field.reduce(c));
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    /// Exact product `self * other`.
    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        super::mat_mul(self, other)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = u64;
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}
