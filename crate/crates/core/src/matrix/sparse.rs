use super::{BlackBox, DenseMatrix};
use crate::counter::charge;
use crate::error::{dim_err, Error, Result};
use crate::field::{mul_raw, PrimeField, SeededRng};

/// Sparse matrix stored as row-major sorted triplets with nonzero values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    field: PrimeField,
    entries: Vec<(usize, usize, u64)>,
    row_ptr: Vec<usize>,
}

impl SparseMatrix {
    /// Values are reduced mod p and zeros dropped; duplicate positions are an error.
    pub fn new(
        field: PrimeField,
        rows: usize,
        cols: usize,
        triplets: Vec<(usize, usize, u64)>,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(dim_err(format!("entry ({i},{j}) outside {rows}x{cols}")));
            }
            let v = field.reduce(v);
            if v != 0 {
                entries.push((i, j, v));
            }
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
            return Err(Error::InvalidArgument(format!(
                "duplicate entry at ({},{})",
                w[0].0, w[0].1
            )));
        }
        let mut row_ptr = vec![0; rows + 1];
        for &(i, _, _) in &entries {
            row_ptr[i + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseMatrix { rows, cols, field, entries, row_ptr })
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self::new(field, n, n, (0..n).map(|i| (i, i, 1)).collect()).expect("valid")
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self::new(field, rows, cols, Vec::new()).expect("valid")
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut t = Vec::new();
        for i in 0..a.rows() {
            for (j, &v) in a.row(i).iter().enumerate() {
                if v != 0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::new(a.field(), a.rows(), a.cols(), t).expect("valid")
    }

    /// Random matrix where each entry is nonzero with probability `density`.
    pub fn random(field: PrimeField, rows: usize, cols: usize, density: f64, rng: &mut SeededRng) -> Self {
        use rand::Rng;
        let mut t = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(density.clamp(0.0, 1.0)) {
                    t.push((i, j, field.rand_nonzero(rng)));
                }
            }
        }
        Self::new(field, rows, cols, t).expect("valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, u64)] {
        &self.entries
    }

    pub fn row_entries(&self, i: usize) -> &[(usize, usize, u64)] {
        &self.entries[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.field, self.rows, self.cols);
        for &(i, j, v) in &self.entries {
            d.set(i, j, v);
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t = self.entries.iter().map(|&(i, j, v)| (j, i, v)).collect();
        SparseMatrix::new(self.field, self.cols, self.rows, t).expect("valid")
    }

    /// Restriction to rows `r0..r1` and columns `c0..c1`, re-indexed from zero.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> SparseMatrix {
        let t = self
            .entries
            .iter()
            .filter(|&&(i, j, _)| (r0..r1).contains(&i) && (c0..c1).contains(&j))
            .map(|&(i, j, v)| (i - r0, j - c0, v))
            .collect();
        SparseMatrix::new(self.field, r1 - r0, c1 - c0, t).expect("valid")
    }

    /// `A * x` for a column vector.
    pub fn matvec(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != 1 {
            return Err(dim_err("matvec expects a single column"));
        }
        self.mat_apply(x)
    }

    /// `A * B` in Θ(nnz · k) field operations.
    pub fn mat_apply(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.rows() != self.cols || b.field() != self.field {
            return Err(dim_err(format!(
                "apply {}x{} sparse to {}x{}",
                self.rows,
                self.cols,
                b.rows(),
                b.cols()
            )));
        }
        let k = b.cols();
        let p = self.field.modulus();
        let mut out = DenseMatrix::zeros(self.field, self.rows, k);
        for &(i, j, v) in &self.entries {
            let src = b.row(j);
            let dst = out.row_mut(i);
            for (d, &x) in dst.iter_mut().zip(src) {
                let t = *d + mul_raw(v, x, p);
                *d = if t >= p { t - p } else { t };
            }
        }
        let work = (self.entries.len() * k) as u64;
        charge(work, work);
        Ok(out)
    }

    /// `A^T * B` without materializing the transpose.
    pub fn mat_apply_transpose(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.rows() != self.rows || b.field() != self.field {
            return Err(dim_err("transpose apply shape"));
        }
        let k = b.cols();
        let p = self.field.modulus();
        let mut out = DenseMatrix::zeros(self.field, self.cols, k);
        for &(i, j, v) in &self.entries {
            let src = b.row(i);
            let dst = out.row_mut(j);
            for (d, &x) in dst.iter_mut().zip(src) {
                let t = *d + mul_raw(v, x, p);
                *d = if t >= p { t - p } else { t };
            }
        }
        let work = (self.entries.len() * k) as u64;
        charge(work, work);
        Ok(out)
    }
}

impl BlackBox for SparseMatrix {
    fn field(&self) -> PrimeField {
        self.field
    }
    fn nrows(&self) -> usize {
        self.rows
    }
    fn ncols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.mat_apply(x)
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.mat_apply_transpose(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::mat_mul;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn construction_rules() {
        let f = gf(7);
        let m = SparseMatrix::new(f, 2, 2, vec![(1, 0, 3), (0, 1, 14), (0, 0, 1)]).unwrap();
        assert_eq!(m.triplets(), &[(0, 0, 1), (1, 0, 3)]);
        assert!(SparseMatrix::new(f, 2, 2, vec![(2, 0, 1)]).is_err());
        assert!(SparseMatrix::new(f, 2, 2, vec![(0, 0, 1), (0, 0, 2)]).is_err());
    }

    #[test]
    fn matvec_basics() {
        let f = gf(7);
        let x = DenseMatrix::from_rows(f, &[vec![1], vec![2], vec![3]]).unwrap();
        assert!(SparseMatrix::zeros(f, 3, 3).matvec(&x).unwrap().is_zero());
        assert_eq!(SparseMatrix::identity(f, 3).matvec(&x).unwrap(), x);
        assert!(SparseMatrix::identity(f, 2).matvec(&x).is_err());
    }

    #[test]
    fn apply_matches_dense_oracle() {
        let f = gf(65537);
        let mut rng = SeededRng::new(77);
        let a = SparseMatrix::random(f, 32, 32, 0.1, &mut rng);
        let b = DenseMatrix::random(f, 32, 5, &mut rng);
        assert_eq!(a.mat_apply(&b).unwrap(), mat_mul(&a.to_dense(), &b).unwrap());
        assert_eq!(
            a.mat_apply_transpose(&b).unwrap(),
            mat_mul(&a.to_dense().transpose(), &b).unwrap()
        );
        let x = DenseMatrix::random(f, 32, 1, &mut rng);
        assert_eq!(a.matvec(&x).unwrap(), mat_mul(&a.to_dense(), &x).unwrap());
        assert_eq!(SparseMatrix::from_dense(&a.to_dense()), a);
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
    }

    #[test]
    fn apply_cost_is_nnz_times_width() {
        let f = gf(101);
        let mut rng = SeededRng::new(1);
        let a = SparseMatrix::random(f, 20, 20, 0.2, &mut rng);
        let b = DenseMatrix::random(f, 20, 3, &mut rng);
        let (_, c) = crate::counter::OpCounter::measure(|| a.mat_apply(&b).unwrap());
        assert_eq!(c.mul_count, (a.nnz() * 3) as u64);
    }
}
