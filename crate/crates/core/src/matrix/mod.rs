//! Dense, sparse and block-viewed matrices over GF(p).

mod block;
mod dense;
pub mod elim;
pub mod io;
mod mul;
mod sparse;

pub use block::BlockView;
pub use dense::DenseMatrix;
pub use elim::{dense_inverse, dense_nullspace, dense_rank, determinant, rank_factorization};
pub use mul::{mat_mul, mat_mul_strassen, schoolbook_mul_count, set_threads, threads};
pub use sparse::SparseMatrix;

use crate::error::Result;
use crate::field::PrimeField;

/// A linear operator known only through products with explicit matrices.
pub trait BlackBox {
    fn field(&self) -> PrimeField;
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `A * X`.
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix>;
    /// `A^T * X`.
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix>;
}

impl BlackBox for DenseMatrix {
    fn field(&self) -> PrimeField {
        DenseMatrix::field(self)
    }
    fn nrows(&self) -> usize {
        self.rows()
    }
    fn ncols(&self) -> usize {
        self.cols()
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        mat_mul(self, x)
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        mat_mul(&self.transpose(), x)
    }
}

impl<B: BlackBox + ?Sized> BlackBox for &B {
    fn field(&self) -> PrimeField {
        (**self).field()
    }
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        (**self).apply(x)
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        (**self).apply_transpose(x)
    }
}

/// Densifies a black box by applying it to the identity.
pub fn densify<B: BlackBox + ?Sized>(a: &B) -> Result<DenseMatrix> {
    a.apply(&DenseMatrix::identity(a.field(), a.ncols()))
}
