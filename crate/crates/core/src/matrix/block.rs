use super::DenseMatrix;
use crate::error::{dim_err, Result};

/// An `n x c` matrix seen as a grid of `s x s` blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockView {
    base: DenseMatrix,
    s: usize,
}

impl BlockView {
    pub fn new(base: DenseMatrix, s: usize) -> Result<Self> {
        if s == 0 || base.rows() % s != 0 || base.cols() % s != 0 {
            return Err(dim_err(format!(
                "block size {s} does not divide {}x{}",
                base.rows(),
                base.cols()
            )));
        }
        Ok(BlockView { base, s })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Block rows.
    pub fn m(&self) -> usize {
        self.base.rows() / self.s
    }

    pub fn block_cols(&self) -> usize {
        self.base.cols() / self.s
    }

    pub fn base(&self) -> &DenseMatrix {
        &self.base
    }

    pub fn into_base(self) -> DenseMatrix {
        self.base
    }

    pub fn block(&self, i: usize, j: usize) -> DenseMatrix {
        let s = self.s;
        self.base.submatrix(i * s, (i + 1) * s, j * s, (j + 1) * s)
    }

    pub fn set_block(&mut self, i: usize, j: usize, b: &DenseMatrix) {
        assert_eq!((b.rows(), b.cols()), (self.s, self.s));
        self.base.set_submatrix(i * self.s, j * self.s, b);
    }

    /// All blocks in row-major block order.
    pub fn gather(&self) -> Vec<DenseMatrix> {
        let mut out = Vec::with_capacity(self.m() * self.block_cols());
        for i in 0..self.m() {
            for j in 0..self.block_cols() {
                out.push(self.block(i, j));
            }
        }
        out
    }

    /// Inverse of [`gather`](Self::gather).
    pub fn scatter(&mut self, blocks: &[DenseMatrix]) {
        let bc = self.block_cols();
        assert_eq!(blocks.len(), self.m() * bc);
        for (k, b) in blocks.iter().enumerate() {
            self.set_block(k / bc, k % bc, b);
        }
    }
}
