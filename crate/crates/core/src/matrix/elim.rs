//! Gaussian elimination: echelon forms, inverse, rank, nullspace and rank
//! factorization. These are the dense oracles the structured routines are
//! checked against.

use super::DenseMatrix;
use crate::error::{dim_err, Error, Result};

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rref: DenseMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn echelon(a: &DenseMatrix) -> Echelon {
    let f = a.field();
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m.get(i, c) != 0) else {
            continue;
        };
        swap_rows(&mut m, r, pr);
        let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
        f.scale_in_place(&mut m.row_mut(r)[c..], inv);
        let pivot_row = m.row(r)[c..].to_vec();
        for i in 0..rows {
            if i != r {
                let factor = m.get(i, c);
                if factor != 0 {
                    f.sub_scaled(&mut m.row_mut(i)[c..], &pivot_row, factor);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rref: m, pivots }
}

fn swap_rows(m: &mut DenseMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let cols = m.cols();
    let data = m.data_mut();
    let (lo, hi) = (i.min(j), i.max(j));
    let (head, tail) = data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}

pub fn dense_rank(a: &DenseMatrix) -> usize {
    echelon(a).rank()
}

/// Basis of the right nullspace as columns: `a * N = 0`, `N` is `cols x (cols - rank)`.
pub fn dense_nullspace(a: &DenseMatrix) -> DenseMatrix {
    let f = a.field();
    let e = echelon(a);
    let cols = a.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !e.pivots.contains(c)).collect();
    let mut n = DenseMatrix::zeros(f, cols, free.len());
    for (k, &fc) in free.iter().enumerate() {
        n.set(fc, k, 1);
        for (row, &pc) in e.pivots.iter().enumerate() {
            n.set(pc, k, f.neg(e.rref.get(row, fc)));
        }
    }
    n
}

/// Gauss-Jordan inversion with nonzero pivoting.
pub fn dense_inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(dim_err(format!("inverse of a {}x{} matrix", a.rows(), a.cols())));
    }
    let f = a.field();
    let n = a.rows();
    let mut aug = DenseMatrix::hstack(&[a, &DenseMatrix::identity(f, n)])?;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| aug.get(i, c) != 0) else {
            return Err(Error::Singular { rank_hint: dense_rank(a) });
        };
        swap_rows(&mut aug, c, pr);
        let inv = f.inv(aug.get(c, c)).expect("nonzero pivot");
        f.scale_in_place(&mut aug.row_mut(c)[c..], inv);
        let pivot_row = aug.row(c)[c..].to_vec();
        for i in 0..n {
            if i != c {
                let factor = aug.get(i, c);
                if factor != 0 {
                    f.sub_scaled(&mut aug.row_mut(i)[c..], &pivot_row, factor);
                }
            }
        }
    }
    Ok(aug.submatrix(0, n, n, 2 * n))
}

/// Exact rank factorization `a = X * Y^T` with `X: rows x r`, `Y: cols x r`.
pub fn rank_factorization(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let e = echelon(a);
    let r = e.rank();
    let f = a.field();
    let mut x = DenseMatrix::zeros(f, a.rows(), r);
    for (k, &pc) in e.pivots.iter().enumerate() {
        for i in 0..a.rows() {
            x.set(i, k, a.get(i, pc));
        }
    }
    let y = e.rref.submatrix(0, r, 0, a.cols()).transpose();
    (x, y)
}

/// Determinant by elimination.
pub fn determinant(a: &DenseMatrix) -> Result<u64> {
    if !a.is_square() {
        return Err(dim_err("determinant of a non-square matrix"));
    }
    let f = a.field();
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1u64;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| m.get(i, c) != 0) else {
            return Ok(0);
        };
        if pr != c {
            swap_rows(&mut m, c, pr);
            det = f.neg(det);
        }
        let piv = m.get(c, c);
        det = f.mul(det, piv);
        let inv = f.inv(piv)?;
        let pivot_row = m.row(c)[c..].to_vec();
        for i in c + 1..n {
            let factor = f.mul(m.get(i, c), inv);
            if factor != 0 {
                f.sub_scaled(&mut m.row_mut(i)[c..], &pivot_row, factor);
            }
        }
    }
    Ok(det)
}
