//! Named structured matrices, materialized densely.
//!
//! Block indices are 0-based throughout. A block column `W` is an `n x s`
//! matrix holding the blocks `w_0, ..., w_{m-1}` stacked vertically.

use crate::error::{dim_err, Result};
use crate::field::PrimeField;
use crate::matrix::{mat_mul, DenseMatrix};

/// The circulant-type shift `Z_f`: ones on the subdiagonal and `f` in the
/// top right corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftMatrix {
    pub n: usize,
    pub f: u64,
    pub transposed: bool,
}

impl ShiftMatrix {
    pub fn down(n: usize) -> Self {
        ShiftMatrix { n, f: 0, transposed: false }
    }

    pub fn up(n: usize) -> Self {
        ShiftMatrix { n, f: 0, transposed: true }
    }

    pub fn to_dense(&self, field: PrimeField) -> DenseMatrix {
        let n = self.n;
        let mut z = DenseMatrix::zeros(field, n, n);
        for i in 1..n {
            z.set(i, i - 1, 1);
        }
        if n > 0 {
            let f = field.reduce(self.f);
            let prev = z.get(0, n - 1);
            z.set(0, n - 1, field.add(prev, f));
        }
        if self.transposed {
            z.transpose()
        } else {
            z
        }
    }
}

/// `Z_0^s`, the block down-shift by `s` rows.
pub fn block_shift(field: PrimeField, n: usize, s: usize) -> DenseMatrix {
    let mut z = DenseMatrix::zeros(field, n, n);
    for i in s..n {
        z.set(i, i - s, 1);
    }
    z
}

fn block_count(w: &DenseMatrix) -> Result<(usize, usize)> {
    let s = w.cols();
    if s == 0 || w.rows() % s != 0 {
        return Err(dim_err(format!("{}x{} is not a block column", w.rows(), w.cols())));
    }
    Ok((s, w.rows() / s))
}

fn wblock(w: &DenseMatrix, s: usize, k: usize) -> DenseMatrix {
    w.submatrix(k * s, (k + 1) * s, 0, s)
}

/// Block lower-triangular block Toeplitz matrix with first block column `W`.
pub fn build_l(w: &DenseMatrix) -> Result<DenseMatrix> {
    let (s, m) = block_count(w)?;
    let mut out = DenseMatrix::zeros(w.field(), s * m, s * m);
    for j in 0..m {
        for k in 0..=j {
            out.set_submatrix(j * s, k * s, &wblock(w, s, j - k));
        }
    }
    Ok(out)
}

/// `L(W)^T`.
pub fn build_u(w: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(build_l(w)?.transpose())
}

/// Block Hankel matrix with first block column `W` and zero blocks below the
/// main block anti-diagonal.
pub fn build_g(w: &DenseMatrix) -> Result<DenseMatrix> {
    let (s, m) = block_count(w)?;
    let mut out = DenseMatrix::zeros(w.field(), s * m, s * m);
    for j in 0..m {
        for k in 0..m - j {
            out.set_submatrix(j * s, k * s, &wblock(w, s, j + k));
        }
    }
    Ok(out)
}

/// Block upper-triangular block Toeplitz matrix whose first block row is the
/// `s x n` matrix `q`.
pub fn build_uptri_toeplitz(q: &DenseMatrix) -> Result<DenseMatrix> {
    build_u(&q.transpose())
}

/// Block diagonal matrix `D(U)`.
pub fn build_d(field: PrimeField, blocks: &[DenseMatrix]) -> Result<DenseMatrix> {
    let s = blocks.first().map_or(0, DenseMatrix::rows);
    if blocks.iter().any(|b| b.rows() != s || b.cols() != s || b.field() != field) {
        return Err(dim_err("diagonal blocks must be square of equal size"));
    }
    let n = s * blocks.len();
    let mut out = DenseMatrix::zeros(field, n, n);
    for (i, b) in blocks.iter().enumerate() {
        out.set_submatrix(i * s, i * s, b);
    }
    Ok(out)
}

/// Vandermonde matrix, row `i` is `(1, u_i, u_i^2, ...)`.
pub fn build_v(field: PrimeField, u: &[u64]) -> DenseMatrix {
    let n = u.len();
    let mut out = DenseMatrix::zeros(field, n, n);
    for (i, &ui) in u.iter().enumerate() {
        let ui = field.reduce(ui);
        let mut x = 1;
        for j in 0..n {
            out.set(i, j, x);
            x = field.mul(x, ui);
        }
    }
    out
}

/// `[T]_{i,j} = t_{i-j}`: `col[k] = t_k` and `row[k] = t_{-k}`; `col[0]` and
/// `row[0]` must agree.
pub fn build_block_toeplitz(col: &[DenseMatrix], row: &[DenseMatrix]) -> Result<DenseMatrix> {
    let m = col.len();
    if m == 0 || row.len() != m || col[0] != row[0] {
        return Err(dim_err("block Toeplitz needs equal-length column and row sharing t_0"));
    }
    let s = col[0].rows();
    if col.iter().chain(row).any(|b| b.rows() != s || b.cols() != s) {
        return Err(dim_err("inconsistent block sizes"));
    }
    let mut out = DenseMatrix::zeros(col[0].field(), s * m, s * m);
    for i in 0..m {
        for j in 0..m {
            let b = if i >= j { &col[i - j] } else { &row[j - i] };
            out.set_submatrix(i * s, j * s, b);
        }
    }
    Ok(out)
}

/// `[H]_{i,j} = h_{i+j}` from the `2m - 1` blocks `h_0, ..., h_{2m-2}`.
pub fn build_block_hankel(h: &[DenseMatrix]) -> Result<DenseMatrix> {
    if h.is_empty() || h.len() % 2 == 0 {
        return Err(dim_err("block Hankel needs an odd number of blocks"));
    }
    let m = (h.len() + 1) / 2;
    let s = h[0].rows();
    if h.iter().any(|b| b.rows() != s || b.cols() != s) {
        return Err(dim_err("inconsistent block sizes"));
    }
    let mut out = DenseMatrix::zeros(h[0].field(), s * m, s * m);
    for i in 0..m {
        for j in 0..m {
            out.set_submatrix(i * s, j * s, &h[i + j]);
        }
    }
    Ok(out)
}

/// `sum_i L(X_i) U(Y_i)` over the width-`s` slabs, computed densely.
pub fn toeplitz_sum_oracle(x: &DenseMatrix, y: &DenseMatrix, s: usize) -> Result<DenseMatrix> {
    slab_sum(x, y, s, build_l)
}

/// `sum_i G(X_i) U(Y_i)` over the width-`s` slabs, computed densely.
pub fn hankel_sum_oracle(x: &DenseMatrix, y: &DenseMatrix, s: usize) -> Result<DenseMatrix> {
    slab_sum(x, y, s, build_g)
}

fn slab_sum(
    x: &DenseMatrix,
    y: &DenseMatrix,
    s: usize,
    left: fn(&DenseMatrix) -> Result<DenseMatrix>,
) -> Result<DenseMatrix> {
    let n = x.rows();
    if y.rows() != n || x.cols() != y.cols() || s == 0 || x.cols() % s != 0 {
        return Err(dim_err("generator slabs do not line up"));
    }
    let mut acc = DenseMatrix::zeros(x.field(), n, n);
    for i in 0..x.cols() / s {
        let xi = x.submatrix(0, n, i * s, (i + 1) * s);
        let yi = y.submatrix(0, n, i * s, (i + 1) * s);
        acc = acc.add(&mat_mul(&left(&xi)?, &build_u(&yi)?)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SeededRng;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn col(f: PrimeField, v: &[u64]) -> DenseMatrix {
        DenseMatrix::new(f, v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn l_and_g_small() {
        let f = gf(7);
        let w = col(f, &[1, 2, 3]);
        let l = build_l(&w).unwrap();
        assert_eq!(l, DenseMatrix::from_rows(f, &[vec![1, 0, 0], vec![2, 1, 0], vec![3, 2, 1]]).unwrap());
        assert_eq!(build_u(&w).unwrap(), l.transpose());
        let g = build_g(&w).unwrap();
        assert_eq!(g, DenseMatrix::from_rows(f, &[vec![1, 2, 3], vec![2, 3, 0], vec![3, 0, 0]]).unwrap());
        assert_eq!(g.transpose(), g);
        let only_first = build_g(&col(f, &[4, 0, 0])).unwrap();
        assert_eq!(only_first.data().iter().filter(|&&v| v != 0).count(), 1);
        assert_eq!(only_first.get(0, 0), 4);
    }

    #[test]
    fn identity_block_column_gives_identity() {
        let f = gf(11);
        let s = 3;
        let mut w = DenseMatrix::zeros(f, 4 * s, s);
        w.set_submatrix(0, 0, &DenseMatrix::identity(f, s));
        assert!(build_l(&w).unwrap().is_identity());
    }

    #[test]
    fn block_l_matches_indexing() {
        let f = gf(101);
        let mut rng = SeededRng::new(1);
        let (s, m) = (2, 4);
        let w = DenseMatrix::random(f, s * m, s, &mut rng);
        let l = build_l(&w).unwrap();
        let g = build_g(&w).unwrap();
        for j in 0..m {
            for k in 0..m {
                let lb = l.submatrix(j * s, (j + 1) * s, k * s, (k + 1) * s);
                let gb = g.submatrix(j * s, (j + 1) * s, k * s, (k + 1) * s);
                let want_l = if j >= k { wblock(&w, s, j - k) } else { DenseMatrix::zeros(f, s, s) };
                let want_g = if j + k < m { wblock(&w, s, j + k) } else { DenseMatrix::zeros(f, s, s) };
                assert_eq!(lb, want_l);
                assert_eq!(gb, want_g);
            }
        }
    }

    #[test]
    fn vandermonde_and_diagonal() {
        let f = gf(7);
        assert_eq!(build_v(f, &[2, 3]), DenseMatrix::from_rows(f, &[vec![1, 2], vec![1, 3]]).unwrap());
        let ones = build_v(f, &[1, 1, 1]);
        assert!(ones.data().iter().all(|&v| v == 1));
        let v = build_v(f, &[3, 5, 6, 2]);
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(v.get(i, j + 1), f.mul(v.get(i, 1), v.get(i, j)));
            }
        }
        let blocks = vec![DenseMatrix::identity(f, 2); 3];
        assert!(build_d(f, &blocks).unwrap().is_identity());
    }

    #[test]
    fn shifts_move_rows_and_columns() {
        let f = gf(101);
        let mut rng = SeededRng::new(3);
        let a = DenseMatrix::random(f, 5, 5, &mut rng);
        let z = ShiftMatrix::down(5).to_dense(f);
        let za = mat_mul(&z, &a).unwrap();
        let azt = mat_mul(&a, &z.transpose()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(za.get(i, j), if i == 0 { 0 } else { a.get(i - 1, j) });
                assert_eq!(azt.get(i, j), if j == 0 { 0 } else { a.get(i, j - 1) });
            }
        }
        let zf = ShiftMatrix { n: 3, f: 4, transposed: false }.to_dense(f);
        assert_eq!(zf.get(0, 2), 4);
        assert_eq!(ShiftMatrix::up(3).to_dense(f), ShiftMatrix::down(3).to_dense(f).transpose());
        assert_eq!(block_shift(f, 5, 1), z);
    }

    #[test]
    fn toeplitz_and_hankel_builders() {
        let f = gf(7);
        let h: Vec<DenseMatrix> = [1, 2, 3].iter().map(|&v| DenseMatrix::from_rows(f, &[vec![v]]).unwrap()).collect();
        assert_eq!(build_block_hankel(&h).unwrap(), DenseMatrix::from_rows(f, &[vec![1, 2], vec![2, 3]]).unwrap());
        let mut rng = SeededRng::new(5);
        let (s, m) = (2, 3);
        let hb: Vec<DenseMatrix> = (0..2 * m - 1).map(|_| DenseMatrix::random(f, s, s, &mut rng)).collect();
        let hm = build_block_hankel(&hb).unwrap();
        for i in 0..m - 1 {
            for j in 1..m {
                let a = hm.submatrix(i * s, (i + 1) * s, j * s, (j + 1) * s);
                let b = hm.submatrix((i + 1) * s, (i + 2) * s, (j - 1) * s, j * s);
                assert_eq!(a, b);
            }
        }
        let c: Vec<DenseMatrix> = (0..m).map(|_| DenseMatrix::random(f, s, s, &mut rng)).collect();
        let mut r: Vec<DenseMatrix> = (0..m).map(|_| DenseMatrix::random(f, s, s, &mut rng)).collect();
        r[0] = c[0].clone();
        let t = build_block_toeplitz(&c, &r).unwrap();
        assert_eq!(t.submatrix(2 * s, 3 * s, 0, s), c[2]);
        assert_eq!(t.submatrix(0, s, 2 * s, 3 * s), r[2]);
        assert!(build_block_toeplitz(&c, &c[1..]).is_err());
    }
}
