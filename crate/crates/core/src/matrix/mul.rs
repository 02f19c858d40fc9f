use std::sync::atomic::{AtomicUsize, Ordering};

use super::DenseMatrix;
use crate::counter::charge;
use crate::error::{dim_err, Error, Result};
use crate::field::dot_raw;

static THREADS: AtomicUsize = AtomicUsize::new(1);

/// Number of worker threads used by [`mat_mul`] (default 1).
pub fn set_threads(n: usize) {
    THREADS.store(n.max(1), Ordering::Relaxed);
}

pub fn threads() -> usize {
    THREADS.load(Ordering::Relaxed)
}

fn check_mul(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch { left: a.field().modulus(), right: b.field().modulus() });
    }
    if a.cols() != b.rows() {
        return Err(dim_err(format!(
            "product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Schoolbook product. Charges `r*c*k` multiplications and `r*c*(k-1)` additions.
pub fn mat_mul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_mul(a, b)?;
    let (r, k, c) = (a.rows(), a.cols(), b.cols());
    let field = a.field();
    let mut out = DenseMatrix::zeros(field, r, c);
    if r == 0 || c == 0 {
        return Ok(out);
    }
    let bt = b.transpose();
    let p = field.modulus();
    let fill = |rows: std::ops::Range<usize>, dst: &mut [u64]| {
        for (local, i) in rows.enumerate() {
            let ar = a.row(i);
            for j in 0..c {
                dst[local * c + j] = dot_raw(ar, bt.row(j), p);
            }
        }
    };
    let t = threads().min(r);
    if t <= 1 {
        fill(0..r, out.data_mut());
    } else {
        let band = r.div_ceil(t);
        std::thread::scope(|scope| {
            for (bi, chunk) in out.data_mut().chunks_mut(band * c).enumerate() {
                let start = bi * band;
                let end = (start + band).min(r);
                scope.spawn(move || fill(start..end, chunk));
            }
        });
    }
    let (r, c, k) = (r as u64, c as u64, k as u64);
    charge(r * c * k, r * c * k.saturating_sub(1));
    Ok(out)
}

/// Strassen product with schoolbook leaves. Falls back to [`mat_mul`] whenever a
/// dimension is at most `cutoff` or odd, so the result is always bit-identical.
pub fn mat_mul_strassen(a: &DenseMatrix, b: &DenseMatrix, cutoff: usize) -> Result<DenseMatrix> {
    check_mul(a, b)?;
    Ok(strassen_rec(a, b, cutoff.max(1)))
}

fn strassen_rec(a: &DenseMatrix, b: &DenseMatrix, cutoff: usize) -> DenseMatrix {
    let (r, k, c) = (a.rows(), a.cols(), b.cols());
    if r <= cutoff || k <= cutoff || c <= cutoff || r % 2 == 1 || k % 2 == 1 || c % 2 == 1 {
        return mat_mul(a, b).expect("shapes checked");
    }
    let (r2, k2, c2) = (r / 2, k / 2, c / 2);
    let a11 = a.submatrix(0, r2, 0, k2);
    let a12 = a.submatrix(0, r2, k2, k);
    let a21 = a.submatrix(r2, r, 0, k2);
    let a22 = a.submatrix(r2, r, k2, k);
    let b11 = b.submatrix(0, k2, 0, c2);
    let b12 = b.submatrix(0, k2, c2, c);
    let b21 = b.submatrix(k2, k, 0, c2);
    let b22 = b.submatrix(k2, k, c2, c);
    let add = |x: &DenseMatrix, y: &DenseMatrix| x.add(y).expect("same shape");
    let sub = |x: &DenseMatrix, y: &DenseMatrix| x.sub(y).expect("same shape");

    let m1 = strassen_rec(&add(&a11, &a22), &add(&b11, &b22), cutoff);
    let m2 = strassen_rec(&add(&a21, &a22), &b11, cutoff);
    let m3 = strassen_rec(&a11, &sub(&b12, &b22), cutoff);
    let m4 = strassen_rec(&a22, &sub(&b21, &b11), cutoff);
    let m5 = strassen_rec(&add(&a11, &a12), &b22, cutoff);
    let m6 = strassen_rec(&sub(&a21, &a11), &add(&b11, &b12), cutoff);
    let m7 = strassen_rec(&sub(&a12, &a22), &add(&b21, &b22), cutoff);

    let c11 = add(&sub(&add(&m1, &m4), &m5), &m7);
    let c12 = add(&m3, &m5);
    let c21 = add(&m2, &m4);
    let c22 = add(&add(&sub(&m1, &m2), &m3), &m6);
    let mut out = DenseMatrix::zeros(a.field(), r, c);
    out.set_submatrix(0, 0, &c11);
    out.set_submatrix(0, c2, &c12);
    out.set_submatrix(r2, 0, &c21);
    out.set_submatrix(r2, c2, &c22);
    out
}

/// Multiplication count of a schoolbook `r x k` by `k x c` product.
pub fn schoolbook_mul_count(r: usize, k: usize, c: usize) -> u64 {
    (r * k * c) as u64
}
