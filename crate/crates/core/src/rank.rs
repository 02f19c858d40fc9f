//! Certified rank and nullspace of a black-box matrix.
//!
//! The matrix is preconditioned as `UALD` (random unit triangular Toeplitz
//! `U`, `L` and a random diagonal `D`) so that its leading `r x r` minor is
//! nonsingular, the rank is estimated with Wiedemann's method, the leading
//! minor is inverted, and a vanishing Schur complement certifies the result.

use crate::error::{dim_err, Error, Result};
use crate::field::{PrimeField, SeededRng};
use crate::geninv::GeneratorStrategy;
use crate::krylov::{scale_rows, try_matrix_inv, InvOptions};
use crate::matrix::{dense_inverse, densify, mat_mul, BlackBox, DenseMatrix};

/// Shortest linear recurrence of `seq`. Returns the connection polynomial
/// `C` (coefficients from `x^0`, `C[0] = 1`) and the recurrence length `L`:
/// `sum_{k=0}^{L} C[k] seq[i-k] = 0` for all `i >= L`.
pub fn berlekamp_massey(field: PrimeField, seq: &[u64]) -> (Vec<u64>, usize) {
    let f = field;
    let mut c = vec![1u64];
    let mut b = vec![1u64];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = 1u64;
    for i in 0..seq.len() {
        let mut d = f.reduce(seq[i]);
        for k in 1..=l.min(c.len() - 1) {
            d = f.add(d, f.mul(c[k], seq[i - k]));
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = f.mul(d, f.inv(last).expect("nonzero discrepancy"));
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, 0);
        }
        for (k, &bk) in b.iter().enumerate() {
            c[k + shift] = f.sub(c[k + shift], f.mul(coef, bk));
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = prev;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.resize(l + 1, 0);
    (c, l)
}

/// Monic minimal polynomial `x^L C(1/x)` of the sequence, coefficients from `x^0`.
pub fn minimal_polynomial(field: PrimeField, seq: &[u64]) -> Vec<u64> {
    let (c, l) = berlekamp_massey(field, seq);
    (0..=l).map(|k| c[l - k]).collect()
}

/// `y = T x` for the unit upper triangular Toeplitz `T` with superdiagonal
/// parameters `t[0] = t_1, ..., t[n-2] = t_{n-1}`.
pub fn apply_upper_toeplitz(t: &[u64], x: &DenseMatrix) -> DenseMatrix {
    let f = x.field();
    let n = x.rows();
    let mut out = x.clone();
    for i in 0..n {
        for d in 1..n - i {
            let c = t[d - 1];
            if c != 0 {
                f.add_scaled(out.row_mut(i), x.row(i + d), c);
            }
        }
    }
    out
}

/// `y = T x` for the unit lower triangular Toeplitz `T` with subdiagonal
/// parameters `t`.
pub fn apply_lower_toeplitz(t: &[u64], x: &DenseMatrix) -> DenseMatrix {
    let f = x.field();
    let n = x.rows();
    let mut out = x.clone();
    for i in 0..n {
        for d in 1..=i {
            let c = t[d - 1];
            if c != 0 {
                f.add_scaled(out.row_mut(i), x.row(i - d), c);
            }
        }
    }
    out
}

/// Random `U`, `L`, `D` for `UALD`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPreconditioner {
    pub upper: Vec<u64>,
    pub lower: Vec<u64>,
    pub d: Vec<u64>,
}

impl RankPreconditioner {
    pub fn sample(field: PrimeField, n: usize, rng: &mut SeededRng) -> Self {
        let k = n.saturating_sub(1);
        RankPreconditioner {
            upper: (0..k).map(|_| field.rand(rng)).collect(),
            lower: (0..k).map(|_| field.rand(rng)).collect(),
            d: (0..n).map(|_| field.rand_nonzero(rng)).collect(),
        }
    }

    /// `L D x`, mapping nullspace vectors of `UALD` back to those of `A`.
    pub fn unprecondition(&self, x: &DenseMatrix) -> DenseMatrix {
        apply_lower_toeplitz(&self.lower, &scale_rows(&self.d, x))
    }
}

/// The black box `U A L D`.
pub struct Preconditioned<'a, B: ?Sized> {
    pub inner: &'a B,
    pub pre: &'a RankPreconditioner,
}

impl<B: BlackBox + ?Sized> BlackBox for Preconditioned<'_, B> {
    fn field(&self) -> PrimeField {
        self.inner.field()
    }
    fn nrows(&self) -> usize {
        self.inner.nrows()
    }
    fn ncols(&self) -> usize {
        self.inner.ncols()
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let y = self.pre.unprecondition(x);
        Ok(apply_upper_toeplitz(&self.pre.upper, &self.inner.apply(&y)?))
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        // (UALD)^T = D L^T A^T U^T; U^T is lower and L^T upper with the same parameters
        let y = apply_lower_toeplitz(&self.pre.upper, x);
        let z = apply_upper_toeplitz(&self.pre.lower, &self.inner.apply_transpose(&y)?);
        Ok(scale_rows(&self.pre.d, &z))
    }
}

/// The leading `r x r` block of a square black box.
pub struct LeadingMinor<'a, B: ?Sized> {
    pub inner: &'a B,
    pub r: usize,
}

impl<B: BlackBox + ?Sized> LeadingMinor<'_, B> {
    fn pad(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut big = DenseMatrix::zeros(x.field(), self.inner.ncols(), x.cols());
        big.set_submatrix(0, 0, x);
        big
    }
}

impl<B: BlackBox + ?Sized> BlackBox for LeadingMinor<'_, B> {
    fn field(&self) -> PrimeField {
        self.inner.field()
    }
    fn nrows(&self) -> usize {
        self.r
    }
    fn ncols(&self) -> usize {
        self.r
    }
    fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let y = self.inner.apply(&self.pad(x))?;
        Ok(y.submatrix(0, self.r, 0, y.cols()))
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let y = self.inner.apply_transpose(&self.pad(x))?;
        Ok(y.submatrix(0, self.r, 0, y.cols()))
    }
}

fn check_field_size<B: BlackBox + ?Sized>(a: &B) -> Result<usize> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(dim_err(format!("rank routines expect a square matrix, got {n}x{}", a.ncols())));
    }
    let required = 2 * (n as u128) * (n as u128);
    if (a.field().modulus() as u128) < required {
        return Err(Error::FieldTooSmall { p: a.field().modulus(), required });
    }
    Ok(n)
}

/// Wiedemann rank of an already preconditioned black box: degree of the
/// minimal polynomial of `B D'`, less one if it vanishes at zero.
fn wiedemann_rank<B: BlackBox + ?Sized>(b: &B, rng: &mut SeededRng) -> Result<usize> {
    let f = b.field();
    let n = b.nrows();
    if n == 0 {
        return Ok(0);
    }
    let d2: Vec<u64> = (0..n).map(|_| f.rand_nonzero(rng)).collect();
    let x: Vec<u64> = (0..n).map(|_| f.rand(rng)).collect();
    let mut y = DenseMatrix::new(f, n, 1, (0..n).map(|_| f.rand(rng)).collect())?;
    let mut seq = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        seq.push(f.dot(&x, y.data()));
        if i + 1 < 2 * n {
            y = b.apply(&scale_rows(&d2, &y))?;
        }
    }
    let poly = minimal_polynomial(f, &seq);
    let deg = poly.len() - 1;
    Ok(if deg > 0 && poly[0] == 0 { deg - 1 } else { deg })
}

/// Monte Carlo rank. Requires `p >= 2 n^2`.
pub fn rank_estimate<B: BlackBox + ?Sized>(a: &B, rng: &mut SeededRng) -> Result<usize> {
    let n = check_field_size(a)?;
    let pre = RankPreconditioner::sample(a.field(), n, rng);
    wiedemann_rank(&Preconditioned { inner: a, pre: &pre }, rng)
}

/// `A_0^{-1} A_1` for the leading `r x r` block `A_0` and the `r x (n - r)`
/// block `A_1`, read from the black box by one application.
fn a0inv_a1<B: BlackBox + ?Sized>(a: &B, r: usize, a0_inv: &DenseMatrix) -> Result<DenseMatrix> {
    let f = a.field();
    let n = a.nrows();
    let k = n - r;
    let mut e = DenseMatrix::zeros(f, n, k);
    for j in 0..k {
        e.set(r + j, j, 1);
    }
    let a1 = a.apply(&e)?.submatrix(0, r, 0, k);
    if r <= k {
        // A_1^T (A_0^{-1})^T in r x r pieces, then transpose back
        let a1t = a1.transpose();
        let inv_t = a0_inv.transpose();
        let mut out = DenseMatrix::zeros(f, k, r);
        let mut row = 0;
        while row < k {
            let end = (row + r).min(k);
            let mut piece = DenseMatrix::zeros(f, r, r);
            piece.set_submatrix(0, 0, &a1t.submatrix(row, end, 0, r));
            let prod = mat_mul(&piece, &inv_t)?;
            out.set_submatrix(row, 0, &prod.submatrix(0, end - row, 0, r));
            row = end;
        }
        Ok(out.transpose())
    } else {
        // pad A_1 with zero columns to a square r x r product
        let mut padded = DenseMatrix::zeros(f, r, r);
        padded.set_submatrix(0, 0, &a1);
        Ok(mat_mul(a0_inv, &padded)?.submatrix(0, r, 0, k))
    }
}

/// `A_2 A_0^{-1} A_1 - A_3` and the factor `A_0^{-1} A_1`.
pub fn schur_complement<B: BlackBox + ?Sized>(
    a: &B,
    r: usize,
    a0_inv: &DenseMatrix,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = a.nrows();
    if r == 0 || r > n || a0_inv.rows() != r || a0_inv.cols() != r {
        return Err(dim_err(format!("leading block of size {r} in an {n}x{n} matrix")));
    }
    let factor = a0inv_a1(a, r, a0_inv)?;
    let k = n - r;
    let mut stacked = DenseMatrix::zeros(a.field(), n, k);
    stacked.set_submatrix(0, 0, &factor);
    for j in 0..k {
        stacked.set(r + j, j, a.field().neg(1));
    }
    // rows r.. of A [F; -I] are A_2 F - A_3
    let prod = a.apply(&stacked)?;
    Ok((prod.submatrix(r, n, 0, k), factor))
}

/// Whether the Schur complement vanishes, with the reusable `A_0^{-1} A_1`.
pub fn schur_complement_check<B: BlackBox + ?Sized>(
    a: &B,
    r: usize,
    a0_inv: &DenseMatrix,
) -> Result<(bool, DenseMatrix)> {
    let (s, factor) = schur_complement(a, r, a0_inv)?;
    Ok((s.is_zero(), factor))
}

/// Certified rank with a nullspace basis of the original matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub r: usize,
    /// `n x (n - r)`, columns independent, `A N = 0`.
    pub nullspace: DenseMatrix,
    pub attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankOptions {
    pub strategy: GeneratorStrategy,
    pub retries: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { strategy: GeneratorStrategy::DenseOracle, retries: 8 }
    }
}

/// Block size for inverting an `r x r` leading minor: the largest divisor of
/// `r` not above `r^0.79`.
pub fn minor_block_size(r: usize) -> usize {
    let bound = (r as f64).powf(0.79);
    (1..=r).filter(|d| r % d == 0 && (*d as f64) <= bound).max().unwrap_or(1)
}

fn invert_leading<B: BlackBox + ?Sized>(
    b: &B,
    r: usize,
    strategy: GeneratorStrategy,
    rng: &mut SeededRng,
) -> Result<Option<DenseMatrix>> {
    let minor = LeadingMinor { inner: b, r };
    if r < 16 {
        return Ok(dense_inverse(&densify(&minor)?).ok());
    }
    let s = minor_block_size(r);
    let opts = InvOptions { s: Some(s), strategy, retries: 2 };
    Ok(try_matrix_inv(&minor, s, opts, rng)?.map(|rep| rep.inverse))
}

/// Rank and nullspace, certified by a vanishing Schur complement and an
/// exact check `A N = 0`. Requires a square matrix and `p >= 2 n^2`.
pub fn rank_and_nullspace<B: BlackBox + ?Sized>(
    a: &B,
    opts: RankOptions,
    rng: &mut SeededRng,
) -> Result<RankCertificate> {
    let n = check_field_size(a)?;
    let f = a.field();
    let budget = opts.retries.max(1);
    for attempt in 1..=budget {
        let pre = RankPreconditioner::sample(f, n, rng);
        let b = Preconditioned { inner: a, pre: &pre };
        let r = wiedemann_rank(&b, rng)?;
        if r == 0 {
            let id = DenseMatrix::identity(f, n);
            if a.apply(&id)?.is_zero() {
                return Ok(RankCertificate { r: 0, nullspace: id, attempts: attempt });
            }
            continue;
        }
        if r == n {
            let s = crate::krylov::default_block_size(n);
            let opts_inv = InvOptions { s: Some(s), strategy: opts.strategy, retries: 1 };
            if try_matrix_inv(&b, s, opts_inv, rng)?.is_some() {
                return Ok(RankCertificate { r: n, nullspace: DenseMatrix::zeros(f, n, 0), attempts: attempt });
            }
            continue;
        }
        let Some(a0_inv) = invert_leading(&b, r, opts.strategy, rng)? else {
            continue;
        };
        let (zero, factor) = schur_complement_check(&b, r, &a0_inv)?;
        if !zero {
            continue;
        }
        let k = n - r;
        let mut nt = DenseMatrix::zeros(f, n, k);
        nt.set_submatrix(0, 0, &factor);
        for j in 0..k {
            nt.set(r + j, j, f.neg(1));
        }
        let nullspace = pre.unprecondition(&nt);
        if a.apply(&nullspace)?.is_zero() {
            return Ok(RankCertificate { r, nullspace, attempts: attempt });
        }
    }
    Err(Error::RetriesExhausted { attempts: budget })
}
