//! Sparse inversion through block Krylov spaces and a block Hankel matrix.
//!
//! With the projection `u` (stacked identities), `K_u = [u | Au | ... ]` and
//! `K_v = [u^T; u^T A; ...]`, the matrix `H = K_v A K_u` is block Hankel and
//! `A^{-1} = K_u H^{-1} K_v`. Both Krylov products are applied by Horner's
//! scheme, so only black-box applications of `A` are needed.

use crate::costmodel::{choose_blocking, OmegaTable};
use crate::counter::charge;
use crate::displacement::{recover_hankel, DisplacementOperator};
use crate::error::{dim_err, Error, Result};
use crate::field::{mul_raw, PrimeField, SeededRng};
use crate::geninv::{block_struct_inv, GeneratorStrategy};
use crate::matrix::{dense_rank, densify, mat_mul, BlackBox, DenseMatrix};
use crate::structured::build_block_hankel;

/// `u`: `m` copies of `I_s` stacked vertically.
pub fn build_projection(field: PrimeField, n: usize, s: usize) -> Result<DenseMatrix> {
    if s == 0 || n % s != 0 {
        return Err(dim_err(format!("block size {s} does not divide {n}")));
    }
    let mut u = DenseMatrix::zeros(field, n, s);
    for i in 0..n {
        u.set(i, i % s, 1);
    }
    Ok(u)
}

/// `u^T w`: sums the `m` row blocks of `w`. Additions only.
pub fn project(w: &DenseMatrix, s: usize) -> Result<DenseMatrix> {
    if s == 0 || w.rows() % s != 0 {
        return Err(dim_err("projection block size does not divide the row count"));
    }
    let f = w.field();
    let mut out = w.submatrix(0, s, 0, w.cols());
    for b in 1..w.rows() / s {
        out.add_submatrix(0, 0, &w.submatrix(b * s, (b + 1) * s, 0, w.cols()));
    }
    debug_assert_eq!(out.field(), f);
    Ok(out)
}

/// `u x` for an `s x k` matrix `x`: `m` stacked copies. No arithmetic.
pub fn lift(x: &DenseMatrix, m: usize) -> DenseMatrix {
    let parts: Vec<&DenseMatrix> = std::iter::repeat(x).take(m).collect();
    DenseMatrix::vstack(&parts).expect("equal widths")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Column slabs `A^i u`.
    Right,
    /// Row slabs `u^T A^i`.
    Left,
}

#[derive(Debug, Clone)]
pub struct KrylovBasis {
    pub slabs: Vec<DenseMatrix>,
    pub s: usize,
    pub m: usize,
    pub side: Side,
}

impl KrylovBasis {
    /// `K_u` as `n x n` or `K_v` as `n x n`.
    pub fn to_dense(&self) -> DenseMatrix {
        let parts: Vec<&DenseMatrix> = self.slabs.iter().collect();
        match self.side {
            Side::Right => DenseMatrix::hstack(&parts).expect("slabs"),
            Side::Left => DenseMatrix::vstack(&parts).expect("slabs"),
        }
    }
}

/// `m` Krylov slabs of `a` started from the projection.
pub fn build_krylov<B: BlackBox + ?Sized>(a: &B, s: usize, m: usize, side: Side) -> Result<KrylovBasis> {
    let n = a.nrows();
    if s * m != n || a.ncols() != n {
        return Err(dim_err(format!("{s} x {m} blocking for a {n}x{} matrix", a.ncols())));
    }
    let u = build_projection(a.field(), n, s)?;
    let mut cols = vec![u];
    for _ in 1..m {
        let next = match side {
            Side::Right => a.apply(cols.last().expect("nonempty"))?,
            Side::Left => a.apply_transpose(cols.last().expect("nonempty"))?,
        };
        cols.push(next);
    }
    let slabs = match side {
        Side::Right => cols,
        Side::Left => cols.iter().map(DenseMatrix::transpose).collect(),
    };
    Ok(KrylovBasis { slabs, s, m, side })
}

/// The `2m - 1` distinct blocks `u^T A^k u`, `k = 1..2m-1`, continuing the
/// right Krylov sequence for `m` more applications.
pub fn hankel_blocks<B: BlackBox + ?Sized>(a: &B, ku: &KrylovBasis) -> Result<Vec<DenseMatrix>> {
    if ku.side != Side::Right {
        return Err(Error::InvalidArgument("expected a right Krylov basis".into()));
    }
    let s = ku.s;
    let mut blocks = Vec::with_capacity(2 * ku.m - 1);
    for slab in &ku.slabs[1..] {
        blocks.push(project(slab, s)?);
    }
    let mut cur = a.apply(ku.slabs.last().expect("nonempty"))?;
    for k in 0..ku.m {
        blocks.push(project(&cur, s)?);
        if k + 1 < ku.m {
            cur = a.apply(&cur)?;
        }
    }
    Ok(blocks)
}

/// `H` with block `(i, j) = u^T A^{i+j+1} u`.
pub fn build_block_hankel_gram<B: BlackBox + ?Sized>(a: &B, ku: &KrylovBasis) -> Result<DenseMatrix> {
    build_block_hankel(&hankel_blocks(a, ku)?)
}

/// `V Q*` for the anti-triangular block Hankel `V` with first block column
/// `vbar` and the upper-triangular block Toeplitz `Q*` with first block row
/// `qstar_bar`: one product, then sums along block anti-diagonals.
pub fn offdiag_recover(vbar: &DenseMatrix, qstar_bar: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, s) = (vbar.rows(), vbar.cols());
    if s == 0 || n % s != 0 || qstar_bar.rows() != s || qstar_bar.cols() != n {
        return Err(dim_err("vbar must be n x s and qstar_bar s x n"));
    }
    Ok(recover_hankel(mat_mul(vbar, qstar_bar)?, s))
}

/// `M K_v` where `K_v` stacks `u^T A^i`: Horner over the column slabs of `M`,
/// `(((M_{m-1} u^T) A + M_{m-2} u^T) A + ...)`.
pub fn horner_left<B: BlackBox + ?Sized>(mat: &DenseMatrix, a: &B, s: usize, m: usize) -> Result<DenseMatrix> {
    let n = a.nrows();
    if s * m != n || mat.cols() != n {
        return Err(dim_err("horner_left shape"));
    }
    let rows = mat.rows();
    let slab = |i: usize| mat.submatrix(0, rows, i * s, (i + 1) * s);
    let tile = |x: &DenseMatrix| lift(&x.transpose(), m).transpose();
    let mut acc = tile(&slab(m - 1));
    for i in (0..m - 1).rev() {
        // X A = (A^T X^T)^T
        acc = a.apply_transpose(&acc.transpose())?.transpose();
        acc = acc.add(&tile(&slab(i)))?;
    }
    Ok(acc)
}

/// `K_u N` where `K_u = [u | Au | ...]`: Horner over the row slabs of `N`,
/// `A(A(u N_{m-1}) + u N_{m-2}) + ...`.
pub fn horner_right<B: BlackBox + ?Sized>(nmat: &DenseMatrix, a: &B, s: usize, m: usize) -> Result<DenseMatrix> {
    let n = a.nrows();
    if s * m != n || nmat.rows() != n {
        return Err(dim_err("horner_right shape"));
    }
    let cols = nmat.cols();
    let slab = |i: usize| nmat.submatrix(i * s, (i + 1) * s, 0, cols);
    let mut acc = lift(&slab(m - 1), m);
    for i in (0..m - 1).rev() {
        acc = a.apply(&acc)?;
        acc = acc.add(&lift(&slab(i), m))?;
    }
    Ok(acc)
}

/// Random nonzero diagonal `D` for `D A D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preconditioner {
    pub d: Vec<u64>,
}

impl Preconditioner {
    pub fn sample(field: PrimeField, n: usize, rng: &mut SeededRng) -> Self {
        Preconditioner { d: (0..n).map(|_| field.rand_nonzero(rng)).collect() }
    }
}

/// Multiplies row `i` of `x` by `d[i]`.
pub fn scale_rows(d: &[u64], x: &DenseMatrix) -> DenseMatrix {
    let f = x.field();
    let p = f.modulus();
    let mut out = x.clone();
    let cols = x.cols();
    for (i, &di) in d.iter().enumerate() {
        for v in &mut out.data_mut()[i * cols..(i + 1) * cols] {
            *v = mul_raw(*v, di, p);
        }
    }
    charge((d.len() * cols) as u64, 0);
    out
}

/// Multiplies column `j` of `x` by `d[j]`.
pub fn scale_cols(x: &DenseMatrix, d: &[u64]) -> DenseMatrix {
    let p = x.field().modulus();
    let mut out = x.clone();
    let cols = x.cols();
    for row in out.data_mut().chunks_mut(cols.max(1)) {
        for (v, &dj) in row.iter_mut().zip(d) {
            *v = mul_raw(*v, dj, p);
        }
    }
    charge((x.rows() * cols) as u64, 0);
    out
}

/// The black box `D A D`.
pub struct DiagScaled<'a, B: ?Sized> {
    pub inner: &'a B,
    pub d: &'a [u64],
}

impl<B: BlackBox + ?Sized> BlackBox for DiagScaled<'_, B> {
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
        Ok(scale_rows(self.d, &self.inner.apply(&scale_rows(self.d, x))?))
    }
    fn apply_transpose(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(scale_rows(self.d, &self.inner.apply_transpose(&scale_rows(self.d, x))?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvOptions {
    /// Block size; chosen by the cost model when absent.
    pub s: Option<usize>,
    pub strategy: GeneratorStrategy,
    pub retries: usize,
}

impl Default for InvOptions {
    fn default() -> Self {
        InvOptions { s: None, strategy: GeneratorStrategy::DenseOracle, retries: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct InverseReport {
    pub inverse: DenseMatrix,
    pub s: usize,
    pub m: usize,
    pub attempts: usize,
}

/// Default block size for an `n x n` inversion.
pub fn default_block_size(n: usize) -> usize {
    if n < 4 {
        return n.max(1);
    }
    choose_blocking(n, &OmegaTable::bundled()).map_or(n, |b| b.s)
}

/// Explicit inverse of a black-box matrix through the block Krylov/Hankel
/// pipeline. Requires `p > 2n`.
pub fn matrix_inv<B: BlackBox + ?Sized>(a: &B, opts: InvOptions, rng: &mut SeededRng) -> Result<InverseReport> {
    let n = a.nrows();
    let field = a.field();
    if a.ncols() != n {
        return Err(dim_err(format!("cannot invert a {n}x{} matrix", a.ncols())));
    }
    if (field.modulus() as u128) <= 2 * n as u128 {
        return Err(Error::FieldTooSmall { p: field.modulus(), required: 2 * n as u128 + 1 });
    }
    if n == 0 {
        return Ok(InverseReport { inverse: DenseMatrix::zeros(field, 0, 0), s: 0, m: 0, attempts: 0 });
    }
    let s = opts.s.unwrap_or_else(|| default_block_size(n));
    if s == 0 || n % s != 0 {
        return Err(dim_err(format!("block size {s} does not divide {n}")));
    }
    if let Some(report) = try_matrix_inv(a, s, opts, rng)? {
        return Ok(report);
    }
    if dense_rank(&densify(a)?) < n {
        Err(Error::SingularInput { stage: "block Hankel inversion".to_string() })
    } else {
        Err(Error::PreconditionFailure { attempts: opts.retries.max(1) })
    }
}

/// Runs up to `opts.retries` preconditioned attempts; `None` when all of
/// them hit a singular stage.
pub(crate) fn try_matrix_inv<B: BlackBox + ?Sized>(
    a: &B,
    s: usize,
    opts: InvOptions,
    rng: &mut SeededRng,
) -> Result<Option<InverseReport>> {
    let n = a.nrows();
    let m = n / s;
    for attempt in 1..=opts.retries.max(1) {
        let pre = Preconditioner::sample(a.field(), n, rng);
        match attempt_inverse(a, &pre, s, m, opts.strategy) {
            Ok(inverse) => return Ok(Some(InverseReport { inverse, s, m, attempts: attempt })),
            Err(AttemptFailure::Stage) => {}
            Err(AttemptFailure::Hard(e)) => return Err(e),
        }
    }
    Ok(None)
}

enum AttemptFailure {
    Stage,
    Hard(Error),
}

impl From<Error> for AttemptFailure {
    fn from(e: Error) -> Self {
        AttemptFailure::Hard(e)
    }
}

fn attempt_inverse<B: BlackBox + ?Sized>(
    a: &B,
    pre: &Preconditioner,
    s: usize,
    m: usize,
    strategy: GeneratorStrategy,
) -> std::result::Result<DenseMatrix, AttemptFailure> {
    let n = s * m;
    let at = DiagScaled { inner: a, d: &pre.d };
    let ku = build_krylov(&at, s, m, Side::Right)?;
    let h = build_block_hankel_gram(&at, &ku)?;
    let op = DisplacementOperator::hankel(n, s)?;
    let hinv = match block_struct_inv(&h, &op, strategy) {
        Ok(x) => x,
        Err(Error::Singular { .. }) | Err(Error::NotStronglyRegular { .. }) => {
            return Err(AttemptFailure::Stage)
        }
        Err(e) => return Err(e.into()),
    };
    let left = horner_left(&hinv, &at, s, m)?;
    let at_inv = horner_right(&left, &at, s, m)?;
    let inv = scale_cols(&scale_rows(&pre.d, &at_inv), &pre.d);
    if !a.apply(&inv)?.is_identity() {
        return Err(AttemptFailure::Stage);
    }
    Ok(inv)
}
