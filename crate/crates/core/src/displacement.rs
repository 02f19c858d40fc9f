//! Displacement operators, generators and explicit recovery from a single
//! rectangular product.
//!
//! Every operator works on block shifts by the block size `s`:
//!
//! * Toeplitz: `A - Z A Z^T`, i.e. `A[i][j] - A[i-s][j-s]`.
//! * Hankel: `A - Z^T A Z^T`, i.e. `A[i][j] - A[i+s][j-s]`.
//! * Vandermonde: `A - D(U) A Z^T` with `s x s` parameter blocks.
//! * Cauchy: `D(U) A - A D(V)` with scalar parameters, one per block.
//!
//! Recovery for the Toeplitz and Hankel kinds is pure addition once
//! `M = X Y^T` is known.

use crate::error::{dim_err, Error, Result};
use crate::field::PrimeField;
use crate::matrix::{dense_rank, mat_mul, rank_factorization, DenseMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorKind {
    Toeplitz,
    Hankel,
    /// `m` parameter blocks of size `s x s`.
    Vandermonde(Vec<DenseMatrix>),
    /// One scalar per block row (`u`) and per block column (`v`).
    Cauchy { u: Vec<u64>, v: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementOperator {
    kind: OperatorKind,
    n: usize,
    s: usize,
}

impl DisplacementOperator {
    fn checked(kind: OperatorKind, n: usize, s: usize) -> Result<Self> {
        if s == 0 || n % s != 0 {
            return Err(dim_err(format!("block size {s} does not divide {n}")));
        }
        Ok(DisplacementOperator { kind, n, s })
    }

    pub fn toeplitz(n: usize, s: usize) -> Result<Self> {
        Self::checked(OperatorKind::Toeplitz, n, s)
    }

    pub fn hankel(n: usize, s: usize) -> Result<Self> {
        Self::checked(OperatorKind::Hankel, n, s)
    }

    pub fn vandermonde(params: Vec<DenseMatrix>) -> Result<Self> {
        let s = params.first().map_or(0, DenseMatrix::rows);
        if params.iter().any(|b| b.rows() != s || b.cols() != s) {
            return Err(dim_err("Vandermonde parameters must be square blocks of one size"));
        }
        let n = s * params.len();
        Self::checked(OperatorKind::Vandermonde(params), n, s)
    }

    /// Scalar Vandermonde parameters with `s = 1`.
    pub fn vandermonde_scalar(field: PrimeField, u: &[u64]) -> Result<Self> {
        let params = u
            .iter()
            .map(|&x| DenseMatrix::new(field, 1, 1, vec![field.reduce(x)]))
            .collect::<Result<Vec<_>>>()?;
        Self::vandermonde(params)
    }

    /// Cauchy operator on `n x n` matrices with `s x s` blocks. Fails with
    /// `OperatorSingular` when some `u_i = v_j`.
    pub fn cauchy(field: PrimeField, u: &[u64], v: &[u64], s: usize) -> Result<Self> {
        if u.len() != v.len() {
            return Err(dim_err("Cauchy parameter vectors differ in length"));
        }
        let u: Vec<u64> = u.iter().map(|&x| field.reduce(x)).collect();
        let v: Vec<u64> = v.iter().map(|&x| field.reduce(x)).collect();
        for (i, &a) in u.iter().enumerate() {
            if let Some(j) = v.iter().position(|&b| b == a) {
                return Err(Error::OperatorSingular(format!("u[{i}] = v[{j}] = {a}")));
            }
        }
        let n = s * u.len();
        Self::checked(OperatorKind::Cauchy { u, v }, n, s)
    }

    /// Same kind at a different size. Only shift kinds can be resized.
    pub fn resized(&self, n: usize) -> Result<Self> {
        match self.kind {
            OperatorKind::Toeplitz => Self::toeplitz(n, self.s),
            OperatorKind::Hankel => Self::hankel(n, self.s),
            _ => Err(Error::Unsupported("resizing a parametrized operator".into())),
        }
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.n / self.s
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            OperatorKind::Toeplitz => "toeplitz",
            OperatorKind::Hankel => "hankel",
            OperatorKind::Vandermonde(_) => "vandermonde",
            OperatorKind::Cauchy { .. } => "cauchy",
        }
    }

    fn check_square(&self, a: &DenseMatrix) -> Result<()> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(dim_err(format!(
                "{} operator of size {} applied to {}x{}",
                self.name(),
                self.n,
                a.rows(),
                a.cols()
            )));
        }
        Ok(())
    }
}

/// Generators `X, Y` with `Delta(A) = X Y^T`; widths are multiples of `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorPair {
    pub x: DenseMatrix,
    pub y: DenseMatrix,
    pub op: DisplacementOperator,
}

impl GeneratorPair {
    pub fn new(x: DenseMatrix, y: DenseMatrix, op: DisplacementOperator) -> Result<Self> {
        let n = op.n();
        if x.rows() != n || y.rows() != n || x.cols() != y.cols() || x.cols() % op.s() != 0 {
            return Err(dim_err(format!(
                "generators {}x{} / {}x{} for size {n}, block {}",
                x.rows(),
                x.cols(),
                y.rows(),
                y.cols(),
                op.s()
            )));
        }
        Ok(GeneratorPair { x, y, op })
    }

    /// Block displacement rank (number of width-`s` slabs).
    pub fn alpha(&self) -> usize {
        self.x.cols() / self.op.s()
    }

    pub fn width(&self) -> usize {
        self.x.cols()
    }

    pub fn slab(&self, i: usize) -> (DenseMatrix, DenseMatrix) {
        let (n, s) = (self.op.n(), self.op.s());
        (self.x.submatrix(0, n, i * s, (i + 1) * s), self.y.submatrix(0, n, i * s, (i + 1) * s))
    }

    /// `X Y^T` as one rectangular product.
    pub fn product(&self) -> Result<DenseMatrix> {
        mat_mul(&self.x, &self.y.transpose())
    }
}

pub fn apply_displacement(op: &DisplacementOperator, a: &DenseMatrix) -> Result<DenseMatrix> {
    op.check_square(a)?;
    let f = a.field();
    let (n, s) = (op.n(), op.s());
    let mut out = a.clone();
    match &op.kind {
        OperatorKind::Toeplitz => {
            for i in s..n {
                for j in s..n {
                    out.set(i, j, f.sub(a.get(i, j), a.get(i - s, j - s)));
                }
            }
        }
        OperatorKind::Hankel => {
            for i in 0..n.saturating_sub(s) {
                for j in s..n {
                    out.set(i, j, f.sub(a.get(i, j), a.get(i + s, j - s)));
                }
            }
        }
        OperatorKind::Vandermonde(params) => {
            for (bi, u) in params.iter().enumerate() {
                let rows = a.submatrix(bi * s, (bi + 1) * s, 0, n - s);
                let shifted = mat_mul(u, &rows)?;
                for r in 0..s {
                    for j in s..n {
                        let i = bi * s + r;
                        out.set(i, j, f.sub(a.get(i, j), shifted.get(r, j - s)));
                    }
                }
            }
        }
        OperatorKind::Cauchy { u, v } => {
            for i in 0..n {
                for j in 0..n {
                    let d = f.sub(u[i / s], v[j / s]);
                    out.set(i, j, f.mul(d, a.get(i, j)));
                }
            }
        }
    }
    Ok(out)
}

pub fn displacement_rank(op: &DisplacementOperator, a: &DenseMatrix) -> Result<usize> {
    Ok(dense_rank(&apply_displacement(op, a)?))
}

/// Generators of `Delta(a)` by rank factorization, zero-padded to a multiple
/// of `s` columns and to at least `alpha_hint` slabs.
pub fn compress(
    op: &DisplacementOperator,
    a: &DenseMatrix,
    alpha_hint: Option<usize>,
) -> Result<GeneratorPair> {
    let d = apply_displacement(op, a)?;
    let (x, y) = rank_factorization(&d);
    let s = op.s();
    let slabs = x.cols().div_ceil(s).max(alpha_hint.unwrap_or(0));
    let pad = slabs * s - x.cols();
    let (x, y) = if pad > 0 {
        let zx = DenseMatrix::zeros(a.field(), op.n(), pad);
        (DenseMatrix::hstack(&[&x, &zx])?, DenseMatrix::hstack(&[&y, &zx])?)
    } else {
        (x, y)
    };
    GeneratorPair::new(x, y, op.clone())
}

pub fn decompress(g: &GeneratorPair) -> Result<DenseMatrix> {
    recover(&g.op, g.product()?)
}

/// The unique `A` with `Delta(A) = M`.
pub fn recover(op: &DisplacementOperator, m: DenseMatrix) -> Result<DenseMatrix> {
    op.check_square(&m)?;
    match &op.kind {
        OperatorKind::Toeplitz => Ok(recover_toeplitz(m, op.s())),
        OperatorKind::Hankel => Ok(recover_hankel(m, op.s())),
        OperatorKind::Vandermonde(params) => recover_vandermonde(m, params),
        OperatorKind::Cauchy { u, v } => recover_cauchy(m, u, v, op.s()),
    }
}

pub fn decompress_toeplitz(g: &GeneratorPair) -> Result<DenseMatrix> {
    expect_kind(g, "toeplitz")?;
    decompress(g)
}

pub fn decompress_hankel(g: &GeneratorPair) -> Result<DenseMatrix> {
    expect_kind(g, "hankel")?;
    decompress(g)
}

pub fn decompress_vandermonde(g: &GeneratorPair) -> Result<DenseMatrix> {
    expect_kind(g, "vandermonde")?;
    decompress(g)
}

pub fn decompress_cauchy(g: &GeneratorPair) -> Result<DenseMatrix> {
    expect_kind(g, "cauchy")?;
    decompress(g)
}

fn expect_kind(g: &GeneratorPair, name: &str) -> Result<()> {
    if g.op.name() != name {
        return Err(Error::InvalidArgument(format!("expected {name} generators, got {}", g.op.name())));
    }
    Ok(())
}

/// Prefix sums down each diagonal: `A[i][j] = M[i][j] + A[i-s][j-s]`.
pub(crate) fn recover_toeplitz(mut m: DenseMatrix, s: usize) -> DenseMatrix {
    let f = m.field();
    let n = m.rows();
    let cols = m.cols();
    if s >= n {
        return m;
    }
    let data = m.data_mut();
    for i in s..n {
        let (head, tail) = data.split_at_mut(i * cols);
        let prev = &head[(i - s) * cols..(i - s) * cols + cols - s];
        f.add_assign(&mut tail[s..cols], prev);
    }
    m
}

/// Sums up each anti-diagonal from the bottom: `A[i][j] = M[i][j] + A[i+s][j-s]`.
pub(crate) fn recover_hankel(mut m: DenseMatrix, s: usize) -> DenseMatrix {
    let f = m.field();
    let n = m.rows();
    let cols = m.cols();
    if s >= n {
        return m;
    }
    let data = m.data_mut();
    for i in (0..n - s).rev() {
        let (head, tail) = data.split_at_mut((i + s) * cols);
        let next = &tail[..cols - s];
        f.add_assign(&mut head[i * cols + s..(i + 1) * cols], next);
    }
    m
}

/// Block column sweep `A_{i,j} = M_{i,j} + u_i A_{i,j-1}`; each block row
/// depends on its left neighbour only.
fn recover_vandermonde(mut m: DenseMatrix, params: &[DenseMatrix]) -> Result<DenseMatrix> {
    let s = params.first().map_or(1, DenseMatrix::rows);
    let blocks = params.len();
    for (bi, u) in params.iter().enumerate() {
        for bj in 1..blocks {
            let left = m.submatrix(bi * s, (bi + 1) * s, (bj - 1) * s, bj * s);
            m.add_submatrix(bi * s, bj * s, &mat_mul(u, &left)?);
        }
    }
    Ok(m)
}

fn recover_cauchy(mut m: DenseMatrix, u: &[u64], v: &[u64], s: usize) -> Result<DenseMatrix> {
    let f = m.field();
    let inv: Vec<Vec<u64>> = u
        .iter()
        .map(|&ui| v.iter().map(|&vj| f.inv(f.sub(ui, vj))).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()
        .map_err(|_| Error::OperatorSingular("u_i = v_j".into()))?;
    let n = m.rows();
    for i in 0..n {
        for j in 0..n {
            let x = f.mul(m.get(i, j), inv[i / s][j / s]);
            m.set(i, j, x);
        }
    }
    Ok(m)
}
