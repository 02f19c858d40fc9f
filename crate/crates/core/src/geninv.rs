//! Generators of `A^{-1}` and explicit structured inversion.

use std::str::FromStr;

use crate::displacement::{compress, recover, DisplacementOperator, GeneratorPair, OperatorKind};
use crate::error::{Error, Result};
use crate::matrix::{dense_inverse, mat_mul, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeneratorStrategy {
    /// Dense Gauss-Jordan inverse followed by compression.
    #[default]
    DenseOracle,
    /// Divide and conquer on the 2x2 block partition through Schur
    /// complements, keeping every intermediate inverse as generators.
    SchurRecursive,
}

impl FromStr for GeneratorStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense-oracle" | "dense" => Ok(GeneratorStrategy::DenseOracle),
            "schur" | "schur-recursive" => Ok(GeneratorStrategy::SchurRecursive),
            other => Err(Error::InvalidArgument(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Generators of `a^{-1}` under `op`.
pub fn inverse_generators(
    a: &DenseMatrix,
    op: &DisplacementOperator,
    strategy: GeneratorStrategy,
) -> Result<GeneratorPair> {
    match strategy {
        GeneratorStrategy::DenseOracle => compress(op, &dense_inverse(a)?, None),
        GeneratorStrategy::SchurRecursive => {
            if !matches!(op.kind(), OperatorKind::Toeplitz | OperatorKind::Hankel) {
                return Err(Error::Unsupported(format!(
                    "Schur recursion for the {} operator",
                    op.name()
                )));
            }
            if a.rows() != op.n() || a.cols() != op.n() {
                return Err(crate::error::dim_err("operator size differs from matrix size"));
            }
            schur_rec(a, op, 0)
        }
    }
}

fn schur_rec(a: &DenseMatrix, op: &DisplacementOperator, level: usize) -> Result<GeneratorPair> {
    let (n, s) = (op.n(), op.s());
    let m = op.m();
    if m == 1 {
        let inv = dense_inverse(a).map_err(|_| Error::NotStronglyRegular { level })?;
        return compress(op, &inv, None);
    }
    let k = m.div_ceil(2) * s;
    let a11 = a.submatrix(0, k, 0, k);
    let a12 = a.submatrix(0, k, k, n);
    let a21 = a.submatrix(k, n, 0, k);
    let a22 = a.submatrix(k, n, k, n);

    let g11 = schur_rec(&a11, &op.resized(k)?, level + 1)?;
    let a11_inv = recover(&g11.op, g11.product()?)?;
    let t = mat_mul(&a11_inv, &a12)?;
    let w = mat_mul(&a21, &a11_inv)?;
    let schur = a22.sub(&mat_mul(&a21, &t)?)?;

    let gs = schur_rec(&schur, &op.resized(n - k)?, level + 1)?;
    let s_inv = recover(&gs.op, gs.product()?)?;
    let t_sinv = mat_mul(&t, &s_inv)?;

    let mut inv = DenseMatrix::zeros(a.field(), n, n);
    inv.set_submatrix(0, 0, &a11_inv.add(&mat_mul(&t_sinv, &w)?)?);
    inv.set_submatrix(0, k, &t_sinv.neg());
    inv.set_submatrix(k, 0, &mat_mul(&s_inv, &w)?.neg());
    inv.set_submatrix(k, k, &s_inv);
    compress(op, &inv, None)
}

/// `sum_i X_i Y_i^T` over the width-`s` slabs, in slab order.
pub fn slab_product(g: &GeneratorPair) -> Result<DenseMatrix> {
    let n = g.op.n();
    let mut acc = DenseMatrix::zeros(g.x.field(), n, n);
    for i in 0..g.alpha() {
        let (xi, yi) = g.slab(i);
        acc = acc.add(&mat_mul(&xi, &yi.transpose())?)?;
    }
    Ok(acc)
}

/// Explicit matrix from generators: slab products, then one recovery sweep.
pub fn recover_explicit(g: &GeneratorPair) -> Result<DenseMatrix> {
    recover(&g.op, slab_product(g)?)
}

/// Explicit inverse of a structured matrix.
pub fn block_struct_inv(
    a: &DenseMatrix,
    op: &DisplacementOperator,
    strategy: GeneratorStrategy,
) -> Result<DenseMatrix> {
    let g = inverse_generators(a, op, strategy)?;
    recover_explicit(&g)
}

/// The same matrix as [`recover_explicit`], rebuilt one block column at a
/// time by applying the structured factors to each canonical block vector.
pub fn naive_column_recovery(g: &GeneratorPair) -> Result<DenseMatrix> {
    let hankel = match g.op.kind() {
        OperatorKind::Toeplitz => false,
        OperatorKind::Hankel => true,
        _ => return Err(Error::Unsupported("column recovery for parametrized operators".into())),
    };
    let (n, s, m) = (g.op.n(), g.op.s(), g.op.m());
    let f = g.x.field();
    let mut out = DenseMatrix::zeros(f, n, n);
    for i in 0..g.alpha() {
        let (xi, yi) = g.slab(i);
        let xb: Vec<DenseMatrix> = (0..m).map(|k| xi.submatrix(k * s, (k + 1) * s, 0, s)).collect();
        let yb: Vec<DenseMatrix> = (0..m).map(|k| yi.submatrix(k * s, (k + 1) * s, 0, s).transpose()).collect();
        for j in 0..m {
            // block k of U(Y_i) E_j is y_{j-k}^T for k <= j
            for r in 0..m {
                let mut acc = DenseMatrix::zeros(f, s, s);
                for k in 0..=j {
                    let left = if hankel {
                        if r + k >= m {
                            continue;
                        }
                        &xb[r + k]
                    } else {
                        if k > r {
                            continue;
                        }
                        &xb[r - k]
                    };
                    acc = acc.add(&mat_mul(left, &yb[j - k])?)?;
                }
                out.add_submatrix(r * s, j * s, &acc);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displacement::apply_displacement;
    use crate::field::{PrimeField, SeededRng};
    use crate::structured::{build_block_hankel, build_block_toeplitz};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn random_block_hankel(f: PrimeField, s: usize, m: usize, rng: &mut SeededRng) -> DenseMatrix {
        let h: Vec<DenseMatrix> = (0..2 * m - 1).map(|_| DenseMatrix::random(f, s, s, rng)).collect();
        build_block_hankel(&h).unwrap()
    }

    #[test]
    fn dense_oracle_generators_reproduce_displacement() {
        let f = gf(65537);
        let mut rng = SeededRng::new(1);
        let a = random_block_hankel(f, 1, 16, &mut rng);
        let op = DisplacementOperator::hankel(16, 1).unwrap();
        let g = inverse_generators(&a, &op, GeneratorStrategy::DenseOracle).unwrap();
        let ainv = dense_inverse(&a).unwrap();
        assert_eq!(g.product().unwrap(), apply_displacement(&op, &ainv).unwrap());
        assert!(g.width() <= 2);
    }

    #[test]
    fn identity_inverts_to_identity() {
        let f = gf(101);
        for strategy in [GeneratorStrategy::DenseOracle, GeneratorStrategy::SchurRecursive] {
            let op = DisplacementOperator::toeplitz(8, 2).unwrap();
            let i = DenseMatrix::identity(f, 8);
            let g = inverse_generators(&i, &op, strategy).unwrap();
            assert_eq!(g.product().unwrap(), apply_displacement(&op, &i).unwrap());
            assert!(block_struct_inv(&i, &op, strategy).unwrap().is_identity());
        }
    }

    #[test]
    fn tridiagonal_toeplitz_matches_dense() {
        let f = gf(101);
        let n = 16;
        let mut a = DenseMatrix::zeros(f, n, n);
        for i in 0..n {
            a.set(i, i, 4);
            if i + 1 < n {
                a.set(i, i + 1, 1);
                a.set(i + 1, i, 2);
            }
        }
        let op = DisplacementOperator::toeplitz(n, 1).unwrap();
        let want = dense_inverse(&a).unwrap();
        assert_eq!(block_struct_inv(&a, &op, GeneratorStrategy::DenseOracle).unwrap(), want);
        assert_eq!(block_struct_inv(&a, &op, GeneratorStrategy::SchurRecursive).unwrap(), want);
    }

    #[test]
    fn strategies_agree_on_block_hankel() {
        let f = gf(65537);
        let mut rng = SeededRng::new(2);
        for (s, m) in [(1, 8), (2, 5), (4, 4), (2, 16)] {
            let a = random_block_hankel(f, s, m, &mut rng);
            let op = DisplacementOperator::hankel(s * m, s).unwrap();
            let d = block_struct_inv(&a, &op, GeneratorStrategy::DenseOracle).unwrap();
            let r = block_struct_inv(&a, &op, GeneratorStrategy::SchurRecursive).unwrap();
            assert_eq!(d, r);
            assert!(mat_mul(&a, &d).unwrap().is_identity());
            let g = inverse_generators(&a, &op, GeneratorStrategy::SchurRecursive).unwrap();
            assert!(g.alpha() <= 2, "alpha {} for s={s}", g.alpha());
        }
    }

    #[test]
    fn block_toeplitz_inverse_width() {
        let f = gf(65537);
        let mut rng = SeededRng::new(3);
        let (s, m) = (3, 4);
        let c: Vec<DenseMatrix> = (0..m).map(|_| DenseMatrix::random(f, s, s, &mut rng)).collect();
        let mut r: Vec<DenseMatrix> = (0..m).map(|_| DenseMatrix::random(f, s, s, &mut rng)).collect();
        r[0] = c[0].clone();
        let t = build_block_toeplitz(&c, &r).unwrap();
        let op = DisplacementOperator::toeplitz(s * m, s).unwrap();
        let g = inverse_generators(&t, &op, GeneratorStrategy::SchurRecursive).unwrap();
        assert!(g.alpha() <= 2);
        assert!(mat_mul(&t, &recover_explicit(&g).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn singular_leading_block_reports_level() {
        let f = gf(101);
        // leading 1x1 minor is zero
        let a = DenseMatrix::from_rows(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        let op = DisplacementOperator::hankel(2, 1).unwrap();
        assert!(matches!(
            inverse_generators(&a, &op, GeneratorStrategy::SchurRecursive),
            Err(Error::NotStronglyRegular { level: 1 })
        ));
        assert!(block_struct_inv(&a, &op, GeneratorStrategy::DenseOracle).is_ok());
        let sing = DenseMatrix::from_rows(f, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(matches!(
            block_struct_inv(&sing, &op, GeneratorStrategy::DenseOracle),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn naive_recovery_agrees() {
        let f = gf(65537);
        let mut rng = SeededRng::new(4);
        let (s, m) = (2, 5);
        let n = s * m;
        for op in [DisplacementOperator::toeplitz(n, s).unwrap(), DisplacementOperator::hankel(n, s).unwrap()] {
            let x = DenseMatrix::random(f, n, 2 * s, &mut rng);
            let y = DenseMatrix::random(f, n, 2 * s, &mut rng);
            let g = GeneratorPair::new(x, y, op).unwrap();
            assert_eq!(naive_column_recovery(&g).unwrap(), recover_explicit(&g).unwrap());
        }
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("schur".parse::<GeneratorStrategy>().unwrap(), GeneratorStrategy::SchurRecursive);
        assert_eq!("dense-oracle".parse::<GeneratorStrategy>().unwrap(), GeneratorStrategy::DenseOracle);
        assert!("fast".parse::<GeneratorStrategy>().is_err());
    }
}
