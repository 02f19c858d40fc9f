//! Simplicial homology and group ring units on top of the rank and
//! structured inversion routines.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::costmodel::{solve_crossing, OmegaTable};
use crate::displacement::DisplacementOperator;
use crate::error::{dim_err, Error, Result};
use crate::field::{PrimeField, SeededRng};
use crate::geninv::{block_struct_inv, GeneratorStrategy};
use crate::matrix::elim::echelon;
use crate::matrix::{dense_nullspace, dense_rank, DenseMatrix, SparseMatrix};
use crate::rank::{rank_and_nullspace, RankOptions};
use rand::Rng;

/// Face-closed set of simplices sorted by dimension, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<usize>>,
}

fn simplex_order(a: &Vec<usize>, b: &Vec<usize>) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn facets(s: &[usize]) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
    (0..s.len()).filter(move |_| s.len() > 1).map(move |k| {
        let mut f = s.to_vec();
        f.remove(k);
        (k, f)
    })
}

impl SimplicialComplex {
    /// Builds a complex from simplices. Vertex lists are sorted; with
    /// `close` every missing face is added, otherwise a missing face is an error.
    pub fn new(simplices: Vec<Vec<usize>>, close: bool) -> Result<Self> {
        let mut set = BTreeSet::new();
        for mut s in simplices {
            if s.is_empty() {
                return Err(Error::InvalidComplex("empty simplex".into()));
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!("repeated vertex in {s:?}")));
            }
            set.insert(s);
        }
        if close {
            let mut stack: Vec<Vec<usize>> = set.iter().cloned().collect();
            while let Some(s) = stack.pop() {
                for (_, f) in facets(&s) {
                    if set.insert(f.clone()) {
                        stack.push(f);
                    }
                }
            }
        } else {
            for s in &set {
                if let Some((_, f)) = facets(s).find(|(_, f)| !set.contains(f)) {
                    return Err(Error::InvalidComplex(format!("face {f:?} of {s:?} is missing")));
                }
            }
        }
        let mut simplices: Vec<Vec<usize>> = set.into_iter().collect();
        simplices.sort_by(simplex_order);
        Ok(SimplicialComplex { simplices })
    }

    /// One simplex per line as whitespace-separated vertex ids; `#` and `%`
    /// start comment lines.
    pub fn parse(text: &str, close: bool) -> Result<Self> {
        let mut simplices = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
                continue;
            }
            let s: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line: i + 1, msg: format!("{e}") })?;
            simplices.push(s);
        }
        Self::new(simplices, close)
    }

    pub fn load(path: impl AsRef<Path>, close: bool) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
        Self::parse(&text, close)
    }

    /// Random complex on `vertices` vertices: the closure of `count` random
    /// simplices of dimension at most `max_dim`.
    pub fn random(vertices: usize, max_dim: usize, count: usize, rng: &mut SeededRng) -> Result<Self> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let size = rng.gen_range(1..=(max_dim + 1).min(vertices));
            let mut s = BTreeSet::new();
            while s.len() < size {
                s.insert(rng.gen_range(0..vertices));
            }
            out.push(s.into_iter().collect());
        }
        Self::new(out, true)
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Largest simplex dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.last().map(|s| s.len() - 1)
    }

    /// Index range of the `k`-simplices in the global ordering.
    pub fn dim_range(&self, k: usize) -> std::ops::Range<usize> {
        let lo = self.simplices.partition_point(|s| s.len() < k + 1);
        let hi = self.simplices.partition_point(|s| s.len() < k + 2);
        lo..hi
    }
}

/// The full boundary matrix: entry `(i, j)` is `(-1)^pos` when simplex `i`
/// is the facet of simplex `j` missing its vertex at position `pos`.
pub fn boundary_matrix(complex: &SimplicialComplex, field: PrimeField) -> Result<SparseMatrix> {
    let index: HashMap<&[usize], usize> =
        complex.simplices.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let n = complex.len();
    let mut triplets = Vec::new();
    for (j, s) in complex.simplices.iter().enumerate() {
        for (pos, f) in facets(s) {
            let i = *index
                .get(f.as_slice())
                .ok_or_else(|| Error::InvalidComplex(format!("face {f:?} of {s:?} is missing")))?;
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            triplets.push((i, j, field.from_i64(sign)));
        }
    }
    SparseMatrix::new(field, n, n, triplets)
}

/// Betti numbers with a basis of cycles in each dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homology {
    pub betti: Vec<usize>,
    /// `cycles[k]` has one row per `k`-simplex and spans the kernel of the
    /// boundary map out of dimension `k`.
    pub cycles: Vec<DenseMatrix>,
}

/// Basis of the column span of `m`.
fn column_basis(m: &DenseMatrix) -> DenseMatrix {
    let e = echelon(&m.transpose());
    e.rref.submatrix(0, e.rank(), 0, m.rows()).transpose()
}

/// Rank and right kernel of the `rows x cols` block `d`, through the
/// certified black-box pipeline on a zero-padded square matrix when the
/// field is large enough, otherwise by dense elimination.
fn rank_and_kernel(d: &SparseMatrix, rng: &mut SeededRng) -> Result<(usize, DenseMatrix)> {
    let f = d.field();
    let (rows, cols) = (d.rows(), d.cols());
    let n = rows.max(cols);
    if n == 0 {
        return Ok((0, DenseMatrix::zeros(f, cols, 0)));
    }
    if (f.modulus() as u128) < 2 * (n as u128) * (n as u128) {
        let dense = d.to_dense();
        return Ok((dense_rank(&dense), dense_nullspace(&dense)));
    }
    let square = SparseMatrix::new(f, n, n, d.triplets().to_vec())?;
    let cert = rank_and_nullspace(&square, RankOptions::default(), rng)?;
    let kernel = cert.nullspace.submatrix(0, cols, 0, cert.nullspace.cols());
    let kernel = if rows > cols { column_basis(&kernel) } else { kernel };
    Ok((cert.r, kernel))
}

/// `b_k = dim ker d_k - rank d_{k+1}` for every dimension of the complex.
pub fn betti_numbers(complex: &SimplicialComplex, field: PrimeField, rng: &mut SeededRng) -> Result<Homology> {
    let Some(top) = complex.dim() else {
        return Ok(Homology { betti: Vec::new(), cycles: Vec::new() });
    };
    let a = boundary_matrix(complex, field)?;
    let mut ranks = Vec::with_capacity(top + 2);
    let mut cycles = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let cols = complex.dim_range(k);
        if k == 0 {
            ranks.push(0);
            cycles.push(DenseMatrix::identity(field, cols.len()));
            continue;
        }
        let rows = complex.dim_range(k - 1);
        let block = a.submatrix(rows.start, rows.end, cols.start, cols.end);
        let (r, kernel) = rank_and_kernel(&block, rng)?;
        ranks.push(r);
        cycles.push(kernel);
    }
    ranks.push(0);
    let betti = (0..=top).map(|k| cycles[k].cols() - ranks[k + 1]).collect();
    Ok(Homology { betti, cycles })
}

/// `<sigma, tau | sigma^m = 1, tau^s = sigma^t, tau^-1 sigma tau = sigma^u>`,
/// elements `sigma^a tau^b` indexed by `a s + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetacyclicGroup {
    pub m: usize,
    pub s: usize,
    pub t: usize,
    pub u: usize,
    /// `u^{-1} mod m`; moving `tau` right past `sigma^c` turns it into `sigma^{c w}`.
    w: usize,
}

fn pow_mod(b: usize, e: usize, m: usize) -> usize {
    let mut acc = 1 % m;
    for _ in 0..e {
        acc = acc * b % m;
    }
    acc
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl MetacyclicGroup {
    pub fn new(m: usize, s: usize, t: usize, u: usize) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidGroup(msg));
        if m == 0 || s == 0 {
            return bad("m and s must be positive".into());
        }
        if u > m || t > m {
            return bad(format!("need u <= m and t <= m, got u={u}, t={t}, m={m}"));
        }
        if t > 0 && pow_mod(u, s, t) != 1 % t {
            return bad(format!("u^s = {u}^{s} is not 1 mod t = {t}"));
        }
        if (u * t) % m != t % m {
            return bad(format!("u t = {} is not t mod m", u * t));
        }
        if gcd(u % m, m) != 1 {
            return bad(format!("u = {u} is not invertible mod m = {m}"));
        }
        if pow_mod(u, s, m) != 1 % m {
            return bad(format!("conjugation by tau^s = sigma^t must be trivial: u^s mod m = {}", pow_mod(u, s, m)));
        }
        let w = (0..m).find(|w| (u * w) % m == 1 % m).expect("u is a unit mod m");
        Ok(MetacyclicGroup { m, s, t, u, w })
    }

    pub fn cyclic(k: usize) -> Self {
        MetacyclicGroup::new(k, 1, k, 1).expect("cyclic group")
    }

    pub fn order(&self) -> usize {
        self.m * self.s
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.s + b
    }

    pub fn element(&self, i: usize) -> (usize, usize) {
        (i / self.s, i % self.s)
    }

    /// `sigma^a tau^b * sigma^c tau^d = sigma^{a + c w^b} tau^{b + d}`, with
    /// `tau^s` folded into `sigma^t`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        let (a, b) = self.element(i);
        let (c, d) = self.element(j);
        let mut sa = (a + c * pow_mod(self.w, b, self.m)) % self.m;
        let mut tb = b + d;
        if tb >= self.s {
            tb -= self.s;
            sa = (sa + self.t) % self.m;
        }
        self.index(sa, tb)
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.order()).find(|&j| self.mul(i, j) == 0).expect("group element has an inverse")
    }

    /// Exhaustive check of associativity, identity and inverses, plus the
    /// defining relations. Cubic in the order.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.order();
        let sigma = self.index(1 % self.m, 0);
        let tau = if self.s > 1 { self.index(0, 1) } else { self.index(self.t % self.m, 0) };
        let power = |g: usize, e: usize| (0..e).fold(0, |acc, _| self.mul(acc, g));
        if power(sigma, self.m) != 0 || power(tau, self.s) != power(sigma, self.t) {
            return Err(Error::InvalidGroup("defining relations fail".into()));
        }
        if self.mul(sigma, tau) != self.mul(tau, power(sigma, self.u)) {
            return Err(Error::InvalidGroup("conjugation relation fails".into()));
        }
        for x in 0..n {
            if self.mul(0, x) != x || self.mul(x, 0) != x || !(0..n).any(|y| self.mul(x, y) == 0) {
                return Err(Error::InvalidGroup(format!("element {x} breaks the identity or inverse axiom")));
            }
            for y in 0..n {
                let xy = self.mul(x, y);
                for z in 0..n {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return Err(Error::InvalidGroup(format!("({x} {y}) {z} is not associative")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Index of `g_i^{-1} g_j`.
pub fn group_multiplication_index(g: &MetacyclicGroup, i: usize, j: usize) -> usize {
    g.mul(g.inverse(i), j)
}

/// Coefficients indexed like the group elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    pub field: PrimeField,
    pub coeffs: Vec<u64>,
}

impl GroupRingElement {
    pub fn new(field: PrimeField, coeffs: Vec<u64>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| field.reduce(c)).collect();
        GroupRingElement { field, coeffs }
    }

    pub fn one(field: PrimeField, order: usize) -> Self {
        let mut coeffs = vec![0; order];
        coeffs[0] = 1;
        GroupRingElement { field, coeffs }
    }

    pub fn random(field: PrimeField, order: usize, rng: &mut SeededRng) -> Self {
        GroupRingElement { field, coeffs: (0..order).map(|_| field.rand(rng)).collect() }
    }

    /// Convolution product through the group table.
    pub fn mul(&self, other: &GroupRingElement, g: &MetacyclicGroup) -> Result<GroupRingElement> {
        let n = g.order();
        if self.coeffs.len() != n || other.coeffs.len() != n {
            return Err(dim_err("group ring element length differs from the group order"));
        }
        let f = self.field;
        let mut out = vec![0; n];
        for (x, &cx) in self.coeffs.iter().enumerate().filter(|(_, c)| **c != 0) {
            for (y, &cy) in other.coeffs.iter().enumerate() {
                let k = g.mul(x, y);
                out[k] = f.add(out[k], f.mul(cx, cy));
            }
        }
        Ok(GroupRingElement { field: f, coeffs: out })
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.first() == Some(&1) && self.coeffs[1..].iter().all(|&c| c == 0)
    }
}

/// `M_beta` with entry `(i, j) = beta_{g_i^{-1} g_j}`, so that `x beta` is
/// the row vector `x M_beta`.
pub fn right_multiplication_matrix(g: &MetacyclicGroup, beta: &GroupRingElement) -> Result<DenseMatrix> {
    let n = g.order();
    if beta.coeffs.len() != n {
        return Err(dim_err("group ring element length differs from the group order"));
    }
    let inv: Vec<usize> = (0..n).map(|i| g.inverse(i)).collect();
    let mut out = DenseMatrix::zeros(beta.field, n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, beta.coeffs[g.mul(inv[i], j)]);
        }
    }
    Ok(out)
}

/// Whether every `s x s` block depends only on its block diagonal.
pub fn is_block_toeplitz(a: &DenseMatrix, s: usize) -> bool {
    let n = a.rows();
    if s == 0 || n % s != 0 || a.cols() != n {
        return false;
    }
    (s..n).all(|i| (s..n).all(|j| a.get(i, j) == a.get(i - s, j - s)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitReport {
    pub inverse: GroupRingElement,
    /// Row `i` holds the coefficients of `g_i beta^{-1}`.
    pub orbit: DenseMatrix,
    /// Block size of the block Toeplitz layout used for inversion.
    pub block: usize,
}

/// Inverts `beta` through block Toeplitz inversion of `M_beta`, or reports
/// [`Error::NotAUnit`].
pub fn group_ring_unit(
    g: &MetacyclicGroup,
    beta: &GroupRingElement,
    strategy: GeneratorStrategy,
) -> Result<UnitReport> {
    let n = g.order();
    let mb = right_multiplication_matrix(g, beta)?;
    let f = beta.field;
    // swapped layout lists sigma^a tau^b at b m + a; it is block Toeplitz
    // with m x m blocks only for some presentations
    let perm: Vec<usize> = (0..n).map(|k| g.index(k % g.m, k / g.m)).collect();
    let mut swapped = DenseMatrix::zeros(f, n, n);
    for i in 0..n {
        for j in 0..n {
            swapped.set(i, j, mb.get(perm[i], perm[j]));
        }
    }
    // both layouts have the same max(block, count); prefer the block size
    // nearer the cost model's optimum
    let target = (n as f64).powf(solve_crossing(&OmegaTable::bundled()).k_star);
    let closer = (g.m as f64 - target).abs() < (g.s as f64 - target).abs();
    let use_swapped = closer && is_block_toeplitz(&swapped, g.m);
    let (mat, block) = if use_swapped { (&swapped, g.m) } else { (&mb, g.s) };
    let op = DisplacementOperator::toeplitz(n, block)?;
    let inv = match block_struct_inv(mat, &op, strategy) {
        Err(Error::NotStronglyRegular { .. }) => block_struct_inv(mat, &op, GeneratorStrategy::DenseOracle),
        other => other,
    };
    let inv = match inv {
        Ok(x) => x,
        Err(Error::Singular { .. }) => return Err(Error::NotAUnit),
        Err(e) => return Err(e),
    };
    let orbit = if use_swapped {
        let mut back = DenseMatrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                back.set(perm[i], perm[j], inv.get(i, j));
            }
        }
        back
    } else {
        inv
    };
    let inverse = GroupRingElement { field: f, coeffs: orbit.row(0).to_vec() };
    Ok(UnitReport { inverse, orbit, block })
}

/// Header `m s t u p`, then `a b coeff` lines for `sigma^a tau^b`.
pub fn parse_group_element(text: &str) -> Result<(MetacyclicGroup, GroupRingElement)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#') && !l.starts_with('%'));
    let nums = |line: usize, l: &str| -> Result<Vec<i64>> {
        l.split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line, msg: format!("{e}") })
    };
    let (hl, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    let h = nums(hl, header)?;
    if h.len() != 5 || h.iter().any(|&v| v < 0) {
        return Err(Error::Parse { line: hl, msg: "header must be `m s t u p`".into() });
    }
    let field = PrimeField::new(h[4] as u64)?;
    let g = MetacyclicGroup::new(h[0] as usize, h[1] as usize, h[2] as usize, h[3] as usize)?;
    let mut coeffs = vec![0u64; g.order()];
    let mut seen = vec![false; g.order()];
    for (line, l) in lines {
        let v = nums(line, l)?;
        if v.len() != 3 {
            return Err(Error::Parse { line, msg: "expected `a b coeff`".into() });
        }
        let (a, b) = (v[0], v[1]);
        if a < 0 || b < 0 || a as usize >= g.m || b as usize >= g.s {
            return Err(Error::Parse { line, msg: format!("exponents ({a}, {b}) out of range") });
        }
        let k = g.index(a as usize, b as usize);
        if seen[k] {
            return Err(Error::Parse { line, msg: format!("duplicate term ({a}, {b})") });
        }
        seen[k] = true;
        coeffs[k] = field.from_i64(v[2]);
    }
    Ok((g, GroupRingElement { field, coeffs }))
}

pub fn format_group_element(g: &MetacyclicGroup, beta: &GroupRingElement) -> String {
    let mut out = format!("{} {} {} {} {}\n", g.m, g.s, g.t, g.u, beta.field.modulus());
    for (k, &c) in beta.coeffs.iter().enumerate() {
        if c != 0 {
            let (a, b) = g.element(k);
            out.push_str(&format!("{a} {b} {c}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{determinant, mat_mul};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::new(vec![vec![0, 1], vec![1, 2], vec![0, 2]], true).unwrap()
    }

    #[test]
    fn complex_closure_and_order() {
        let c = triangle();
        assert_eq!(c.simplices(), &[vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(c.dim_range(1), 3..6);
        assert!(SimplicialComplex::new(vec![vec![0, 1]], false).is_err());
        assert!(SimplicialComplex::new(vec![vec![1, 1]], true).is_err());
        let parsed = SimplicialComplex::parse("# triangle\n0 1\n2 1\n0 2\n", true).unwrap();
        assert_eq!(parsed, c);
        assert!(SimplicialComplex::parse("0 x\n", true).is_err());
    }

    #[test]
    fn boundary_examples() {
        let f = gf(2);
        let v = SimplicialComplex::new(vec![vec![7]], true).unwrap();
        assert!(boundary_matrix(&v, f).unwrap().to_dense().is_zero());
        let e = SimplicialComplex::new(vec![vec![0, 1]], true).unwrap();
        let d = boundary_matrix(&e, f).unwrap().to_dense();
        assert_eq!(d.column(2), vec![1, 1, 0]);
        let d = boundary_matrix(&triangle(), f).unwrap();
        assert_eq!((d.rows(), d.cols(), d.nnz()), (6, 6, 6));
        for j in 3..6 {
            assert_eq!(d.to_dense().column(j).iter().filter(|&&x| x == 1).count(), 2);
        }
    }

    #[test]
    fn boundary_squares_to_zero() {
        let mut rng = SeededRng::new(1);
        for p in [2, 7, 65537] {
            for _ in 0..5 {
                let c = SimplicialComplex::random(7, 3, 6, &mut rng).unwrap();
                let d = boundary_matrix(&c, gf(p)).unwrap();
                let dd = d.to_dense();
                assert!(mat_mul(&dd, &dd).unwrap().is_zero());
                let bound: usize = c.simplices().iter().map(|s| if s.len() > 1 { s.len() } else { 0 }).sum();
                assert_eq!(d.nnz(), bound);
                assert!(d.triplets().iter().all(|&(i, j, _)| i < j));
            }
        }
    }

    fn betti(c: &SimplicialComplex, p: u64) -> Vec<usize> {
        betti_numbers(c, gf(p), &mut SeededRng::new(9)).unwrap().betti
    }

    #[test]
    fn betti_examples() {
        assert_eq!(betti(&triangle(), 2), vec![1, 1]);
        let sphere = SimplicialComplex::new(
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            true,
        )
        .unwrap();
        assert_eq!(betti(&sphere, 2), vec![1, 0, 1]);
        assert_eq!(betti(&sphere, 65537), vec![1, 0, 1]);
        let two = SimplicialComplex::new(vec![vec![0], vec![1]], true).unwrap();
        assert_eq!(betti(&two, 2), vec![2]);
        let pair = SimplicialComplex::new(
            vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4], vec![4, 5], vec![3, 5]],
            true,
        )
        .unwrap();
        assert_eq!(betti(&pair, 2), vec![2, 2]);
        assert_eq!(betti(&pair, 65537), vec![2, 2]);
    }

    fn dense_betti(c: &SimplicialComplex, f: PrimeField) -> Vec<usize> {
        let d = boundary_matrix(c, f).unwrap().to_dense();
        let top = c.dim().unwrap();
        let rank = |k: usize| {
            if k == 0 || k > top {
                return 0;
            }
            let (r, cl) = (c.dim_range(k - 1), c.dim_range(k));
            dense_rank(&d.submatrix(r.start, r.end, cl.start, cl.end))
        };
        (0..=top).map(|k| c.dim_range(k).len() - rank(k) - rank(k + 1)).collect()
    }

    #[test]
    fn sparse_pipeline_matches_dense_oracle() {
        let f = gf(65537);
        let mut rng = SeededRng::new(2);
        for _ in 0..6 {
            let c = SimplicialComplex::random(8, 2, 9, &mut rng).unwrap();
            let h = betti_numbers(&c, f, &mut rng).unwrap();
            assert_eq!(h.betti, dense_betti(&c, f));
            let d = boundary_matrix(&c, f).unwrap().to_dense();
            for k in 1..h.cycles.len() {
                let (r, cl) = (c.dim_range(k - 1), c.dim_range(k));
                let dk = d.submatrix(r.start, r.end, cl.start, cl.end);
                assert!(mat_mul(&dk, &h.cycles[k]).unwrap().is_zero());
                assert_eq!(dense_rank(&h.cycles[k]), h.cycles[k].cols());
            }
        }
    }

    /// Builds `sigma^c tau^d` one generator at a time using only the two
    /// rewriting rules `tau sigma = sigma^w tau` and `tau^s = sigma^t`.
    fn word_oracle(g: &MetacyclicGroup) -> Vec<Vec<usize>> {
        let n = g.order();
        let w = (0..g.m).find(|w| (g.u * w) % g.m == 1 % g.m).unwrap();
        let times_sigma = |(a, b): (usize, usize)| {
            // sigma^a tau^b sigma: push sigma left through b taus
            let mut e = 1;
            for _ in 0..b {
                e = e * w % g.m;
            }
            ((a + e) % g.m, b)
        };
        let times_tau = |(a, b): (usize, usize)| if b + 1 == g.s { ((a + g.t) % g.m, 0) } else { (a, b + 1) };
        let mut table = vec![vec![0; n]; n];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let (c, d) = g.element(j);
                let mut x = g.element(i);
                for _ in 0..c {
                    x = times_sigma(x);
                }
                for _ in 0..d {
                    x = times_tau(x);
                }
                *cell = g.index(x.0, x.1);
            }
        }
        table
    }

    #[test]
    fn metacyclic_arithmetic() {
        let dih = MetacyclicGroup::new(3, 2, 3, 2).unwrap();
        dih.check_axioms().unwrap();
        let table = word_oracle(&dih);
        for i in 0..6 {
            assert_eq!(group_multiplication_index(&dih, i, i), 0);
            for j in 0..6 {
                assert_eq!(dih.mul(i, j), table[i][j]);
            }
        }
        // nonabelian: sigma tau != tau sigma
        assert_ne!(dih.mul(2, 1), dih.mul(1, 2));
        let c5 = MetacyclicGroup::cyclic(5);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(group_multiplication_index(&c5, i, j), (j + 5 - i) % 5);
            }
        }
        let q8 = MetacyclicGroup::new(4, 2, 2, 3).unwrap();
        q8.check_axioms().unwrap();
        assert!(MetacyclicGroup::new(3, 2, 3, 3).is_err());
        assert!(MetacyclicGroup::new(5, 2, 5, 2).is_err());
    }

    #[test]
    fn right_multiplication_shapes() {
        let f = gf(7);
        let mut rng = SeededRng::new(3);
        let g = MetacyclicGroup::new(4, 3, 4, 1).unwrap();
        let beta = GroupRingElement::random(f, 12, &mut rng);
        let mb = right_multiplication_matrix(&g, &beta).unwrap();
        assert!(is_block_toeplitz(&mb, 3));
        assert!(right_multiplication_matrix(&g, &GroupRingElement::one(f, 12)).unwrap().is_identity());
        let c = MetacyclicGroup::cyclic(5);
        let b = GroupRingElement::random(f, 5, &mut rng);
        let m = right_multiplication_matrix(&c, &b).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.get(i, j), b.coeffs[(j + 5 - i) % 5]);
            }
        }
        // x M_beta is the coefficient vector of x beta
        let x = GroupRingElement::random(f, 12, &mut rng);
        let xm = mat_mul(&DenseMatrix::new(f, 1, 12, x.coeffs.clone()).unwrap(), &mb).unwrap();
        assert_eq!(xm.row(0), x.mul(&beta, &g).unwrap().coeffs.as_slice());
    }

    #[test]
    fn unit_examples() {
        let c2 = MetacyclicGroup::new(2, 1, 2, 1).unwrap();
        let b = GroupRingElement::new(gf(3), vec![1, 1]);
        assert!(matches!(group_ring_unit(&c2, &b, GeneratorStrategy::DenseOracle), Err(Error::NotAUnit)));
        let b = GroupRingElement::new(gf(5), vec![1, 2]);
        for strategy in [GeneratorStrategy::DenseOracle, GeneratorStrategy::SchurRecursive] {
            let r = group_ring_unit(&c2, &b, strategy).unwrap();
            assert!(b.mul(&r.inverse, &c2).unwrap().is_one());
            assert!(r.inverse.mul(&b, &c2).unwrap().is_one());
        }
        let dih = MetacyclicGroup::new(3, 2, 3, 2).unwrap();
        let one = GroupRingElement::one(gf(7), 6);
        let r = group_ring_unit(&dih, &one, GeneratorStrategy::SchurRecursive).unwrap();
        assert!(r.inverse.is_one());
        assert!(r.orbit.is_identity());
    }

    #[test]
    fn unit_test_agrees_with_determinant() {
        let f = gf(5);
        let mut rng = SeededRng::new(4);
        let dih = MetacyclicGroup::new(3, 2, 3, 2).unwrap();
        for _ in 0..30 {
            let b = GroupRingElement::random(f, 6, &mut rng);
            let mb = right_multiplication_matrix(&dih, &b).unwrap();
            assert!(is_block_toeplitz(&mb, 2));
            let det = determinant(&mb).unwrap();
            match group_ring_unit(&dih, &b, GeneratorStrategy::SchurRecursive) {
                Ok(r) => {
                    assert_ne!(det, 0);
                    assert!(b.mul(&r.inverse, &dih).unwrap().is_one());
                    assert!(mat_mul(&mb, &right_multiplication_matrix(&dih, &r.inverse).unwrap()).unwrap().is_identity());
                }
                Err(Error::NotAUnit) => assert_eq!(det, 0),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn swapped_layout_for_abelian_groups() {
        let f = gf(101);
        let mut rng = SeededRng::new(5);
        let g = MetacyclicGroup::new(8, 3, 8, 1).unwrap();
        let b = GroupRingElement::random(f, 24, &mut rng);
        let r = group_ring_unit(&g, &b, GeneratorStrategy::DenseOracle).unwrap();
        assert_eq!(r.block, 8);
        assert!(b.mul(&r.inverse, &g).unwrap().is_one());
        for i in 0..24 {
            let mut gi = vec![0; 24];
            gi[i] = 1;
            let gb = GroupRingElement::new(f, gi).mul(&r.inverse, &g).unwrap();
            assert_eq!(r.orbit.row(i), gb.coeffs.as_slice());
        }
    }

    #[test]
    fn group_file_round_trip() {
        let text = "3 2 3 2 5\n0 0 1\n1 1 -1\n";
        let (g, b) = parse_group_element(text).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(b.coeffs, vec![1, 0, 0, 4, 0, 0]);
        assert_eq!(parse_group_element(&format_group_element(&g, &b)).unwrap(), (g, b));
        assert!(parse_group_element("3 2 3 2 5\n3 0 1\n").is_err());
        assert!(parse_group_element("3 2 3 2\n").is_err());
        assert!(parse_group_element("3 2 3 2 5\n0 0 1\n0 0 2\n").is_err());
    }
}
