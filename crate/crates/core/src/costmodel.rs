//! Exponent bookkeeping for rectangular matrix multiplication.
//!
//! `omega(k)` is the exponent of multiplying an `n x n^k` matrix by an
//! `n^k x n` matrix. This module interpolates it from a table, finds the
//! blocking exponent where `omega(k) = 3 - k`, and turns that into concrete
//! block sizes. It is the only floating point code in the crate and never
//! feeds values back into field arithmetic.

use std::path::Path;

use crate::error::{Error, Result};

/// Sample points `(k, omega(k))`, ascending in `k`, covering `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaTable {
    points: Vec<(f64, f64)>,
}

const EPS: f64 = 1e-12;

impl OmegaTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("omega table: {msg}")));
        if points.len() < 2 {
            return bad("need at least two points");
        }
        if points[0].0.abs() > EPS || (points[points.len() - 1].0 - 1.0).abs() > EPS {
            return bad("k must start at 0 and end at 1");
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return bad("k values must be strictly increasing");
            }
            if w[1].1 < w[0].1 - EPS {
                return bad("omega must be nondecreasing");
            }
        }
        if points.iter().any(|&(k, w)| w < 2.0 - EPS || w < 1.0 + k - EPS || !w.is_finite()) {
            return bad("omega(k) must be at least max(2, 1 + k)");
        }
        Ok(OmegaTable { points })
    }

    /// Anchor values: `omega(k) = 2` up to the dual exponent 0.31389,
    /// `omega(0.5) = 2.0442`, the crossing `(0.7869, 2.2131)` and
    /// `omega(1) = 2.37286`.
    pub fn bundled() -> Self {
        OmegaTable::new(vec![
            (0.0, 2.0),
            (0.31389, 2.0),
            (0.5, 2.0442),
            (0.7869, 2.2131),
            (1.0, 2.37286),
        ])
        .expect("bundled table is valid")
    }

    /// Parses `k omega` lines; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line: i + 1, msg: format!("{e}") })?;
            if vals.len() != 2 {
                return Err(Error::Parse { line: i + 1, msg: "expected `k omega`".into() });
            }
            points.push((vals[0], vals[1]));
        }
        OmegaTable::new(points)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Piecewise-linear `omega(k)` for `0 <= k <= 1`.
    pub fn omega_of_k(&self, k: f64) -> Result<f64> {
        if !(-EPS..=1.0 + EPS).contains(&k) {
            return Err(Error::InvalidArgument(format!("k = {k} outside [0, 1]")));
        }
        let k = k.clamp(0.0, 1.0);
        let i = self.points.partition_point(|&(x, _)| x < k);
        if i < self.points.len() && self.points[i].0 == k {
            return Ok(self.points[i].1);
        }
        let (k0, w0) = self.points[i - 1];
        let (k1, w1) = self.points[i];
        Ok(w0 + (w1 - w0) * (k - k0) / (k1 - k0))
    }

    /// The unit-square omega, `omega(1)`.
    pub fn omega(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }
}

/// One grid point of the exponent curves, all as powers of `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub k: f64,
    /// `m n^2 = n^{3-k}`.
    pub mn2: f64,
    /// `s^omega m = n^{1 + (omega - 1) k}`.
    pub s_omega_m: f64,
    /// `s^omega m^2 = n^{2 + (omega - 2) k}`.
    pub s_omega_m2: f64,
    /// `n^{omega(k)}`.
    pub omega_k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub k_star: f64,
    pub omega_star: f64,
    pub curves: Vec<CurvePoint>,
}

impl ExponentReport {
    /// `s = round(n^{k*})`.
    pub fn s_of_n(&self, n: usize) -> usize {
        (n as f64).powf(self.k_star).round() as usize
    }
}

/// Solves `omega(k) = 3 - k` by bisection; the difference is increasing.
pub fn solve_crossing(table: &OmegaTable) -> ExponentReport {
    let diff = |k: f64| table.omega_of_k(k).expect("k in range") - (3.0 - k);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let k_star = if diff(hi) <= 0.0 {
        1.0
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if diff(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let omega = table.omega();
    let curves = (0..=100)
        .map(|i| {
            let k = i as f64 / 100.0;
            CurvePoint {
                k,
                mn2: 3.0 - k,
                s_omega_m: 1.0 + (omega - 1.0) * k,
                s_omega_m2: 2.0 + (omega - 2.0) * k,
                omega_k: table.omega_of_k(k).expect("grid in range"),
            }
        })
        .collect();
    ExponentReport { k_star, omega_star: 3.0 - k_star, curves }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blocking {
    pub s: usize,
    pub m: usize,
    /// Set when `n` is prime and the pipeline degenerates to `s = 1`.
    pub prime_fallback: bool,
}

/// Divisor of `n` nearest to `n^{k*}`, ties toward the larger divisor.
pub fn choose_blocking(n: usize, table: &OmegaTable) -> Result<Blocking> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("blocking needs n >= 4, got {n}")));
    }
    let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
    if divisors.len() == 2 {
        return Ok(Blocking { s: 1, m: n, prime_fallback: true });
    }
    let target = (n as f64).powf(solve_crossing(table).k_star);
    let mut best = 1;
    for &d in &divisors {
        let (db, dd) = ((best as f64 - target).abs(), (d as f64 - target).abs());
        if dd < db || (dd == db && d > best) {
            best = d;
        }
    }
    Ok(Blocking { s: best, m: n / best, prime_fallback: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_anchor_values() {
        let t = OmegaTable::bundled();
        assert_eq!(t.omega_of_k(1.0).unwrap(), 2.37286);
        assert!((t.omega_of_k(0.5).unwrap() - 2.0442).abs() < 5e-4);
        for k in [0.0, 0.1, 0.2, 0.31389] {
            assert_eq!(t.omega_of_k(k).unwrap(), 2.0);
        }
        assert!(t.omega_of_k(1.5).is_err());
        assert!(t.omega_of_k(-0.1).is_err());
    }

    #[test]
    fn crossing_points() {
        let r = solve_crossing(&OmegaTable::bundled());
        assert!((r.k_star - 0.7869).abs() < 5e-4);
        assert!((r.omega_star - 2.2131).abs() < 5e-4);
        let lin = OmegaTable::new(vec![(0.0, 2.0), (1.0, 3.0)]).unwrap();
        let r = solve_crossing(&lin);
        assert!((r.k_star - 0.5).abs() < 1e-9 && (r.omega_star - 2.5).abs() < 1e-9);
        let flat = OmegaTable::new(vec![(0.0, 2.0), (1.0, 2.0)]).unwrap();
        let r = solve_crossing(&flat);
        assert_eq!(r.k_star, 1.0);
        assert_eq!(r.omega_star, 2.0);
    }

    #[test]
    fn exponent_inequalities_on_grid() {
        let t = OmegaTable::bundled();
        let w = t.omega();
        for c in solve_crossing(&t).curves {
            assert!(c.s_omega_m <= c.omega_k + 1e-9 && c.omega_k <= c.s_omega_m2 + 1e-9, "k={}", c.k);
            assert!((1.0 - c.k) + c.omega_k >= w - 1e-9);
        }
    }

    #[test]
    fn refinement_invariance() {
        let t = OmegaTable::bundled();
        let mut pts = t.points().to_vec();
        let mid = 0.5 * (0.5 + 0.7869);
        pts.insert(3, (mid, t.omega_of_k(mid).unwrap()));
        let r = solve_crossing(&OmegaTable::new(pts).unwrap());
        assert!((r.k_star - solve_crossing(&t).k_star).abs() < 1e-9);
    }

    #[test]
    fn blocking_choices() {
        let t = OmegaTable::bundled();
        assert_eq!(choose_blocking(1024, &t).unwrap(), Blocking { s: 256, m: 4, prime_fallback: false });
        assert_eq!(choose_blocking(16, &t).unwrap(), Blocking { s: 8, m: 2, prime_fallback: false });
        assert_eq!(choose_blocking(13, &t).unwrap(), Blocking { s: 1, m: 13, prime_fallback: true });
        assert!(choose_blocking(3, &t).is_err());
        assert_eq!(solve_crossing(&t).s_of_n(1024), 234);
    }

    #[test]
    fn table_parsing() {
        let t = OmegaTable::parse("# k omega\n0 2\n0.5 2.1\n\n1 2.4\n").unwrap();
        assert_eq!(t.points().len(), 3);
        assert!(OmegaTable::parse("0 2\n1\n").is_err());
        assert!(OmegaTable::parse("0 2\n0.5 1.9\n1 2.4\n").is_err());
        assert!(OmegaTable::parse("0.1 2\n1 2.4\n").is_err());
        assert!(OmegaTable::parse("0 2.3\n0.5 2.1\n1 2.4\n").is_err());
    }
}
