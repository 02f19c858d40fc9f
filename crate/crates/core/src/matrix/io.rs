//! Text formats.
//!
//! Sparse: header `rows cols p`, then `i j v` lines with 1-based indices and
//! `0 < v < p`, terminated by `0 0 0`. Dense: the same header followed by one
//! line of space-separated residues per row.

use std::fmt::Write as _;
use std::path::Path;

use super::{DenseMatrix, SparseMatrix};
use crate::error::{Error, Result};
use crate::field::PrimeField;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%') && !l.starts_with('#'))
}

fn numbers(line: usize, s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|_| parse_err(line, format!("not a non-negative integer: {t:?}"))))
        .collect()
}

fn header(lines: &mut dyn Iterator<Item = (usize, &str)>) -> Result<(usize, usize, PrimeField)> {
    let (ln, h) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let v = numbers(ln, h)?;
    if v.len() != 3 {
        return Err(parse_err(ln, "header must be `rows cols p`"));
    }
    let field = PrimeField::new(v[2]).map_err(|e| parse_err(ln, e.to_string()))?;
    Ok((v[0] as usize, v[1] as usize, field))
}

pub fn parse_sparse(text: &str) -> Result<SparseMatrix> {
    let mut lines = content_lines(text);
    let (rows, cols, field) = header(&mut lines)?;
    let p = field.modulus();
    let mut trip = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut terminated = false;
    for (ln, l) in lines.by_ref() {
        let v = numbers(ln, l)?;
        if v.len() != 3 {
            return Err(parse_err(ln, "expected `i j v`"));
        }
        if v == [0, 0, 0] {
            terminated = true;
            break;
        }
        let (i, j, x) = (v[0] as usize, v[1] as usize, v[2]);
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(parse_err(ln, format!("index ({i},{j}) outside {rows}x{cols}")));
        }
        if x == 0 || x >= p {
            return Err(parse_err(ln, format!("value {x} not in 1..{p}")));
        }
        if !seen.insert((i, j)) {
            return Err(parse_err(ln, format!("duplicate entry ({i},{j})")));
        }
        trip.push((i - 1, j - 1, x));
    }
    if !terminated {
        return Err(parse_err(text.lines().count(), "missing `0 0 0` terminator"));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "content after terminator"));
    }
    SparseMatrix::new(field, rows, cols, trip)
}

pub fn parse_dense(text: &str) -> Result<DenseMatrix> {
    let mut lines = content_lines(text);
    let (rows, cols, field) = header(&mut lines)?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut count = 0;
    for (ln, l) in lines {
        if count == rows {
            return Err(parse_err(ln, "more rows than declared"));
        }
        let v = numbers(ln, l)?;
        if v.len() != cols {
            return Err(parse_err(ln, format!("expected {cols} entries, found {}", v.len())));
        }
        if let Some(x) = v.iter().find(|&&x| x >= field.modulus()) {
            return Err(parse_err(ln, format!("entry {x} not reduced mod {}", field.modulus())));
        }
        data.extend(v);
        count += 1;
    }
    if count != rows {
        return Err(parse_err(text.lines().count(), format!("expected {rows} rows, found {count}")));
    }
    DenseMatrix::new(field, rows, cols, data)
}

/// Accepts either format; sparse is tried first.
pub fn parse_any(text: &str) -> Result<DenseMatrix> {
    match parse_sparse(text) {
        Ok(s) => Ok(s.to_dense()),
        Err(sparse_err) => parse_dense(text).map_err(|_| sparse_err),
    }
}

pub fn format_sparse(a: &SparseMatrix) -> String {
    let mut out = format!("{} {} {}\n", a.rows(), a.cols(), a.field().modulus());
    for &(i, j, v) in a.triplets() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
    }
    out.push_str("0 0 0\n");
    out
}

pub fn format_dense(a: &DenseMatrix) -> String {
    let mut out = format!("{} {} {}\n", a.rows(), a.cols(), a.field().modulus());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(u64::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_err(0, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| parse_err(0, format!("{}: {e}", path.display())))
}

pub fn read_sparse(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    parse_sparse(&read(path.as_ref())?)
}

pub fn read_dense(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_dense(&read(path.as_ref())?)
}

pub fn read_any(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    parse_any(&read(path.as_ref())?)
}

pub fn write_sparse(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    write(path.as_ref(), &format_sparse(a))
}

pub fn write_dense(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write(path.as_ref(), &format_dense(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SeededRng;

    #[test]
    fn sparse_round_trip() {
        let f = PrimeField::new(65537).unwrap();
        let mut rng = SeededRng::new(9);
        let a = SparseMatrix::random(f, 10, 7, 0.3, &mut rng);
        let text = format_sparse(&a);
        assert!(text.ends_with("0 0 0\n"));
        assert_eq!(parse_sparse(&text).unwrap(), a);
        assert_eq!(parse_any(&text).unwrap(), a.to_dense());
    }

    #[test]
    fn dense_round_trip() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = SeededRng::new(9);
        let a = DenseMatrix::random(f, 4, 5, &mut rng);
        assert_eq!(parse_dense(&format_dense(&a)).unwrap(), a);
        assert_eq!(parse_any(&format_dense(&a)).unwrap(), a);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_sparse("2 2 7\n1 1 3\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_sparse("2 2 7\n3 1 3\n0 0 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_sparse("2 2 7\n1 1 7\n0 0 0\n").is_err());
        assert!(parse_sparse("2 2 7\n1 1 0\n0 0 0\n").is_err());
        assert!(parse_sparse("2 2 8\n0 0 0\n").is_err());
        assert!(parse_sparse("2 2 7\n1 1 1\n1 1 2\n0 0 0\n").is_err());
        assert!(parse_dense("2 2 7\n1 2\n").is_err());
        assert!(parse_dense("1 2 7\n1 x\n").is_err());
    }
}
