//! Arithmetic in GF(p) for a word-sized prime `p` chosen at runtime.
//!
//! Matrices store raw residues (`u64` in `[0, p)`) next to a [`PrimeField`]
//! context; [`FieldElement`] is the self-describing value used at API edges
//! where operands from different fields could meet.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counter::{charge, tick_add, tick_inv, tick_mul};
use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 62;

/// The prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Builds GF(p), rejecting composite or out-of-range moduli.
    pub fn new(p: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&p) {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    /// Maps a signed integer to its residue.
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement { value: self.reduce(v), modulus: self.p }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        tick_add();
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        tick_add();
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        tick_mul();
        mul_raw(a, b, self.p)
    }

    /// Multiplicative inverse via Fermat exponentiation.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a % self.p == 0 {
            return Err(Error::DivisionByZero);
        }
        tick_inv();
        Ok(pow_raw(a, self.p - 2, self.p))
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        tick_mul();
        pow_raw(a, e, self.p)
    }

    /// `dst -= c * src`, elementwise.
    pub(crate) fn sub_scaled(&self, dst: &mut [u64], src: &[u64], c: u64) {
        debug_assert_eq!(dst.len(), src.len());
        charge(src.len() as u64, src.len() as u64);
        let p = self.p;
        for (d, &x) in dst.iter_mut().zip(src) {
            let t = mul_raw(c, x, p);
            *d = if *d >= t { *d - t } else { *d + p - t };
        }
    }

    /// `dst += c * src`, elementwise.
    pub(crate) fn add_scaled(&self, dst: &mut [u64], src: &[u64], c: u64) {
        debug_assert_eq!(dst.len(), src.len());
        charge(src.len() as u64, src.len() as u64);
        let p = self.p;
        for (d, &x) in dst.iter_mut().zip(src) {
            let t = *d + mul_raw(c, x, p);
            *d = if t >= p { t - p } else { t };
        }
    }

    /// `dst += src`, elementwise.
    pub(crate) fn add_assign(&self, dst: &mut [u64], src: &[u64]) {
        debug_assert_eq!(dst.len(), src.len());
        charge(0, src.len() as u64);
        let p = self.p;
        for (d, &x) in dst.iter_mut().zip(src) {
            let t = *d + x;
            *d = if t >= p { t - p } else { t };
        }
    }

    pub(crate) fn scale_in_place(&self, v: &mut [u64], c: u64) {
        charge(v.len() as u64, 0);
        for x in v.iter_mut() {
            *x = mul_raw(*x, c, self.p);
        }
    }

    /// Inner product of two equal-length slices.
    pub(crate) fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        let k = a.len() as u64;
        charge(k, k.saturating_sub(1));
        dot_raw(a, b, self.p)
    }

    /// Uniform residue in `[0, p)`.
    pub fn rand(&self, rng: &mut SeededRng) -> u64 {
        rng.gen_range(0..self.p)
    }

    /// Uniform residue in `[1, p)`.
    pub fn rand_nonzero(&self, rng: &mut SeededRng) -> u64 {
        rng.gen_range(1..self.p)
    }
}

#[inline(always)]
pub(crate) fn mul_raw(a: u64, b: u64, p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        (a * b) % p
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

#[inline]
pub(crate) fn dot_raw(a: &[u64], b: &[u64], p: u64) -> u64 {
    if p <= u32::MAX as u64 {
        // products are < 2^64, so a u128 accumulator cannot overflow for any realistic length
        let mut acc: u128 = 0;
        for (&x, &y) in a.iter().zip(b) {
            acc += (x * y) as u128;
        }
        (acc % p as u128) as u64
    } else {
        let mut acc: u64 = 0;
        for (&x, &y) in a.iter().zip(b) {
            let t = acc + mul_raw(x, y, p);
            acc = if t >= p { t - p } else { t };
        }
        acc
    }
}

fn pow_raw(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_raw(acc, a, p);
        }
        a = mul_raw(a, a, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_u128(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut acc: u64 = 1;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * a as u128) % n as u128) as u64;
        }
        a = ((a as u128 * a as u128) % n as u128) as u64;
        e >>= 1;
    }
    acc
}

/// A residue tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.modulus }
    }

    fn check(&self, other: &FieldElement) -> Result<PrimeField> {
        if self.modulus != other.modulus {
            return Err(Error::FieldMismatch { left: self.modulus, right: other.modulus });
        }
        Ok(self.field())
    }

    fn with(&self, value: u64) -> FieldElement {
        FieldElement { value, modulus: self.modulus }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        let f = self.check(other)?;
        Ok(self.with(f.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        let f = self.check(other)?;
        Ok(self.with(f.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        let f = self.check(other)?;
        Ok(self.with(f.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.field().neg(self.value))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.with(self.field().inv(self.value)?))
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

/// Seeded, splittable random source threaded through every probabilistic routine.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Derives an independent child stream.
    pub fn split(&mut self) -> SeededRng {
        SeededRng::new(self.inner.next_u64())
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
