//! Per-thread field operation counters.
//!
//! Every multiplication, addition/subtraction and inversion performed through a
//! [`PrimeField`](crate::field::PrimeField) bumps these counters. Kernels that
//! fan out to worker threads merge the workers' deltas back into the calling
//! thread, so totals do not depend on the thread count.

use std::cell::Cell;
use std::ops::{Add, Sub};

thread_local! {
    static MULS: Cell<u64> = const { Cell::new(0) };
    static ADDS: Cell<u64> = const { Cell::new(0) };
    static INVS: Cell<u64> = const { Cell::new(0) };
}

/// Snapshot of the operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub mul_count: u64,
    pub add_count: u64,
    pub inv_count: u64,
}

impl OpCounter {
    /// Reads the counters of the current thread.
    pub fn now() -> Self {
        OpCounter {
            mul_count: MULS.with(Cell::get),
            add_count: ADDS.with(Cell::get),
            inv_count: INVS.with(Cell::get),
        }
    }

    pub fn reset() {
        MULS.with(|c| c.set(0));
        ADDS.with(|c| c.set(0));
        INVS.with(|c| c.set(0));
    }

    /// Adds a delta measured elsewhere (e.g. on a worker thread).
    pub fn merge(delta: OpCounter) {
        MULS.with(|c| c.set(c.get() + delta.mul_count));
        ADDS.with(|c| c.set(c.get() + delta.add_count));
        INVS.with(|c| c.set(c.get() + delta.inv_count));
    }

    /// Runs `f` and returns its result with the operations it performed.
    pub fn measure<T>(f: impl FnOnce() -> T) -> (T, OpCounter) {
        let before = OpCounter::now();
        let out = f();
        (out, OpCounter::now() - before)
    }
}

impl Sub for OpCounter {
    type Output = OpCounter;
    fn sub(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            mul_count: self.mul_count - rhs.mul_count,
            add_count: self.add_count - rhs.add_count,
            inv_count: self.inv_count - rhs.inv_count,
        }
    }
}

impl Add for OpCounter {
    type Output = OpCounter;
    fn add(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            mul_count: self.mul_count + rhs.mul_count,
            add_count: self.add_count + rhs.add_count,
            inv_count: self.inv_count + rhs.inv_count,
        }
    }
}

#[inline(always)]
pub(crate) fn tick_mul() {
    MULS.with(|c| c.set(c.get() + 1));
}

#[inline(always)]
pub(crate) fn tick_add() {
    ADDS.with(|c| c.set(c.get() + 1));
}

#[inline(always)]
pub(crate) fn tick_inv() {
    // an inversion is also charged as one multiplication-equivalent
    MULS.with(|c| c.set(c.get() + 1));
    INVS.with(|c| c.set(c.get() + 1));
}

/// Bulk charge for kernels that count analytically rather than per call.
#[inline]
pub(crate) fn charge(muls: u64, adds: u64) {
    MULS.with(|c| c.set(c.get() + muls));
    ADDS.with(|c| c.set(c.get() + adds));
}
