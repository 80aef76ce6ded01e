//! Interval arithmetic on the circle `[0, 2*pi)`.
//!
//! Used to clip a disc's circle against the cell square and against other
//! discs: start from the full circle and subtract the angular ranges that
//! fall outside the cell or inside another disc. What survives becomes the
//! visible boundary arcs.

use alloc::vec::Vec;
use core::f64::consts::TAU;

/// A set of disjoint half-open intervals `[start, end)` on the circle,
/// kept sorted with `0 <= start < end <= 2*pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSet {
    intervals: Vec<(f64, f64)>,
}

fn wrap(a: f64) -> f64 {
    let mut a = a % TAU;
    if a < 0.0 {
        a += TAU;
    }
    a
}

impl AngularSet {
    pub fn full() -> AngularSet {
        AngularSet {
            intervals: alloc::vec![(0.0, TAU)],
        }
    }

    pub fn empty() -> AngularSet {
        AngularSet {
            intervals: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// The surviving intervals as `(start, span)` pairs.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.intervals.iter().map(|&(a, b)| (a, b - a))
    }

    pub fn total(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = wrap(theta);
        self.intervals.iter().any(|&(a, b)| t >= a && t < b)
    }

    /// Removes the (possibly wrapping) interval `[lo, lo + span)` from the
    /// set. `span >= 2*pi` clears everything; `span <= 0` is a no-op.
    pub fn subtract(&mut self, lo: f64, span: f64) {
        if span <= 0.0 {
            return;
        }
        if span >= TAU {
            self.intervals.clear();
            return;
        }
        let lo = wrap(lo);
        let hi = lo + span;
        if hi <= TAU {
            self.subtract_flat(lo, hi);
        } else {
            self.subtract_flat(lo, TAU);
            self.subtract_flat(0.0, hi - TAU);
        }
    }

    fn subtract_flat(&mut self, lo: f64, hi: f64) {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for &(a, b) in &self.intervals {
            if b <= lo || a >= hi {
                out.push((a, b));
                continue;
            }
            if a < lo {
                out.push((a, lo));
            }
            if b > hi {
                out.push((hi, b));
            }
        }
        self.intervals = out;
    }

    /// Drops slivers shorter than `min_span` radians.
    pub fn prune(&mut self, min_span: f64) {
        self.intervals.retain(|&(a, b)| b - a >= min_span);
    }
}

/// One-dimensional analogue used for cell-side bookkeeping: disjoint sorted
/// intervals inside `[0, 1]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UnitIntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl UnitIntervalSet {
    pub fn new() -> UnitIntervalSet {
        UnitIntervalSet::default()
    }

    pub fn full() -> UnitIntervalSet {
        UnitIntervalSet {
            intervals: alloc::vec![(0.0, 1.0)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| x >= a && x <= b)
    }

    /// Inserts `[lo, hi] ∩ [0, 1]`, merging overlaps.
    pub fn insert(&mut self, lo: f64, hi: f64) {
        let mut lo = lo.max(0.0);
        let mut hi = hi.min(1.0);
        if hi <= lo {
            return;
        }
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut placed = false;
        for &(a, b) in &self.intervals {
            if b < lo {
                out.push((a, b));
            } else if a > hi {
                if !placed {
                    out.push((lo, hi));
                    placed = true;
                }
                out.push((a, b));
            } else {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        if !placed {
            out.push((lo, hi));
        }
        self.intervals = out;
    }

    /// Removes `[lo, hi]` from the set.
    pub fn remove(&mut self, lo: f64, hi: f64) {
        if hi <= lo {
            return;
        }
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for &(a, b) in &self.intervals {
            if b <= lo || a >= hi {
                out.push((a, b));
                continue;
            }
            if a < lo {
                out.push((a, lo));
            }
            if b > hi {
                out.push((hi, b));
            }
        }
        self.intervals = out;
    }
}
