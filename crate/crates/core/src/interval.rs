//! Exact interval sizes `|[bottom, top]|`.
//!
//! An antichain `χ` lies in `[α, β]` iff its downset contains `↓α` and is
//! contained in `↓β`. Such downsets are `↓α` plus a downset of the induced
//! subposet `Q = ↓β − ↓α`, and downsets of `Q` correspond one-to-one with
//! antichains of `Q`. Those are counted with the pivot recursion
//!
//! ```text
//! A(Q) = A(Q − {x}) + A(Q − (↑x ∪ ↓x))
//! ```
//!
//! splitting `Q` into comparability components first, and memoized on the
//! `Q` bitset. The order on masks does not depend on `n`, so the bitset
//! alone is a valid cache key.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use parking_lot::RwLock;
use serde::Serialize;

use crate::antichain::{bits_of, Antichain, DOWN, UP};
use crate::count::BigCount;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
}

/// Interval-size calculator with a shared memo of top-level results.
///
/// Readers never block each other; inserts take the write lock. Results do
/// not depend on cache contents.
pub struct IntervalCounter {
    cache: RwLock<HashMap<u128, BigCount>>,
    cap: Option<usize>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl Default for IntervalCounter {
    fn default() -> Self {
        IntervalCounter::new()
    }
}

impl IntervalCounter {
    pub fn new() -> Self {
        IntervalCounter {
            cache: RwLock::new(HashMap::new()),
            cap: None,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    /// Stop inserting once the cache holds `cap` entries.
    pub fn with_cap(cap: usize) -> Self {
        IntervalCounter {
            cap: Some(cap),
            ..IntervalCounter::new()
        }
    }

    /// Process-wide instance used by the free functions of this module.
    pub fn global() -> &'static IntervalCounter {
        static GLOBAL: OnceLock<IntervalCounter> = OnceLock::new();
        GLOBAL.get_or_init(IntervalCounter::new)
    }

    pub fn interval_size(&self, bottom: &Antichain, top: &Antichain) -> Result<BigCount> {
        if !bottom.le(top)? {
            return Ok(BigCount::ZERO);
        }
        Ok(self.count_region(top.down_bits() & !bottom.down_bits()))
    }

    /// Same as [`IntervalCounter::interval_size`] on raw downset bitsets.
    /// Returns 0 unless `bottom ⊆ top`.
    pub fn interval_size_bits(&self, bottom: u128, top: u128) -> BigCount {
        if bottom & !top != 0 {
            return BigCount::ZERO;
        }
        self.count_region(top & !bottom)
    }

    /// Number of monotone subsets of `s`, i.e. `|[⊥, s]|`.
    pub fn eta(&self, s: &Antichain) -> BigCount {
        self.count_region(s.down_bits())
    }

    /// Number of antichains of the subposet induced on the masks in `q`.
    pub fn count_region(&self, q: u128) -> BigCount {
        if q == 0 {
            return BigCount::ONE;
        }
        if let Some(v) = self.cache.read().get(&q) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return v.clone();
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let mut memo = HashMap::new();
        let v = count_antichains(q, &mut memo);
        let mut cache = self.cache.write();
        if self.cap.map_or(true, |cap| cache.len() < cap) {
            cache.insert(q, v.clone());
        }
        v
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            entries: self.cache.read().len(),
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }
}

/// `|[bottom, top]|` using the process-wide cache.
pub fn interval_size(bottom: &Antichain, top: &Antichain) -> Result<BigCount> {
    IntervalCounter::global().interval_size(bottom, top)
}

/// `η(s) = |[⊥, s]|` using the process-wide cache.
pub fn eta(s: &Antichain) -> BigCount {
    IntervalCounter::global().eta(s)
}

#[inline]
fn comparable(x: u8) -> u128 {
    UP[x as usize] | DOWN[x as usize]
}

/// Comparability component of `q` containing its lowest element.
fn first_component(q: u128) -> u128 {
    let mut comp = q & q.wrapping_neg();
    let mut frontier = comp;
    while frontier != 0 {
        let mut next = 0u128;
        for x in bits_of(frontier) {
            next |= comparable(x);
        }
        next &= q & !comp;
        comp |= next;
        frontier = next;
    }
    comp
}

fn count_antichains(q: u128, memo: &mut HashMap<u128, BigCount>) -> BigCount {
    if q == 0 {
        return BigCount::ONE;
    }
    if q & (q - 1) == 0 {
        return BigCount::Small(2);
    }
    if let Some(v) = memo.get(&q) {
        return v.clone();
    }
    let comp = first_component(q);
    let result = if comp != q {
        let a = count_antichains(comp, memo);
        let b = count_antichains(q & !comp, memo);
        &a * &b
    } else {
        let mut pivot = 0u8;
        let mut best = 0u32;
        for x in bits_of(q) {
            let deg = (comparable(x) & q).count_ones();
            if deg > best {
                best = deg;
                pivot = x;
            }
        }
        let without = count_antichains(q & !(1u128 << pivot), memo);
        let with = count_antichains(q & !comparable(pivot), memo);
        &without + &with
    };
    memo.insert(q, result.clone());
    result
}
