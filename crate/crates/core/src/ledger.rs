//! Enumeration of d-tuples and the indexed store of tuples that are still
//! uncovered.
//!
//! Factor sets of size `d` are identified by k-bit patterns with exactly `d`
//! ones, enumerated in ascending binary order. The leftmost bit of the
//! pattern is factor 0, so for `k = 3, d = 2` the order is `011, 101, 110`,
//! i.e. `{1,2}, {0,2}, {0,1}`.
//!
//! Every group owns a contiguous range of global tuple indices starting at
//! its `base_index`; a tuple's offset within the group is the mixed-radix
//! rank of its masked values (leftmost factor most significant).

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{FactorSpec, Strength};

/// Marker for factor positions outside a tuple's mask. Never a valid level.
pub const DONT_CARE: u32 = u32::MAX;

/// Each tuple must be covered this many times.
pub const COVERAGE_INDEX: u32 = 1;

/// Largest factor count the bit-pattern representation supports.
pub const MAX_FACTORS: usize = 64;

/// A set of `d` factor indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorMask {
    k: usize,
    bits: u64,
    factors: Vec<usize>,
}

impl FactorMask {
    fn from_pattern(pattern: u64, k: usize) -> Self {
        let factors = (0..k)
            .filter(|&i| pattern >> (k - 1 - i) & 1 == 1)
            .collect();
        Self {
            k,
            bits: pattern,
            factors,
        }
    }

    /// Selected factor indices, ascending.
    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    /// The k-bit pattern; bit `k - 1 - i` is set iff factor `i` is selected.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, factor: usize) -> bool {
        factor < self.k && self.bits >> (self.k - 1 - factor) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

impl fmt::Display for FactorMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.k {
            f.write_str(if self.contains(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All factor sets of size `d` out of `k`, in ascending bit-pattern order.
pub fn enumerate_factor_masks(k: usize, d: usize) -> Result<Vec<FactorMask>> {
    if k < 2 {
        return Err(Error::validation(format!("need at least 2 factors, got {k}")));
    }
    if k > MAX_FACTORS {
        return Err(Error::validation(format!(
            "factor count {k} exceeds the supported maximum {MAX_FACTORS}"
        )));
    }
    Strength::new(d, k)?;

    // Walk the ascending sequence of k-bit values with popcount d, skipping
    // the values whose popcount differs (Gosper's successor).
    let limit: u128 = 1u128 << k;
    let mut pattern: u128 = (1u128 << d) - 1;
    let mut masks = Vec::new();
    while pattern < limit {
        masks.push(FactorMask::from_pattern(pattern as u64, k));
        let low = pattern & pattern.wrapping_neg();
        let ripple = pattern + low;
        pattern = (((ripple ^ pattern) >> 2) / low) | ripple;
    }
    Ok(masks)
}

/// One assignment of values to the factors of a mask. Positions outside the
/// mask hold [`DONT_CARE`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DTuple {
    pub group: usize,
    pub values: Vec<u32>,
}

impl fmt::Display for DTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if v == DONT_CARE {
                f.write_str("*")?;
            } else {
                write!(f, "{v}")?;
            }
        }
        f.write_str(")")
    }
}

/// Reference to a tuple held by a [`TupleLedger`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleRef {
    pub group: usize,
    pub rank: u64,
}

#[derive(Debug, Clone)]
pub struct TupleGroup {
    mask: FactorMask,
    radices: Vec<u32>,
    strides: Vec<u64>,
    base_index: u64,
    uncovered: Vec<bool>,
    remaining: u64,
}

impl TupleGroup {
    pub fn mask(&self) -> &FactorMask {
        &self.mask
    }

    pub fn base_index(&self) -> u64 {
        self.base_index
    }

    pub fn size(&self) -> u64 {
        self.uncovered.len() as u64
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    #[inline]
    fn rank_of(&self, row: &[u32]) -> u64 {
        self.mask
            .factors
            .iter()
            .zip(&self.strides)
            .map(|(&f, &s)| row[f] as u64 * s)
            .sum()
    }

    fn values_of(&self, rank: u64, k: usize) -> Vec<u32> {
        let mut values = vec![DONT_CARE; k];
        for ((&f, &s), &r) in self.mask.factors.iter().zip(&self.strides).zip(&self.radices) {
            values[f] = ((rank / s) % r as u64) as u32;
        }
        values
    }
}

/// The uncovered d-tuples of a system, grouped by factor mask.
#[derive(Debug, Clone)]
pub struct TupleLedger {
    spec: FactorSpec,
    strength: Strength,
    groups: Vec<TupleGroup>,
    total: u64,
    remaining: u64,
}

impl TupleLedger {
    /// Builds the ledger holding every d-tuple of `spec`, all uncovered.
    pub fn build(spec: &FactorSpec, strength: Strength) -> Result<Self> {
        let k = spec.factors();
        let masks = enumerate_factor_masks(k, strength.get())?;
        let mut groups = Vec::with_capacity(masks.len());
        let mut total: u64 = 0;
        for mask in masks {
            let radices: Vec<u32> = mask.factors.iter().map(|&f| spec.level(f)).collect();
            let mut strides = vec![0u64; radices.len()];
            let mut size: u64 = 1;
            for (stride, &r) in strides.iter_mut().zip(&radices).rev() {
                *stride = size;
                size = size.checked_mul(r as u64).ok_or_else(|| {
                    Error::Capacity(format!("tuple group {mask} is too large to count"))
                })?;
            }
            let len = usize::try_from(size).map_err(|_| {
                Error::Capacity(format!("tuple group {mask} does not fit in memory"))
            })?;
            groups.push(TupleGroup {
                mask,
                radices,
                strides,
                base_index: total,
                uncovered: vec![true; len],
                remaining: size,
            });
            total = total
                .checked_add(size)
                .ok_or_else(|| Error::Capacity("total tuple count overflows u64".into()))?;
        }
        Ok(Self {
            spec: spec.clone(),
            strength,
            groups,
            total,
            remaining: total,
        })
    }

    pub fn spec(&self) -> &FactorSpec {
        &self.spec
    }

    pub fn strength(&self) -> Strength {
        self.strength
    }

    pub fn groups(&self) -> &[TupleGroup] {
        &self.groups
    }

    /// Number of tuples the ledger started with.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of tuples not yet covered.
    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }

    /// Groups that still hold at least one uncovered tuple. A single row can
    /// cover at most one tuple per such group.
    pub fn nonempty_groups(&self) -> usize {
        self.groups.iter().filter(|g| g.remaining > 0).count()
    }

    pub fn global_index(&self, t: TupleRef) -> u64 {
        self.groups[t.group].base_index + t.rank
    }

    pub fn is_uncovered(&self, t: TupleRef) -> bool {
        self.groups[t.group].uncovered[t.rank as usize]
    }

    /// Materializes a reference as a full-width tuple with don't-care
    /// positions.
    pub fn tuple(&self, t: TupleRef) -> DTuple {
        DTuple {
            group: t.group,
            values: self.groups[t.group].values_of(t.rank, self.spec.factors()),
        }
    }

    /// Projection of `row` onto group `group`.
    pub fn project(&self, group: usize, row: &[u32]) -> TupleRef {
        TupleRef {
            group,
            rank: self.groups[group].rank_of(row),
        }
    }

    /// Still-uncovered projections of `row`, at most one per group.
    pub fn covered_tuples_of(&self, row: &[u32]) -> Result<Vec<TupleRef>> {
        self.spec.check_row(row)?;
        Ok(self
            .groups
            .iter()
            .enumerate()
            .filter_map(|(g, group)| {
                let rank = group.rank_of(row);
                group.uncovered[rank as usize].then_some(TupleRef { group: g, rank })
            })
            .collect())
    }

    /// Count of still-uncovered projections of an in-bounds `row`.
    #[inline]
    pub fn uncovered_count_of(&self, row: &[u32]) -> usize {
        debug_assert!(self.spec.check_row(row).is_ok());
        self.groups
            .iter()
            .filter(|g| g.remaining > 0 && g.uncovered[g.rank_of(row) as usize])
            .count()
    }

    /// Marks every projection of `row` as covered and returns how many were
    /// newly removed.
    pub fn remove_covered(&mut self, row: &[u32]) -> Result<u64> {
        self.spec.check_row(row)?;
        let mut removed = 0;
        for group in &mut self.groups {
            let rank = group.rank_of(row) as usize;
            if group.uncovered[rank] {
                group.uncovered[rank] = false;
                group.remaining -= 1;
                removed += 1;
            }
        }
        self.remaining -= removed;
        Ok(removed)
    }

    /// First uncovered tuple in canonical order (group order, then rank).
    pub fn first_uncovered(&self) -> Option<TupleRef> {
        self.groups.iter().enumerate().find_map(|(g, group)| {
            if group.remaining == 0 {
                return None;
            }
            group
                .uncovered
                .iter()
                .position(|&u| u)
                .map(|r| TupleRef {
                    group: g,
                    rank: r as u64,
                })
        })
    }

    /// All uncovered tuples in canonical order.
    pub fn uncovered(&self) -> impl Iterator<Item = TupleRef> + '_ {
        self.groups.iter().enumerate().flat_map(|(g, group)| {
            group
                .uncovered
                .iter()
                .enumerate()
                .filter(|(_, &u)| u)
                .map(move |(r, _)| TupleRef {
                    group: g,
                    rank: r as u64,
                })
        })
    }
}
