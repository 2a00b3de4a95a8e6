//! Brute-force coverage checking and counting.
//!
//! Nothing here touches [`crate::ledger`]: factor subsets come from a plain
//! lexicographic combination walk and value tuples from an odometer, so these
//! functions can serve as an oracle for the incremental bookkeeping used
//! during generation.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FactorSpec, Strength};
use crate::suite::CoveringArray;

/// A value combination over a factor subset that no row covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingTuple {
    pub factors: Vec<usize>,
    pub values: Vec<u32>,
}

impl fmt::Display for MissingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (factor, value)) in self.factors.iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "f{}={}", factor + 1, value)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub complete: bool,
    pub missing: Vec<MissingTuple>,
    /// Number of tuples examined.
    pub checked: u64,
    /// Cover multiplicity -> number of tuples covered that many times.
    pub redundancy: BTreeMap<u64, u64>,
}

impl CoverageReport {
    pub fn min_multiplicity(&self) -> u64 {
        self.redundancy.keys().next().copied().unwrap_or(0)
    }
}

/// Lexicographic walk over all `d`-subsets of `0..k`.
fn for_each_subset(k: usize, d: usize, mut f: impl FnMut(&[usize])) {
    if d > k {
        return;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        f(&idx);
        let mut i = d;
        while i > 0 && idx[i - 1] == k - d + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Visits every value assignment for `radices`, first position fastest.
fn for_each_assignment(radices: &[u32], mut f: impl FnMut(&[u32])) {
    let mut values = vec![0u32; radices.len()];
    loop {
        f(&values);
        let mut i = 0;
        loop {
            if i == radices.len() {
                return;
            }
            values[i] += 1;
            if values[i] < radices[i] {
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

/// Checks that every `d`-tuple appears in at least one row.
pub fn verify_coverage(array: &CoveringArray) -> Result<CoverageReport> {
    let spec = &array.spec;
    let k = spec.factors();
    let d = array.strength.get();

    let bad: Vec<usize> = array
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| spec.check_row(row).is_err())
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::validation(format!("malformed rows at indices {bad:?}")));
    }

    let mut missing = Vec::new();
    let mut redundancy = BTreeMap::new();
    let mut checked = 0u64;
    for_each_subset(k, d, |factors| {
        let radices: Vec<u32> = factors.iter().map(|&f| spec.level(f)).collect();
        let cells: usize = radices.iter().map(|&r| r as usize).product();
        let mut counts = vec![0u64; cells];
        for row in &array.rows {
            let mut cell = 0usize;
            for (&f, &r) in factors.iter().zip(&radices).rev() {
                cell = cell * r as usize + row[f] as usize;
            }
            counts[cell] += 1;
        }
        for_each_assignment(&radices, |values| {
            let mut cell = 0usize;
            for (&v, &r) in values.iter().zip(&radices).rev() {
                cell = cell * r as usize + v as usize;
            }
            let hits = counts[cell];
            checked += 1;
            *redundancy.entry(hits).or_insert(0) += 1;
            if hits == 0 {
                missing.push(MissingTuple {
                    factors: factors.to_vec(),
                    values: values.to_vec(),
                });
            }
        });
    });

    Ok(CoverageReport {
        complete: missing.is_empty(),
        missing,
        checked,
        redundancy,
    })
}

/// Size of the exhaustive suite: the product of all level counts.
pub fn exhaustive_size(spec: &FactorSpec) -> Result<u64> {
    spec.levels().iter().try_fold(1u64, |acc, &v| {
        acc.checked_mul(v as u64)
            .ok_or_else(|| Error::Capacity("exhaustive suite size overflows u64".into()))
    })
}

/// Number of `d`-tuples that a covering array must contain.
pub fn tuple_count(spec: &FactorSpec, strength: Strength) -> Result<u64> {
    let mut total: Option<u64> = Some(0);
    for_each_subset(spec.factors(), strength.get(), |factors| {
        let size = factors
            .iter()
            .try_fold(1u64, |acc, &f| acc.checked_mul(spec.level(f) as u64));
        total = total.zip(size).and_then(|(t, s)| t.checked_add(s));
    });
    total.ok_or_else(|| Error::Capacity("tuple count overflows u64".into()))
}

/// Rows any covering array needs: one row covers one tuple of the largest
/// factor subset, so the product of the `d` largest level counts.
pub fn lower_bound(spec: &FactorSpec, strength: Strength) -> u64 {
    let mut levels = spec.levels().to_vec();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels[..strength.get()]
        .iter()
        .fold(1u64, |acc, &v| acc.saturating_mul(v as u64))
}

/// Reads rows from text: one row per line, integers separated by whitespace
/// or commas. Blank lines and `#` comments are skipped, as is a leading
/// header line of non-numeric names. `base` is subtracted from every value.
pub fn parse_rows(text: &str, base: u32) -> Result<Vec<Vec<u32>>> {
    let mut rows = Vec::new();
    let mut seen_data = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if !seen_data && tokens.iter().any(|t| t.parse::<u64>().is_err()) {
            seen_data = true;
            continue;
        }
        seen_data = true;
        let row = tokens
            .iter()
            .map(|t| {
                let v: u32 = t.parse().map_err(|_| {
                    Error::validation(format!("line {}: `{t}` is not a level", lineno + 1))
                })?;
                v.checked_sub(base).ok_or_else(|| {
                    Error::validation(format!("line {}: level {v} is below base {base}", lineno + 1))
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        rows.push(row);
    }
    Ok(rows)
}
