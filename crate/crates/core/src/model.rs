//! The system under test: factors, their level counts and the interaction
//! strength.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Level counts of the `k` factors of a system.
///
/// Levels are 0-based: factor `i` takes values in `0..levels[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FactorSpec {
    levels: Vec<u32>,
}

impl FactorSpec {
    pub fn new(levels: Vec<u32>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::validation(format!(
                "need at least 2 factors, got {}",
                levels.len()
            )));
        }
        if let Some((i, &v)) = levels.iter().enumerate().find(|(_, &v)| v < 2) {
            return Err(Error::validation(format!(
                "factor {} has {} levels, need at least 2",
                i + 1,
                v
            )));
        }
        Ok(Self { levels })
    }

    /// `k` factors with `v` levels each.
    pub fn uniform(v: u32, k: usize) -> Result<Self> {
        Self::new(vec![v; k])
    }

    /// Number of factors `k`.
    pub fn factors(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn level(&self, factor: usize) -> u32 {
        self.levels[factor]
    }

    pub fn is_uniform(&self) -> bool {
        self.levels.windows(2).all(|w| w[0] == w[1])
    }

    /// Checks a test case against the factor bounds.
    pub fn check_row(&self, row: &[u32]) -> Result<()> {
        if row.len() != self.levels.len() {
            return Err(Error::validation(format!(
                "row has {} entries, expected {}",
                row.len(),
                self.levels.len()
            )));
        }
        for (i, (&x, &v)) in row.iter().zip(&self.levels).enumerate() {
            if x >= v {
                return Err(Error::validation(format!(
                    "entry {} of factor {} is outside 0..{}",
                    x,
                    i + 1,
                    v
                )));
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<u32>> for FactorSpec {
    type Error = Error;

    fn try_from(levels: Vec<u32>) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<FactorSpec> for Vec<u32> {
    fn from(spec: FactorSpec) -> Self {
        spec.levels
    }
}

/// Interaction strength `d`: every combination of values over every set of
/// `d` factors must appear in the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Strength(usize);

impl Strength {
    /// Validates `2 <= d <= k`.
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::validation(format!("strength {d} is below 2")));
        }
        if d > k {
            return Err(Error::validation(format!(
                "strength {d} exceeds factor count {k}"
            )));
        }
        Ok(Self(d))
    }

    pub fn for_spec(d: usize, spec: &FactorSpec) -> Result<Self> {
        Self::new(d, spec.factors())
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for Strength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}
