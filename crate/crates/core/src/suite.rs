//! Greedy one-row-at-a-time construction of covering arrays.

use std::time::Instant;

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cuckoo::{fitness, random_row, search_best_row, CsParams};
use crate::error::{Error, Result};
use crate::ledger::TupleLedger;
use crate::model::{FactorSpec, Strength};

/// Random generator used for every run. Seeded per run.
pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cuckoo,
    Random,
}

/// How a suite was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteMeta {
    pub method: Method,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<CsParams>,
    /// Weight of each row at the moment it was selected.
    pub fitness_trace: Vec<u64>,
    /// Generation time. Not serialized so that suite files stay reproducible.
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// A generated test suite: one row per test case, one column per factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringArray {
    pub spec: FactorSpec,
    pub strength: Strength,
    pub rows: Vec<Vec<u32>>,
    pub meta: SuiteMeta,
}

impl CoveringArray {
    /// Suite size `N`.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Wraps externally supplied rows (read from a file, a fixture, ...).
    pub fn from_rows(spec: FactorSpec, strength: Strength, rows: Vec<Vec<u32>>) -> Self {
        Self {
            spec,
            strength,
            rows,
            meta: SuiteMeta {
                method: Method::Random,
                seed: 0,
                params: None,
                fitness_trace: Vec::new(),
                wall_time_s: 0.0,
            },
        }
    }
}

/// Builds a suite with the cuckoo search, seeding the generator from
/// `params.seed`.
pub fn generate_suite(spec: &FactorSpec, strength: Strength, params: &CsParams) -> Result<CoveringArray> {
    let mut rng = run_rng(params.seed);
    generate_suite_with_rng(spec, strength, params, &mut rng)
}

pub fn generate_suite_with_rng<R: Rng + ?Sized>(
    spec: &FactorSpec,
    strength: Strength,
    params: &CsParams,
    rng: &mut R,
) -> Result<CoveringArray> {
    params.validate()?;
    let start = Instant::now();
    let mut ledger = TupleLedger::build(spec, strength)?;
    let mut rows = Vec::new();
    let mut trace = Vec::new();
    while !ledger.is_empty() {
        let outcome = search_best_row(&ledger, params, rng)?;
        let removed = ledger.remove_covered(&outcome.row)?;
        if removed == 0 {
            return Err(Error::Invariant(format!(
                "row {:?} covered no new tuple (reported weight {})",
                outcome.row, outcome.fitness
            )));
        }
        debug!(
            "row {}: {:?} covers {removed} new tuples, {} left",
            rows.len() + 1,
            outcome.row,
            ledger.remaining()
        );
        trace.push(outcome.fitness);
        rows.push(outcome.row);
    }
    Ok(CoveringArray {
        spec: spec.clone(),
        strength,
        rows,
        meta: SuiteMeta {
            method: Method::Cuckoo,
            seed: params.seed,
            params: Some(*params),
            fitness_trace: trace,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

/// Baseline: draws uniform random rows and keeps each one that covers at
/// least one uncovered tuple.
pub fn generate_random_suite(spec: &FactorSpec, strength: Strength, seed: u64) -> Result<CoveringArray> {
    let start = Instant::now();
    let mut rng = run_rng(seed);
    let mut ledger = TupleLedger::build(spec, strength)?;
    let mut rows = Vec::new();
    let mut trace = Vec::new();
    while !ledger.is_empty() {
        let row = random_row(spec, &mut rng);
        let weight = fitness(&row, &ledger);
        if weight == 0 {
            continue;
        }
        ledger.remove_covered(&row)?;
        trace.push(weight);
        rows.push(row);
    }
    Ok(CoveringArray {
        spec: spec.clone(),
        strength,
        rows,
        meta: SuiteMeta {
            method: Method::Random,
            seed,
            params: None,
            fitness_trace: trace,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}
