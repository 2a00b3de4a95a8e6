//! Covering-array generation for combinatorial interaction testing.
//!
//! A suite is built one row at a time: a discrete cuckoo search with
//! Lévy-flight moves looks for the test case covering the most uncovered
//! `d`-tuples, the row is appended, and its tuples are struck from the
//! ledger until none remain. An independent brute-force verifier checks
//! every result.

pub mod bench;
pub mod cuckoo;
pub mod error;
pub mod ledger;
pub mod levy;
pub mod model;
pub mod notation;
pub mod suite;
pub mod verify;

pub use cuckoo::{fitness, init_population, levy_flight, search_best_row, CsParams, Nest, SearchOutcome};
pub use error::{Error, Result};
pub use ledger::{enumerate_factor_masks, DTuple, FactorMask, TupleLedger, TupleRef, DONT_CARE};
pub use levy::{levy_step, sigma_u, LevySample, Mantegna};
pub use model::{FactorSpec, Strength};
pub use notation::{parse_notation, ConfigNotation};
pub use suite::{generate_random_suite, generate_suite, CoveringArray, Method};
pub use verify::{exhaustive_size, lower_bound, tuple_count, verify_coverage, CoverageReport};
