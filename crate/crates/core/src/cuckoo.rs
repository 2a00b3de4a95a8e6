//! Per-row cuckoo search: finds one test case that covers as many of the
//! ledger's uncovered tuples as possible.
//!
//! Each iteration ranks the nests by fitness (descending, ties by nest
//! index). The worst `ceil(pa * m)` nests are moved by a Lévy flight and keep
//! the result unconditionally; every remaining nest tries a Lévy flight and
//! keeps it only if its fitness strictly improves. The search stops once a
//! nest covers one new tuple in every non-empty group, or after
//! `max_iterations` iterations.
//!
//! Random draws happen in a fixed order: population initialization (nest by
//! nest, factor by factor), then per iteration the abandoned nests' flights in
//! rank order followed by the top nests' flights in rank order. A flight draws
//! one Lévy step per factor, left to right.

use log::trace;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::{TupleLedger, DONT_CARE};
use crate::levy::Mantegna;
use crate::model::{FactorSpec, Strength};

/// Tunables of the search. Defaults: population 100, `pa` 0.25, 100
/// iterations per row, `alpha` 1.0, `beta` 1.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsParams {
    pub population: usize,
    pub pa: f64,
    pub max_iterations: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

impl Default for CsParams {
    fn default() -> Self {
        Self {
            population: 100,
            pa: 0.25,
            max_iterations: 100,
            alpha: 1.0,
            beta: 1.5,
            seed: 0,
        }
    }
}

impl CsParams {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::validation(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        if !(0.0..=1.0).contains(&self.pa) {
            return Err(Error::validation(format!(
                "abandonment probability must lie in [0, 1], got {}",
                self.pa
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::validation("max_iterations must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::validation(format!(
                "step scale alpha must be positive, got {}",
                self.alpha
            )));
        }
        Mantegna::new(self.beta).map(|_| ())
    }

    /// Number of nests replaced each iteration.
    pub fn abandoned(&self) -> usize {
        ((self.pa * self.population as f64).ceil() as usize).min(self.population)
    }
}

/// A candidate test case and its coverage weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nest {
    pub position: Vec<u32>,
    pub fitness: Option<u64>,
}

/// `m` nests with every factor drawn uniformly from its levels. Fitness is
/// left unset.
pub fn init_population<R: Rng + ?Sized>(spec: &FactorSpec, m: usize, rng: &mut R) -> Vec<Nest> {
    (0..m)
        .map(|_| Nest {
            position: random_row(spec, rng),
            fitness: None,
        })
        .collect()
}

pub(crate) fn random_row<R: Rng + ?Sized>(spec: &FactorSpec, rng: &mut R) -> Vec<u32> {
    spec.levels().iter().map(|&v| rng.random_range(0..v)).collect()
}

/// Weight of a row: strength times the number of still-uncovered tuples the
/// row would cover.
pub fn fitness(row: &[u32], ledger: &TupleLedger) -> u64 {
    ledger.strength().get() as u64 * ledger.uncovered_count_of(row) as u64
}

/// Applies precomputed steps: `round(from + alpha * step)` clamped into each
/// factor's level range.
pub fn levy_flight_with_steps(from: &[u32], steps: &[f64], spec: &FactorSpec, alpha: f64) -> Vec<u32> {
    from.iter()
        .zip(steps)
        .zip(spec.levels())
        .map(|((&x, &s), &v)| discretize(x, alpha * s, v))
        .collect()
}

#[inline]
fn discretize(x: u32, delta: f64, levels: u32) -> u32 {
    let moved = (x as f64 + delta).round();
    if moved.is_nan() {
        x
    } else {
        moved.clamp(0.0, (levels - 1) as f64) as u32
    }
}

fn flight_into<R: Rng + ?Sized>(
    from: &[u32],
    out: &mut [u32],
    spec: &FactorSpec,
    alpha: f64,
    levy: &Mantegna,
    rng: &mut R,
) {
    for ((o, &x), &v) in out.iter_mut().zip(from).zip(spec.levels()) {
        *o = discretize(x, alpha * levy.step(rng), v);
    }
}

/// One Lévy flight from `from`, with a fresh step per factor.
pub fn levy_flight<R: Rng + ?Sized>(
    from: &[u32],
    spec: &FactorSpec,
    params: &CsParams,
    rng: &mut R,
) -> Result<Vec<u32>> {
    spec.check_row(from)?;
    let levy = Mantegna::new(params.beta)?;
    let mut out = vec![0; from.len()];
    flight_into(from, &mut out, spec, params.alpha, &levy, rng);
    Ok(out)
}

/// Result of one per-row search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub row: Vec<u32>,
    /// Coverage weight of `row` (strength times `new_tuples`).
    pub fitness: u64,
    /// Uncovered tuples `row` covers.
    pub new_tuples: u64,
    /// Iterations executed before stopping.
    pub iterations: usize,
    /// Best weight among the freshly initialized nests.
    pub initial_best: u64,
    /// The row came from the fallback that materializes an uncovered tuple.
    pub fallback: bool,
}

/// Runs the cuckoo search against the current ledger state and returns the
/// best row seen.
pub fn search_best_row<R: Rng + ?Sized>(
    ledger: &TupleLedger,
    params: &CsParams,
    rng: &mut R,
) -> Result<SearchOutcome> {
    params.validate()?;
    if ledger.is_empty() {
        return Err(Error::Contract("search requires uncovered tuples".into()));
    }
    let spec = ledger.spec();
    let d = ledger.strength().get() as u64;
    let levy = Mantegna::new(params.beta)?;
    let target = d * ledger.nonempty_groups() as u64;
    let m = params.population;

    let mut nests = init_population(spec, m, rng);
    let mut weights: Vec<u64> = nests.iter().map(|n| fitness(&n.position, ledger)).collect();
    for (nest, &w) in nests.iter_mut().zip(&weights) {
        nest.fitness = Some(w);
    }

    let mut best = 0;
    for i in 1..m {
        if weights[i] > weights[best] {
            best = i;
        }
    }
    let mut best_row = nests[best].position.clone();
    let mut best_fit = weights[best];
    let initial_best = best_fit;

    let abandoned = params.abandoned();
    let mut order: Vec<usize> = (0..m).collect();
    let mut scratch = vec![0u32; spec.factors()];
    let mut iterations = 0;

    'search: while iterations < params.max_iterations && best_fit < target {
        iterations += 1;
        order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
        let (top, worst) = order.split_at(m - abandoned);

        for &i in worst {
            scratch.copy_from_slice(&nests[i].position);
            flight_into(&scratch, &mut nests[i].position, spec, params.alpha, &levy, rng);
            let w = fitness(&nests[i].position, ledger);
            weights[i] = w;
            nests[i].fitness = Some(w);
            if w > best_fit {
                best_fit = w;
                best_row.copy_from_slice(&nests[i].position);
                if best_fit >= target {
                    break 'search;
                }
            }
        }

        for &i in top {
            flight_into(&nests[i].position, &mut scratch, spec, params.alpha, &levy, rng);
            let w = fitness(&scratch, ledger);
            if w > weights[i] {
                weights[i] = w;
                nests[i].fitness = Some(w);
                nests[i].position.copy_from_slice(&scratch);
                if w > best_fit {
                    best_fit = w;
                    best_row.copy_from_slice(&scratch);
                    if best_fit >= target {
                        break 'search;
                    }
                }
            }
        }
    }

    let mut fallback = false;
    if best_fit == 0 {
        let t = ledger
            .first_uncovered()
            .expect("non-empty ledger has an uncovered tuple");
        best_row = ledger
            .tuple(t)
            .values
            .iter()
            .zip(spec.levels())
            .map(|(&x, &v)| if x == DONT_CARE { rng.random_range(0..v) } else { x })
            .collect();
        best_fit = fitness(&best_row, ledger);
        fallback = true;
    }
    trace!(
        "row search: weight {best_fit}/{target} after {iterations} iterations (fallback: {fallback})"
    );

    Ok(SearchOutcome {
        new_tuples: best_fit / d,
        row: best_row,
        fitness: best_fit,
        iterations,
        initial_best,
        fallback,
    })
}

/// Row-optimal weight for the current ledger state.
pub fn row_optimal_weight(ledger: &TupleLedger) -> u64 {
    ledger.strength().get() as u64 * ledger.nonempty_groups() as u64
}

/// Convenience for callers that only hold a spec and strength.
pub fn fresh_row_weight(spec: &FactorSpec, strength: Strength) -> Result<u64> {
    Ok(row_optimal_weight(&TupleLedger::build(spec, strength)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ledger(levels: &[u32], d: usize) -> TupleLedger {
        let spec = FactorSpec::new(levels.to_vec()).unwrap();
        TupleLedger::build(&spec, Strength::for_spec(d, &spec).unwrap()).unwrap()
    }

    #[test]
    fn init_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = FactorSpec::new(vec![2, 2, 2]).unwrap();
        let nests = init_population(&spec, 4, &mut rng);
        assert_eq!(nests.len(), 4);
        assert!(nests.iter().all(|n| n.position.iter().all(|&x| x < 2) && n.fitness.is_none()));

        let spec = FactorSpec::new(vec![7, 6, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3]).unwrap();
        let nests = init_population(&spec, 100, &mut rng);
        assert_eq!(nests.len(), 100);
        assert!(nests.iter().all(|n| spec.check_row(&n.position).is_ok()));
    }

    #[test]
    fn init_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let spec = FactorSpec::new(vec![3, 3]).unwrap();
        let mut counts = [0usize; 3];
        for n in init_population(&spec, 10_000, &mut rng) {
            counts[n.position[0] as usize] += 1;
        }
        for c in counts {
            let f = c as f64 / 10_000.0;
            assert!((0.30..=0.37).contains(&f), "{f}");
        }
    }

    #[test]
    fn fitness_values() {
        let mut l = ledger(&[3, 3, 3], 2);
        assert_eq!(fitness(&[1, 2, 0], &l), 6);
        for row in [[0, 0, 0], [0, 1, 1], [0, 2, 2], [1, 0, 1], [1, 1, 2], [1, 2, 0], [2, 0, 2], [2, 1, 0], [2, 2, 1]] {
            l.remove_covered(&row).unwrap();
        }
        assert!(l.is_empty());
        assert_eq!(fitness(&[1, 1, 1], &l), 0);
    }

    #[test]
    fn four_new_tuples_weigh_four_d() {
        // k = 4, d = 2: six pairs per row, two of them pre-covered.
        let mut l = ledger(&[2, 2, 2, 2], 2);
        l.remove_covered(&[0, 0, 0, 0]).unwrap();
        l.remove_covered(&[1, 1, 1, 1]).unwrap();
        // [0,0,1,1] shares (f0,f1)=(0,0) with the first row and (f2,f3)=(1,1)
        // with the second, leaving four new pairs.
        assert_eq!(l.uncovered_count_of(&[0, 0, 1, 1]), 4);
        assert_eq!(fitness(&[0, 0, 1, 1], &l), 8);
    }

    #[test]
    fn flight_with_zero_steps_is_identity() {
        let spec = FactorSpec::new(vec![3, 4, 5]).unwrap();
        assert_eq!(levy_flight_with_steps(&[2, 3, 1], &[0.0; 3], &spec, 1.0), vec![2, 3, 1]);
    }

    #[test]
    fn flight_clamps() {
        let spec = FactorSpec::new(vec![3, 3, 3]).unwrap();
        assert_eq!(levy_flight_with_steps(&[0, 0, 0], &[-1e9; 3], &spec, 1.0), vec![0, 0, 0]);
        assert_eq!(levy_flight_with_steps(&[0, 1, 2], &[1e9, f64::INFINITY, 3.0], &spec, 1.0), vec![2, 2, 2]);
    }

    #[test]
    fn flight_rounds_then_clamps() {
        let spec = FactorSpec::new(vec![3, 3]).unwrap();
        assert_eq!(levy_flight_with_steps(&[1, 1], &[0.6, -0.6], &spec, 1.0), vec![2, 0]);
    }

    #[test]
    fn sampled_flights_stay_in_bounds() {
        let spec = FactorSpec::new(vec![2, 5, 3, 7]).unwrap();
        let params = CsParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pos = vec![0, 0, 0, 0];
        for _ in 0..10_000 {
            pos = levy_flight(&pos, &spec, &params, &mut rng).unwrap();
            assert!(spec.check_row(&pos).is_ok());
        }
    }

    #[test]
    fn params_validation() {
        assert!(CsParams::default().validate().is_ok());
        let bad = [
            CsParams { population: 1, ..Default::default() },
            CsParams { pa: 1.5, ..Default::default() },
            CsParams { max_iterations: 0, ..Default::default() },
            CsParams { alpha: 0.0, ..Default::default() },
            CsParams { beta: 1.0, ..Default::default() },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
        assert_eq!(CsParams::default().abandoned(), 25);
        assert_eq!(CsParams { population: 10, ..Default::default() }.abandoned(), 3);
    }

    #[test]
    fn empty_ledger_is_a_contract_violation() {
        let mut l = ledger(&[2, 2], 2);
        for row in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            l.remove_covered(&row).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            search_best_row(&l, &CsParams::default(), &mut rng),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn fresh_ledger_exits_immediately() {
        let l = ledger(&[3, 3, 3], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let out = search_best_row(&l, &CsParams::default(), &mut rng).unwrap();
        assert_eq!(out.fitness, 6);
        assert!(out.iterations <= 1);
        assert!(!out.fallback);
    }

    #[test]
    fn single_remaining_tuple_is_found() {
        let mut l = ledger(&[3, 3, 3], 3);
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    if (a, b, c) != (2, 1, 0) {
                        l.remove_covered(&[a, b, c]).unwrap();
                    }
                }
            }
        }
        assert_eq!(l.remaining(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = CsParams { population: 2, max_iterations: 1, ..Default::default() };
        let out = search_best_row(&l, &params, &mut rng).unwrap();
        assert_eq!(out.row, vec![2, 1, 0]);
        assert_eq!(out.fitness, 3);
    }

    #[test]
    fn fallback_materializes_first_uncovered_tuple() {
        // Leave only the pair (f0, f1) = (3, 3) uncovered. beta = 2 makes
        // every step vanish, so nests never move and the fallback decides.
        let mut l = ledger(&[4, 4, 4, 4], 2);
        for i in 0..256u32 {
            let row = [i / 64, i / 16 % 4, i / 4 % 4, i % 4];
            if !(row[0] == 3 && row[1] == 3) {
                l.remove_covered(&row).unwrap();
            }
        }
        assert_eq!(l.remaining(), 1);
        let params = CsParams { population: 2, max_iterations: 3, beta: 2.0, ..Default::default() };
        let mut fallbacks = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = search_best_row(&l, &params, &mut rng).unwrap();
            assert_eq!(out.fitness, 2);
            assert_eq!(&out.row[..2], &[3, 3]);
            fallbacks += out.fallback as usize;
        }
        assert!(fallbacks > 0);
    }

    #[test]
    fn seeded_search_is_deterministic() {
        let mut l = ledger(&[3, 3, 3, 3, 3], 2);
        l.remove_covered(&[0, 0, 0, 0, 0]).unwrap();
        l.remove_covered(&[1, 1, 1, 1, 1]).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            search_best_row(&l, &CsParams::default(), &mut rng).unwrap()
        };
        assert_eq!(run(), run());
    }
}
