//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use cuckoo_cover::bench::run_experiment;
use cuckoo_cover::verify::parse_rows;
use cuckoo_cover::{
    exhaustive_size, generate_random_suite, generate_suite, lower_bound, parse_notation, sigma_u,
    tuple_count, verify_coverage, CoveringArray, CsParams, FactorSpec, Mantegna, Strength, TupleLedger,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn bounds_hold(ca: &CoveringArray) -> bool {
    let n = ca.size() as u64;
    lower_bound(&ca.spec, ca.strength) <= n && n <= exhaustive_size(&ca.spec).unwrap()
}

/// 1 and part of 4: coverage over a small grid, with bounds on every N.
fn coverage_soundness() -> Outcome {
    let start = Instant::now();
    let mut suites = 0;
    for k in 3..=7 {
        for v in [2, 3] {
            for d in [2, 3] {
                let spec = FactorSpec::uniform(v, k).unwrap();
                let strength = Strength::new(d, k).unwrap();
                for seed in 0..5 {
                    let ca = generate_suite(&spec, strength, &CsParams::default().with_seed(seed))
                        .map_err(|e| e.to_string())?;
                    let report = verify_coverage(&ca).map_err(|e| e.to_string())?;
                    if !report.complete {
                        return Err(format!(
                            "CA({d}, {v}^{k}) seed {seed}: {} tuples missing",
                            report.missing.len()
                        ));
                    }
                    if !bounds_hold(&ca) {
                        return Err(format!("CA({d}, {v}^{k}) seed {seed}: N = {} out of bounds", ca.size()));
                    }
                    suites += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(300),
        format!("{suites} suites complete in {:.1}s", elapsed.as_secs_f64()),
        format!("took {:.1}s, budget 300s", elapsed.as_secs_f64()),
    )
}

/// Tuple counts per number of real (non-don't-care) positions, by
/// enumerating all vectors over `levels[i] + 1` symbols.
fn brute_force_counts(levels: &[u32]) -> Vec<u64> {
    let mut counts = vec![0u64; levels.len() + 1];
    let mut digits = vec![0u32; levels.len()];
    loop {
        let real = digits.iter().zip(levels).filter(|(&x, &v)| x < v).count();
        counts[real] += 1;
        let mut i = 0;
        loop {
            if i == levels.len() {
                return counts;
            }
            digits[i] += 1;
            if digits[i] <= levels[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// 2: counting oracles agree on every spec with k <= 6 and levels in 2..=4.
fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for k in 2..=6usize {
        let combos = 3usize.pow(k as u32);
        for code in 0..combos {
            let levels: Vec<u32> = (0..k).map(|i| 2 + (code / 3usize.pow(i as u32) % 3) as u32).collect();
            let spec = FactorSpec::new(levels.clone()).unwrap();
            let brute = brute_force_counts(&levels);
            for (d, &expected) in brute.iter().enumerate().skip(2) {
                let strength = Strength::new(d, k).unwrap();
                let counted = tuple_count(&spec, strength).map_err(|e| e.to_string())?;
                let ledger = TupleLedger::build(&spec, strength).map_err(|e| e.to_string())?;
                if counted != expected || ledger.remaining() != expected {
                    return Err(format!(
                        "{levels:?} d={d}: brute {expected} tuple_count {counted} ledger {}",
                        ledger.remaining()
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (spec, strength) pairs agree exactly"))
}

/// 3: best of 40 runs against published sizes plus tolerance.
fn size_target(config: &str, limit: usize, budget_s: u64) -> Outcome {
    let c = parse_notation(config).unwrap();
    let start = Instant::now();
    let report = run_experiment(&c, 40, &CsParams::default(), 0, 1).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let (low, high) = (lower_bound(&c.spec, c.strength), exhaustive_size(&c.spec).unwrap());
    if let Some(r) = report.per_run.iter().find(|r| (r.n as u64) < low || r.n as u64 > high) {
        return Err(format!("{config} seed {}: N = {} outside [{low}, {high}]", r.seed, r.n));
    }
    let line = format!(
        "{config}: best {} (limit {limit}), avg {:.2}, {elapsed:.1}s (budget {budget_s}s)",
        report.best_n, report.avg_n
    );
    check(report.best_n <= limit && elapsed < budget_s as f64, line.clone(), line)
}

/// 4: the trivial exact case.
fn bounds_exact() -> Outcome {
    let spec = FactorSpec::new(vec![2, 2]).unwrap();
    let d = Strength::new(2, 2).unwrap();
    for seed in 0..10 {
        let ca = generate_suite(&spec, d, &CsParams::default().with_seed(seed)).map_err(|e| e.to_string())?;
        if ca.size() != 4 || !bounds_hold(&ca) {
            return Err(format!("seed {seed}: N = {}", ca.size()));
        }
    }
    Ok("CA(2, 2^2) has N = 4 for 10 seeds; grid and size-target suites within bounds".into())
}

/// 5: exhaustive sizes.
fn exhaustive_counts() -> Outcome {
    let case_study = parse_notation("MCA(2, 7^1 6^1 2^8 3^2)").unwrap();
    let a = exhaustive_size(&case_study.spec).map_err(|e| e.to_string())?;
    let b = exhaustive_size(&FactorSpec::uniform(2, 6).unwrap()).map_err(|e| e.to_string())?;
    check(a == 96_768 && b == 64, format!("{a} and {b}"), format!("got {a} and {b}"))
}

/// 6: Mantegna scale and tail weight.
fn levy_sampler() -> Outcome {
    let sigma = sigma_u(1.5);
    if (sigma - 0.6966).abs() > 5e-4 {
        return Err(format!("sigma_u(1.5) = {sigma}"));
    }
    let m = Mantegna::new(1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let samples = 1_000_000;
    let beyond = (0..samples).filter(|_| m.step(&mut rng).abs() > 10.0).count();
    let empirical = beyond as f64 / samples as f64;
    let gaussian = libm::erfc(10.0 / (sigma * std::f64::consts::SQRT_2));
    let ratio = empirical / gaussian;
    let line = format!("sigma_u = {sigma:.5}; P(|s|>10) = {empirical:.5} vs Gaussian {gaussian:.3e} (x{ratio:.3e})");
    check(ratio >= 10.0, line.clone(), line)
}

/// 7: byte-identical `generate` output for identical inputs.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_cuckoo-cover");
    let configs = ["CA(2, 3^5)", "CA(3, 2^6)", "MCA(2, 5^1 3^8 2^2)"];
    for (i, config) in configs.iter().enumerate() {
        for format in ["csv", "json"] {
            let mut outputs = Vec::new();
            for attempt in 0..2 {
                let path = dir.path().join(format!("{i}-{attempt}.{format}"));
                let status = Command::new(bin)
                    .args(["generate", "--config", config, "--seed", "1234", "--format", format, "--out"])
                    .arg(&path)
                    .output()
                    .map_err(|e| e.to_string())?
                    .status;
                if !status.success() {
                    return Err(format!("{config}: generate exited with {status}"));
                }
                outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
            }
            if outputs[0] != outputs[1] {
                return Err(format!("{config} ({format}): outputs differ"));
            }
        }
    }
    Ok(format!("{} configs, csv and json byte-identical", configs.len()))
}

/// 8: cuckoo search beats the random baseline on average.
fn baseline_dominance() -> Outcome {
    let c = parse_notation("CA(2, 3^4)").unwrap();
    let (mut cs, mut rnd) = (0usize, 0usize);
    for seed in 0..40 {
        cs += generate_suite(&c.spec, c.strength, &CsParams::default().with_seed(seed))
            .map_err(|e| e.to_string())?
            .size();
        rnd += generate_random_suite(&c.spec, c.strength, seed).map_err(|e| e.to_string())?.size();
    }
    let (cs, rnd) = (cs as f64 / 40.0, rnd as f64 / 40.0);
    let line = format!("mean N cuckoo {cs:.2} vs random {rnd:.2} (gap {:.2})", rnd - cs);
    check(cs <= rnd, line.clone(), line)
}

/// 9: printed example arrays.
fn fixtures() -> Outcome {
    let load = |name: &str, levels: &[u32]| -> CoveringArray {
        let text = std::fs::read_to_string(format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
        let spec = FactorSpec::new(levels.to_vec()).unwrap();
        CoveringArray::from_rows(spec, Strength::new(2, 4).unwrap(), parse_rows(&text, 1).unwrap())
    };
    for (name, levels) in [
        ("oa_9_2_4_3.txt", [3, 3, 3, 3]),
        ("ca_9_2_4_3.txt", [3, 3, 3, 3]),
        ("mca_9_2_3x2_2x2.txt", [3, 3, 2, 2]),
    ] {
        if !verify_coverage(&load(name, &levels)).map_err(|e| e.to_string())?.complete {
            return Err(format!("{name} incomplete"));
        }
    }
    let full = load("ca_9_2_4_3.txt", &[3, 3, 3, 3]);
    for drop in 0..full.size() {
        let mut partial = full.clone();
        partial.rows.remove(drop);
        let report = verify_coverage(&partial).map_err(|e| e.to_string())?;
        if report.complete || report.missing.is_empty() {
            return Err(format!("dropping row {} left coverage complete", drop + 1));
        }
    }
    Ok("OA, CA and MCA complete; every single-row deletion from the CA is detected".into())
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 coverage soundness", Box::new(coverage_soundness)),
        ("2 oracle equivalence", Box::new(oracle_equivalence)),
        ("3a CA(2, 3^4)", Box::new(|| size_target("CA(2, 3^4)", 10, 30))),
        ("3b CA(2, 2^10)", Box::new(|| size_target("CA(2, 2^10)", 10, 60))),
        ("3c CA(3, 3^6)", Box::new(|| size_target("CA(3, 3^6)", 50, 180))),
        ("3d CA(2, 3^13)", Box::new(|| size_target("CA(2, 3^13)", 24, 180))),
        ("3e MCA(2, 7^1 6^1 2^8 3^2)", Box::new(|| size_target("MCA(2, 7^1 6^1 2^8 3^2)", 48, 120))),
        ("4 bounds", Box::new(bounds_exact)),
        ("5 exhaustive counts", Box::new(exhaustive_counts)),
        ("6 levy sampler", Box::new(levy_sampler)),
        ("7 determinism", Box::new(determinism)),
        ("8 baseline dominance", Box::new(baseline_dominance)),
        ("9 fixtures", Box::new(fixtures)),
    ];
    let mut failed = 0;
    for (name, criterion) in &criteria {
        match criterion() {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
