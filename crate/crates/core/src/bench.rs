//! Repeated-run experiments: best and average suite size and generation
//! time over independently seeded runs, plus CSV/JSON reports.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cuckoo::CsParams;
use crate::error::{Error, Result};
use crate::notation::{parse_notation, ConfigNotation};
use crate::suite::generate_suite;
use crate::verify::verify_coverage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: String,
    pub runs: usize,
    #[serde(rename = "best_N")]
    pub best_n: usize,
    #[serde(rename = "avg_N")]
    pub avg_n: f64,
    pub best_time_s: f64,
    pub avg_time_s: f64,
    pub per_run: Vec<RunRecord>,
}

fn millis(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

impl RunReport {
    /// Aggregates per-run records. Times are kept at millisecond precision.
    pub fn from_records(config: String, per_run: Vec<RunRecord>) -> Result<Self> {
        if per_run.is_empty() {
            return Err(Error::validation("a report needs at least one run"));
        }
        let runs = per_run.len();
        let best_n = per_run.iter().map(|r| r.n).min().unwrap_or(0);
        let avg_n = per_run.iter().map(|r| r.n as f64).sum::<f64>() / runs as f64;
        let best_time_s = per_run.iter().map(|r| r.time_s).fold(f64::INFINITY, f64::min);
        let avg_time_s = millis(per_run.iter().map(|r| r.time_s).sum::<f64>() / runs as f64);
        Ok(Self {
            config,
            runs,
            best_n,
            avg_n,
            best_time_s,
            avg_time_s,
            per_run,
        })
    }
}

/// Runs `runs` independent generations with seeds `base_seed..base_seed+runs`,
/// verifying every suite before it is counted. `jobs` caps parallelism;
/// results do not depend on it.
pub fn run_experiment(
    config: &ConfigNotation,
    runs: usize,
    params: &CsParams,
    base_seed: u64,
    jobs: usize,
) -> Result<RunReport> {
    if runs == 0 {
        return Err(Error::validation("runs must be at least 1"));
    }
    params.validate()?;
    let one = |i: usize| -> Result<RunRecord> {
        let seed = base_seed.wrapping_add(i as u64);
        let p = params.with_seed(seed);
        let start = Instant::now();
        let array = generate_suite(&config.spec, config.strength, &p)?;
        let elapsed = start.elapsed().as_secs_f64();
        let report = verify_coverage(&array)?;
        if !report.complete {
            let mut dump = format!(
                "{config} seed {seed}: suite of {} rows misses {} tuples\n",
                array.size(),
                report.missing.len()
            );
            for row in &array.rows {
                let _ = writeln!(dump, "  {row:?}");
            }
            for t in report.missing.iter().take(20) {
                let _ = writeln!(dump, "  missing {t}");
            }
            return Err(Error::Invariant(dump));
        }
        info!("{config} seed {seed}: N = {} in {elapsed:.3}s", array.size());
        Ok(RunRecord {
            n: array.size(),
            seed,
            time_s: millis(elapsed),
        })
    };

    let records: Result<Vec<RunRecord>> = if jobs <= 1 {
        (0..runs).map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
        pool.install(|| (0..runs).into_par_iter().map(one).collect())
    };
    RunReport::from_records(config.canonical(), records?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Usage(format!("unknown report format `{other}` (use csv or json)"))),
        }
    }
}

const RUN_HEADER: [&str; 5] = ["config", "run", "seed", "N", "time_s"];
const SUMMARY_HEADER: [&str; 6] = ["config", "runs", "best_N", "avg_N", "best_time_s", "avg_time_s"];

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Usage(format!("csv: {e}"))
}

/// Serializes a report. CSV holds a per-run section followed by a one-line
/// summary section, each with its own header.
pub fn emit_report(report: &RunReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| Error::Usage(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            w.write_record(RUN_HEADER).map_err(csv_err)?;
            for (i, r) in report.per_run.iter().enumerate() {
                w.write_record([
                    report.config.clone(),
                    i.to_string(),
                    r.seed.to_string(),
                    r.n.to_string(),
                    format!("{:.3}", r.time_s),
                ])
                .map_err(csv_err)?;
            }
            w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
            w.write_record([
                report.config.clone(),
                report.runs.to_string(),
                report.best_n.to_string(),
                report.avg_n.to_string(),
                format!("{:.3}", report.best_time_s),
                format!("{:.3}", report.avg_time_s),
            ])
            .map_err(csv_err)?;
            w.into_inner().map_err(csv_err)
        }
    }
}

/// Reads back a report written by [`emit_report`].
pub fn parse_report(bytes: &[u8], format: ReportFormat) -> Result<RunReport> {
    match format {
        ReportFormat::Json => serde_json::from_slice(bytes).map_err(|e| Error::Usage(format!("json: {e}"))),
        ReportFormat::Csv => {
            let mut r = csv::ReaderBuilder::new()
                .flexible(true)
                .has_headers(false)
                .from_reader(bytes);
            let mut per_run = Vec::new();
            let mut summary = None;
            let mut section = "";
            for rec in r.records() {
                let rec = rec.map_err(csv_err)?;
                if rec.get(0) == Some("config") {
                    section = if rec.len() == RUN_HEADER.len() { "runs" } else { "summary" };
                    continue;
                }
                let field = |i: usize| rec.get(i).ok_or_else(|| csv_err(format!("short record {rec:?}")));
                let num = |i: usize| -> Result<f64> { field(i)?.parse().map_err(csv_err) };
                match section {
                    "runs" => per_run.push(RunRecord {
                        seed: field(2)?.parse().map_err(csv_err)?,
                        n: field(3)?.parse().map_err(csv_err)?,
                        time_s: num(4)?,
                    }),
                    "summary" => {
                        summary = Some(RunReport {
                            config: field(0)?.to_string(),
                            runs: field(1)?.parse().map_err(csv_err)?,
                            best_n: field(2)?.parse().map_err(csv_err)?,
                            avg_n: num(3)?,
                            best_time_s: num(4)?,
                            avg_time_s: num(5)?,
                            per_run: Vec::new(),
                        })
                    }
                    _ => return Err(csv_err("record before header")),
                }
            }
            let mut report = summary.ok_or_else(|| csv_err("missing summary section"))?;
            report.per_run = per_run;
            Ok(report)
        }
    }
}

/// One configuration from the published comparison tables, with the sizes
/// reported there for the cuckoo search.
#[derive(Debug, Clone, PartialEq)]
pub struct PublishedCell {
    pub table: u8,
    pub config: String,
    pub best: u32,
    pub avg: Option<f64>,
}

impl PublishedCell {
    pub fn notation(&self) -> ConfigNotation {
        parse_notation(&self.config).expect("built-in configuration parses")
    }
}

macro_rules! cells {
    ($table:expr; $($cfg:expr => $best:expr, $avg:expr;)*) => {
        [$(PublishedCell { table: $table, config: $cfg.to_string(), best: $best, avg: $avg },)*]
    };
}

/// Published comparison grid, keyed by table number, with the cuckoo-search
/// best and average sizes reported for each configuration.
pub fn published_grid() -> Vec<PublishedCell> {
    let mut grid = Vec::new();
    grid.extend(cells![2;
        "CA(2, 3^4)" => 9, Some(9.8);
        "CA(2, 3^13)" => 20, Some(22.4);
        "MCA(2, 5^1 3^8 2^2)" => 21, Some(22.6);
        "MCA(2, 6^1 5^1 4^6 3^8 2^3)" => 43, Some(45.4);
        "MCA(2, 7^1 6^1 5^1 4^6 3^8 2^3)" => 51, Some(52.4);
        "CA(3, 3^6)" => 43, Some(44.8);
        "CA(3, 4^6)" => 105, Some(108.2);
        "CA(3, 5^7)" => 233, Some(236.2);
        "CA(3, 6^6)" => 350, Some(360.4);
        "MCA(3, 10^1 6^2 4^3 3^1)" => 393, Some(399.8);
    ]);
    let table3: [(usize, usize, u32, Option<f64>); 40] = [
        (2, 3, 9, Some(9.6)), (2, 4, 9, Some(10.0)), (2, 5, 11, Some(11.8)), (2, 6, 13, Some(14.2)),
        (2, 7, 14, Some(15.6)), (2, 8, 15, Some(15.8)), (2, 9, 16, Some(17.2)), (2, 10, 17, Some(17.8)),
        (2, 11, 18, Some(18.6)), (2, 12, 18, Some(18.8)),
        (3, 4, 28, Some(29.0)), (3, 5, 38, Some(39.2)), (3, 6, 43, Some(44.2)), (3, 7, 48, Some(50.4)),
        (3, 8, 53, Some(54.8)), (3, 9, 58, Some(59.8)), (3, 10, 62, Some(63.6)), (3, 11, 66, Some(68.2)),
        (3, 12, 70, Some(71.8)),
        (4, 5, 94, Some(95.8)), (4, 6, 132, Some(134.2)), (4, 7, 154, Some(156.8)), (4, 8, 173, Some(174.8)),
        (4, 9, 195, Some(197.8)), (4, 10, 211, Some(212.2)), (4, 11, 229, Some(231.0)), (4, 12, 253, Some(255.8)),
        (5, 6, 304, Some(307.8)), (5, 7, 434, Some(440.2)), (5, 8, 515, Some(517.8)), (5, 9, 590, Some(593.8)),
        (5, 10, 682, Some(688.0)), (5, 11, 778, Some(780.2)), (5, 12, 880, None),
        (6, 7, 963, Some(970.8)), (6, 8, 1401, Some(1410.8)), (6, 9, 1689, Some(1695.4)),
        (6, 10, 2027, Some(2035.4)), (6, 11, 2298, Some(2302.2)), (6, 12, 2638, Some(2640.6)),
    ];
    let table4: [(usize, u32, u32, Option<f64>); 20] = [
        (2, 2, 6, Some(6.8)), (2, 3, 15, Some(16.2)), (2, 4, 25, Some(26.4)), (2, 5, 37, Some(38.6)),
        (3, 2, 12, Some(13.8)), (3, 3, 49, Some(51.6)), (3, 4, 117, Some(118.4)), (3, 5, 223, Some(225.4)),
        (4, 2, 27, Some(29.6)), (4, 3, 155, Some(156.8)), (4, 4, 487, Some(490.2)), (4, 5, 1171, Some(1175.2)),
        (5, 2, 53, Some(54.2)), (5, 3, 439, Some(442.2)), (5, 4, 1845, Some(1850.8)), (5, 5, 5479, Some(5485.2)),
        (6, 2, 66, Some(67.2)), (6, 3, 973, Some(978.4)), (6, 4, 5610, Some(5620.8)), (6, 5, 21597, Some(21610.8)),
    ];
    let table5: [(u32, u32, f64); 5] = [
        (2, 28, 30.4), (3, 211, 212.8), (4, 698, 701.8), (5, 1731, 1740.2), (6, 3894, 3902.6),
    ];
    let table6: [(usize, u32, f64); 5] = [
        (2, 45, 47.8), (3, 297, 299.2), (4, 1731, 1740.2), (5, 9616, 9620.4), (6, 50489, 50503.6),
    ];
    let table7: [(usize, u32, f64); 5] = [
        (2, 8, 9.0), (3, 16, 17.4), (4, 36, 38.2), (5, 79, 81.8), (6, 157, 160.2),
    ];
    let table8: [(usize, u32, f64); 8] = [
        (5, 776, 781.8), (6, 991, 1002.4), (7, 1200, 1205.4), (8, 1415, 1420.6),
        (9, 1562, 1672.4), (10, 1731, 1740.2), (11, 2062, 2070.6), (12, 2223, 2230.8),
    ];
    let table9: [(usize, u32, f64); 5] = [
        (2, 100, 104.2), (3, 410, 415.2), (4, 1537, 1540.0), (5, 4566, 4576.2), (6, 11431, 11450.0),
    ];

    for (d, k, best, avg) in table3 {
        grid.push(PublishedCell { table: 3, config: format!("CA({d}, 3^{k})"), best, avg });
    }
    for (d, v, best, avg) in table4 {
        grid.push(PublishedCell { table: 4, config: format!("CA({d}, {v}^7)"), best, avg });
    }
    for (v, best, avg) in table5 {
        grid.push(PublishedCell { table: 5, config: format!("CA(4, {v}^10)"), best, avg: Some(avg) });
    }
    for (d, best, avg) in table6 {
        grid.push(PublishedCell { table: 6, config: format!("CA({d}, 5^10)"), best, avg: Some(avg) });
    }
    for (d, best, avg) in table7 {
        grid.push(PublishedCell { table: 7, config: format!("CA({d}, 2^10)"), best, avg: Some(avg) });
    }
    for (k, best, avg) in table8 {
        grid.push(PublishedCell { table: 8, config: format!("CA(4, 5^{k})"), best, avg: Some(avg) });
    }
    for (d, best, avg) in table9 {
        grid.push(PublishedCell {
            table: 9,
            config: format!("MCA({d}, 2^7 3^2 4^1 10^2)"),
            best,
            avg: Some(avg),
        });
    }
    grid
}

/// Summary CSV for a grid run: one line per configuration alongside the
/// published cuckoo-search sizes.
pub fn emit_suite_summary(rows: &[(PublishedCell, RunReport)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "table", "config", "runs", "best_N", "avg_N", "best_time_s", "avg_time_s", "published_best_N", "published_avg_N",
    ])
    .map_err(csv_err)?;
    for (cell, r) in rows {
        w.write_record([
            cell.table.to_string(),
            r.config.clone(),
            r.runs.to_string(),
            r.best_n.to_string(),
            r.avg_n.to_string(),
            format!("{:.3}", r.best_time_s),
            format!("{:.3}", r.avg_time_s),
            cell.best.to_string(),
            cell.avg.map(|a| a.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(csv_err)
}
