use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cuckoo_cover::bench::{emit_report, emit_suite_summary, published_grid, run_experiment, ReportFormat};
use cuckoo_cover::verify::parse_rows;
use cuckoo_cover::{
    exhaustive_size, generate_random_suite, generate_suite, lower_bound, parse_notation, tuple_count,
    verify_coverage, ConfigNotation, CoveringArray, CsParams, Error,
};

#[derive(Parser)]
#[command(name = "cuckoo-cover", version, about = "Covering-array test suites via Lévy-flight cuckoo search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test suite.
    Generate(GenerateArgs),
    /// Check that a suite covers every interaction. Exit 1 if incomplete.
    Verify(VerifyArgs),
    /// Repeat generation and report best/average size and time.
    Bench(BenchArgs),
    /// Print tuple count, lower bound and exhaustive size.
    Count(ConfigArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Configuration in exponent notation, e.g. "CA(2,3^4)" or "MCA(2, 7^1 6^1 2^8 3^2)".
    #[arg(long, conflicts_with_all = ["strength", "levels"])]
    config: Option<String>,
    /// Interaction strength (with --levels).
    #[arg(long, requires = "levels")]
    strength: Option<usize>,
    /// Comma-separated level counts (with --strength).
    #[arg(long, value_delimiter = ',', requires = "strength")]
    levels: Option<Vec<u32>>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ConfigNotation, Error> {
        match (&self.config, self.strength, &self.levels) {
            (Some(c), _, _) => parse_notation(c),
            (None, Some(d), Some(levels)) => ConfigNotation::from_levels(d, levels.clone()),
            _ => Err(Error::Usage("give --config or --strength with --levels".into())),
        }
    }
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Number of nests.
    #[arg(long, default_value_t = 100)]
    pop: usize,
    /// Fraction of worst nests abandoned each iteration.
    #[arg(long, default_value_t = 0.25)]
    pa: f64,
    /// Search iterations per row.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// Lévy step scale.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Lévy stability exponent, in (1, 2].
    #[arg(long, default_value_t = 1.5)]
    beta: f64,
    /// Random seed (base seed for bench).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn params(&self) -> CsParams {
        CsParams {
            population: self.pop,
            pa: self.pa,
            max_iterations: self.iters,
            alpha: self.alpha,
            beta: self.beta,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenMethod {
    Cuckoo,
    Random,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Value of the first level in the output (0 or 1).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=1))]
    base: u32,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Comma-separated factor names for the CSV header.
    #[arg(long, value_delimiter = ',')]
    names: Option<Vec<String>>,
    /// Generation method.
    #[arg(long, value_enum, default_value_t = GenMethod::Cuckoo)]
    method: GenMethod,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Suite file: CSV or whitespace-separated rows, `#` comments allowed.
    #[arg(long = "in")]
    input: PathBuf,
    /// Value of the first level in the input (0 or 1).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=1))]
    base: u32,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Built-in grid of published configurations instead of a single one.
    #[arg(long, value_parser = ["paper", "published"], conflicts_with = "config")]
    suite: Option<String>,
    /// Restrict the grid to these tables (e.g. 2,3).
    #[arg(long, value_delimiter = ',', requires = "suite")]
    tables: Option<Vec<u8>>,
    /// Skip grid configurations above this strength.
    #[arg(long, requires = "suite")]
    max_strength: Option<usize>,
    #[arg(long, default_value_t = 40)]
    runs: usize,
    /// Worker threads (1 = sequential).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Report file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// On-disk JSON form of a generated suite.
#[derive(Serialize, Deserialize)]
struct SuiteFile {
    config: String,
    base: u32,
    names: Vec<String>,
    rows: Vec<Vec<u32>>,
    meta: cuckoo_cover::suite::SuiteMeta,
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::Usage(format!("{}: {e}", path.display()))),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| Error::Usage(format!("stdout: {e}"))),
    }
}

fn exhaustive_notice(config: &ConfigNotation) {
    if config.strength.get() == config.spec.factors() {
        eprintln!("note: strength equals the factor count, so the suite is exhaustive");
    }
}

fn generate(args: GenerateArgs) -> Result<ExitCode, Error> {
    let config = args.config.resolve()?;
    exhaustive_notice(&config);
    let params = args.search.params();
    let array = match args.method {
        GenMethod::Cuckoo => generate_suite(&config.spec, config.strength, &params)?,
        GenMethod::Random => {
            params.validate()?;
            generate_random_suite(&config.spec, config.strength, params.seed)?
        }
    };
    let k = config.spec.factors();
    let names = match args.names {
        Some(n) if n.len() == k => n,
        Some(n) => {
            return Err(Error::Usage(format!("{} names given for {k} factors", n.len())));
        }
        None => (1..=k).map(|i| format!("f{i}")).collect(),
    };
    let rows: Vec<Vec<u32>> = array
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| x + args.base).collect())
        .collect();
    let bytes = match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| Error::Usage(format!("csv: {e}"));
            w.write_record(&names).map_err(io_err)?;
            for row in &rows {
                w.write_record(row.iter().map(|x| x.to_string())).map_err(io_err)?;
            }
            w.into_inner().map_err(|e| Error::Usage(e.to_string()))?
        }
        Format::Json => {
            let file = SuiteFile {
                config: config.canonical(),
                base: args.base,
                names,
                rows,
                meta: array.meta.clone(),
            };
            let mut v = serde_json::to_vec_pretty(&file).map_err(|e| Error::Usage(e.to_string()))?;
            v.push(b'\n');
            v
        }
    };
    write_output(&args.out, &bytes)?;
    eprintln!(
        "{}: N = {} in {:.3}s (seed {})",
        config.canonical(),
        array.size(),
        array.meta.wall_time_s,
        params.seed
    );
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let config = args.config.resolve()?;
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Error::Usage(format!("{}: {e}", args.input.display())))?;
    let rows = if text.trim_start().starts_with('{') {
        let file: SuiteFile =
            serde_json::from_str(&text).map_err(|e| Error::Usage(format!("json: {e}")))?;
        file.rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| x.checked_sub(file.base).ok_or_else(|| Error::Validation("level below base".into())))
                    .collect()
            })
            .collect::<Result<Vec<Vec<u32>>, Error>>()?
    } else {
        parse_rows(&text, args.base)?
    };
    let array = CoveringArray::from_rows(config.spec.clone(), config.strength, rows);
    let report = verify_coverage(&array)?;
    let mut out = io::stdout().lock();
    let _ = writeln!(
        out,
        "{}: {} rows, {} tuples checked, {} missing",
        config.canonical(),
        array.size(),
        report.checked,
        report.missing.len()
    );
    for t in &report.missing {
        let _ = writeln!(out, "missing {t}");
    }
    Ok(if report.complete {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let params = args.search.params();
    if args.suite.is_some() {
        let cells: Vec<_> = published_grid()
            .into_iter()
            .filter(|c| args.tables.as_ref().is_none_or(|t| t.contains(&c.table)))
            .filter(|c| args.max_strength.is_none_or(|d| c.notation().strength.get() <= d))
            .collect();
        let mut rows = Vec::with_capacity(cells.len());
        for cell in cells {
            let report = run_experiment(&cell.notation(), args.runs, &params, params.seed, args.jobs)?;
            eprintln!(
                "table {} {}: best {} avg {:.1} (published {} / {})",
                cell.table,
                report.config,
                report.best_n,
                report.avg_n,
                cell.best,
                cell.avg.map_or("-".to_string(), |a| a.to_string())
            );
            rows.push((cell, report));
        }
        write_output(&args.out, &emit_suite_summary(&rows)?)?;
        return Ok(ExitCode::SUCCESS);
    }
    let config = args.config.resolve()?;
    exhaustive_notice(&config);
    let report = run_experiment(&config, args.runs, &params, params.seed, args.jobs)?;
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
    };
    write_output(&args.out, &emit_report(&report, format)?)?;
    eprintln!(
        "{}: best N {} avg N {:.2} over {} runs",
        report.config, report.best_n, report.avg_n, report.runs
    );
    Ok(ExitCode::SUCCESS)
}

fn count(args: ConfigArgs) -> Result<ExitCode, Error> {
    let config = args.resolve()?;
    println!("config: {}", config.canonical());
    println!("tuple_count: {}", tuple_count(&config.spec, config.strength)?);
    println!("lower_bound: {}", lower_bound(&config.spec, config.strength));
    println!("exhaustive_size: {}", exhaustive_size(&config.spec)?);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let style = if std::env::var_os("NO_COLOR").is_some() {
        env_logger::WriteStyle::Never
    } else {
        env_logger::WriteStyle::Auto
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .write_style(style)
        .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Count(a) => count(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Invariant(_) | Error::Contract(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
