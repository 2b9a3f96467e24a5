use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use parstream::bench::{
    check_checksums, ratio, report_csv, report_table, run, run_matrix, BenchConfig, BenchResult, Mode,
    Workload,
};
use parstream::Error;

#[derive(Parser)]
#[command(name = "bench", about = "Time stream workloads under lazy and pooled evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time one workload in one mode.
    Run(RunArgs),
    /// Time every workload in seq and each par(N) mode.
    Matrix(MatrixArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Seq,
    Par,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 2)]
    warmup: usize,
    /// Sieve bound for `primes` (`primes_x3` uses three times this).
    #[arg(long, default_value_t = 5000)]
    primes_n: i64,
    /// Power in (1 + x1 + ... + xv)^k.
    #[arg(long, default_value_t = 8)]
    fateman_k: u32,
    /// Variable count v of the polynomial workloads.
    #[arg(long, default_value_t = 3)]
    vars: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Decimal places for table cells.
    #[arg(long, default_value_t = 1)]
    decimals: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_workload)]
    workload: Workload,
    #[arg(long, value_enum, default_value = "seq")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Use the big-coefficient variant of a polynomial workload.
    #[arg(long)]
    big: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct MatrixArgs {
    /// Worker counts for the par columns.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    workers: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

fn parse_workload(s: &str) -> Result<Workload, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn base_config(c: &Common) -> BenchConfig {
    BenchConfig {
        repetitions: c.reps,
        warmup_runs: c.warmup,
        primes_n: c.primes_n,
        fateman_k: c.fateman_k,
        variables: c.vars,
        ..BenchConfig::default()
    }
}

fn emit(results: &[BenchResult], c: &Common) -> Result<(), Error> {
    let text = match c.format {
        Format::Table => report_table(results, c.decimals)?,
        Format::Csv => report_csv(results)?,
    };
    match &c.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_one(args: &RunArgs) -> Result<(), Error> {
    let workload = if args.big { args.workload.big()? } else { args.workload };
    let mode = match args.mode {
        ModeArg::Seq => Mode::Seq,
        ModeArg::Par => Mode::Par(args.workers),
    };
    let config = BenchConfig {
        workload,
        mode,
        ..base_config(&args.common)
    };
    let result = run(&config)?;
    eprintln!("{workload} {mode}: median {:.4}s, checksum {}", result.median, result.checksum);
    emit(&[result], &args.common)
}

fn run_all(args: &MatrixArgs) -> Result<(), Error> {
    let mut modes = vec![Mode::Seq];
    modes.extend(args.workers.iter().map(|&n| Mode::Par(n)));
    let base = base_config(&args.common);
    let mut results = Vec::new();
    for workload in Workload::ALL {
        let cells = run_matrix(&base, &[workload], &modes)?;
        for r in &cells {
            eprintln!("{workload} {}: median {:.4}s, checksum {}", r.config.mode, r.median, r.checksum);
        }
        results.extend(cells);
    }
    emit(&results, &args.common)?;
    for &m in &modes[1..] {
        if let Some(r) = ratio(&results, Workload::Primes, m, Mode::Seq) {
            eprintln!("primes {m}/seq time ratio: {r:.2}");
        }
    }
    check_checksums(&results)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => run_one(a),
        Command::Matrix(a) => run_all(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::FAILURE
        }
    }
}
