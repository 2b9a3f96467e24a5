//! Timing harness for the workload × mode matrix.
//!
//! Each [`run`] owns its scheduler. Warmups are executed and discarded, then
//! every repetition is timed individually. Polynomial operands are built and
//! re-streamed under the run's strategy outside the timed region. Every
//! repetition also produces a checksum (prime count, or a digest of the
//! rendered product), and the checksums must agree across repetitions and,
//! in a matrix, across modes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::polyalg::{fateman_input, times, times_data_parallel, Polynomial};
use crate::primes::primes_up_to;
use crate::suspension::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Workload {
    Primes,
    PrimesX3,
    Stream,
    StreamBig,
    List,
    ListBig,
}

impl Workload {
    pub const ALL: [Workload; 6] = [
        Workload::Primes,
        Workload::PrimesX3,
        Workload::Stream,
        Workload::StreamBig,
        Workload::List,
        Workload::ListBig,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Workload::Primes => "primes",
            Workload::PrimesX3 => "primes_x3",
            Workload::Stream => "stream",
            Workload::StreamBig => "stream_big",
            Workload::List => "list",
            Workload::ListBig => "list_big",
        }
    }

    pub fn is_polynomial(self) -> bool {
        !matches!(self, Workload::Primes | Workload::PrimesX3)
    }

    pub fn is_big(self) -> bool {
        matches!(self, Workload::StreamBig | Workload::ListBig)
    }

    /// The big-coefficient counterpart of a polynomial workload.
    pub fn big(self) -> Result<Workload> {
        match self {
            Workload::Stream | Workload::StreamBig => Ok(Workload::StreamBig),
            Workload::List | Workload::ListBig => Ok(Workload::ListBig),
            w => Err(Error::config(format!("{} has no big-coefficient variant", w.name()))),
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Workload {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Workload::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::config(format!("unknown workload {s:?}")))
    }
}

/// Sequential (lazy) or parallel (async over `n` workers).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Seq,
    Par(usize),
}

impl Mode {
    pub fn workers(self) -> usize {
        match self {
            Mode::Seq => 0,
            Mode::Par(n) => n,
        }
    }

    fn kind(self) -> &'static str {
        match self {
            Mode::Seq => "seq",
            Mode::Par(_) => "par",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Seq => f.write_str("seq"),
            Mode::Par(n) => write!(f, "par({n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub workload: Workload,
    pub mode: Mode,
    pub repetitions: usize,
    pub warmup_runs: usize,
    pub fateman_k: u32,
    pub variables: usize,
    /// Bound for `primes`; `primes_x3` uses three times this.
    pub primes_n: i64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            workload: Workload::Primes,
            mode: Mode::Seq,
            repetitions: 5,
            warmup_runs: 2,
            fateman_k: 8,
            variables: 3,
            primes_n: 5000,
        }
    }
}

impl BenchConfig {
    pub fn new(workload: Workload, mode: Mode) -> Self {
        BenchConfig {
            workload,
            mode,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be positive"));
        }
        if self.mode == Mode::Par(0) {
            return Err(Error::config("parallel mode needs at least one worker"));
        }
        if self.primes_n < 2 {
            return Err(Error::config("primes_n must be at least 2"));
        }
        if self.fateman_k == 0 || self.variables == 0 {
            return Err(Error::config("fateman_k and variables must be positive"));
        }
        Ok(())
    }

    /// Effective sieve bound for prime workloads.
    pub fn prime_bound(&self) -> i64 {
        match self.workload {
            Workload::PrimesX3 => 3 * self.primes_n,
            _ => self.primes_n,
        }
    }

    fn strategy(&self) -> Result<Strategy> {
        match self.mode {
            Mode::Seq => Ok(Strategy::Lazy),
            Mode::Par(n) => Strategy::with_workers(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Checksum {
    PrimeCount(usize),
    Digest(String),
}

impl Checksum {
    /// Digest of a polynomial's rendered text.
    pub fn of_polynomial(p: &Polynomial) -> Result<Checksum> {
        let text = p.render()?;
        let hash = Sha256::digest(text.as_bytes());
        let hex: String = hash[..8].iter().map(|b| format!("{b:02x}")).collect();
        Ok(Checksum::Digest(hex))
    }
}

impl fmt::Display for Checksum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Checksum::PrimeCount(n) => write!(f, "primes={n}"),
            Checksum::Digest(h) => write!(f, "sha256:{h}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchResult {
    pub config: BenchConfig,
    /// Wall-clock seconds of each timed repetition, in run order.
    pub seconds: Vec<f64>,
    pub median: f64,
    pub min: f64,
    pub checksum: Checksum,
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    }
}

/// One timed execution of the workload: seconds and checksum.
fn execute(
    config: &BenchConfig,
    strategy: &Strategy,
    operands: Option<&(Polynomial, Polynomial)>,
) -> Result<(f64, Checksum)> {
    let idle = || {
        if let Some(s) = strategy.scheduler() {
            s.wait_idle();
        }
    };
    match config.workload {
        Workload::Primes | Workload::PrimesX3 => {
            idle();
            let start = Instant::now();
            let primes = primes_up_to(config.prime_bound(), strategy)?;
            let secs = start.elapsed().as_secs_f64();
            Ok((secs, Checksum::PrimeCount(primes.count()?)))
        }
        Workload::Stream | Workload::StreamBig => {
            let (p, q) = operands.expect("polynomial workload has operands");
            let x = p.with_strategy(strategy)?;
            let y = q.with_strategy(strategy)?;
            x.force_all()?;
            y.force_all()?;
            idle();
            let start = Instant::now();
            let product = times(&x, &y)?.force_all()?;
            let secs = start.elapsed().as_secs_f64();
            Ok((secs, Checksum::of_polynomial(&product)?))
        }
        Workload::List | Workload::ListBig => {
            let (p, q) = operands.expect("polynomial workload has operands");
            idle();
            let start = Instant::now();
            let product = times_data_parallel(p, q, strategy)?;
            let secs = start.elapsed().as_secs_f64();
            Ok((secs, Checksum::of_polynomial(&product)?))
        }
    }
}

/// Runs warmups then timed repetitions of one configuration.
pub fn run(config: &BenchConfig) -> Result<BenchResult> {
    config.validate()?;
    let operands = if config.workload.is_polynomial() {
        Some(fateman_input(config.fateman_k, config.variables, config.workload.is_big())?)
    } else {
        None
    };
    let strategy = config.strategy()?;
    let outcome = (|| {
        for _ in 0..config.warmup_runs {
            execute(config, &strategy, operands.as_ref())?;
        }
        let mut seconds = Vec::with_capacity(config.repetitions);
        let mut checksum: Option<Checksum> = None;
        for _ in 0..config.repetitions {
            let (secs, sum) = execute(config, &strategy, operands.as_ref())?;
            seconds.push(secs);
            match &checksum {
                Some(c) if *c != sum => {
                    return Err(Error::ChecksumMismatch {
                        workload: config.workload.name().to_owned(),
                        expected: c.to_string(),
                        found: sum.to_string(),
                    })
                }
                Some(_) => {}
                None => checksum = Some(sum),
            }
        }
        Ok((seconds, checksum.expect("at least one repetition")))
    })();
    if let Some(s) = strategy.scheduler() {
        s.shutdown();
    }
    let (seconds, checksum) = outcome?;
    Ok(BenchResult {
        config: config.clone(),
        median: median(&seconds),
        min: seconds.iter().copied().fold(f64::INFINITY, f64::min),
        seconds,
        checksum,
    })
}

/// Runs every (workload, mode) cell with the other settings taken from
/// `base`, in workload-major order.
pub fn run_matrix(base: &BenchConfig, workloads: &[Workload], modes: &[Mode]) -> Result<Vec<BenchResult>> {
    let mut out = Vec::with_capacity(workloads.len() * modes.len());
    for &workload in workloads {
        for &mode in modes {
            out.push(run(&BenchConfig {
                workload,
                mode,
                ..base.clone()
            })?);
        }
    }
    Ok(out)
}

/// Fails on the first workload whose checksum differs between modes.
pub fn check_checksums(results: &[BenchResult]) -> Result<()> {
    let mut seen: BTreeMap<Workload, &Checksum> = BTreeMap::new();
    for r in results {
        match seen.get(&r.config.workload) {
            Some(&c) if *c != r.checksum => {
                return Err(Error::ChecksumMismatch {
                    workload: format!("{} {}", r.config.workload, r.config.mode),
                    expected: c.to_string(),
                    found: r.checksum.to_string(),
                })
            }
            Some(_) => {}
            None => {
                seen.insert(r.config.workload, &r.checksum);
            }
        }
    }
    Ok(())
}

/// Median of `a` over median of `b` for one workload, if both cells exist.
pub fn ratio(results: &[BenchResult], workload: Workload, a: Mode, b: Mode) -> Option<f64> {
    let cell = |m: Mode| {
        results
            .iter()
            .find(|r| r.config.workload == workload && r.config.mode == m)
            .map(|r| r.median)
    };
    Some(cell(a)? / cell(b)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::config(format!("unknown report format {s:?}"))),
        }
    }
}

/// Renders results with medians at one decimal in the table format.
pub fn report(results: &[BenchResult], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Table => report_table(results, 1),
        ReportFormat::Csv => report_csv(results),
    }
}

/// Table of median seconds: one row per workload, one column per mode.
pub fn report_table(results: &[BenchResult], decimals: usize) -> Result<String> {
    if results.is_empty() {
        return Err(Error::config("nothing to report"));
    }
    let mut cells: BTreeMap<(Workload, Mode), f64> = BTreeMap::new();
    for r in results {
        if cells.insert((r.config.workload, r.config.mode), r.median).is_some() {
            return Err(Error::config(format!(
                "duplicate cell {} {}",
                r.config.workload, r.config.mode
            )));
        }
    }
    let rows: BTreeSet<Workload> = cells.keys().map(|k| k.0).collect();
    let cols: BTreeSet<Mode> = cells.keys().map(|k| k.1).collect();

    let headers: Vec<String> = cols.iter().map(Mode::to_string).collect();
    let body: Vec<(String, Vec<String>)> = rows
        .iter()
        .map(|&w| {
            let vals = cols
                .iter()
                .map(|&m| {
                    cells
                        .get(&(w, m))
                        .map(|s| format!("{s:.decimals$}"))
                        .unwrap_or_default()
                })
                .collect();
            (w.name().to_owned(), vals)
        })
        .collect();

    let first = body.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max("workload".len());
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| body.iter().map(|(_, v)| v[i].len()).max().unwrap_or(0).max(h.len()))
        .collect();

    let mut out = String::new();
    let _ = write!(out, "{:<first$}", "workload");
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(out, "  {h:>w$}");
    }
    out.push('\n');
    for (name, vals) in &body {
        let _ = write!(out, "{name:<first$}");
        for (v, w) in vals.iter().zip(&widths) {
            let _ = write!(out, "  {v:>w$}");
        }
        out.push('\n');
    }
    Ok(out)
}

/// One line per timed repetition:
/// `workload,mode,workers,rep,seconds,checksum`.
pub fn report_csv(results: &[BenchResult]) -> Result<String> {
    if results.is_empty() {
        return Err(Error::config("nothing to report"));
    }
    let mut out = String::from("workload,mode,workers,rep,seconds,checksum\n");
    for r in results {
        for (i, s) in r.seconds.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.6},{}",
                r.config.workload,
                r.config.mode.kind(),
                r.config.mode.workers(),
                i,
                s,
                r.checksum
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake(workload: Workload, mode: Mode, median: f64) -> BenchResult {
        BenchResult {
            config: BenchConfig::new(workload, mode),
            seconds: vec![median],
            median,
            min: median,
            checksum: Checksum::PrimeCount(1),
        }
    }

    #[test]
    fn workload_names_round_trip() {
        for w in Workload::ALL {
            assert_eq!(w.name().parse::<Workload>().unwrap(), w);
        }
        assert!("nope".parse::<Workload>().is_err());
    }

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn one_result_one_row() {
        let t = report(&[fake(Workload::Primes, Mode::Seq, 3.44)], ReportFormat::Table).unwrap();
        assert_eq!(t, "workload  seq\nprimes    3.4\n");
    }

    #[test]
    fn empty_report_rejected() {
        assert!(report(&[], ReportFormat::Table).is_err());
        assert!(report(&[], ReportFormat::Csv).is_err());
    }

    #[test]
    fn duplicate_cell_rejected() {
        let r = fake(Workload::Primes, Mode::Seq, 1.0);
        assert!(report(&[r.clone(), r], ReportFormat::Table).is_err());
    }

    #[test]
    fn table_leaves_missing_cells_blank() {
        let rs = [
            fake(Workload::Primes, Mode::Seq, 3.4),
            fake(Workload::Primes, Mode::Par(2), 5.9),
            fake(Workload::Stream, Mode::Seq, 14.0),
            fake(Workload::Stream, Mode::Par(1), 35.1),
            fake(Workload::Stream, Mode::Par(2), 37.7),
        ];
        let t = report(&rs, ReportFormat::Table).unwrap();
        let expected = "\
workload   seq  par(1)  par(2)
primes     3.4             5.9
stream    14.0    35.1    37.7
";
        assert_eq!(t, expected);
    }

    #[test]
    fn csv_has_one_line_per_rep() {
        let mut r = fake(Workload::List, Mode::Par(2), 0.5);
        r.seconds = vec![0.5, 0.25];
        let csv = report(&[r], ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "workload,mode,workers,rep,seconds,checksum");
        assert_eq!(lines[1], "list,par,2,0,0.500000,primes=1");
        assert_eq!(lines[2], "list,par,2,1,0.250000,primes=1");
    }

    #[test]
    fn invalid_configs_rejected() {
        let c = BenchConfig {
            repetitions: 0,
            ..BenchConfig::default()
        };
        assert!(run(&c).is_err());
        let c = BenchConfig::new(Workload::Primes, Mode::Par(0));
        assert!(run(&c).is_err());
    }

    #[test]
    fn primes_x3_triples_the_bound() {
        let c = BenchConfig {
            primes_n: 100,
            ..BenchConfig::new(Workload::PrimesX3, Mode::Seq)
        };
        assert_eq!(c.prime_bound(), 300);
    }

    #[test]
    fn small_run_records_every_rep() {
        let c = BenchConfig {
            primes_n: 200,
            repetitions: 3,
            warmup_runs: 1,
            ..BenchConfig::new(Workload::Primes, Mode::Par(1))
        };
        let r = run(&c).unwrap();
        assert_eq!(r.seconds.len(), 3);
        assert!(r.seconds.iter().all(|&s| s >= 0.0));
        assert!(r.min <= r.median);
        assert_eq!(r.checksum, Checksum::PrimeCount(46));
    }

    #[test]
    fn checksum_mismatch_detected() {
        let a = fake(Workload::Primes, Mode::Seq, 1.0);
        let mut b = fake(Workload::Primes, Mode::Par(1), 1.0);
        b.checksum = Checksum::PrimeCount(2);
        assert!(matches!(check_checksums(&[a, b]), Err(Error::ChecksumMismatch { .. })));
    }
}
