//! The `phiscan` command line.
//!
//! [`run`] parses arguments, executes one subcommand inside a rayon pool of
//! the requested size and returns the process exit code: 0 on success, 2 on
//! argument, configuration or I/O errors, 1 when `--assert` is given and a
//! checked expectation fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod output;

pub use output::{Field, Format, Sink};

#[derive(Debug, Parser)]
#[command(name = "phiscan", version, about = "Certified scans of totient inequalities over primorials and primes")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for sieving and table scans.
    #[arg(long, global = true, env = "PHISCAN_THREADS")]
    pub threads: Option<usize>,
    /// Write records here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Exit with status 1 if any checked expectation fails.
    #[arg(long, global = true)]
    pub assert: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CheckpointArgs {
    /// Emit one record per prime.
    #[arg(long, conflicts_with = "at")]
    pub dense: bool,
    /// Ratio of the geometric checkpoint grid.
    #[arg(long, default_value_t = 1.1)]
    pub ratio: f64,
    /// Explicit checkpoints, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub at: Vec<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ConstantArgs {
    /// Prime limit for the prime zeta sums.
    #[arg(long, value_parser = parse_count, default_value = "1e7")]
    pub zeta_limit: u64,
    /// Number of power-series terms.
    #[arg(long, default_value_t = 64)]
    pub n_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// Every k.
    All,
    /// Only k where p_k is the last prime before a grid point.
    Grid,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primorial scan: Nicolas and Rosser–Schoenfeld verdicts, double-log gap, prime-power tail.
    Nicolas {
        /// Largest prime p_k to include.
        #[arg(long, value_parser = parse_count, required_unless_present = "kmax", conflicts_with = "kmax")]
        pmax: Option<u64>,
        /// Number of primorials to scan.
        #[arg(long, value_parser = parse_count)]
        kmax: Option<u64>,
        #[arg(long, value_enum, default_value_t = Emit::All)]
        emit: Emit,
        /// Ratio of the checkpoint grid over p.
        #[arg(long, default_value_t = 1.1)]
        ratio: f64,
        /// Exponent B of the double-log ratio.
        #[arg(long = "prop6-b", default_value_t = 1.0)]
        prop6_b: f64,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Chebyshev ϑ(x) at checkpoints with its bands.
    Theta {
        /// Scan primes up to this bound.
        #[arg(long, value_parser = parse_count)]
        xmax: u64,
        #[command(flatten)]
        checkpoints: CheckpointArgs,
        /// Lower Chebyshev constant, checked from x = 100.
        #[arg(long, default_value_t = 0.8)]
        cheb_a: f64,
        /// Upper Chebyshev constant.
        #[arg(long, default_value_t = 1.2)]
        cheb_b: f64,
        /// Also report |E(x)| ln^B x / x.
        #[arg(long)]
        wirsing_b: Option<f64>,
    },
    /// Σ 1/p at checkpoints and the residual against three bands.
    Mertens {
        /// Scan primes up to this bound.
        #[arg(long, value_parser = parse_count)]
        xmax: u64,
        #[command(flatten)]
        checkpoints: CheckpointArgs,
        /// Constant of the elementary band c / ln x.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Σ 1/p over one residue class.
    MertensAp {
        /// Modulus.
        #[arg(long)]
        q: u64,
        /// Residue, coprime to q.
        #[arg(long)]
        a: u64,
        /// Scan primes up to this bound.
        #[arg(long, value_parser = parse_count)]
        xmax: u64,
        #[command(flatten)]
        checkpoints: CheckpointArgs,
    },
    /// γ, e^γ and B₁.
    Constants {
        /// Significant digits.
        #[arg(long, default_value_t = 10)]
        digits: usize,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Density of n/φ(n) ≥ t.
    Density {
        /// Upper limits N, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
        nmax: Vec<u64>,
        /// Thresholds: integers, decimals or fractions.
        #[arg(long, value_delimiter = ',', value_parser = parse_threshold, default_value = "1,1.5,2,3,5")]
        t: Vec<phiscan_core::Threshold>,
    },
    /// Count n with φ(n)/n ≤ c0 / ln ln ln n.
    Thm4 {
        /// Upper limits N, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
        nmax: Vec<u64>,
        /// Constant in the threshold.
        #[arg(long, default_value_t = 0.1)]
        c0: f64,
    },
    /// Mean and maximum of ω(n).
    Omega {
        /// Upper limits N, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
        nmax: Vec<u64>,
    },
    /// Prime-power tail T(p) for given primes.
    Tail {
        /// Primes p_k, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
        pk: Vec<u64>,
        #[command(flatten)]
        constants: ConstantArgs,
    },
}

/// Parses `100`, `1_000`, `1e8`, `2.5e6` or `10^8`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let bad = || format!("{s:?} is not a non-negative integer");
    let t: String = s.trim().chars().filter(|&c| c != '_').collect();
    if let Some((b, e)) = t.split_once('^') {
        let b: u64 = b.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        return b.checked_pow(e).ok_or_else(bad);
    }
    let (mant, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<u32>().map_err(|_| bad())?),
        None => (t.as_str(), 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let frac = frac.trim_end_matches('0');
    if int.is_empty() || frac.len() as u32 > exp {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let m: u64 = digits.parse().map_err(|_| bad())?;
    10u64
        .checked_pow(exp - frac.len() as u32)
        .and_then(|p| m.checked_mul(p))
        .ok_or_else(bad)
}

fn parse_threshold(s: &str) -> Result<phiscan_core::Threshold, String> {
    s.parse().map_err(|e: phiscan_core::Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Core(#[from] phiscan_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
    #[error("cannot create output file {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
    #[error("cannot start thread pool: {0}")]
    Threads(String),
}

/// Expectations checked while a command runs; only enforced with `--assert`.
#[derive(Debug, Default)]
pub struct Checks {
    failed: u64,
    messages: Vec<String>,
}

impl Checks {
    const SHOWN: usize = 20;

    pub fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failed += 1;
            if self.messages.len() < Self::SHOWN {
                self.messages.push(what());
            }
        }
    }

    pub fn failed(&self) -> u64 {
        self.failed
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(checks) => {
            if cli.assert && checks.failed > 0 {
                let _ = writeln!(err, "assertion failures: {}", checks.failed);
                for m in &checks.messages {
                    let _ = writeln!(err, "  {m}");
                }
                1
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<Checks, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Threads("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Threads(e.to_string()))?;
    match &cli.output {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Output {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            let checks = pool.install(|| commands::dispatch(cli, &mut w))?;
            w.flush()?;
            Ok(checks)
        }
        None => {
            let mut w = BufWriter::new(out);
            let checks = pool.install(|| commands::dispatch(cli, &mut w))?;
            w.flush()?;
            Ok(checks)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("100"), Ok(100));
        assert_eq!(parse_count("1e8"), Ok(100_000_000));
        assert_eq!(parse_count("2.5e6"), Ok(2_500_000));
        assert_eq!(parse_count("10^6"), Ok(1_000_000));
        assert_eq!(parse_count("1_000"), Ok(1000));
        for bad in ["", "1.5", "1e", "-3", "1e30", "x"] {
            assert!(parse_count(bad).is_err(), "{bad}");
        }
    }
}
