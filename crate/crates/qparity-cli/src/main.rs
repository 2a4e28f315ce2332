//! `qparity`: series computation, identity solve/verify, density scans, and
//! reduction certificates, with bit-exact file outputs.
//!
//! Exit codes: 0 success/verified, 1 invalid parameters, 2 mathematical
//! inconsistency or mismatch, 3 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use qparity_core::density::{self, SeriesPath};
use qparity_core::etaq;
use qparity_core::identities::{self, IdentityParams, IdentityRecord, SolveStatus, VerifyReport};
use qparity_core::reduce::{self, CertificateFile, CertificateStatus, PrimeChoice};
use qparity_core::{HexSeries, SparseSeries};

/// Guard rails against accidental multi-gigabyte scans; generous next to the
/// 10^4 defaults.
const MAX_SCAN_BOUND: u64 = 1_000_000_000;
const MAX_VERIFY_DEGREE: usize = 10_000_000;
const MAX_FIT_DEGREE: usize = 100_000;
const MAX_CERTIFICATE_ROOT: u64 = 1_000_000;

const ENV_VERIFY_DEGREE: &str = "QPARITY_VERIFY_DEGREE";
const ENV_FIT_DEGREE: &str = "QPARITY_FIT_DEGREE";

#[derive(Parser)]
#[command(
    name = "qparity",
    version,
    about = "Parity engine for partition and multipartition series over GF(2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the p_t parity series to degree n
    Series {
        /// Multipartition index t >= 1
        #[arg(long)]
        t: u64,
        /// Truncation degree
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "sparse")]
        format: SeriesFormat,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve and verify the (a, t) progression identity, writing its record;
    /// with --check, re-verify an existing record file instead
    Identity {
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
        /// Fit window (default: unknown count + 64; env QPARITY_FIT_DEGREE)
        #[arg(long)]
        fit: Option<usize>,
        /// Verification depth (default: max(50*fit, 10^4); env QPARITY_VERIFY_DEGREE)
        #[arg(long)]
        verify: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-verify this record file and exit
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Odd-density scan: one CSV row per checkpoint per route
    Density {
        /// Multipartition index; repeat for a sweep over several t
        #[arg(long = "t", action = ArgAction::Append, required = true)]
        ts: Vec<u64>,
        /// Scan bound
        #[arg(long)]
        x: u64,
        /// Comma-separated checkpoint bounds (default: powers of 10 plus x)
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
        /// Thread count for sweeps over several t
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the reduction certificate for A; with --check, re-verify an
    /// existing certificate file instead
    Certificate {
        #[arg(long)]
        a: Option<u64>,
        /// Verification depth per identity (default 10^4; env QPARITY_VERIFY_DEGREE)
        #[arg(long)]
        verify: Option<usize>,
        /// Which prime factor part-I steps descend through
        #[arg(long, value_enum, default_value = "largest")]
        prime: PrimeArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-verify this certificate file and exit
        #[arg(long)]
        check: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeriesFormat {
    Sparse,
    Hex,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrimeArg {
    Largest,
    Smallest,
}

enum CliError {
    Invalid(String),
    Math(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Math(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Math(m) | CliError::Io(m) => m,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            // usage errors are invalid parameters
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Series { t, n, format, out } => cmd_series(t, n, format, out.as_deref()),
        Command::Identity {
            a,
            t,
            fit,
            verify,
            out,
            check,
        } => match check {
            Some(path) => cmd_identity_check(&path),
            None => cmd_identity(a, t, fit, verify, out.as_deref()),
        },
        Command::Density {
            ts,
            x,
            checkpoints,
            workers,
            out,
        } => cmd_density(&ts, x, checkpoints.as_deref(), workers, out.as_deref()),
        Command::Certificate {
            a,
            verify,
            prime,
            out,
            check,
        } => match check {
            Some(path) => cmd_certificate_check(&path),
            None => cmd_certificate(a, verify, prime, out.as_deref()),
        },
    }
}

#[derive(Serialize)]
struct SeriesRecord {
    t: u64,
    trunc_degree: u64,
    exponents: Vec<u64>,
    hex: String,
}

fn cmd_series(t: u64, n: u64, format: SeriesFormat, out: Option<&Path>) -> Result<(), CliError> {
    if t == 0 {
        return Err(invalid("--t must be at least 1"));
    }
    if n > MAX_SCAN_BOUND {
        return Err(invalid(format!("--n is capped at {MAX_SCAN_BOUND}")));
    }
    let series = etaq::multipartition_series(t, n as usize);
    let json = match format {
        SeriesFormat::Sparse => serde_json::to_string(&SparseSeries::from(&series)),
        SeriesFormat::Hex => serde_json::to_string(&HexSeries::from(&series)),
        SeriesFormat::Json => {
            let sparse = SparseSeries::from(&series);
            let hex = HexSeries::from(&series);
            serde_json::to_string(&SeriesRecord {
                t,
                trunc_degree: sparse.trunc_degree,
                exponents: sparse.exponents,
                hex: hex.hex,
            })
        }
    }
    .expect("series serializes");
    write_output(out, &(json + "\n"))
}

fn env_usize(name: &str) -> Result<Option<usize>, CliError> {
    match std::env::var(name) {
        Ok(v) => v
            .parse::<usize>()
            .map(Some)
            .map_err(|_| invalid(format!("{name} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn cmd_identity(
    a: Option<u64>,
    t: Option<u64>,
    fit: Option<usize>,
    verify: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let a = a.ok_or_else(|| invalid("--a is required (or use --check FILE)"))?;
    let t = t.ok_or_else(|| invalid("--t is required (or use --check FILE)"))?;
    let params = IdentityParams::new(a, t).map_err(|e| invalid(e.to_string()))?;
    let fit = match fit {
        Some(f) => f,
        None => {
            env_usize(ENV_FIT_DEGREE)?.unwrap_or_else(|| identities::default_fit_degree(&params))
        }
    };
    if fit > MAX_FIT_DEGREE {
        return Err(invalid(format!("--fit is capped at {MAX_FIT_DEGREE}")));
    }
    let verify = match verify {
        Some(v) => v,
        None => {
            env_usize(ENV_VERIFY_DEGREE)?.unwrap_or_else(|| identities::default_verify_degree(fit))
        }
    };
    if verify > MAX_VERIFY_DEGREE {
        return Err(invalid(format!(
            "--verify is capped at {MAX_VERIFY_DEGREE}"
        )));
    }
    if verify <= fit {
        return Err(invalid(format!(
            "verification depth {verify} must exceed the fit window {fit}"
        )));
    }
    let (sol, report) =
        identities::solve_and_verify(&params, fit, verify).map_err(|e| invalid(e.to_string()))?;
    if sol.status == SolveStatus::Inconsistent {
        return Err(CliError::Math(format!(
            "no eps assignment fits (a={a}, t={t}) on the degree window 0..={fit}"
        )));
    }
    match report {
        VerifyReport::Verified { .. } => {
            let record = IdentityRecord::new(&params, &sol);
            write_output(out, &pretty_json(&record))
        }
        VerifyReport::Mismatch { first_mismatch, .. } => Err(CliError::Math(format!(
            "identity (a={a}, t={t}) fits to degree {fit} but fails at degree {first_mismatch}"
        ))),
    }
}

fn cmd_identity_check(path: &Path) -> Result<(), CliError> {
    let text = read_input(path)?;
    let record: IdentityRecord =
        serde_json::from_str(&text).map_err(|e| invalid(format!("bad identity record: {e}")))?;
    let (params, sol) = record.to_solution().map_err(|e| invalid(e.to_string()))?;
    let report = identities::verify_identity(&params, &sol, record.verify_degree as usize)
        .map_err(|e| invalid(e.to_string()))?;
    match report {
        VerifyReport::Verified { degree } => {
            println!(
                "identity (a={}, t={}) verified to degree {degree}",
                record.a, record.t
            );
            Ok(())
        }
        VerifyReport::Mismatch { first_mismatch, .. } => Err(CliError::Math(format!(
            "identity (a={}, t={}) fails at degree {first_mismatch}",
            record.a, record.t
        ))),
    }
}

fn cmd_density(
    ts: &[u64],
    x: u64,
    checkpoints: Option<&[u64]>,
    workers: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if ts.contains(&0) {
        return Err(invalid("--t must be at least 1"));
    }
    if x > MAX_SCAN_BOUND {
        return Err(invalid(format!("--x is capped at {MAX_SCAN_BOUND}")));
    }
    let cps = match checkpoints {
        Some(c) => c.to_vec(),
        None => density::default_checkpoints(x),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| invalid(format!("cannot build worker pool: {e}")))?;
    // one scan per t, in parallel; row assembly stays in argument order
    let scans: Vec<Result<Vec<density::DensityRow>, CliError>> = pool.install(|| {
        ts.par_iter()
            .map(|&t| {
                let default_path = density::default_path(t);
                let est = density::odd_density_with_path(t, x, &cps, default_path);
                let mut rows = density::estimate_rows(&est, default_path);
                if x <= density::INVERSION_CROSS_CHECK_BOUND {
                    let inv = density::odd_density_with_path(t, x, &cps, SeriesPath::Inversion);
                    if inv.checkpoints != est.checkpoints {
                        return Err(CliError::Math(format!(
                            "route disagreement for t={t}: {} vs {} odd values at x={x}",
                            est.odd_count, inv.odd_count
                        )));
                    }
                    rows.extend(density::estimate_rows(&inv, SeriesPath::Inversion));
                }
                Ok(rows)
            })
            .collect()
    });
    let mut all_rows = Vec::new();
    for scan in scans {
        all_rows.extend(scan?);
    }
    write_output(out, &density::to_csv(&all_rows))
}

fn cmd_certificate(
    a: Option<u64>,
    verify: Option<usize>,
    prime: PrimeArg,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let a = a.ok_or_else(|| invalid("--a is required (or use --check FILE)"))?;
    if a == 0 || a > MAX_CERTIFICATE_ROOT {
        return Err(invalid(format!(
            "--a must be in 1..={MAX_CERTIFICATE_ROOT}"
        )));
    }
    let verify = match verify {
        Some(v) => v,
        None => env_usize(ENV_VERIFY_DEGREE)?.unwrap_or(10_000),
    };
    if verify > MAX_VERIFY_DEGREE {
        return Err(invalid(format!(
            "--verify is capped at {MAX_VERIFY_DEGREE}"
        )));
    }
    let choice = match prime {
        PrimeArg::Largest => PrimeChoice::Largest,
        PrimeArg::Smallest => PrimeChoice::Smallest,
    };
    let cert = reduce::build_certificate_with(a, verify, choice);
    let status = cert.status;
    write_output(out, &cert.to_file().to_json())?;
    if status == CertificateStatus::Partial {
        return Err(CliError::Math(format!(
            "certificate for A={a} is partial: some identity failed at degree {verify}"
        )));
    }
    Ok(())
}

fn cmd_certificate_check(path: &Path) -> Result<(), CliError> {
    let text = read_input(path)?;
    let file =
        CertificateFile::from_json(&text).map_err(|e| invalid(format!("bad certificate: {e}")))?;
    file.reverify()
        .map_err(|e| CliError::Math(format!("certificate fails re-verification: {e}")))?;
    println!(
        "certificate for A={} re-verified to degree {}",
        file.root, file.verify_degree
    );
    Ok(())
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("record serializes");
    s.push('\n');
    s
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
