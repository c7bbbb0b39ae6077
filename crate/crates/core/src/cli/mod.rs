//! Command-line surface.
//!
//! Exit codes: 0 success, 1 verification failure (or an internal evaluation
//! error), 2 usage error, 3 spec or input validation error.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::Error;
use crate::foundation::{approx, frac, parse_rational, pow2, Rational};
use crate::verify::{run_suite, Suite, SuiteConfig};
use crate::SingularFunction;

pub mod spec_file;

pub use spec_file::{load, presets, SpecFile};

#[derive(Debug, Parser)]
#[command(name = "staircase", version, about = "Evaluate and verify singular staircase functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Preset name or path to a JSON spec file
    #[arg(long)]
    spec: String,
    /// Add every dyadic k/2^n to level n (makes M dense)
    #[arg(long)]
    densify: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enclose f(x)
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 40)]
        eps_bits: u32,
        /// Also print decimal approximations (not certified)
        #[arg(long)]
        approx: bool,
    },
    /// Level of a point of M and the claimed derivative 2^(1-n)
    Deriv {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        a: String,
    },
    /// Run verification suites and write a JSON report
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = ["growth", "derivative", "singular", "monotone", "partition", "all"])]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        count: Option<usize>,
        /// Report path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write x, f_lo, f_hi over the dyadic grid k·2^-G as CSV
    PlotData {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        grid_bits: u32,
        #[arg(long, default_value_t = 40)]
        eps_bits: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// List built-in specs
    Presets,
}

enum Failure {
    Usage(String),
    Invalid(String),
    Verification(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invalid(_) => 3,
            Failure::Verification(_) | Failure::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Verification(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Spec { .. }
            | Error::NotInM { .. }
            | Error::LevelCapExhausted { .. }
            | Error::OutOfUnitInterval(_)
            | Error::MissingEndpoints => Failure::Invalid(e.to_string()),
            Error::ParseRational(_) => Failure::Usage(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Internal(e.to_string())
}

fn build(spec: &SpecArgs) -> Result<SingularFunction, Failure> {
    let mut file = load(&spec.spec)?;
    file.densify |= spec.densify;
    Ok(SingularFunction::new(file.to_chain()?))
}

fn rational_arg(name: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|_| Failure::Usage(format!("--{name}: invalid rational {s:?}")))
}

fn eps_from_bits(bits: u32) -> Result<Rational, Failure> {
    if bits == 0 || bits > 4096 {
        return Err(Failure::Usage(format!("--eps-bits must lie in 1..=4096, got {bits}")));
    }
    Ok(pow2(-i64::from(bits)))
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Eval { spec, x, eps_bits, approx: show_approx } => {
            let sf = build(&spec)?;
            let x = rational_arg("x", &x)?;
            let e = sf.f_eval(&x, &eps_from_bits(eps_bits)?)?;
            writeln!(out, "{e}").map_err(io_failure)?;
            if show_approx {
                writeln!(out, "approx (decimal, not certified): [{:e}, {:e}]", approx(e.lo()), approx(e.hi()))
                    .map_err(io_failure)?;
            }
            Ok(())
        }
        Command::Deriv { spec, a } => {
            let sf = build(&spec)?;
            let a = rational_arg("a", &a)?;
            let n = sf.level_of(&a)?;
            let d = sf.claimed_derivative(&a)?;
            writeln!(out, "level={n} derivative={d}").map_err(io_failure)?;
            Ok(())
        }
        Command::Verify { spec, suite, seed, count, out: path } => {
            let sf = build(&spec)?;
            let suite = Suite::parse(&suite).ok_or_else(|| Failure::Usage(format!("unknown suite {suite:?}")))?;
            if count == Some(0) {
                return Err(Failure::Usage("--count must be positive".into()));
            }
            let cfg = SuiteConfig { seed, count, ..SuiteConfig::default() };
            let report = run_suite(&sf, suite, &cfg)?;
            let json = report.to_json();
            match path {
                Some(p) => {
                    std::fs::write(&p, format!("{json}\n")).map_err(io_failure)?;
                    writeln!(out, "suite={} seed={} pass={} report={}", report.suite, seed, report.pass, p.display())
                        .map_err(io_failure)?;
                }
                None => writeln!(out, "{json}").map_err(io_failure)?,
            }
            if report.pass {
                Ok(())
            } else {
                let failed: Vec<&str> =
                    report.reports.iter().filter(|r| !r.passed()).map(|r| r.check.as_str()).collect();
                Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::PlotData { spec, grid_bits, eps_bits, out: path } => {
            let sf = build(&spec)?;
            if grid_bits > 20 {
                return Err(Failure::Usage("--grid-bits must be at most 20".into()));
            }
            let eps = eps_from_bits(eps_bits)?;
            let n: i64 = 1 << grid_bits;
            let rows = (0..=n)
                .into_par_iter()
                .map(|k| {
                    let x = frac(k, n);
                    sf.f_eval(&x, &eps).map(|e| (x, e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let file = File::create(&path).map_err(io_failure)?;
            let mut w = csv::Writer::from_writer(file);
            w.write_record(["x", "f_lo", "f_hi"]).map_err(|e| Failure::Internal(e.to_string()))?;
            for (x, e) in &rows {
                w.write_record([x.to_string(), e.lo().to_string(), e.hi().to_string()])
                    .map_err(|e| Failure::Internal(e.to_string()))?;
            }
            w.flush().map_err(io_failure)?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display()).map_err(io_failure)?;
            Ok(())
        }
        Command::Presets => {
            for p in presets() {
                writeln!(out, "{:<16} {}", p.name, p.description).map_err(io_failure)?;
            }
            Ok(())
        }
    }
}
