//! `ddvv`: command-line front end for the inequality checks, the extremal
//! search, random sweeps and the lemma oracles.
//!
//! Exit codes: 0 on success, 1 on input or usage errors, 2 when an
//! inequality, bound or oracle is violated.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ddvv_core::curvature::{self, conjecture1_residual_tol, eq1a_residual_tol, residual_sign};
use ddvv_core::io::{parse_form, parse_tuple, tuple_to_json};
use ddvv_core::lemmas::{
    case1_sweep, case2_sweep, lemma1_eigen_grid, lemma1_max_eigenvalue, lemma1_sweep, quartic_sweep,
    OracleSummary,
};
use ddvv_core::matrix::{ddvv_residual_tol, pprime_residual_tol, DEFAULT_TOL};
use ddvv_core::search::{maximize_lambda, SearchOptions};
use ddvv_core::sweep::{run_sweep, summarize, write_rows, Distribution, OutputFormat, SweepConfig};
use ddvv_core::{InequalityReport, SecondFundamentalForm};

const VIOLATION: u8 = 2;
const BOUND_SLACK: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "ddvv", version, about = "Commutator inequalities for symmetric matrix tuples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    P,
    Pprime,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Gaussian,
    #[value(name = "traceless_gaussian")]
    TracelessGaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate P and/or P' on a tuple document.
    Check {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        which: Which,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Curvature invariants and both forms of the pointwise inequality.
    Curvature {
        input: PathBuf,
        /// Overrides the ambient curvature stored in the document.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Maximize C on the unit sphere S = 1.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol_grad: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol_stationarity: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit 2 if the best ratio exceeds this bound by more than 1e-6.
        #[arg(long)]
        assert_bound: Option<f64>,
        /// Also write the best tuple as a tuple document.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random sweep of both inequalities over ranges of (n, m).
    Sweep {
        /// Inclusive range `A..B`, or a single value.
        #[arg(long, default_value = "2..6", value_parser = parse_range)]
        n: RangeInclusive<usize>,
        #[arg(long, default_value = "2..3", value_parser = parse_range)]
        m: RangeInclusive<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "gaussian")]
        distribution: DistArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Output file; rows go to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run the lemma oracles.
    Lemmas {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Feeds x < y to the eigenvalue oracle to exercise the precondition path.
        #[arg(long, hide = true)]
        force_x_lt_y: bool,
    },
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if a == 0 || a > b {
        return Err(format!("{s:?}: expected A..B with 1 <= A <= B"));
    }
    Ok(a..=b)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn check(input: &Path, which: Which, tol: f64) -> Result<u8> {
    let t = parse_tuple(&read(input)?).with_context(|| format!("{}", input.display()))?;
    let mut reports = Vec::new();
    if matches!(which, Which::P | Which::Both) {
        reports.push(ddvv_residual_tol(&t, tol));
    }
    if matches!(which, Which::Pprime | Which::Both) {
        reports.push(pprime_residual_tol(&t, tol));
    }
    print_json(&reports)?;
    Ok(if reports.iter().all(|r| r.holds) { 0 } else { VIOLATION })
}

#[derive(Serialize)]
struct CurvatureOutput {
    #[serde(flatten)]
    summary: curvature::CurvatureSummary,
    conjecture1: InequalityReport,
    eq1a: InequalityReport,
    forms_agree: bool,
}

fn curvature_cmd(input: &Path, c: Option<f64>, tol: f64) -> Result<u8> {
    let mut f = parse_form(&read(input)?).with_context(|| format!("{}", input.display()))?;
    if let Some(c) = c {
        f = SecondFundamentalForm::new(f.h().clone(), c)?;
    }
    let conjecture1 = conjecture1_residual_tol(&f, tol)?;
    let eq1a = eq1a_residual_tol(&f, tol)?;
    let out = CurvatureOutput {
        summary: curvature::summary(&f)?,
        forms_agree: residual_sign(&conjecture1, tol) == residual_sign(&eq1a, tol),
        conjecture1,
        eq1a,
    };
    print_json(&out)?;
    Ok(0)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

#[derive(Serialize)]
struct LemmaReport {
    oracles: Vec<OracleSummary>,
    passed: bool,
}

fn oracle(name: &str, samples: usize, min_residual: f64, tolerance: f64) -> OracleSummary {
    OracleSummary {
        name: name.into(),
        samples,
        min_residual,
        tolerance,
        passed: min_residual >= -tolerance,
    }
}

fn lemmas(samples: usize, seed: u64, force_x_lt_y: bool) -> Result<u8> {
    if samples == 0 {
        bail!("samples must be at least 1");
    }
    if force_x_lt_y {
        lemma1_max_eigenvalue(0.0, 1.0)?;
    }
    let grid = lemma1_eigen_grid(50, 10.0)?;
    let quartic = quartic_sweep(samples, seed, 6, 6)?;
    let oracles = vec![
        lemma1_sweep(samples, seed, 8),
        oracle("lemma1_eigenvalue", grid.points, -grid.max_abs_diff, 1e-10),
        case1_sweep(samples, seed, 200),
        case2_sweep(samples, seed, 8)?,
        oracle("quartic_identity", quartic.samples, -quartic.max_rel_identity_error, 1e-10),
        oracle("reduction_a_bound", quartic.samples, quartic.min_a_margin, 0.0),
        oracle("quartic_minimum", quartic.samples, quartic.min_grid_margin, 1e-9),
    ];
    let passed = oracles.iter().all(|o| o.passed);
    print_json(&LemmaReport { oracles, passed })?;
    Ok(if passed { 0 } else { VIOLATION })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Check { input, which, tol } => check(&input, which, tol),
        Command::Curvature { input, c, tol } => curvature_cmd(&input, c, tol),
        Command::Search {
            n,
            m,
            restarts,
            max_iters,
            step,
            tol_grad,
            tol_stationarity,
            seed,
            assert_bound,
            out,
        } => {
            let opts = SearchOptions {
                max_iters,
                step_init: step,
                tol_grad,
                tol_stationarity,
                restarts,
                seed,
            };
            let result = maximize_lambda(n, m, &opts)?;
            if let Some(path) = out {
                let mut w = create(&path)?;
                writeln!(w, "{}", tuple_to_json(&result.tuple))?;
                w.flush()?;
            }
            print_json(&result)?;
            Ok(match assert_bound {
                Some(b) if result.lambda > b + BOUND_SLACK => {
                    eprintln!("lambda {} exceeds bound {b}", result.lambda);
                    VIOLATION
                }
                _ => 0,
            })
        }
        Command::Sweep {
            n,
            m,
            trials,
            seed,
            distribution,
            tol,
            out,
            format,
        } => {
            let cfg = SweepConfig {
                n_range: n,
                m_range: m,
                trials,
                seed,
                distribution: match distribution {
                    DistArg::Gaussian => Distribution::Gaussian,
                    DistArg::TracelessGaussian => Distribution::TracelessGaussian,
                },
                tol,
            };
            let format = match format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
            cfg.validate()?;
            // open the target before the work so a bad path fails fast
            let writer = out.as_deref().map(create).transpose()?;
            let rows = run_sweep(&cfg)?;
            match writer {
                Some(mut w) => {
                    write_rows(&rows, format, &mut w)?;
                    w.flush()?;
                    print_json(&summarize(&rows))?;
                }
                None => write_rows(&rows, format, std::io::stdout().lock())?,
            }
            Ok(0)
        }
        Command::Lemmas {
            samples,
            seed,
            force_x_lt_y,
        } => lemmas(samples, seed, force_x_lt_y),
    }
}

fn main() -> ExitCode {
    // clap's own usage-error status is 2, which is reserved for violations
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
