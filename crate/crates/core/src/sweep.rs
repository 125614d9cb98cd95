//! Random sweeps of both matrix inequalities over ranges of `(n, m)`.

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{commutator_energy, ddvv_residual_tol, pprime_residual_tol, total_norm, DEFAULT_TOL};
use crate::rng::{derive_seed, gaussian_tuple, rng_from_seed, traceless_gaussian_tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Gaussian,
    TracelessGaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n_range: RangeInclusive<usize>,
    pub m_range: RangeInclusive<usize>,
    pub trials: usize,
    pub seed: u64,
    pub distribution: Distribution,
    /// Relative tolerance for the `holds_*` columns.
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_range: 2..=2,
            m_range: 2..=2,
            trials: 1,
            seed: 0,
            distribution: Distribution::Gaussian,
            tol: DEFAULT_TOL,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_range.is_empty() || self.m_range.is_empty() {
            return Err(Error::InvalidOptions("n and m ranges must be nonempty".into()));
        }
        if *self.n_range.start() == 0 || *self.m_range.start() == 0 {
            return Err(Error::InvalidOptions("n and m must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidOptions("trials must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_ranges(self, n_range: RangeInclusive<usize>, m_range: RangeInclusive<usize>) -> Self {
        Self {
            n_range,
            m_range,
            ..self
        }
    }
}

/// One sweep trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub ddvv_residual: f64,
    pub pprime_residual: f64,
    #[serde(rename = "holds_P")]
    pub holds_p: bool,
    #[serde(rename = "holds_Pprime")]
    pub holds_pprime: bool,
}

pub const CSV_HEADER: &str = "n,m,trial,seed,S,C,ddvv_residual,pprime_residual,holds_P,holds_Pprime";

/// Seed of trial `trial` at `(n, m)`.
pub fn trial_seed(seed: u64, n: usize, m: usize, trial: usize) -> u64 {
    derive_seed(seed, &[n as u64, m as u64, trial as u64])
}

pub fn run_trial(cfg: &SweepConfig, n: usize, m: usize, trial: usize) -> SweepRow {
    let seed = trial_seed(cfg.seed, n, m, trial);
    let mut rng = rng_from_seed(seed);
    let t = match cfg.distribution {
        Distribution::Gaussian => gaussian_tuple(&mut rng, n, m),
        Distribution::TracelessGaussian => traceless_gaussian_tuple(&mut rng, n, m),
    };
    let p = ddvv_residual_tol(&t, cfg.tol);
    let pp = pprime_residual_tol(&t, cfg.tol);
    SweepRow {
        n,
        m,
        trial,
        seed,
        s: total_norm(&t),
        c: commutator_energy(&t),
        ddvv_residual: p.residual,
        pprime_residual: pp.residual,
        holds_p: p.holds,
        holds_pprime: pp.holds,
    }
}

/// All rows, ordered by `(n, m, trial)`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let cells: Vec<(usize, usize, usize)> = cfg
        .n_range
        .clone()
        .flat_map(|n| {
            cfg.m_range
                .clone()
                .flat_map(move |m| (0..cfg.trials).map(move |t| (n, m, t)))
        })
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(n, m, t)| run_trial(cfg, n, m, t))
        .collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n, r.m, r.trial, r.seed, r.s, r.c, r.ddvv_residual, r.pprime_residual, r.holds_p, r.holds_pprime
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: OutputFormat, out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

/// Per-`(n, m)` tally of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub violations_p: usize,
    pub violations_pprime: usize,
    /// Smallest `ddvv_residual / S²`.
    pub min_rel_ddvv: f64,
    /// Smallest `pprime_residual / S²`.
    pub min_rel_pprime: f64,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<CellSummary> {
    let mut out: Vec<CellSummary> = Vec::new();
    for r in rows {
        let rel = |v: f64| if r.s > 0.0 { v / (r.s * r.s) } else { 0.0 };
        match out.last_mut() {
            Some(cell) if cell.n == r.n && cell.m == r.m => {
                cell.trials += 1;
                cell.violations_p += usize::from(!r.holds_p);
                cell.violations_pprime += usize::from(!r.holds_pprime);
                cell.min_rel_ddvv = cell.min_rel_ddvv.min(rel(r.ddvv_residual));
                cell.min_rel_pprime = cell.min_rel_pprime.min(rel(r.pprime_residual));
            }
            _ => out.push(CellSummary {
                n: r.n,
                m: r.m,
                trials: 1,
                violations_p: usize::from(!r.holds_p),
                violations_pprime: usize::from(!r.holds_pprime),
                min_rel_ddvv: rel(r.ddvv_residual),
                min_rel_pprime: rel(r.pprime_residual),
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_sweep() {
        let rows = run_sweep(&SweepConfig::default().with_ranges(2..=2, 1..=1)).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].holds_p);
        assert_eq!(rows[0].c, 0.0);
    }

    #[test]
    fn csv_is_deterministic() {
        let cfg = SweepConfig {
            trials: 5,
            ..SweepConfig::default().with_ranges(2..=3, 1..=3)
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_sweep(&cfg).unwrap(), &mut a).unwrap();
        write_csv(&run_sweep(&cfg).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        assert_eq!(text.lines().count(), 1 + 2 * 3 * 5);
    }

    #[test]
    fn rows_are_sorted() {
        let cfg = SweepConfig {
            trials: 3,
            ..SweepConfig::default().with_ranges(2..=4, 2..=3)
        };
        let rows = run_sweep(&cfg).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.n, r.m, r.trial)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn traceless_distribution_has_traceless_rows() {
        let cfg = SweepConfig {
            distribution: Distribution::TracelessGaussian,
            trials: 4,
            ..SweepConfig::default().with_ranges(3..=3, 2..=2)
        };
        let rows = run_sweep(&cfg).unwrap();
        assert!(rows.iter().all(|r| r.holds_p && r.holds_pprime));
    }

    #[test]
    fn invalid_configs() {
        #[allow(clippy::reversed_empty_ranges)]
        let empty = SweepConfig::default().with_ranges(3..=2, 1..=1);
        assert!(run_sweep(&empty).is_err());
        let zero = SweepConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(run_sweep(&zero).is_err());
    }
}
