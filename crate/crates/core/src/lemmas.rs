//! Checkable forms of the auxiliary estimates behind the `m = 3` bound and the
//! pinched inequality, together with the sampling and grid sweeps that
//! exercise them.
//!
//! Every sweep is deterministic in its seed: sample `k` draws from the stream
//! `derive_seed(seed, [k])`, so a sweep with fewer samples sees a prefix of the
//! same instances.

use nalgebra::{Matrix3, SymmetricEigen};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    commutator_energy, commutator_norm_sq, frobenius_norm_sq, pprime_residual, total_norm,
    SymMatrix, SymTuple,
};
use crate::rng::{derive_seed, gaussian_sym, gaussian_tuple, rng_from_seed, Rng};

/// Accepted deviation of `||A₁'||` from 1.
pub const UNIT_TOL: f64 = 1e-10;

/// An instance of the two-term estimate
/// `(η_i − η_j)² x + (η_k − η_l)² y ≤ 2x + y` for a unit vector `η`.
///
/// Indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Instance {
    x: f64,
    y: f64,
    eta: Vec<f64>,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
}

impl Lemma1Instance {
    pub fn new(x: f64, y: f64, eta: Vec<f64>, (i, j, k, l): (usize, usize, usize, usize)) -> Result<Self> {
        if !(x >= y && y >= 0.0) {
            return Err(Error::Precondition(format!("need x >= y >= 0, got x = {x}, y = {y}")));
        }
        let n = eta.len();
        if [i, j, k, l].iter().any(|&p| p >= n) {
            return Err(Error::Precondition(format!("index out of range for n = {n}")));
        }
        if i == j || k == l {
            return Err(Error::Precondition("index pairs must have distinct members".into()));
        }
        if (i.min(j), i.max(j)) == (k.min(l), k.max(l)) {
            return Err(Error::Precondition("index pairs {i,j} and {k,l} must differ".into()));
        }
        let norm_sq: f64 = eta.iter().map(|e| e * e).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("eta must be a unit vector, |eta|² = {norm_sq}")));
        }
        Ok(Self { x, y, eta, i, j, k, l })
    }
}

/// `2x + y − ((η_i − η_j)² x + (η_k − η_l)² y)`; nonnegative by the estimate.
pub fn lemma1_residual(inst: &Lemma1Instance) -> f64 {
    let e = &inst.eta;
    let lhs = (e[inst.i] - e[inst.j]).powi(2) * inst.x + (e[inst.k] - e[inst.l]).powi(2) * inst.y;
    2.0 * inst.x + inst.y - lhs
}

/// The quadratic form matrix `[[x+y, −x, −y], [−x, x, 0], [−y, 0, y]]` whose
/// value at `(η_1, η_2, η_3)` is `(η_1 − η_2)² x + (η_1 − η_3)² y`.
pub fn lemma1_matrix(x: f64, y: f64) -> Matrix3<f64> {
    Matrix3::new(x + y, -x, -y, -x, x, 0.0, -y, 0.0, y)
}

/// Largest eigenvalue of [`lemma1_matrix`], computed by a symmetric eigensolver.
pub fn lemma1_max_eigenvalue(x: f64, y: f64) -> Result<f64> {
    if !(x >= y && y >= 0.0) {
        return Err(Error::Precondition(format!("need x >= y >= 0, got x = {x}, y = {y}")));
    }
    let eig = SymmetricEigen::new(lemma1_matrix(x, y));
    Ok(eig.eigenvalues.max())
}

/// Closed form `x + y + sqrt(x² − xy + y²)` of the largest eigenvalue.
pub fn lemma1_closed_form(x: f64, y: f64) -> f64 {
    x + y + (x * x - x * y + y * y).sqrt()
}

/// Value along the rotation family of the first case:
/// `d1 (x cos²α + y sin²α) + d2 (x sin²α + y cos²α)`,
/// with `d1 = (η_i − η_j)²`, `d2 = (η_k − η_l)²`.
pub fn case1_profile(alpha: f64, x: f64, y: f64, d1: f64, d2: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let (s2, c2) = (s * s, c * c);
    d1 * (x * c2 + y * s2) + d2 * (x * s2 + y * c2)
}

/// `max(f(0), f(π/2))`, the maximum of [`case1_profile`] over α.
pub fn case1_endpoint_max(x: f64, y: f64, d1: f64, d2: f64) -> f64 {
    (d1 * x + d2 * y).max(d1 * y + d2 * x)
}

/// Maximum of [`case1_profile`] over `α = kπ/steps`, `k = 0..steps`.
pub fn case1_grid_max(x: f64, y: f64, d1: f64, d2: f64, steps: usize) -> f64 {
    (0..steps)
        .map(|k| case1_profile(k as f64 * std::f64::consts::PI / steps as f64, x, y, d1, d2))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `(2x + y) − 4(b² + c²)` for the single off-diagonal case.
///
/// `b`, `c` are the shared off-diagonal entry of `B`, `C` (appearing twice in
/// each norm) and `diag_b`, `diag_c` their diagonals. Preconditions, checked to
/// `1e-10·(1 + x + y)`: `2bc + ⟨diag_b, diag_c⟩ = 0`, `2b² + |diag_b|² = x`,
/// `2c² + |diag_c|² = y`, `x ≥ y`.
pub fn case2_bound(b: f64, c: f64, x: f64, y: f64, diag_b: &[f64], diag_c: &[f64]) -> Result<f64> {
    if diag_b.len() != diag_c.len() {
        return Err(Error::DimensionMismatch("diagonals of B and C differ in length".into()));
    }
    let tol = 1e-10 * (1.0 + x.abs() + y.abs());
    let cross = 2.0 * b * c + dot(diag_b, diag_c);
    if cross.abs() > tol {
        return Err(Error::Precondition(format!("B and C not orthogonal: <B, C> = {cross:e}")));
    }
    let nb = 2.0 * b * b + dot(diag_b, diag_b);
    let nc = 2.0 * c * c + dot(diag_c, diag_c);
    if (nb - x).abs() > tol || (nc - y).abs() > tol {
        return Err(Error::Precondition(format!(
            "norm bookkeeping: |B|² = {nb} vs x = {x}, |C|² = {nc} vs y = {y}"
        )));
    }
    if x < y {
        return Err(Error::Precondition(format!("need x >= y, got x = {x}, y = {y}")));
    }
    Ok(2.0 * x + y - 4.0 * (b * b + c * c))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn check_unit(a1_unit: &SymMatrix, rest: &SymTuple) -> Result<()> {
    let norm = frobenius_norm_sq(a1_unit).sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::Precondition(format!("first member must have unit norm, got {norm}")));
    }
    if a1_unit.n() != rest.n() {
        return Err(Error::DimensionMismatch(format!(
            "first member is {0}x{0}, rest is {1}x{1}",
            a1_unit.n(),
            rest.n()
        )));
    }
    Ok(())
}

/// `a = 2 Σ_{i≥2} ||[A₁', A_i]||² − 3 Σ_{i≥2} ||A_i||²` for unit-norm `A₁'`.
pub fn reduction_a(a1_unit: &SymMatrix, rest: &SymTuple) -> Result<f64> {
    check_unit(a1_unit, rest)?;
    let comm: f64 = rest.mats().iter().map(|a| commutator_norm_sq(a1_unit, a)).sum();
    Ok(2.0 * comm - 3.0 * total_norm(rest))
}

/// The pinched inequality for `(t·A₁', A_2, …, A_m)` written as an even
/// quartic in `t`:
///
/// ```text
/// ½ t⁴ − a t² + [3/2 (Σ_{i≥2} ||A_i||²)² − Σ_{i≥2} ||A_i||⁴ − 2 Σ_{2≤i<j} ||[A_i, A_j]||²]
/// ```
pub fn reduction_quartic(t: f64, a1_unit: &SymMatrix, rest: &SymTuple) -> Result<f64> {
    let a = reduction_a(a1_unit, rest)?;
    let norms = rest.norms_sq();
    let s: f64 = norms.iter().sum();
    let quartic: f64 = norms.iter().map(|v| v * v).sum();
    let tail = 1.5 * s * s - quartic - 2.0 * commutator_energy(rest);
    let t2 = t * t;
    Ok(0.5 * t2 * t2 - a * t2 + tail)
}

/// Minimum residual found by a sweep, with the number of evaluations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub name: String,
    pub samples: usize,
    /// Smallest residual seen (the inequality asserts it is nonnegative).
    pub min_residual: f64,
    /// Failure threshold: the oracle passes when `min_residual >= -tolerance`.
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleSummary {
    fn new(name: &str, samples: usize, min_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            samples,
            min_residual,
            tolerance,
            passed: min_residual >= -tolerance,
        }
    }
}

fn sample_rng(seed: u64, k: usize) -> Rng {
    rng_from_seed(derive_seed(seed, &[k as u64]))
}

fn min_over<F>(samples: usize, f: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    (0..samples)
        .into_par_iter()
        .map(f)
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

/// `y ≤ x` drawn uniformly from the triangle `0 ≤ y ≤ x ≤ scale`.
fn ordered_pair(rng: &mut Rng, scale: f64) -> (f64, f64) {
    let p: f64 = rng.random::<f64>() * scale;
    let q: f64 = rng.random::<f64>() * scale;
    (p.max(q), p.min(q))
}

/// Random valid instance of the two-term estimate with `3 ≤ n ≤ max_n`.
///
/// Half of the draws share an index between the pairs (the eigenvalue case),
/// the rest use disjoint pairs when `n ≥ 4`.
pub fn random_lemma1_instance(rng: &mut Rng, max_n: usize) -> Lemma1Instance {
    let max_n = max_n.max(3);
    let n = rng.random_range(3..=max_n);
    let mut eta: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let norm = eta.iter().map(|e| e * e).sum::<f64>().sqrt();
    eta.iter_mut().for_each(|e| *e /= norm);
    let (x, y) = ordered_pair(rng, 10.0);

    let mut idx: Vec<usize> = (0..n).collect();
    // partial Fisher-Yates for four distinct positions
    for p in 0..4.min(n) {
        let q = rng.random_range(p..n);
        idx.swap(p, q);
    }
    let shared = n < 4 || rng.random::<bool>();
    let (i, j, k, l) = if shared {
        (idx[0], idx[1], idx[0], idx[2])
    } else {
        (idx[0], idx[1], idx[2], idx[3])
    };
    Lemma1Instance::new(x, y, eta, (i, j, k, l)).expect("sampled instance is valid")
}

/// Minimum of [`lemma1_residual`] over `samples` random instances.
pub fn lemma1_sweep(samples: usize, seed: u64, max_n: usize) -> OracleSummary {
    let min = min_over(samples, |k| {
        Ok(lemma1_residual(&random_lemma1_instance(&mut sample_rng(seed, k), max_n)))
    })
    .expect("infallible");
    OracleSummary::new("lemma1_inequality", samples, min, 1e-12)
}

/// Agreement between eigensolver and closed form on the grid
/// `x = 10·a/(size−1)`, `y = x·b/(size−1)`, `a, b = 0..size`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenGridSummary {
    pub points: usize,
    /// Largest |eigensolver − closed form|.
    pub max_abs_diff: f64,
    /// Largest eigenvalue minus `2x + y` (nonpositive by the estimate).
    pub max_excess: f64,
}

pub fn lemma1_eigen_grid(size: usize, x_max: f64) -> Result<EigenGridSummary> {
    let size = size.max(2);
    let points: Vec<(f64, f64)> = (0..size)
        .flat_map(|a| {
            let x = x_max * a as f64 / (size - 1) as f64;
            (0..size).map(move |b| (x, x * b as f64 / (size - 1) as f64))
        })
        .collect();
    let (max_abs_diff, max_excess) = points
        .par_iter()
        .map(|&(x, y)| {
            let ev = lemma1_max_eigenvalue(x, y)?;
            Ok(((ev - lemma1_closed_form(x, y)).abs(), ev - (2.0 * x + y)))
        })
        .try_reduce(
            || (0.0, f64::NEG_INFINITY),
            |a, b| Ok((a.0.max(b.0), a.1.max(b.1))),
        )?;
    Ok(EigenGridSummary {
        points: points.len(),
        max_abs_diff,
        max_excess,
    })
}

/// Random draws of `(x, y, d1, d2)` with `d1, d2 ∈ [0, 2]`, comparing the
/// grid maximum of the rotation family with its endpoint maximum. Residual is
/// `endpoint_max − grid_max`.
pub fn case1_sweep(samples: usize, seed: u64, grid_steps: usize) -> OracleSummary {
    let min = min_over(samples, |k| {
        let mut rng = sample_rng(seed, k);
        let (x, y) = ordered_pair(&mut rng, 10.0);
        let d1 = 2.0 * rng.random::<f64>();
        let d2 = 2.0 * rng.random::<f64>();
        Ok(case1_endpoint_max(x, y, d1, d2) - case1_grid_max(x, y, d1, d2, grid_steps))
    })
    .expect("infallible");
    OracleSummary::new("case1_profile", samples, min, 1e-12)
}

/// Arguments `(b, c, x, y, diag_b, diag_c)` of [`case2_bound`].
pub type Case2Instance = (f64, f64, f64, f64, Vec<f64>, Vec<f64>);

/// Feasible instance for [`case2_bound`], or `None` when the draw has `x < y`.
///
/// `(c, diag_c)` is drawn Gaussian and projected onto the complement of
/// `(2b, diag_b)` under the pairing `2bc + ⟨diag_b, diag_c⟩`.
pub fn random_case2_instance(rng: &mut Rng, n: usize) -> Option<Case2Instance> {
    let b: f64 = StandardNormal.sample(rng);
    let sparse_diag = rng.random::<f64>() < 0.25;
    let diag_b: Vec<f64> = (0..n)
        .map(|_| if sparse_diag { 0.0 } else { StandardNormal.sample(rng) })
        .collect();
    let mut c: f64 = StandardNormal.sample(rng);
    let mut diag_c: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    // scale C down sometimes so that x >= y is common
    let shrink = rng.random::<f64>();
    c *= shrink;
    diag_c.iter_mut().for_each(|v| *v *= shrink);

    let pair = 2.0 * b * c + dot(&diag_b, &diag_c);
    let self_pair = 2.0 * b * b + dot(&diag_b, &diag_b);
    if self_pair > 0.0 {
        let coef = pair / self_pair;
        c -= coef * b;
        diag_c.iter_mut().zip(&diag_b).for_each(|(v, w)| *v -= coef * w);
    }
    let x = 2.0 * b * b + dot(&diag_b, &diag_b);
    let y = 2.0 * c * c + dot(&diag_c, &diag_c);
    (x >= y).then_some((b, c, x, y, diag_b, diag_c))
}

/// Rejection-sampled sweep of [`case2_bound`]; `samples` counts accepted draws.
pub fn case2_sweep(samples: usize, seed: u64, max_n: usize) -> Result<OracleSummary> {
    let min = min_over(samples, |k| {
        let mut rng = sample_rng(seed, k);
        let n = rng.random_range(1..=max_n.max(1));
        loop {
            if let Some((b, c, x, y, db, dc)) = random_case2_instance(&mut rng, n) {
                return case2_bound(b, c, x, y, &db, &dc);
            }
        }
    })?;
    Ok(OracleSummary::new("case2_bound", samples, min, 1e-10))
}

/// A random split `(A₁', rest)` with `rest` of `m − 1` Gaussian members.
pub fn random_split(rng: &mut Rng, n: usize, m: usize) -> (SymMatrix, SymTuple) {
    let a1 = gaussian_sym(rng, n);
    let a1 = a1.scaled(1.0 / a1.norm_sq().sqrt());
    let rest = gaussian_tuple(rng, n, m.saturating_sub(1).max(1));
    (a1, rest)
}

/// Per-instance checks of the quartic reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticSummary {
    pub samples: usize,
    /// Largest `|quartic − pinched residual| / S²` over the instances, with `S`
    /// the total norm of the assembled tuple.
    pub max_rel_identity_error: f64,
    /// Smallest `Σ_{i≥2} ||A_i||² − a` (nonnegative by the commutator bound).
    pub min_a_margin: f64,
    /// Smallest `min_grid − min(q(0), q(sqrt(a)))` over a `t` grid.
    pub min_grid_margin: f64,
}

/// For random `(n, m)` with `n ∈ 2..=max_n`, `m ∈ 2..=max_m`, evaluates the
/// quartic at a random `t`, compares with the pinched residual of
/// `(t·A₁', rest)`, checks `a ≤ Σ ||A_i||²`, and scans `t ∈ {0, 0.1, …, 3}`.
pub fn quartic_sweep(samples: usize, seed: u64, max_n: usize, max_m: usize) -> Result<QuarticSummary> {
    let per_sample = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let n = rng.random_range(2..=max_n.max(2));
            let m = rng.random_range(2..=max_m.max(2));
            let (a1, rest) = random_split(&mut rng, n, m);
            let t = 3.0 * rng.random::<f64>();
            let q = reduction_quartic(t, &a1, &rest)?;
            let full = SymTuple::with_first(a1.scaled(t), &rest)?;
            let s = total_norm(&full);
            let identity = (q - pprime_residual(&full).residual).abs() / (s * s).max(f64::MIN_POSITIVE);

            let a = reduction_a(&a1, &rest)?;
            let a_margin = total_norm(&rest) - a;

            let at_zero = reduction_quartic(0.0, &a1, &rest)?;
            let at_min = if a > 0.0 {
                reduction_quartic(a.sqrt(), &a1, &rest)?
            } else {
                at_zero
            };
            let mut grid_min = f64::INFINITY;
            for g in 0..=30 {
                grid_min = grid_min.min(reduction_quartic(0.1 * g as f64, &a1, &rest)?);
            }
            Ok((identity, a_margin, grid_min - at_zero.min(at_min)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuarticSummary {
        samples,
        max_rel_identity_error: per_sample.iter().map(|v| v.0).fold(0.0, f64::max),
        min_a_margin: per_sample.iter().map(|v| v.1).fold(f64::INFINITY, f64::min),
        min_grid_margin: per_sample.iter().map(|v| v.2).fold(f64::INFINITY, f64::min),
    })
}
