//! Extremal search for `λ = max C(T)` over the sphere `S(T) = 1`.
//!
//! Each restart draws a Gaussian tuple, projects it to the sphere and runs
//! monotone projected gradient ascent: `T ← (T + h·∇C) / sqrt(S(T + h·∇C))`,
//! halving `h` until `C` strictly increases. Convergence is certified by the
//! Lagrange system of the constrained problem: at a critical point with
//! multiplier `λ' = 2C`,
//!
//! ```text
//! Σ_{s≠r} ||[A_r, A_s]||² − 2C·||A_r||² = 0   for every r.
//! ```
//!
//! The reported `lambda` is the best value reached, hence only a lower bound
//! for the true maximum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{commutator_raw, total_norm, SymMatrix, SymTuple};
use crate::rng::{derive_seed, gaussian_tuple, rng_from_seed};

/// Smallest trial step before a restart is declared stalled.
pub const MIN_STEP: f64 = 1e-14;

/// Accepted steps grow by 2× up to `step_init · MAX_STEP_GROWTH`.
const MAX_STEP_GROWTH: f64 = 1e3;

/// Allowed `|S − 1|` for inputs to [`stationarity_residuals`].
pub const SPHERE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub max_iters: usize,
    pub step_init: f64,
    /// Threshold on the norm of the tangential (projected) gradient.
    pub tol_grad: f64,
    /// Threshold on `max_r |residual_r|` for `converged`.
    pub tol_stationarity: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step_init: 0.1,
            tol_grad: 1e-8,
            tol_stationarity: 1e-6,
            restarts: 20,
            seed: 0,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_iters == 0 {
            return Err(Error::InvalidOptions("max_iters must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidOptions("restarts must be positive".into()));
        }
        if !positive(self.step_init) {
            return Err(Error::InvalidOptions("step_init must be positive".into()));
        }
        if !positive(self.tol_grad) || !positive(self.tol_stationarity) {
            return Err(Error::InvalidOptions("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of a search: the best restart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Best tuple found, normalized to `S = 1`.
    pub tuple: SymTuple,
    /// `C` at `tuple`.
    pub lambda: f64,
    /// Per-member Lagrange residuals at `tuple`.
    pub stationarity: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub restart_index: usize,
    /// Base seed of the search.
    pub seed: u64,
    /// Seed of the winning restart's stream.
    pub restart_seed: u64,
}

/// Pairwise commutators `K[r][s] = [A_r, A_s]` for `r < s`, flattened.
struct Pairs {
    m: usize,
    comms: Vec<nalgebra::DMatrix<f64>>,
}

impl Pairs {
    fn new(t: &SymTuple) -> Self {
        let m = t.m();
        let mut comms = Vec::with_capacity(m * (m.saturating_sub(1)) / 2);
        for r in 0..m {
            for s in r + 1..m {
                comms.push(commutator_raw(t.get(r).as_matrix(), t.get(s).as_matrix()));
            }
        }
        Self { m, comms }
    }

    fn index(&self, r: usize, s: usize) -> usize {
        debug_assert!(r < s);
        r * self.m - r * (r + 1) / 2 + (s - r - 1)
    }

    fn norm_sq(&self, r: usize, s: usize) -> f64 {
        let (a, b) = if r < s { (r, s) } else { (s, r) };
        self.comms[self.index(a, b)].norm_squared()
    }

    fn energy(&self) -> f64 {
        self.comms.iter().map(|k| k.norm_squared()).sum()
    }
}

fn gradient_from_pairs(t: &SymTuple, pairs: &Pairs) -> Vec<SymMatrix> {
    let (n, m) = (t.n(), t.m());
    (0..m)
        .map(|r| {
            let mut acc = nalgebra::DMatrix::<f64>::zeros(n, n);
            for s in 0..m {
                if s == r {
                    continue;
                }
                let a_s = t.get(s).as_matrix();
                // [A_r, A_s] = -[A_s, A_r]
                let (k, sign) = if r < s {
                    (&pairs.comms[pairs.index(r, s)], 2.0)
                } else {
                    (&pairs.comms[pairs.index(s, r)], -2.0)
                };
                acc += commutator_raw(k, a_s) * sign;
            }
            SymMatrix::symmetrize(&acc)
        })
        .collect()
}

/// `∇C`: `G_r = 2 Σ_{s≠r} [[A_r, A_s], A_s]`, so that `Σ_r ⟨G_r, V_r⟩` is the
/// directional derivative of `C` along `V`.
pub fn euclidean_gradient(t: &SymTuple) -> Vec<SymMatrix> {
    gradient_from_pairs(t, &Pairs::new(t))
}

fn residuals_from_pairs(t: &SymTuple, pairs: &Pairs) -> Vec<f64> {
    let c = pairs.energy();
    (0..t.m())
        .map(|r| {
            let own: f64 = (0..t.m()).filter(|&s| s != r).map(|s| pairs.norm_sq(r, s)).sum();
            own - 2.0 * c * t.get(r).norm_sq()
        })
        .collect()
}

/// Lagrange residuals `Σ_{s≠r} ||[A_r, A_s]||² − 2C·||A_r||²` on the unit sphere.
pub fn stationarity_residuals(t: &SymTuple) -> Result<Vec<f64>> {
    let s = total_norm(t);
    if (s - 1.0).abs() > SPHERE_TOL {
        return Err(Error::Precondition(format!(
            "stationarity residuals need S = 1, got S = {s}"
        )));
    }
    Ok(residuals_from_pairs(t, &Pairs::new(t)))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// One restart's run.
struct Ascent {
    tuple: SymTuple,
    lambda: f64,
    iterations: usize,
}

fn ascend(t0: &SymTuple, opts: &SearchOptions, mut history: Option<&mut Vec<f64>>) -> Result<Ascent> {
    let mut t = t0.normalized()?;
    let mut pairs = Pairs::new(&t);
    let mut c = pairs.energy();
    if let Some(h) = history.as_deref_mut() {
        h.push(c);
    }
    let mut step = opts.step_init;
    let max_step = opts.step_init * MAX_STEP_GROWTH;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let g = gradient_from_pairs(&t, &pairs);
        let radial = t.dot_dir(&g);
        let tangential_sq: f64 = t
            .mats()
            .iter()
            .zip(&g)
            .map(|(a, gr)| gr.add_scaled(a, -radial).norm_sq())
            .sum();
        if tangential_sq.sqrt() < opts.tol_grad {
            break;
        }

        let mut accepted = None;
        while step >= MIN_STEP {
            let candidate = t.add_scaled(&g, step).normalized()?;
            let cand_pairs = Pairs::new(&candidate);
            let cand_c = cand_pairs.energy();
            if cand_c > c {
                accepted = Some((candidate, cand_pairs, cand_c));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_pairs, next_c)) = accepted else {
            break;
        };
        t = next;
        pairs = next_pairs;
        c = next_c;
        if let Some(h) = history.as_deref_mut() {
            h.push(c);
        }
        iterations += 1;
        step = (2.0 * step).min(max_step);
    }

    Ok(Ascent {
        tuple: t,
        lambda: c,
        iterations,
    })
}

impl SymTuple {
    /// `Σ_r ⟨A_r, D_r⟩` for a direction given as a member list.
    fn dot_dir(&self, dir: &[SymMatrix]) -> f64 {
        self.mats().iter().zip(dir).map(|(a, d)| a.dot(d)).sum()
    }
}

fn finish(ascent: Ascent, opts: &SearchOptions, restart_index: usize, restart_seed: u64) -> SearchResult {
    let stationarity = residuals_from_pairs(&ascent.tuple, &Pairs::new(&ascent.tuple));
    let converged = max_abs(&stationarity) < opts.tol_stationarity;
    SearchResult {
        lambda: ascent.lambda,
        tuple: ascent.tuple,
        stationarity,
        iterations: ascent.iterations,
        converged,
        restart_index,
        seed: opts.seed,
        restart_seed,
    }
}

/// Seed of restart `restart_index` under base seed `seed`.
pub fn restart_seed(seed: u64, restart_index: usize) -> u64 {
    derive_seed(seed, &[restart_index as u64])
}

/// The Gaussian starting tuple of a restart, before projection to the sphere.
pub fn initial_tuple(n: usize, m: usize, seed: u64, restart_index: usize) -> SymTuple {
    gaussian_tuple(&mut rng_from_seed(restart_seed(seed, restart_index)), n, m)
}

/// Runs a single ascent from `t0` (rescaled to the sphere first).
pub fn ascend_from(t0: &SymTuple, opts: &SearchOptions) -> Result<SearchResult> {
    opts.validate()?;
    let ascent = ascend(t0, opts, None)?;
    Ok(finish(ascent, opts, 0, opts.seed))
}

/// Values of `C` at every accepted iterate of a single ascent from `t0`.
pub fn ascent_history(t0: &SymTuple, opts: &SearchOptions) -> Result<Vec<f64>> {
    opts.validate()?;
    let mut history = Vec::new();
    ascend(t0, opts, Some(&mut history))?;
    Ok(history)
}

/// Best of `opts.restarts` independent ascents in dimension `(n, m)`.
///
/// Restarts run in parallel; the winner is the largest `lambda`, ties going to
/// the lowest restart index, so the result does not depend on scheduling.
pub fn maximize_lambda(n: usize, m: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidOptions("n and m must be positive".into()));
    }
    opts.validate()?;
    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|idx| {
            let seed = restart_seed(opts.seed, idx);
            let t0 = gaussian_tuple(&mut rng_from_seed(seed), n, m);
            ascend(&t0, opts, None).map(|a| finish(a, opts, idx, seed))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.lambda > best.lambda { r } else { best })
        .expect("at least one restart");
    Ok(best)
}
