//! Deterministic seed derivation and random tuple sampling.
//!
//! Every randomized routine takes an explicit `u64` seed. Sub-tasks (restarts,
//! sweep trials, oracle samples) derive their own stream from the parent seed
//! and their coordinates with [`derive_seed`], so results never depend on how
//! work is scheduled across threads.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::{SymMatrix, SymTuple};

/// Generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base` one word at a time: `h ← splitmix64(h ⊕ splitmix64(part))`.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |h, &p| splitmix64(h ^ splitmix64(p)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `rows × cols` matrix of independent standard normal entries.
pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Gaussian matrix symmetrized as `(G + Gᵀ)/2`.
pub fn gaussian_sym(rng: &mut Rng, n: usize) -> SymMatrix {
    let g = gaussian_matrix(rng, n, n);
    SymMatrix::symmetrize(&g)
}

/// Tuple of `m` independent symmetrized Gaussian matrices.
pub fn gaussian_tuple(rng: &mut Rng, n: usize, m: usize) -> SymTuple {
    let mats = (0..m).map(|_| gaussian_sym(rng, n)).collect();
    SymTuple::new(mats).expect("gaussian members share dimension")
}

/// Like [`gaussian_tuple`] but every member is replaced by its traceless part.
pub fn traceless_gaussian_tuple(rng: &mut Rng, n: usize, m: usize) -> SymTuple {
    let mats = (0..m)
        .map(|_| gaussian_sym(rng, n).traceless_part())
        .collect();
    SymTuple::new(mats).expect("gaussian members share dimension")
}
