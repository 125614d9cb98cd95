//! Independent reference implementations used by the integration tests.
//!
//! Everything here works on plain nested `Vec`s with explicit index loops and
//! never calls into the commutator or gradient code under test.

#![allow(dead_code)]

pub type Mat = Vec<Vec<f64>>;

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// `Σ_{r<s} Σ_{i,j} (Σ_k a^r_ik a^s_kj − a^s_ik a^r_kj)²` for general matrices.
pub fn naive_energy(mats: &[Mat]) -> f64 {
    let n = mats[0].len();
    let mut total = 0.0;
    for r in 0..mats.len() {
        for s in r + 1..mats.len() {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for k in 0..n {
                        v += mats[r][i][k] * mats[s][k][j] - mats[s][i][k] * mats[r][k][j];
                    }
                    total += v * v;
                }
            }
        }
    }
    total
}

pub fn naive_norm_sq(a: &Mat) -> f64 {
    a.iter().flatten().map(|v| v * v).sum()
}

/// Central differences of [`naive_energy`] in every entry of every member.
pub fn fd_gradient(mats: &[Mat], h: f64) -> Vec<Mat> {
    let n = mats[0].len();
    let mut out = vec![vec![vec![0.0; n]; n]; mats.len()];
    let mut work = mats.to_vec();
    for r in 0..mats.len() {
        for i in 0..n {
            for j in 0..n {
                let orig = work[r][i][j];
                work[r][i][j] = orig + h;
                let up = naive_energy(&work);
                work[r][i][j] = orig - h;
                let down = naive_energy(&work);
                work[r][i][j] = orig;
                out[r][i][j] = (up - down) / (2.0 * h);
            }
        }
    }
    out
}
