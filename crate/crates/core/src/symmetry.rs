//! The `O(n) × O(m)` action on tuples and the reductions it allows.
//!
//! `Q ∈ O(n)` conjugates every member, `A_r ↦ Q A_r Qᵀ`; `Q₁ ∈ O(m)` mixes the
//! members, `A_r ↦ Σ_s (Q₁)_{rs} A_s`. Both `S` and `C` are invariant, so any
//! statement about their ratio may assume the members are Frobenius-orthogonal,
//! sorted by norm, and that the first one is diagonal.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::{total_norm, SymMatrix, SymTuple};
use crate::rng::{derive_seed, gaussian_matrix, rng_from_seed};

/// Tolerance on `||QᵀQ − I||_max` accepted for group elements.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Relative size below which off-diagonal entries are treated as zero when
/// deciding whether a matrix is already diagonal.
const DIAGONAL_TOL: f64 = 1e-12;

/// A group element `(Q, Q₁) ∈ O(n) × O(m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalPair {
    q_space: DMatrix<f64>,
    q_normal: DMatrix<f64>,
}

/// Largest entry of `|QᵀQ − I|`.
pub fn orthogonality_defect(q: &DMatrix<f64>) -> f64 {
    let k = q.ncols();
    (q.transpose() * q - DMatrix::<f64>::identity(k, k)).amax()
}

fn check_orthogonal(q: &DMatrix<f64>) -> Result<()> {
    if q.nrows() != q.ncols() || q.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "group element factor is {}x{}",
            q.nrows(),
            q.ncols()
        )));
    }
    let defect = orthogonality_defect(q);
    if defect > ORTHOGONALITY_TOL || defect.is_nan() {
        return Err(Error::NotOrthogonal(defect));
    }
    Ok(())
}

impl OrthogonalPair {
    pub fn new(q_space: DMatrix<f64>, q_normal: DMatrix<f64>) -> Result<Self> {
        check_orthogonal(&q_space)?;
        check_orthogonal(&q_normal)?;
        Ok(Self { q_space, q_normal })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            q_space: DMatrix::identity(n, n),
            q_normal: DMatrix::identity(m, m),
        }
    }

    /// Haar-distributed element of `O(n) × O(m)`.
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        Self {
            q_space: random_orthogonal(n, derive_seed(seed, &[0])),
            q_normal: random_orthogonal(m, derive_seed(seed, &[1])),
        }
    }

    pub fn q_space(&self) -> &DMatrix<f64> {
        &self.q_space
    }

    pub fn q_normal(&self) -> &DMatrix<f64> {
        &self.q_normal
    }

    pub fn n(&self) -> usize {
        self.q_space.nrows()
    }

    pub fn m(&self) -> usize {
        self.q_normal.nrows()
    }

    /// `after ∘ self`: acting by the result equals acting by `self`, then `after`.
    pub fn then(&self, after: &OrthogonalPair) -> OrthogonalPair {
        OrthogonalPair {
            q_space: &after.q_space * &self.q_space,
            q_normal: &after.q_normal * &self.q_normal,
        }
    }
}

/// `B_r = Σ_s (Q₁)_{rs} · Q A_s Qᵀ`.
pub fn act(t: &SymTuple, g: &OrthogonalPair) -> Result<SymTuple> {
    if g.n() != t.n() || g.m() != t.m() {
        return Err(Error::DimensionMismatch(format!(
            "group element for (n, m) = ({}, {}) acting on tuple with (n, m) = ({}, {})",
            g.n(),
            g.m(),
            t.n(),
            t.m()
        )));
    }
    check_orthogonal(&g.q_space)?;
    check_orthogonal(&g.q_normal)?;
    Ok(act_unchecked(t, g))
}

fn act_unchecked(t: &SymTuple, g: &OrthogonalPair) -> SymTuple {
    let conj: Vec<DMatrix<f64>> = t
        .mats()
        .iter()
        .map(|a| &g.q_space * a.as_matrix() * g.q_space.transpose())
        .collect();
    let n = t.n();
    let mats = (0..t.m())
        .map(|r| {
            let mut acc = DMatrix::<f64>::zeros(n, n);
            for (s, c) in conj.iter().enumerate() {
                acc += c * g.q_normal[(r, s)];
            }
            SymMatrix::symmetrize(&acc)
        })
        .collect();
    SymTuple::new(mats).expect("action preserves member dimension")
}

/// Haar-random `k×k` orthogonal matrix: QR of a Gaussian matrix with the
/// columns of `Q` multiplied by `sign(R_jj)`.
pub fn random_orthogonal(k: usize, seed: u64) -> DMatrix<f64> {
    assert!(k >= 1, "orthogonal group dimension must be positive");
    let mut rng = rng_from_seed(seed);
    let qr = gaussian_matrix(&mut rng, k, k).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    let scale = m.amax();
    let k = m.nrows();
    (0..k).all(|i| (0..k).all(|j| i == j || m[(i, j)].abs() <= DIAGONAL_TOL * scale))
}

/// Orthogonal matrix whose rows are eigenvectors of the symmetric `m`, ordered
/// by nonincreasing eigenvalue, so that `Q m Qᵀ` is diagonal and sorted.
///
/// Already-diagonal input yields a permutation matrix (stable on ties); in
/// general each eigenvector's first non-negligible component is made positive.
fn sorted_eigenbasis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let k = m.nrows();
    let (values, vectors) = if is_diagonal(m) {
        (m.diagonal(), DMatrix::identity(k, k))
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..k).collect();
    // stable: equal eigenvalues keep their incoming order
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut q = DMatrix::zeros(k, k);
    for (row, &col) in order.iter().enumerate() {
        let v = vectors.column(col);
        let sign = v
            .iter()
            .find(|x| x.abs() > DIAGONAL_TOL)
            .map_or(1.0, |x| x.signum());
        for i in 0..k {
            q[(row, i)] = sign * v[i];
        }
    }
    q
}

/// Frobenius Gram matrix `G_{rs} = ⟨A_r, A_s⟩`.
pub fn gram_matrix(t: &SymTuple) -> DMatrix<f64> {
    let m = t.m();
    DMatrix::from_fn(m, m, |r, s| t.get(r).dot(t.get(s)))
}

/// Moves `t` to a reduced representative of its orbit and returns the group
/// element used. See [`canonicalize`].
pub fn canonicalize_with_element(t: &SymTuple) -> Result<(SymTuple, OrthogonalPair)> {
    if total_norm(t) == 0.0 {
        return Err(Error::Domain("cannot canonicalize the zero tuple".into()));
    }
    let (n, m) = (t.n(), t.m());

    let q_normal = sorted_eigenbasis(&gram_matrix(t));
    let mixed = OrthogonalPair {
        q_space: DMatrix::identity(n, n),
        q_normal,
    };
    let step1 = act_unchecked(t, &mixed);

    let q_space = sorted_eigenbasis(step1.get(0).as_matrix());
    let rotate = OrthogonalPair {
        q_space,
        q_normal: DMatrix::identity(m, m),
    };
    let out = act_unchecked(&step1, &rotate);
    Ok((out, mixed.then(&rotate)))
}

/// Reduced representative: members mutually Frobenius-orthogonal with
/// nonincreasing norms, and the first member diagonal with nonincreasing
/// diagonal. The tuple is not rescaled.
pub fn canonicalize(t: &SymTuple) -> Result<SymTuple> {
    canonicalize_with_element(t).map(|(c, _)| c)
}
