//! Symmetric matrices, tuples of them, and the DDVV functionals.
//!
//! Norms are Frobenius norms throughout. For a tuple `T = (A_1, …, A_m)`:
//!
//! * `S(T) = Σ_r ||A_r||²` ([`total_norm`]),
//! * `C(T) = Σ_{r<s} ||[A_r, A_s]||²` ([`commutator_energy`]).
//!
//! The DDVV inequality reads `S² ≥ 2C`; the pinched form reads
//! `3/2·S² − Σ_r ||A_r||⁴ ≥ 2C`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for `holds` flags when the caller does not pick one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Asymmetry accepted on construction, relative to `1 + ||M||`.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// A real symmetric matrix. Construction symmetrizes the input as `(M + Mᵀ)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    inner: DMatrix<f64>,
}

impl SymMatrix {
    /// Validates and symmetrizes `m`.
    ///
    /// Fails if `m` is empty or not square, has a non-finite entry, or if
    /// `||M − Mᵀ||` exceeds `1e-8·(1 + ||M||)`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::Empty("matrix has no rows".into()));
        }
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if let Some((idx, _)) = m.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            // column-major storage
            let n = m.nrows();
            return Err(Error::NonFinite(format!("({}, {})", idx % n, idx / n)));
        }
        let asymmetry = (&m - m.transpose()).norm();
        let tolerance = SYMMETRY_TOL * (1.0 + m.norm());
        if asymmetry > tolerance {
            return Err(Error::NotSymmetric {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::symmetrize(&m))
    }

    /// Builds from row vectors, validating shape like [`SymMatrix::new`].
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// `(M + Mᵀ)/2` without any tolerance check. `m` must be square.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrize needs a square matrix");
        Self {
            inner: (m + m.transpose()) * 0.5,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            inner: DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }),
        }
    }

    pub fn n(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// Frobenius inner product `⟨X, Y⟩ = Σ x_ij y_ij`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.inner.dot(&other.inner)
    }

    pub fn norm_sq(&self) -> f64 {
        frobenius_norm_sq(self)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            inner: &self.inner * t,
        }
    }

    /// `self + t·other`.
    pub fn add_scaled(&self, other: &SymMatrix, t: f64) -> Self {
        Self {
            inner: &self.inner + &other.inner * t,
        }
    }

    pub fn traceless_part(&self) -> Self {
        traceless_part(self)
    }

    /// `Q M Qᵀ`. The result is re-symmetrized to remove rounding asymmetry.
    pub fn conjugate(&self, q: &DMatrix<f64>) -> Self {
        Self::symmetrize(&(q * &self.inner * q.transpose()))
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner)
    }
}

/// An ordered list of `m ≥ 1` symmetric matrices of a common size `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTuple {
    mats: Vec<SymMatrix>,
}

impl SymTuple {
    pub fn new(mats: Vec<SymMatrix>) -> Result<Self> {
        let first = mats
            .first()
            .ok_or_else(|| Error::Empty("tuple needs at least one matrix".into()))?;
        let n = first.n();
        if let Some((r, bad)) = mats.iter().enumerate().find(|(_, a)| a.n() != n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix {r} is {0}x{0}, expected {n}x{n}",
                bad.n()
            )));
        }
        Ok(Self { mats })
    }

    /// Builds a tuple from nested row lists, `mats[r][i][j]`.
    pub fn from_nested(mats: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mats = mats
            .iter()
            .map(|rows| SymMatrix::from_rows(rows))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            mats: vec![SymMatrix::zeros(n); m],
        }
    }

    pub fn n(&self) -> usize {
        self.mats[0].n()
    }

    pub fn m(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[SymMatrix] {
        &self.mats
    }

    pub fn into_mats(self) -> Vec<SymMatrix> {
        self.mats
    }

    pub fn get(&self, r: usize) -> &SymMatrix {
        &self.mats[r]
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        self.mats.iter().map(SymMatrix::rows).collect()
    }

    /// Squared norms `||A_r||²` in tuple order.
    pub fn norms_sq(&self) -> Vec<f64> {
        self.mats.iter().map(frobenius_norm_sq).collect()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            mats: self.mats.iter().map(|a| a.scaled(t)).collect(),
        }
    }

    /// Rescales so that `S = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let s = total_norm(self);
        if s == 0.0 {
            return Err(Error::Domain("cannot normalize the zero tuple".into()));
        }
        Ok(self.scaled(1.0 / s.sqrt()))
    }

    /// Stacked Frobenius inner product `Σ_r ⟨A_r, B_r⟩`.
    pub fn dot(&self, other: &SymTuple) -> f64 {
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| a.dot(b))
            .sum()
    }

    /// `self + t·dir`, member by member.
    pub fn add_scaled(&self, dir: &[SymMatrix], t: f64) -> Self {
        Self {
            mats: self
                .mats
                .iter()
                .zip(dir)
                .map(|(a, d)| a.add_scaled(d, t))
                .collect(),
        }
    }

    /// Prepends `first` to the members of `rest`.
    pub fn with_first(first: SymMatrix, rest: &SymTuple) -> Result<Self> {
        let mut mats = Vec::with_capacity(rest.m() + 1);
        mats.push(first);
        mats.extend(rest.mats.iter().cloned());
        Self::new(mats)
    }
}

/// Which inequality an [`InequalityReport`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityKind {
    P,
    Pprime,
    Conjecture1,
    Eq1a,
}

/// Evaluation of one inequality `lhs ≥ rhs`.
///
/// `residual = lhs − rhs`; the inequality is reported to hold when
/// `residual ≥ −tol·scale`, where `scale` is a normalizer chosen by the
/// producing operation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: InequalityKind,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub holds: bool,
    pub tol: f64,
    pub scale: f64,
}

impl InequalityReport {
    pub fn new(name: InequalityKind, lhs: f64, rhs: f64, scale: f64, tol: f64) -> Self {
        let residual = lhs - rhs;
        Self {
            name,
            lhs,
            rhs,
            residual,
            holds: residual >= -tol * scale,
            tol,
            scale,
        }
    }
}

pub fn frobenius_norm_sq(m: &SymMatrix) -> f64 {
    m.inner.norm_squared()
}

/// `XY − YX`, antisymmetric for symmetric inputs.
pub fn commutator(x: &SymMatrix, y: &SymMatrix) -> Result<DMatrix<f64>> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch(format!(
            "commutator of {0}x{0} and {1}x{1}",
            x.n(),
            y.n()
        )));
    }
    Ok(commutator_raw(&x.inner, &y.inner))
}

pub(crate) fn commutator_raw(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    x * y - y * x
}

/// `||[X, Y]||²` without materializing the dimension check.
pub(crate) fn commutator_norm_sq(x: &SymMatrix, y: &SymMatrix) -> f64 {
    commutator_raw(&x.inner, &y.inner).norm_squared()
}

/// `C(T) = Σ_{r<s} ||[A_r, A_s]||²`.
pub fn commutator_energy(t: &SymTuple) -> f64 {
    let mats = t.mats();
    let mut c = 0.0;
    for r in 0..mats.len() {
        for s in r + 1..mats.len() {
            c += commutator_norm_sq(&mats[r], &mats[s]);
        }
    }
    c
}

/// `S(T) = Σ_r ||A_r||²`.
pub fn total_norm(t: &SymTuple) -> f64 {
    t.mats().iter().map(frobenius_norm_sq).sum()
}

pub fn ddvv_residual(t: &SymTuple) -> InequalityReport {
    ddvv_residual_tol(t, DEFAULT_TOL)
}

/// `S² ≥ 2C`, normalized by `S²`.
pub fn ddvv_residual_tol(t: &SymTuple, tol: f64) -> InequalityReport {
    let s = total_norm(t);
    let c = commutator_energy(t);
    InequalityReport::new(InequalityKind::P, s * s, 2.0 * c, s * s, tol)
}

pub fn pprime_residual(t: &SymTuple) -> InequalityReport {
    pprime_residual_tol(t, DEFAULT_TOL)
}

/// `3/2·S² − Σ ||A_r||⁴ ≥ 2C`, normalized by `S²`.
pub fn pprime_residual_tol(t: &SymTuple, tol: f64) -> InequalityReport {
    let norms = t.norms_sq();
    let s: f64 = norms.iter().sum();
    let quartic: f64 = norms.iter().map(|v| v * v).sum();
    let c = commutator_energy(t);
    InequalityReport::new(
        InequalityKind::Pprime,
        1.5 * s * s - quartic,
        2.0 * c,
        s * s,
        tol,
    )
}

/// `C(T)/S(T)²`, invariant under `T → tT`. Undefined for the zero tuple.
pub fn normalized_lambda(t: &SymTuple) -> Result<f64> {
    let s = total_norm(t);
    if s == 0.0 {
        return Err(Error::Domain("undefined ratio: zero tuple".into()));
    }
    Ok(commutator_energy(t) / (s * s))
}

/// `M − (tr M / n)·I`.
pub fn traceless_part(m: &SymMatrix) -> SymMatrix {
    let n = m.n();
    let shift = m.trace() / n as f64;
    let mut inner = m.inner.clone();
    for i in 0..n {
        inner[(i, i)] -= shift;
    }
    SymMatrix { inner }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn equality_pair() -> SymTuple {
        SymTuple::new(vec![
            sym(&[&[0.0, 1.0], &[1.0, 0.0]]),
            sym(&[&[1.0, 0.0], &[0.0, -1.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm_sq(&sym(&[&[0.0, 1.0], &[1.0, 0.0]])), 2.0);
        assert_eq!(frobenius_norm_sq(&SymMatrix::zeros(3)), 0.0);
        assert_eq!(frobenius_norm_sq(&sym(&[&[1.0, 0.0], &[0.0, -1.0]])), 2.0);
    }

    #[test]
    fn commutator_examples() {
        let x = sym(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let y = sym(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let k = commutator(&x, &y).unwrap();
        assert_eq!(k, DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]));
        assert_eq!(commutator(&x, &x).unwrap(), DMatrix::zeros(2, 2));
        let d1 = SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let d2 = SymMatrix::from_diagonal(&[-4.0, 0.5, 7.0]);
        assert_eq!(commutator(&d1, &d2).unwrap(), DMatrix::zeros(3, 3));
    }

    #[test]
    fn commutator_rejects_mismatched_sizes() {
        let err = commutator(&SymMatrix::zeros(2), &SymMatrix::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn energy_and_norm_examples() {
        let t = equality_pair();
        assert_eq!(commutator_energy(&t), 8.0);
        assert_eq!(total_norm(&t), 4.0);
        let single = SymTuple::new(vec![sym(&[&[3.0, 1.0], &[1.0, 2.0]])]).unwrap();
        assert_eq!(commutator_energy(&single), 0.0);
        let diag = SymTuple::new(vec![
            SymMatrix::from_diagonal(&[1.0, 2.0]),
            SymMatrix::from_diagonal(&[5.0, -1.0]),
            SymMatrix::from_diagonal(&[0.0, 3.0]),
        ])
        .unwrap();
        assert_eq!(commutator_energy(&diag), 0.0);
        assert_eq!(total_norm(&SymTuple::zeros(3, 2)), 0.0);
        assert!((total_norm(&t.scaled(3.0)) - 9.0 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn ddvv_and_pprime_equality_pair() {
        let t = equality_pair();
        let p = ddvv_residual(&t);
        assert_eq!((p.lhs, p.rhs, p.residual), (16.0, 16.0, 0.0));
        assert!(p.holds);
        let pp = pprime_residual(&t);
        assert_eq!((pp.lhs, pp.rhs, pp.residual), (16.0, 16.0, 0.0));
        assert!(pp.holds);
    }

    #[test]
    fn single_matrix_residuals() {
        let a = sym(&[&[1.0, 2.0], &[2.0, -3.0]]);
        let s = a.norm_sq();
        let t = SymTuple::new(vec![a]).unwrap();
        assert!((ddvv_residual(&t).residual - s * s).abs() < 1e-12);
        assert!((pprime_residual(&t).residual - 0.5 * s * s).abs() < 1e-12);
    }

    #[test]
    fn zero_tuple_holds_vacuously() {
        let t = SymTuple::zeros(3, 3);
        let p = ddvv_residual(&t);
        assert_eq!(p.residual, 0.0);
        assert!(p.holds);
        let pp = pprime_residual(&t);
        assert_eq!(pp.residual, 0.0);
        assert!(pp.holds);
        assert!(matches!(normalized_lambda(&t), Err(Error::Domain(_))));
    }

    #[test]
    fn lambda_examples() {
        let t = equality_pair();
        assert_eq!(normalized_lambda(&t).unwrap(), 0.5);
        assert!((normalized_lambda(&t.scaled(3.0)).unwrap() - 0.5).abs() < 1e-15);
        let diag = SymTuple::new(vec![
            SymMatrix::from_diagonal(&[1.0, 2.0]),
            SymMatrix::from_diagonal(&[5.0, -1.0]),
        ])
        .unwrap();
        assert_eq!(normalized_lambda(&diag).unwrap(), 0.0);
    }

    #[test]
    fn traceless_examples() {
        assert_eq!(traceless_part(&SymMatrix::identity(2)), SymMatrix::zeros(2));
        assert_eq!(
            traceless_part(&sym(&[&[1.0, 0.0], &[0.0, 0.0]])),
            sym(&[&[0.5, 0.0], &[0.0, -0.5]])
        );
        let m = sym(&[&[1.0, 4.0], &[4.0, -1.0]]);
        assert_eq!(traceless_part(&m), m);
    }

    #[test]
    fn construction_symmetrizes_small_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0 + 1e-12, 2.0, 0.0]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn construction_rejects_asymmetric_and_bad_input() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.5, 0.0]);
        assert!(matches!(SymMatrix::new(m), Err(Error::NotSymmetric { .. })));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 0.0]);
        assert!(matches!(SymMatrix::new(m), Err(Error::NonFinite(_))));
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).is_err());
        assert!(matches!(SymTuple::new(vec![]), Err(Error::Empty(_))));
        assert!(matches!(
            SymTuple::new(vec![SymMatrix::zeros(2), SymMatrix::zeros(3)]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
