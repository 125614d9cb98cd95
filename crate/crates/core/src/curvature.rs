//! Curvature invariants of a submanifold point from its second fundamental form.
//!
//! The tangential sectional curvatures are obtained from the Gauss equation
//! `R(e_i, e_j, e_j, e_i) = c + Σ_r (h_ii^r h_jj^r − (h_ij^r)²)`, which is the
//! standard bridge between `h` and the intrinsic curvature of `M^n ⊂ N^{n+m}(c)`.
//! The normal curvature components are
//! `⟨R⊥(e_i, e_j) ξ_r, ξ_s⟩ = Σ_k (h_ik^r h_jk^s − h_ik^s h_jk^r)`.
//!
//! All sums here are written as explicit index loops; they deliberately do not
//! go through the matrix commutator code in [`crate::matrix`], so that the two
//! routes can be checked against each other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{InequalityKind, InequalityReport, SymMatrix, SymTuple, DEFAULT_TOL};

/// Second fundamental form coefficients `h[r][i][j]` at a point, together with
/// the constant sectional curvature `c` of the ambient space form.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondFundamentalForm {
    h: SymTuple,
    c: f64,
}

impl SecondFundamentalForm {
    pub fn new(h: SymTuple, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonFinite("ambient curvature c".into()));
        }
        Ok(Self { h, c })
    }

    /// From nested coefficients `h[r][i][j]`.
    pub fn from_nested(h: &[Vec<Vec<f64>>], c: f64) -> Result<Self> {
        Self::new(SymTuple::from_nested(h)?, c)
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    pub fn m(&self) -> usize {
        self.h.m()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `h^r` as symmetric matrices.
    pub fn h(&self) -> &SymTuple {
        &self.h
    }

    #[inline]
    fn coeff(&self, r: usize, i: usize, j: usize) -> f64 {
        self.h.get(r).get(i, j)
    }

    fn require_surface_dim(&self) -> Result<()> {
        if self.n() < 2 {
            return Err(Error::Domain(
                "curvature invariants need tangent dimension n >= 2".into(),
            ));
        }
        Ok(())
    }

    /// `Σ_{r<s} Σ_{i<j} (Σ_k (h_ik^r h_jk^s − h_ik^s h_jk^r))²`.
    pub fn normal_curvature_sq_sum(&self) -> f64 {
        let (n, m) = (self.n(), self.m());
        let mut total = 0.0;
        for r in 0..m {
            for s in r + 1..m {
                for i in 0..n {
                    for j in i + 1..n {
                        let mut comp = 0.0;
                        for k in 0..n {
                            comp += self.coeff(r, i, k) * self.coeff(s, j, k)
                                - self.coeff(s, i, k) * self.coeff(r, j, k);
                        }
                        total += comp * comp;
                    }
                }
            }
        }
        total
    }
}

/// ρ, ρ⊥ and |H|² at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub rho: f64,
    pub rho_perp: f64,
    pub mean_h_sq: f64,
    pub c: f64,
}

/// `|H|² = Σ_r ((1/n) Σ_i h_ii^r)²`.
pub fn mean_curvature_sq(f: &SecondFundamentalForm) -> f64 {
    let n = f.n() as f64;
    (0..f.m())
        .map(|r| {
            let tr: f64 = (0..f.n()).map(|i| f.coeff(r, i, i)).sum();
            (tr / n).powi(2)
        })
        .sum()
}

fn pair_normalizer(n: usize) -> f64 {
    2.0 / (n as f64 * (n as f64 - 1.0))
}

/// Normalized scalar curvature
/// `ρ = 2/(n(n−1)) Σ_{i<j} [c + Σ_r (h_ii^r h_jj^r − (h_ij^r)²)]`.
pub fn gauss_rho(f: &SecondFundamentalForm) -> Result<f64> {
    f.require_surface_dim()?;
    let n = f.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let mut sectional = f.c;
            for r in 0..f.m() {
                sectional += f.coeff(r, i, i) * f.coeff(r, j, j) - f.coeff(r, i, j).powi(2);
            }
            sum += sectional;
        }
    }
    Ok(pair_normalizer(n) * sum)
}

/// Normalized normal scalar curvature `ρ⊥ = 2/(n(n−1)) · sqrt(Σ ⟨R⊥(e_i,e_j)ξ_r,ξ_s⟩²)`.
pub fn normal_rho(f: &SecondFundamentalForm) -> Result<f64> {
    f.require_surface_dim()?;
    Ok(pair_normalizer(f.n()) * f.normal_curvature_sq_sum().sqrt())
}

pub fn summary(f: &SecondFundamentalForm) -> Result<CurvatureSummary> {
    Ok(CurvatureSummary {
        rho: gauss_rho(f)?,
        rho_perp: normal_rho(f)?,
        mean_h_sq: mean_curvature_sq(f),
        c: f.c,
    })
}

fn conjecture1_scale(f: &SecondFundamentalForm) -> f64 {
    1.0 + f.c.abs() + mean_curvature_sq(f)
}

/// Normalizer for the coefficient form. The coefficient form equals the
/// curvature form multiplied by `n²(n−1)`, so both share one scale up to that
/// factor.
fn eq1a_scale(f: &SecondFundamentalForm) -> f64 {
    let n = f.n() as f64;
    n * n * (n - 1.0) * conjecture1_scale(f)
}

pub fn conjecture1_residual(f: &SecondFundamentalForm) -> Result<InequalityReport> {
    conjecture1_residual_tol(f, DEFAULT_TOL)
}

/// `|H|² + c ≥ ρ + ρ⊥`; residual `= |H|² + c − ρ − ρ⊥`.
pub fn conjecture1_residual_tol(f: &SecondFundamentalForm, tol: f64) -> Result<InequalityReport> {
    let s = summary(f)?;
    Ok(InequalityReport::new(
        InequalityKind::Conjecture1,
        s.mean_h_sq + s.c,
        s.rho + s.rho_perp,
        conjecture1_scale(f),
        tol,
    ))
}

pub fn eq1a_residual(f: &SecondFundamentalForm) -> Result<InequalityReport> {
    eq1a_residual_tol(f, DEFAULT_TOL)
}

/// Coefficient form of the conjecture:
///
/// ```text
/// Σ_r Σ_{i<j} (h_ii^r − h_jj^r)² + 2n Σ_r Σ_{i<j} (h_ij^r)²
///     ≥ 2n · sqrt(Σ_{r<s} Σ_{i<j} (Σ_k (h_ik^r h_jk^s − h_ik^s h_jk^r))²)
/// ```
pub fn eq1a_residual_tol(f: &SecondFundamentalForm, tol: f64) -> Result<InequalityReport> {
    f.require_surface_dim()?;
    let n = f.n();
    let nf = n as f64;
    let mut diag_spread = 0.0;
    let mut off_diag = 0.0;
    for r in 0..f.m() {
        for i in 0..n {
            for j in i + 1..n {
                diag_spread += (f.coeff(r, i, i) - f.coeff(r, j, j)).powi(2);
                off_diag += f.coeff(r, i, j).powi(2);
            }
        }
    }
    let lhs = diag_spread + 2.0 * nf * off_diag;
    let rhs = 2.0 * nf * f.normal_curvature_sq_sum().sqrt();
    Ok(InequalityReport::new(
        InequalityKind::Eq1a,
        lhs,
        rhs,
        eq1a_scale(f),
        tol,
    ))
}

/// Sign of `report.residual`, with `|residual| < zero_tol·scale` counted as zero.
pub fn residual_sign(report: &InequalityReport, zero_tol: f64) -> i8 {
    if report.residual.abs() < zero_tol * report.scale {
        0
    } else if report.residual > 0.0 {
        1
    } else {
        -1
    }
}

/// Whether the curvature form and the coefficient form agree in sign.
pub fn forms_agree(f: &SecondFundamentalForm, zero_tol: f64) -> Result<bool> {
    let a = conjecture1_residual(f)?;
    let b = eq1a_residual(f)?;
    Ok(residual_sign(&a, zero_tol) == residual_sign(&b, zero_tol))
}

/// Shifts each `h^r` by `t_r·I`.
pub fn shift_by_identity(f: &SecondFundamentalForm, shifts: &[f64]) -> Result<SecondFundamentalForm> {
    if shifts.len() != f.m() {
        return Err(Error::DimensionMismatch(format!(
            "{} shifts for codimension {}",
            shifts.len(),
            f.m()
        )));
    }
    let id = SymMatrix::identity(f.n());
    let mats = f
        .h
        .mats()
        .iter()
        .zip(shifts)
        .map(|(a, &t)| a.add_scaled(&id, t))
        .collect();
    SecondFundamentalForm::new(SymTuple::new(mats)?, f.c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(h: &[&[&[f64]]], c: f64) -> SecondFundamentalForm {
        let nested: Vec<Vec<Vec<f64>>> = h
            .iter()
            .map(|m| m.iter().map(|row| row.to_vec()).collect())
            .collect();
        SecondFundamentalForm::from_nested(&nested, c).unwrap()
    }

    fn pair_form(c: f64) -> SecondFundamentalForm {
        form(&[&[&[0.0, 1.0], &[1.0, 0.0]], &[&[1.0, 0.0], &[0.0, -1.0]]], c)
    }

    #[test]
    fn mean_curvature_examples() {
        assert_eq!(mean_curvature_sq(&form(&[&[&[1.0, 0.0], &[0.0, 1.0]]], 0.0)), 1.0);
        assert_eq!(mean_curvature_sq(&pair_form(0.0)), 0.0);
        assert_eq!(mean_curvature_sq(&form(&[&[&[1.0, 0.0], &[0.0, 0.0]]], 0.0)), 0.25);
    }

    #[test]
    fn gauss_rho_examples() {
        assert_eq!(gauss_rho(&form(&[&[&[1.0, 0.0], &[0.0, 1.0]]], 0.0)).unwrap(), 1.0);
        let zero = SecondFundamentalForm::new(SymTuple::zeros(4, 3), -2.5).unwrap();
        assert!((gauss_rho(&zero).unwrap() + 2.5).abs() < 1e-15);
        assert_eq!(gauss_rho(&form(&[&[&[1.0, 0.0], &[0.0, 0.0]]], 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn n_equal_one_is_a_domain_error() {
        let f = form(&[&[&[2.0]]], 0.0);
        assert!(matches!(gauss_rho(&f), Err(Error::Domain(_))));
        assert!(matches!(normal_rho(&f), Err(Error::Domain(_))));
        assert!(conjecture1_residual(&f).is_err());
        assert!(eq1a_residual(&f).is_err());
    }

    #[test]
    fn normal_rho_examples() {
        assert_eq!(normal_rho(&form(&[&[&[1.0, 3.0], &[3.0, 1.0]]], 0.0)).unwrap(), 0.0);
        assert!((normal_rho(&pair_form(0.0)).unwrap() - 2.0).abs() < 1e-15);
        let diag = form(
            &[
                &[&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 3.0]],
                &[&[-1.0, 0.0, 0.0], &[0.0, 5.0, 0.0], &[0.0, 0.0, 0.5]],
            ],
            1.0,
        );
        assert_eq!(normal_rho(&diag).unwrap(), 0.0);
    }

    #[test]
    fn conjecture1_examples() {
        let umbilic = form(&[&[&[1.0, 0.0], &[0.0, 1.0]]], 0.0);
        let rep = conjecture1_residual(&umbilic).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!(rep.holds);

        let zero = SecondFundamentalForm::new(SymTuple::zeros(3, 2), 1.0).unwrap();
        assert!(conjecture1_residual(&zero).unwrap().residual.abs() < 1e-15);

        // |H|² = 0, ρ = (0·0 − 1) + (1·(−1) − 0) = −2, ρ⊥ = 2.
        let rep = conjecture1_residual(&pair_form(0.0)).unwrap();
        assert!(rep.residual.abs() < 1e-14);
        assert!(rep.holds);
    }

    #[test]
    fn eq1a_examples() {
        let rep = eq1a_residual(&form(&[&[&[1.0, 0.0], &[0.0, 0.0]]], 0.0)).unwrap();
        assert_eq!((rep.lhs, rep.rhs, rep.residual), (1.0, 0.0, 1.0));
        let zero = SecondFundamentalForm::new(SymTuple::zeros(3, 2), 0.0).unwrap();
        assert_eq!(eq1a_residual(&zero).unwrap().residual, 0.0);
        let rep = eq1a_residual(&pair_form(0.0)).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (8.0, 8.0));
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn shift_rejects_wrong_length() {
        assert!(shift_by_identity(&pair_form(0.0), &[1.0]).is_err());
    }

    #[test]
    fn rejects_non_finite_c() {
        assert!(SecondFundamentalForm::new(SymTuple::zeros(2, 1), f64::INFINITY).is_err());
    }
}
