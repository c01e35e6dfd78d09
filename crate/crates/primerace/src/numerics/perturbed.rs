//! Perturbed-identity matrices M_r(ε): symmetric, unit diagonal,
//! off-diagonal entries bounded by ε.
//!
//! Correlation matrices of the race model live in this class with
//! ε ≪ 1/log q, and the density asymptotics rest on three facts about it:
//! det(A) = 1 + O(ε²r²), the inverse has near-unit diagonal and O(ε)
//! off-diagonal, and the quadratic form is bounded below by ‖t‖²/2 once
//! ε ≤ 1/(2r). The O-constants are frozen from the geometric-series
//! proofs (2, 8, 4) so the reports are assertable.

use nalgebra::DMatrix;

use crate::{RaceError, Result};

#[derive(Debug, Clone)]
pub struct PerturbedIdentityMatrix {
    entries: DMatrix<f64>,
    epsilon: f64,
}

impl PerturbedIdentityMatrix {
    /// Wrap a symmetric matrix with exact unit diagonal.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let r = entries.nrows();
        if entries.ncols() != r {
            return Err(RaceError::ValidationError("matrix must be square".into()));
        }
        let mut epsilon = 0.0f64;
        for j in 0..r {
            if entries[(j, j)] != 1.0 {
                return Err(RaceError::ValidationError(format!(
                    "diagonal entry ({j},{j}) = {} != 1",
                    entries[(j, j)]
                )));
            }
            for k in 0..r {
                if (entries[(j, k)] - entries[(k, j)]).abs() > 1e-14 {
                    return Err(RaceError::ValidationError("matrix must be symmetric".into()));
                }
                if j != k {
                    epsilon = epsilon.max(entries[(j, k)].abs());
                }
            }
        }
        Ok(PerturbedIdentityMatrix { entries, epsilon })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let m = DMatrix::from_fn(r, r, |i, j| rows[i][j]);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Max |off-diagonal entry|.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// ε·r ≤ 1/2: the regime where the lemma constants apply.
    pub fn in_lemma_regime(&self) -> bool {
        self.epsilon * self.dim() as f64 <= 0.5
    }
}

#[derive(Debug, Clone)]
pub struct DetReport {
    pub det: f64,
    /// εr ≤ 1/2, so the |det − 1| ≤ 2(εr)² bound is claimed.
    pub bound_applicable: bool,
    pub within_bound: bool,
}

/// Determinant by LU, with the |det(A) − 1| ≤ 2(εr)² report
/// (geometric series Σ_{k≥2} (εr)^k ≤ 2(εr)² for εr ≤ 1/2).
pub fn det_perturbed(a: &PerturbedIdentityMatrix) -> Result<DetReport> {
    let det = a.entries.clone().lu().determinant();
    if det.abs() < 1e-300 {
        return Err(RaceError::SingularMatrix);
    }
    let er = a.epsilon * a.dim() as f64;
    let bound_applicable = er <= 0.5;
    let within_bound = bound_applicable && (det - 1.0).abs() <= 2.0 * er * er + 1e-12;
    Ok(DetReport { det, bound_applicable, within_bound })
}

#[derive(Debug, Clone)]
pub struct InverseReport {
    pub inverse: DMatrix<f64>,
    pub bound_applicable: bool,
    /// |ã_jj − 1| ≤ 8(εr)² for every diagonal entry.
    pub diagonal_within_bound: bool,
    /// |ã_jk| ≤ 4ε for every off-diagonal entry.
    pub off_diagonal_within_bound: bool,
}

/// Inverse with the entry-size report of the minor-expansion bounds.
pub fn inverse_perturbed(a: &PerturbedIdentityMatrix) -> Result<InverseReport> {
    let inverse = a
        .entries
        .clone()
        .try_inverse()
        .ok_or(RaceError::SingularMatrix)?;
    let r = a.dim();
    let er = a.epsilon * r as f64;
    let bound_applicable = er <= 0.5;
    let mut diag_ok = true;
    let mut off_ok = true;
    for j in 0..r {
        if (inverse[(j, j)] - 1.0).abs() > 8.0 * er * er + 1e-12 {
            diag_ok = false;
        }
        for k in 0..r {
            if j != k && inverse[(j, k)].abs() > 4.0 * a.epsilon + 1e-12 {
                off_ok = false;
            }
        }
    }
    Ok(InverseReport {
        inverse,
        bound_applicable,
        diagonal_within_bound: bound_applicable && diag_ok,
        off_diagonal_within_bound: bound_applicable && off_ok,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct QuadraticForm {
    pub value: f64,
    /// Whether ε ≤ 1/(2r) held, so tᵀAt ≥ ‖t‖²/2 is asserted.
    pub floor_asserted: bool,
    pub floor_holds: bool,
}

/// tᵀAt with the ‖t‖²/2 floor check.
pub fn quadratic_form_floor(a: &PerturbedIdentityMatrix, t: &[f64]) -> QuadraticForm {
    let r = a.dim();
    assert_eq!(t.len(), r);
    let mut value = 0.0;
    let mut norm2 = 0.0;
    for j in 0..r {
        norm2 += t[j] * t[j];
        for k in 0..r {
            value += a.entries[(j, k)] * t[j] * t[k];
        }
    }
    let floor_asserted = a.epsilon <= 1.0 / (2.0 * r as f64);
    let floor_holds = value >= 0.5 * norm2 - 1e-12 * norm2.max(1.0);
    QuadraticForm { value, floor_asserted, floor_holds }
}
