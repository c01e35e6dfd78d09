//! Multivariate normal utilities: truncated Fourier integrals, ordering
//! probabilities by Monte Carlo, and the scaled-identity ordering
//! integral.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use super::perturbed::PerturbedIdentityMatrix;
use super::quad::gauss_legendre_nodes;
use super::rng::{RandomStream, SAMPLE_BLOCK};
use crate::{RaceError, Result};

/// (2π)^{-r} ∫_{‖t‖≤R} e^{i⟨t,x⟩} exp(-½ tᵀAt) dt.
///
/// Product Gauss–Legendre for r ≤ 3; importance-sampled Monte Carlo in
/// the ball for r ≥ 4 (the stream makes it reproducible). The integrand
/// decays like exp(-‖t‖²/4) once ε ≤ 1/(2r), so the box is clipped at
/// ‖t‖_∞ = 14 where the mass left is below 1e-20.
pub fn gaussian_fourier_truncated(
    a: &PerturbedIdentityMatrix,
    x: &[f64],
    radius: f64,
    stream: RandomStream,
) -> Result<f64> {
    let r = a.dim();
    assert_eq!(x.len(), r);
    if radius < 10.0 * (r as f64).sqrt() {
        return Err(RaceError::PrecisionFailure(format!(
            "truncation radius {radius} below 10*sqrt(r)"
        )));
    }
    if r <= 3 {
        Ok(fourier_tensor_quadrature(a, x, radius))
    } else {
        Ok(fourier_monte_carlo(a, x, radius, stream))
    }
}

fn fourier_tensor_quadrature(a: &PerturbedIdentityMatrix, x: &[f64], radius: f64) -> f64 {
    let r = a.dim();
    let l = radius.min(14.0);
    let clip_ball = radius <= 14.0;
    let panels = (2.0 * l).ceil() as usize;
    let nodes = gauss_legendre_nodes(-l, l, panels);
    let m = a.matrix();

    let mut sum = 0.0;
    let mut t = vec![0.0f64; r];
    // odometer over the tensor grid
    let mut idx = vec![0usize; r];
    'outer: loop {
        let mut w = 1.0;
        for j in 0..r {
            let (tj, wj) = nodes[idx[j]];
            t[j] = tj;
            w *= wj;
        }
        let norm2: f64 = t.iter().map(|v| v * v).sum();
        if !clip_ball || norm2 <= radius * radius {
            let mut quad = 0.0;
            let mut phase = 0.0;
            for j in 0..r {
                phase += t[j] * x[j];
                for k in 0..r {
                    quad += m[(j, k)] * t[j] * t[k];
                }
            }
            sum += w * phase.cos() * (-0.5 * quad).exp();
        }
        for j in 0..r {
            idx[j] += 1;
            if idx[j] < nodes.len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    sum * TAU.powi(-(r as i32))
}

fn fourier_monte_carlo(
    a: &PerturbedIdentityMatrix,
    x: &[f64],
    radius: f64,
    stream: RandomStream,
) -> f64 {
    // importance sampling from N(0, 2I): density (4π)^{-r/2} e^{-‖t‖²/4}
    // dominates |integrand| because tᵀAt ≥ ‖t‖²/2 in the lemma regime.
    let r = a.dim();
    let m = a.matrix();
    let n: usize = 400_000;
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let total: f64 = (0..blocks as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.child(b).rng();
            let count = SAMPLE_BLOCK.min(n - b as usize * SAMPLE_BLOCK);
            let mut acc = 0.0;
            let mut t = vec![0.0f64; r];
            for _ in 0..count {
                let mut norm2 = 0.0;
                for tj in t.iter_mut() {
                    let g: f64 = rng.sample(StandardNormal);
                    *tj = g * std::f64::consts::SQRT_2;
                    norm2 += *tj * *tj;
                }
                if norm2 > radius * radius {
                    continue;
                }
                let mut quad = 0.0;
                let mut phase = 0.0;
                for j in 0..r {
                    phase += t[j] * x[j];
                    for k in 0..r {
                        quad += m[(j, k)] * t[j] * t[k];
                    }
                }
                acc += phase.cos() * (-0.5 * quad + 0.25 * norm2).exp();
            }
            acc
        })
        .sum();
    total / n as f64 * (4.0 * PI).powf(r as f64 / 2.0) * TAU.powi(-(r as i32))
}

/// Closed-form side of the truncated-Fourier comparison:
/// (2π)^{-r/2} det(A)^{-1/2} exp(-½ xᵀA⁻¹x).
pub fn gaussian_fourier_closed_form(a: &PerturbedIdentityMatrix, x: &[f64]) -> Result<f64> {
    let r = a.dim();
    let det = a.matrix().clone().lu().determinant();
    if det <= 0.0 {
        return Err(RaceError::SingularMatrix);
    }
    let inv = a
        .matrix()
        .clone()
        .try_inverse()
        .ok_or(RaceError::SingularMatrix)?;
    let xv = DVector::from_column_slice(x);
    let quad = (xv.transpose() * &inv * &xv)[(0, 0)];
    Ok(TAU.powf(-(r as f64) / 2.0) * det.powf(-0.5) * (-0.5 * quad).exp())
}

/// Check a symmetric matrix for positive semi-definiteness and return a
/// sampling factor L with LLᵀ = C (eigenvalue clamp for semi-definite
/// inputs).
pub fn psd_factor(c: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let eig = c.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    let scale = eig.eigenvalues.max().max(1.0);
    if min < -tol * scale {
        return Err(RaceError::InvalidCovariance(min));
    }
    if let Some(ch) = nalgebra::Cholesky::new(c.clone()) {
        return Ok(ch.l());
    }
    let mut u = eig.eigenvectors;
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        u.column_mut(j).scale_mut(s);
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub ties: usize,
}

/// Monte Carlo estimate of P(Z₁ > Z₂ > ⋯ > Z_r) for Z ~ N(mean, C),
/// strict inequalities; exact ties are tallied and never count as hits.
pub fn ordering_probability_gaussian(
    c: &DMatrix<f64>,
    mean: Option<&[f64]>,
    n: usize,
    stream: RandomStream,
) -> Result<MonteCarloEstimate> {
    let r = c.nrows();
    let l = psd_factor(c, 1e-8)?;
    let mean: Vec<f64> = match mean {
        Some(m) => m.to_vec(),
        None => vec![0.0; r],
    };
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let (hits, ties) = (0..blocks as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.child(b).rng();
            let count = SAMPLE_BLOCK.min(n - b as usize * SAMPLE_BLOCK);
            let mut hits = 0usize;
            let mut ties = 0usize;
            let mut z = vec![0.0f64; r];
            let mut u = vec![0.0f64; r];
            for _ in 0..count {
                for uj in u.iter_mut() {
                    *uj = rng.sample(StandardNormal);
                }
                for j in 0..r {
                    let mut s = mean[j];
                    for k in 0..r {
                        s += l[(j, k)] * u[k];
                    }
                    z[j] = s;
                }
                match classify_ordering(&z) {
                    Ordering::Strict => hits += 1,
                    Ordering::Tie => ties += 1,
                    Ordering::No => {}
                }
            }
            (hits, ties)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let p = hits as f64 / n as f64;
    Ok(MonteCarloEstimate {
        value: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
        samples: n,
        ties,
    })
}

pub(crate) enum Ordering {
    Strict,
    Tie,
    No,
}

pub(crate) fn classify_ordering(z: &[f64]) -> Ordering {
    for w in z.windows(2) {
        if w[0] < w[1] {
            return Ordering::No;
        }
        if w[0] == w[1] {
            return Ordering::Tie;
        }
    }
    Ordering::Strict
}

pub fn factorial(r: usize) -> f64 {
    (1..=r).map(|k| k as f64).product()
}

/// ∫ over the ordering cone of the scaled-identity Gaussian:
/// (2π)^{-r/2} ∫_{x₁>⋯>x_r} exp(-½(1+κ)‖x‖²) dx = 1/(r!(1+κ)^{r/2}).
pub fn scaled_identity_order_integral(kappa: f64, r: usize) -> Result<f64> {
    if kappa <= -1.0 {
        return Err(RaceError::InvalidScale(kappa));
    }
    Ok(1.0 / (factorial(r) * (1.0 + kappa).powf(r as f64 / 2.0)))
}
