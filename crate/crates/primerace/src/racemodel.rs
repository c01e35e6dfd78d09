//! The limiting random vector of the prime race and its Fourier
//! transform.
//!
//! X_j = −C_q(a_j) + Σ_{χ≠χ₀} Σ_{γ_χ>0} 2 Re(χ(a_j) U(γ_χ)) / √(¼+γ_χ²)
//!
//! with one uniform phase U per (χ, γ) pair, all independent. The
//! characteristic function is the product formula
//!
//! μ̂(t) = exp(i Σ_j C_q(a_j) t_j) · Π_χ Π_γ J₀(2|Σ_j χ(a_j)t_j|/√(¼+γ²)),
//!
//! checked here against the Gaussian shape in the central range, a
//! Chernoff tail bound, the big-character-set floor, and the three-regime
//! decay envelope.

use num_complex::Complex64;
use rayon::prelude::*;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::characters::{c_q, RaceSpec};
use crate::config::DEFAULT_C1;
use crate::numerics::{bessel_j0, unit_circle, RandomStream, SAMPLE_BLOCK};
use crate::spectrum::{CovarianceData, ZeroData};
use crate::{RaceError, Result};

/// One nontrivial character's contribution: its values on the race
/// classes and the zero weights 2/√(¼+γ²) of its primitive inducer.
pub struct CharBlock {
    pub conrey_index: u64,
    pub chi_vals: Vec<Complex64>,
    pub weights: Vec<f64>,
}

pub struct RaceModel {
    spec: RaceSpec,
    mean: Vec<f64>,
    c_offsets: Vec<f64>,
    blocks: Vec<CharBlock>,
    height: f64,
}

impl RaceModel {
    pub fn new(spec: &RaceSpec, data: &ZeroData) -> Result<Self> {
        if spec.modulus().q() != data.q() {
            return Err(RaceError::InvalidComparison(format!(
                "spec modulus {} vs zero data modulus {}",
                spec.modulus().q(),
                data.q()
            )));
        }
        if data.entries.iter().all(|e| e.zeros.ordinates.is_empty()) {
            return Err(RaceError::IncompleteZeroData(vec![format!(
                "no ordinates below T={} for any character mod {}",
                data.height,
                data.q()
            )]));
        }
        let c_offsets: Vec<f64> = spec
            .classes()
            .iter()
            .map(|c| c_q(spec.modulus(), c) as f64)
            .collect();
        let blocks = data
            .entries
            .iter()
            .map(|e| CharBlock {
                conrey_index: e.chi.conrey_index(),
                chi_vals: spec.classes().iter().map(|c| e.chi.eval(c.a())).collect(),
                weights: e
                    .zeros
                    .ordinates
                    .iter()
                    .map(|g| 2.0 / (0.25 + g * g).sqrt())
                    .collect(),
            })
            .collect();
        Ok(RaceModel {
            spec: spec.clone(),
            mean: c_offsets.iter().map(|&c| -c).collect(),
            c_offsets,
            blocks,
            height: data.height,
        })
    }

    pub fn spec(&self) -> &RaceSpec {
        &self.spec
    }

    pub fn r(&self) -> usize {
        self.spec.r()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn term_count(&self) -> usize {
        self.blocks.iter().map(|b| b.weights.len()).sum()
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// N×r matrix of X samples, row-major.
pub struct SampleBatch {
    pub data: Vec<f64>,
    pub n: usize,
    pub r: usize,
    pub stream: RandomStream,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.r..(i + 1) * self.r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.r)
    }

    pub fn export_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "# seed={} stream={}", self.stream.seed, self.stream.stream_id)?;
        let header: Vec<String> = (0..self.r).map(|j| format!("x{j}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.9e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn column_mean(&self, j: usize) -> f64 {
        self.rows().map(|row| row[j]).sum::<f64>() / self.n as f64
    }

    pub fn column_std(&self, j: usize) -> f64 {
        let m = self.column_mean(j);
        let var = self.rows().map(|row| (row[j] - m).powi(2)).sum::<f64>() / (self.n - 1) as f64;
        var.sqrt()
    }

    pub fn sample_covariance(&self, j: usize, k: usize) -> f64 {
        let mj = self.column_mean(j);
        let mk = self.column_mean(k);
        self.rows().map(|row| (row[j] - mj) * (row[k] - mk)).sum::<f64>() / (self.n - 1) as f64
    }
}

/// sample_x: N independent draws of X, deterministic for a given
/// stream regardless of thread layout (fixed-size blocks, one child
/// stream per block).
pub fn sample_x(model: &RaceModel, n: usize, stream: RandomStream) -> SampleBatch {
    let r = model.r();
    let mut data = vec![0.0f64; n * r];
    data.par_chunks_mut(SAMPLE_BLOCK * r)
        .enumerate()
        .for_each(|(b, chunk)| {
            let mut rng = stream.child(b as u64).rng();
            for row in chunk.chunks_mut(r) {
                row.copy_from_slice(model.mean());
                for blk in &model.blocks {
                    for &w in &blk.weights {
                        let (c, s) = unit_circle(&mut rng);
                        for (x, v) in row.iter_mut().zip(&blk.chi_vals) {
                            // Re(χ(a_j)·e^{iθ}) = Re·cos − Im·sin
                            *x += w * (v.re * c - v.im * s);
                        }
                    }
                }
            }
        });
    SampleBatch { data, n, r, stream }
}

// ---------------------------------------------------------------------------
// Characteristic function and Gaussian comparison
// ---------------------------------------------------------------------------

/// char_function: μ̂(t) over the truncated zero data; |μ̂| ≤ 1.
pub fn char_function(model: &RaceModel, t: &[f64]) -> Complex64 {
    assert_eq!(t.len(), model.r());
    let (log_abs, phase) = char_function_parts(model, t);
    if log_abs == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(log_abs.exp(), phase)
}

/// log|μ̂(t)|, immune to underflow of the long J₀ product.
pub fn log_abs_char_function(model: &RaceModel, t: &[f64]) -> f64 {
    char_function_parts(model, t).0
}

fn char_function_parts(model: &RaceModel, t: &[f64]) -> (f64, f64) {
    let mut phase: f64 = model.c_offsets.iter().zip(t).map(|(c, tj)| c * tj).sum();
    let mut log_abs = 0.0f64;
    for blk in &model.blocks {
        let mut z = Complex64::new(0.0, 0.0);
        for (v, &tj) in blk.chi_vals.iter().zip(t) {
            z += v * tj;
        }
        let zn = z.norm();
        for &w in &blk.weights {
            let j = bessel_j0(w * zn);
            if j == 0.0 {
                return (f64::NEG_INFINITY, 0.0);
            }
            log_abs += j.abs().ln();
            if j < 0.0 {
                phase += std::f64::consts::PI;
            }
        }
    }
    (log_abs, phase)
}

/// gaussian_char_check: max over the grid of
/// |μ̂(t)/exp(−½ tᵀ Cov t) − 1|, skipping points outside the Gaussian
/// range ‖t‖ ≤ Var(q)^{−1/2} log² q.
pub struct GaussianCheck {
    pub max_deviation: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

pub fn gaussian_char_check(
    model: &RaceModel,
    cov: &CovarianceData,
    grid: &[Vec<f64>],
) -> GaussianCheck {
    let q = model.spec.modulus().q() as f64;
    let radius = q.ln().powi(2) / cov.var_q.sqrt();
    let r = model.r();
    let mut max_dev = 0.0f64;
    let mut evaluated = 0;
    let mut skipped = 0;
    for t in grid {
        let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > radius {
            skipped += 1;
            continue;
        }
        evaluated += 1;
        let mut quad = 0.0;
        for j in 0..r {
            for k in 0..r {
                quad += t[j] * cov.b_matrix[(j, k)] * t[k];
            }
        }
        // compare magnitudes; the mean-phase factor is exact by
        // construction on both sides
        let dev = (log_abs_char_function(model, t) + 0.5 * quad).exp() - 1.0;
        max_dev = max_dev.max(dev.abs());
    }
    GaussianCheck { max_deviation: max_dev, evaluated, skipped }
}

// ---------------------------------------------------------------------------
// Tail bound
// ---------------------------------------------------------------------------

/// tail_bound: 2r·exp(−R²/(4 φ(q) log q)). The second flag reports
/// whether R is inside the validity range R ≥ √(φ(q) log q).
pub fn tail_bound(q: u64, r: usize, radius: f64) -> (f64, bool) {
    let phi = crate::characters::Modulus::new(q).map(|m| m.phi()).unwrap_or(0) as f64;
    let scale = phi * (q as f64).ln();
    let bound = 2.0 * r as f64 * (-radius * radius / (4.0 * scale)).exp();
    (bound, radius >= scale.sqrt())
}

/// empirical_tail: Monte Carlo frequency of ‖X‖_∞ > R.
pub fn empirical_tail(model: &RaceModel, n: usize, radius: f64, stream: RandomStream) -> f64 {
    let batch = sample_x(model, n, stream);
    let hits = batch
        .rows()
        .filter(|row| row.iter().any(|x| x.abs() > radius))
        .count();
    hits as f64 / n as f64
}

// ---------------------------------------------------------------------------
// Big character set
// ---------------------------------------------------------------------------

pub struct BigCharSet {
    pub indices: Vec<u64>,
    pub floor: f64,
    pub floor_asserted: bool,
    pub floor_holds: bool,
}

/// big_char_set: nontrivial χ with |Σ_j χ(a_j) t_j| ≥ ‖t‖/2,
/// asserting the φ(q)/(2r) floor when r ≤ φ(q)/4.
pub fn big_char_set(spec: &RaceSpec, data: &ZeroData, t: &[f64]) -> Result<BigCharSet> {
    assert_eq!(t.len(), spec.r());
    let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(RaceError::ValidationError("t must be nonzero".into()));
    }
    let mut indices = Vec::new();
    for e in &data.entries {
        let mut z = Complex64::new(0.0, 0.0);
        for (c, &tj) in spec.classes().iter().zip(t) {
            z += e.chi.eval(c.a()) * tj;
        }
        if z.norm() >= 0.5 * norm {
            indices.push(e.chi.conrey_index());
        }
    }
    let phi = spec.modulus().phi() as f64;
    let r = spec.r() as f64;
    let floor = phi / (2.0 * r);
    let asserted = r <= phi / 4.0;
    let holds = indices.len() as f64 >= floor;
    Ok(BigCharSet { indices, floor, floor_asserted: asserted, floor_holds: holds })
}

// ---------------------------------------------------------------------------
// Decay envelope for |μ̂| in three ‖t‖ regimes
// ---------------------------------------------------------------------------

/// log of the three-regime envelope on |μ̂|; on a boundary the tighter
/// (smaller) value is chosen.
pub fn log_decay_envelope(q: u64, r: usize, t_norm: f64) -> f64 {
    let phi = crate::characters::Modulus::new(q).map(|m| m.phi()).unwrap_or(0) as f64;
    let lq = (q as f64).ln();
    let mut best = f64::INFINITY;
    if t_norm >= 400.0 {
        best = best.min(-phi * t_norm / (8.0 * r as f64));
    }
    if (lq.powi(-2)..=400.0).contains(&t_norm) {
        best = best.min(-phi / lq.powi(8));
    }
    if t_norm <= lq.powi(-2) {
        best = best.min(-0.25 * phi * lq * t_norm * t_norm);
    }
    best
}

/// decay_envelope.
pub fn decay_envelope(q: u64, r: usize, t_norm: f64) -> f64 {
    log_decay_envelope(q, r, t_norm).exp()
}

pub struct EnvelopeReport {
    pub checked: usize,
    pub skipped: bool,
    pub violations: usize,
    pub worst_margin: f64,
}

/// envelope_check: asserts log|μ̂(t)| ≤ log envelope on the t-set;
/// skipped entirely when r exceeds the validity threshold
/// max(2, c₁ log q). The floor at 2 keeps the minimal race in scope for
/// every modulus; c₁ governs larger r.
pub fn envelope_check(model: &RaceModel, t_set: &[Vec<f64>], c1: Option<f64>) -> EnvelopeReport {
    let q = model.spec.modulus().q();
    let r = model.r();
    if r as f64 > (c1.unwrap_or(DEFAULT_C1) * (q as f64).ln()).max(2.0) {
        return EnvelopeReport { checked: 0, skipped: true, violations: 0, worst_margin: 0.0 };
    }
    let results: Vec<f64> = t_set
        .par_iter()
        .map(|t| {
            let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
            log_decay_envelope(q, r, norm) - log_abs_char_function(model, t)
        })
        .collect();
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for margin in results {
        if margin < 0.0 {
            violations += 1;
        }
        worst = worst.min(margin);
    }
    EnvelopeReport { checked: t_set.len(), skipped: false, violations, worst_margin: worst }
}
