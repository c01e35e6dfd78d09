//! Mean and covariance of the limiting race vector.
//!
//! Var(q) = 2 Σ_{χ≠χ₀} Σ_{γ_χ>0} 1/(¼+γ_χ²) and
//! B_q(a,b) = Σ_{χ≠χ₀} Σ_{γ_χ>0} (χ(b/a)+χ(a/b))/(¼+γ_χ²), both truncated
//! at the zero-set height with an estimated tail added back per character.
//! The mean of coordinate j is −C_q(a_j).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::characters::{
    build_character_table, c_q, mod_inverse, CharacterTable, DirichletCharacter, RaceSpec,
};
use crate::lzeros::{tail_second_moment, ZeroSet, ZeroStore};
use crate::{RaceError, Result};

/// Relative eigenvalue tolerance for the PSD check on the correlation
/// matrix.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// One nontrivial character with the zero set of its primitive inducer,
/// plus the tail estimate for the part of Σ 1/(¼+γ²) above the height.
pub struct CharacterZeros {
    pub chi: DirichletCharacter,
    pub zeros: Arc<ZeroSet>,
    pub head: f64,
    pub tail: f64,
}

/// All nontrivial characters mod q paired with zero data, in ascending
/// Conrey-index order.
pub struct ZeroData {
    pub table: CharacterTable,
    pub entries: Vec<CharacterZeros>,
    pub height: f64,
}

impl ZeroData {
    pub fn load(q: u64, store: &ZeroStore, height: f64) -> Result<Self> {
        let table = build_character_table(q)?;
        let sets = store.table_zero_sets(&table, height)?;
        let entries = sets
            .into_iter()
            .map(|(chi, zeros)| {
                let head = zeros.head_second_moment();
                let tail = tail_second_moment(zeros.conductor, height);
                CharacterZeros { chi, zeros, head, tail }
            })
            .collect();
        Ok(ZeroData { table, entries, height })
    }

    pub fn q(&self) -> u64 {
        self.table.modulus().q()
    }
}

/// variance_q: Var(q) from loaded zero data.
pub fn variance_q(data: &ZeroData, tail_correction: bool) -> f64 {
    data.entries
        .iter()
        .map(|e| 2.0 * (e.head + if tail_correction { e.tail } else { 0.0 }))
        .sum()
}

/// b_q: B_q(a,b) for distinct reduced classes a, b.
pub fn b_q(data: &ZeroData, a: u64, b: u64, tail_correction: bool) -> Result<f64> {
    let q = data.q();
    if a % q == b % q {
        return Err(RaceError::InvalidPair(a % q));
    }
    Ok(b_q_unchecked(data, a, b, tail_correction).0)
}

/// Value together with the imaginary residue of the character sum (zero
/// in exact arithmetic: χ and χ̄ contribute conjugate terms).
pub fn b_q_with_residue(
    data: &ZeroData,
    a: u64,
    b: u64,
    tail_correction: bool,
) -> Result<(f64, f64)> {
    let q = data.q();
    if a % q == b % q {
        return Err(RaceError::InvalidPair(a % q));
    }
    Ok(b_q_unchecked(data, a, b, tail_correction))
}

fn b_q_unchecked(data: &ZeroData, a: u64, b: u64, tail_correction: bool) -> (f64, f64) {
    let q = data.q();
    let b_over_a = b % q * mod_inverse(a % q, q) % q;
    let a_over_b = a % q * mod_inverse(b % q, q) % q;
    let mut sum = 0.0;
    let mut residue = 0.0f64;
    for e in &data.entries {
        let w = e.head + if tail_correction { e.tail } else { 0.0 };
        let v = e.chi.eval(b_over_a) + e.chi.eval(a_over_b);
        sum += v.re * w;
        residue += v.im * w;
    }
    (sum, residue)
}

/// Mean, covariance, and correlation of the race vector: Var(q) on the
/// diagonal, B_q(a_j,a_k) off it.
pub struct CovarianceData {
    pub spec: RaceSpec,
    pub var_q: f64,
    pub b_matrix: DMatrix<f64>,
    pub mean: DVector<f64>,
    pub correlation: DMatrix<f64>,
    /// max_{j≠k} |𝒞_jk|.
    pub epsilon: f64,
    pub min_correlation_eigenvalue: f64,
    pub height: f64,
    pub tail_correction_applied: bool,
}

/// covariance_data.
pub fn covariance_data(spec: &RaceSpec, data: &ZeroData, tail_correction: bool) -> Result<CovarianceData> {
    if spec.modulus().q() != data.q() {
        return Err(RaceError::InvalidComparison(format!(
            "spec modulus {} vs zero data modulus {}",
            spec.modulus().q(),
            data.q()
        )));
    }
    let r = spec.r();
    let var = variance_q(data, tail_correction);
    let mut b = DMatrix::from_element(r, r, 0.0);
    for j in 0..r {
        b[(j, j)] = var;
        for k in (j + 1)..r {
            let v = b_q(data, spec.classes()[j].a(), spec.classes()[k].a(), tail_correction)?;
            b[(j, k)] = v;
            b[(k, j)] = v;
        }
    }
    let mean = DVector::from_iterator(
        r,
        spec.classes().iter().map(|c| -(c_q(spec.modulus(), c) as f64)),
    );
    let mut corr = &b / var;
    let mut eps = 0.0f64;
    for j in 0..r {
        corr[(j, j)] = 1.0;
        for k in 0..r {
            if j != k {
                eps = eps.max(corr[(j, k)].abs());
            }
        }
    }
    let min_ev = SymmetricEigen::new(corr.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v));
    if min_ev < -PSD_TOLERANCE {
        return Err(RaceError::InvalidCovariance(min_ev));
    }
    Ok(CovarianceData {
        spec: spec.clone(),
        var_q: var,
        b_matrix: b,
        mean,
        correlation: corr,
        epsilon: eps,
        min_correlation_eigenvalue: min_ev,
        height: data.height,
        tail_correction_applied: tail_correction,
    })
}

impl CovarianceData {
    /// Row-major CSV: a header line, then one line per matrix row of the
    /// covariance, then the mean and correlation blocks.
    pub fn export_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        let r = self.spec.r();
        let classes: Vec<String> =
            self.spec.classes().iter().map(|c| c.a().to_string()).collect();
        writeln!(w, "# q={} classes={} T={}", self.spec.modulus().q(), classes.join("|"), self.height)?;
        writeln!(w, "block,row,{}", (0..r).map(|k| format!("col{k}")).collect::<Vec<_>>().join(","))?;
        for (name, m) in [("covariance", &self.b_matrix), ("correlation", &self.correlation)] {
            for j in 0..r {
                let row: Vec<String> = (0..r).map(|k| format!("{:.15e}", m[(j, k)])).collect();
                writeln!(w, "{name},{j},{}", row.join(","))?;
            }
        }
        let mean: Vec<String> = self.mean.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "mean,0,{}", mean.join(","))?;
        w.flush()?;
        Ok(())
    }
}
