//! δ_{q;a₁,…,a_r} by four engines: Monte Carlo over the random model,
//! characteristic-function inversion for r=2, the Gaussian ordering
//! probability, and the asymptotic formulas, plus the exact ordering
//! identities used to cross-check them.

use crate::characters::{c_q, RaceSpec};
use crate::config::DEFAULT_ENVELOPE_C;
use crate::numerics::{
    adaptive_simpson, bessel_j0, factorial, ordering_probability_gaussian, RandomStream,
};
use crate::racemodel::{sample_x, RaceModel, SampleBatch};
use crate::spectrum::{CovarianceData, ZeroData};
use crate::{RaceError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    Inversion2Way,
    GaussianApprox,
    AsymptoticT11,
    AsymptoticT12,
    UpperBoundT13,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte-carlo",
            Method::Inversion2Way => "inversion-2way",
            Method::GaussianApprox => "gaussian-approx",
            Method::AsymptoticT11 => "asymptotic-T11",
            Method::AsymptoticT12 => "asymptotic-T12",
            Method::UpperBoundT13 => "upper-bound-T13",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DensityEstimate {
    pub spec: RaceSpec,
    pub value: f64,
    pub method: Method,
    /// stderr for Monte Carlo engines, an error budget otherwise.
    pub uncertainty: f64,
    /// Truncation height of the underlying zero data, when any.
    pub height: Option<f64>,
    pub samples: Option<usize>,
    pub ties: usize,
    pub stream: Option<RandomStream>,
}

impl DensityEstimate {
    fn check(self) -> Self {
        debug_assert!((0.0..=1.0).contains(&self.value), "value {}", self.value);
        debug_assert!(self.uncertainty >= 0.0);
        self
    }
}

// ---------------------------------------------------------------------------
// Ordering counts on sample batches
// ---------------------------------------------------------------------------

/// True when some pair of coordinates is exactly equal (a measure-zero
/// event under the model; never counted toward any ordering).
pub fn row_has_tie(row: &[f64]) -> bool {
    for j in 0..row.len() {
        for k in (j + 1)..row.len() {
            if row[j] == row[k] {
                return true;
            }
        }
    }
    false
}

/// Rows where row[order[0]] > row[order[1]] > …, plus the batch tie tally.
/// `order` may index a subset of the columns; ties are judged on the full
/// row so that counts over different orders partition the same rows.
pub fn count_ordering(batch: &SampleBatch, order: &[usize]) -> (usize, usize) {
    let mut count = 0;
    let mut ties = 0;
    for row in batch.rows() {
        if row_has_tie(row) {
            ties += 1;
            continue;
        }
        if order.windows(2).all(|w| row[w[0]] > row[w[1]]) {
            count += 1;
        }
    }
    (count, ties)
}

/// delta_mc: fraction of model samples in strict race order
/// (the columns in spec order).
pub fn delta_mc(model: &RaceModel, n: usize, stream: RandomStream) -> DensityEstimate {
    let batch = sample_x(model, n, stream);
    delta_mc_from_batch(model, &batch)
}

pub fn delta_mc_from_batch(model: &RaceModel, batch: &SampleBatch) -> DensityEstimate {
    let order: Vec<usize> = (0..model.r()).collect();
    let (count, ties) = count_ordering(batch, &order);
    let n = batch.n;
    let p = count as f64 / n as f64;
    DensityEstimate {
        spec: model.spec().clone(),
        value: p,
        method: Method::MonteCarlo,
        uncertainty: (p * (1.0 - p) / n as f64).sqrt(),
        height: Some(model.height()),
        samples: Some(n),
        ties,
        stream: Some(batch.stream),
    }
    .check()
}

// ---------------------------------------------------------------------------
// Inversion engine (r = 2)
// ---------------------------------------------------------------------------

/// delta_invert_2way: P(X_a > X_b) by Fourier inversion of
/// Y = X_a − X_b, whose characteristic function is
/// φ_Y(t) = e^{i(C_q(b)−C_q(a))t} · Π_χ Π_γ J₀(w_γ |χ(a)−χ(b)| t).
/// P(Y>0) = ½ + (1/π)∫₀^∞ Im φ_Y(t)/t dt; equal C values short-circuit
/// to exactly ½ (φ_Y real and even makes the integrand vanish).
pub fn delta_invert_2way(data: &ZeroData, a: u64, b: u64) -> Result<DensityEstimate> {
    let spec = RaceSpec::new(data.table.modulus().clone(), vec![a, b])?;
    let dc = (c_q(spec.modulus(), &spec.classes()[1])
        - c_q(spec.modulus(), &spec.classes()[0])) as f64;
    if dc == 0.0 {
        return Ok(DensityEstimate {
            spec,
            value: 0.5,
            method: Method::Inversion2Way,
            uncertainty: 0.0,
            height: Some(data.height),
            samples: None,
            ties: 0,
            stream: None,
        });
    }

    // per (χ, γ): J₀ argument coefficient w·|χ(a)−χ(b)|
    let mut coeffs: Vec<f64> = Vec::new();
    for e in &data.entries {
        let z = (e.chi.eval(a) - e.chi.eval(b)).norm();
        if z < 1e-15 {
            continue;
        }
        for g in &e.zeros.ordinates {
            coeffs.push(2.0 * z / (0.25 + g * g).sqrt());
        }
    }
    if coeffs.is_empty() {
        return Err(RaceError::IncompleteZeroData(vec![format!(
            "no zero ordinates distinguish {a} and {b} mod {}",
            spec.modulus().q()
        )]));
    }

    // envelope ln Π min(1, e^{-x²/4}|_{x≤1}, √(2/πx)|_{x>1}) at scale t,
    // nonincreasing; cut where it falls below 1e-12
    let log_env = |t: f64| -> f64 {
        coeffs
            .iter()
            .map(|&c| {
                let x = c * t;
                if x <= 1.0 {
                    -x * x / 4.0
                } else {
                    0.5 * (2.0 / (std::f64::consts::PI * x)).ln().min(0.0)
                }
            })
            .sum()
    };
    let mut t_cut = 1.0;
    while log_env(t_cut) > -27.6 && t_cut < 1e6 {
        t_cut *= 2.0;
    }

    let integrand = |t: f64| -> f64 {
        if t == 0.0 {
            return dc;
        }
        let mut log_abs = 0.0;
        let mut sign = 1.0;
        for &c in &coeffs {
            let j = bessel_j0(c * t);
            if j == 0.0 {
                return 0.0;
            }
            log_abs += j.abs().ln();
            if j < 0.0 {
                sign = -sign;
            }
        }
        sign * log_abs.exp() * (dc * t).sin() / t
    };
    let integral = adaptive_simpson(&integrand, 0.0, t_cut, 1e-10)?;
    let value = (0.5 + integral / std::f64::consts::PI).clamp(0.0, 1.0);
    Ok(DensityEstimate {
        spec,
        value,
        method: Method::Inversion2Way,
        uncertainty: 1e-8,
        height: Some(data.height),
        samples: None,
        ties: 0,
        stream: None,
    }
    .check())
}

// ---------------------------------------------------------------------------
// Gaussian engine
// ---------------------------------------------------------------------------

/// delta_gauss: ordering probability of the Gaussian with the race
/// correlation matrix, means shifted by −C_q(a_j)/√Var(q). With
/// `with_means = false` the pure-correlation (centered) variant is
/// returned instead.
pub fn delta_gauss(
    cov: &CovarianceData,
    n: usize,
    stream: RandomStream,
    with_means: bool,
) -> Result<DensityEstimate> {
    let mean: Option<Vec<f64>> = with_means.then(|| {
        let s = cov.var_q.sqrt();
        cov.mean.iter().map(|m| m / s).collect()
    });
    let est = ordering_probability_gaussian(&cov.correlation, mean.as_deref(), n, stream)?;
    Ok(DensityEstimate {
        spec: cov.spec.clone(),
        value: est.value,
        method: Method::GaussianApprox,
        uncertainty: est.stderr,
        height: Some(cov.height),
        samples: Some(est.samples),
        ties: est.ties,
        stream: Some(stream),
    }
    .check())
}

// ---------------------------------------------------------------------------
// Asymptotic evaluators
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct AsymptoticT11 {
    pub baseline: f64,
    pub envelope: f64,
    pub in_range: bool,
}

/// delta_asymptotic_t11: δ ≈ 1/r! with relative error envelope
/// c·r²/log q, stated for 2 ≤ r ≤ √(log q).
pub fn delta_asymptotic_t11(q: u64, r: usize, envelope_c: Option<f64>) -> AsymptoticT11 {
    let lq = (q as f64).ln();
    AsymptoticT11 {
        baseline: 1.0 / factorial(r),
        envelope: envelope_c.unwrap_or(DEFAULT_ENVELOPE_C) * (r * r) as f64 / lq,
        in_range: r >= 2 && (r * r) as f64 <= lq,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AsymptoticT12 {
    /// −r log r + r.
    pub log_main: f64,
    /// log r + r²/log q, reported without the calibration factor.
    pub log_envelope: f64,
    pub in_range: bool,
}

/// delta_asymptotic_t12: log δ = −r log r + r + O(log r + r²/log q),
/// stated for √(log q) ≤ r ≤ (1−ε)log q/log log q; the evaluator is
/// total and only flags the range.
pub fn delta_asymptotic_t12(q: u64, r: usize) -> AsymptoticT12 {
    let rf = r as f64;
    let lq = (q as f64).ln();
    let upper = lq / lq.ln().max(1.0);
    AsymptoticT12 {
        log_main: -rf * rf.ln() + rf,
        log_envelope: rf.ln() + rf * rf / lq,
        in_range: rf * rf >= lq && rf <= upper,
    }
}

/// delta_upper_t13: max_{(a)} δ at any r ≥ s is bounded by the large-r
/// logarithmic estimate at s = ⌊(1−ε/2)log q/log log q⌋ via the
/// monotonicity of max δ in r.
pub fn delta_upper_t13(q: u64, r: usize, epsilon: f64, envelope_c: Option<f64>) -> Result<f64> {
    let lq = (q as f64).ln();
    let s = ((1.0 - epsilon / 2.0) * lq / lq.ln()).floor() as u64;
    if s < 2 {
        return Err(RaceError::QTooSmall { q, s });
    }
    let _ = r; // the bound is constant in r beyond s
    let t12 = delta_asymptotic_t12(q, s as usize);
    let c = envelope_c.unwrap_or(DEFAULT_ENVELOPE_C);
    // can exceed 1 at desk-scale q (vacuous but honest); the decay sets
    // in once log q dwarfs the calibrated envelope
    Ok((t12.log_main + c * t12.log_envelope).exp())
}

// ---------------------------------------------------------------------------
// Exact ordering identities
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct DecompositionReport {
    pub base_count: usize,
    pub insertion_counts: Vec<usize>,
    pub ties: usize,
    pub exact: bool,
}

/// ordering_decomposition_check: on one shared batch over r classes,
/// the count of the strict (r−1)-ordering of the first r−1 columns equals
/// the sum over the r insertion positions of the last column. Tie rows
/// are excluded everywhere, so the identity is an exact partition.
pub fn ordering_decomposition_check(batch: &SampleBatch) -> DecompositionReport {
    let r = batch.r;
    assert!(r >= 2);
    let base: Vec<usize> = (0..r - 1).collect();
    let (base_count, ties) = count_ordering(batch, &base);
    let mut insertion_counts = Vec::with_capacity(r);
    for p in 0..r {
        let mut order = base.clone();
        order.insert(p, r - 1);
        insertion_counts.push(count_ordering(batch, &order).0);
    }
    let exact = insertion_counts.iter().sum::<usize>() == base_count;
    DecompositionReport { base_count, insertion_counts, ties, exact }
}

/// All r! ordering counts on one batch; their sum plus ties must be
/// exactly the batch size.
pub fn partition_counts(batch: &SampleBatch) -> (Vec<usize>, usize) {
    let r = batch.r;
    let mut order: Vec<usize> = (0..r).collect();
    let mut counts = Vec::new();
    let mut ties = 0;
    permute(&mut order, 0, &mut |perm| {
        let (c, t) = count_ordering(batch, perm);
        counts.push(c);
        ties = t;
    });
    (counts, ties)
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::Modulus;
    use crate::lzeros::{ScanOptions, ZeroStore};
    use crate::spectrum::covariance_data;

    fn data(q: u64, height: f64) -> ZeroData {
        let dir = std::env::temp_dir().join(format!("density-test-zeros-{q}-{height}"));
        let store = ZeroStore::new(&dir).with_options(ScanOptions::default());
        ZeroData::load(q, &store, height).unwrap()
    }

    fn spec(q: u64, classes: &[u64]) -> RaceSpec {
        RaceSpec::new(Modulus::new(q).unwrap(), classes.to_vec()).unwrap()
    }

    #[test]
    fn mc_symmetric_pair_near_half() {
        // C_5(2) = C_5(3) = -1: exchangeable, δ = 1/2
        let d = data(5, 120.0);
        let m = RaceModel::new(&spec(5, &[2, 3]), &d).unwrap();
        let est = delta_mc(&m, 50_000, RandomStream::new(101, 0));
        assert!((est.value - 0.5).abs() <= 3.0 * est.uncertainty, "{}", est.value);
        assert_eq!(est.ties, 0);
    }

    #[test]
    fn mc_complement_sums_to_one_on_shared_batch() {
        let d = data(5, 60.0);
        let m = RaceModel::new(&spec(5, &[1, 2]), &d).unwrap();
        let batch = sample_x(&m, 20_000, RandomStream::new(102, 0));
        let (fwd, ties) = count_ordering(&batch, &[0, 1]);
        let (rev, _) = count_ordering(&batch, &[1, 0]);
        assert_eq!(fwd + rev + ties, batch.n);
        assert_eq!(ties, 0);
    }

    #[test]
    fn chebyshev_bias_mod4() {
        let d = data(4, 240.0);
        let m = RaceModel::new(&spec(4, &[3, 1]), &d).unwrap();
        let est = delta_mc(&m, 100_000, RandomStream::new(103, 0));
        assert!(est.value > 0.9, "{}", est.value);
    }

    #[test]
    fn invert_equal_c_exact_half() {
        let d = data(5, 60.0);
        let est = delta_invert_2way(&d, 2, 3).unwrap();
        assert_eq!(est.value, 0.5);
        assert_eq!(est.uncertainty, 0.0);
    }

    #[test]
    fn invert_matches_mc_mod4() {
        let d = data(4, 240.0);
        let inv = delta_invert_2way(&d, 3, 1).unwrap();
        assert!(inv.value > 0.9 && inv.value < 1.0, "{}", inv.value);
        let m = RaceModel::new(&spec(4, &[3, 1]), &d).unwrap();
        let mc = delta_mc(&m, 200_000, RandomStream::new(104, 0));
        assert!(
            (inv.value - mc.value).abs() <= 3.0 * mc.uncertainty + 1e-3,
            "inv {} mc {} ± {}",
            inv.value,
            mc.value,
            mc.uncertainty
        );
    }

    #[test]
    fn invert_matches_mc_mod3() {
        let d = data(3, 240.0);
        let inv = delta_invert_2way(&d, 2, 1).unwrap();
        assert!(inv.value > 0.5 && inv.value < 1.0);
        let m = RaceModel::new(&spec(3, &[2, 1]), &d).unwrap();
        let mc = delta_mc(&m, 200_000, RandomStream::new(105, 0));
        assert!((inv.value - mc.value).abs() <= 3.0 * mc.uncertainty + 1e-3);
    }

    #[test]
    fn invert_antisymmetric() {
        let d = data(4, 120.0);
        let fwd = delta_invert_2way(&d, 3, 1).unwrap();
        let rev = delta_invert_2way(&d, 1, 3).unwrap();
        assert!((fwd.value + rev.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn gauss_engine_tracks_mc() {
        let d = data(8, 120.0);
        let s = spec(8, &[3, 5, 7]);
        let cov = covariance_data(&s, &d, true).unwrap();
        let g = delta_gauss(&cov, 100_000, RandomStream::new(106, 0), true).unwrap();
        let m = RaceModel::new(&s, &d).unwrap();
        let mc = delta_mc(&m, 100_000, RandomStream::new(107, 0));
        let tol = 3.0 * (g.uncertainty + mc.uncertainty) + 0.02;
        assert!((g.value - mc.value).abs() < tol, "gauss {} mc {}", g.value, mc.value);
    }

    #[test]
    fn gauss_centered_identity_like() {
        // symmetric case: centered variant with near-identity correlation
        let d = data(5, 120.0);
        let s = spec(5, &[1, 2, 3]);
        let cov = covariance_data(&s, &d, true).unwrap();
        let g = delta_gauss(&cov, 200_000, RandomStream::new(108, 0), false).unwrap();
        // correlation off-diagonals are sizable at q=5, so only a loose
        // bracket around 1/6 is meaningful
        assert!(g.value > 0.05 && g.value < 0.35, "{}", g.value);
    }

    #[test]
    fn t11_values() {
        let a = delta_asymptotic_t11(1_000_003, 3, None);
        assert!((a.baseline - 1.0 / 6.0).abs() < 1e-15);
        assert!(a.in_range);
        let small_q = delta_asymptotic_t11(151, 3, None);
        assert!(!small_q.in_range);
        assert!(small_q.envelope > a.envelope);
    }

    #[test]
    fn t12_values() {
        let v = delta_asymptotic_t12(1_000_003, 2);
        assert!((v.log_main - (-2.0 * 2f64.ln() + 2.0)).abs() < 1e-12);
        // Stirling: log(1/r!) within log r + 1 of the main term
        for r in 2..=20 {
            let main = delta_asymptotic_t12(10_000_019, r).log_main;
            let exact = -(factorial(r)).ln();
            assert!((main - exact).abs() <= (r as f64).ln() + 1.0, "r={r}");
        }
        // decreasing in r
        let mut prev = f64::INFINITY;
        for r in 3..=30 {
            let m = delta_asymptotic_t12(10_000_019, r).log_main;
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn t13_bound_behavior() {
        let b_large = delta_upper_t13(1_000_003, 50, 0.2, None).unwrap();
        let b_small = delta_upper_t13(1_009, 50, 0.2, None).unwrap();
        assert!(b_large < b_small, "{b_large} vs {b_small}");
        // constant in r beyond s
        let b1 = delta_upper_t13(1_000_003, 50, 0.2, None).unwrap();
        let b2 = delta_upper_t13(1_000_003, 80, 0.2, None).unwrap();
        assert!(b1 >= b2);
        // s < 2 once epsilon eats the (1−ε/2) factor near the minimum
        // of log q / log log q
        assert!(matches!(
            delta_upper_t13(15, 10, 0.95, None),
            Err(RaceError::QTooSmall { .. })
        ));
    }

    #[test]
    fn decomposition_exact_q5() {
        let d = data(5, 60.0);
        let m = RaceModel::new(&spec(5, &[1, 2, 3]), &d).unwrap();
        let batch = sample_x(&m, 30_000, RandomStream::new(109, 0));
        let rep = ordering_decomposition_check(&batch);
        assert!(rep.exact, "{rep:?}");
        assert_eq!(rep.ties, 0);
        assert_eq!(rep.insertion_counts.len(), 3);
    }

    #[test]
    fn partition_sums_to_n() {
        let d = data(5, 60.0);
        let m = RaceModel::new(&spec(5, &[1, 2, 3]), &d).unwrap();
        let batch = sample_x(&m, 20_000, RandomStream::new(110, 0));
        let (counts, ties) = partition_counts(&batch);
        assert_eq!(counts.len(), 6);
        assert_eq!(counts.iter().sum::<usize>() + ties, batch.n);
        assert_eq!(ties, 0);
    }

    #[test]
    fn mean_shift_degenerate_limits() {
        use nalgebra::{DMatrix, DVector};
        // artificial huge mean offsets force δ to the boundary
        let d = data(5, 60.0);
        let s = spec(5, &[1, 2]);
        let mut cov = covariance_data(&s, &d, true).unwrap();
        cov.mean = DVector::from_vec(vec![1e3, -1e3]);
        let hi = delta_gauss(&cov, 10_000, RandomStream::new(111, 0), true).unwrap();
        assert!(hi.value > 0.999);
        cov.mean = DVector::from_vec(vec![-1e3, 1e3]);
        let lo = delta_gauss(&cov, 10_000, RandomStream::new(112, 0), true).unwrap();
        assert!(lo.value < 0.001);
        let _ = DMatrix::<f64>::identity(2, 2);
    }
}
