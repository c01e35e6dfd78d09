//! One-dimensional quadrature: adaptive Simpson and fixed Gauss–Legendre
//! panels.

use crate::{RaceError, Result};

/// Adaptive Simpson on [a, b] to the given absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(RaceError::PrecisionFailure(format!(
            "adaptive Simpson did not converge on [{a}, {b}] (residual {err:.3e})"
        )));
    }
    let l = recurse(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)?;
    Ok(l + r)
}

/// 8-point Gauss–Legendre nodes/weights on [-1, 1].
const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_361_98,
    0.362_683_783_378_361_98,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Composite 8-point Gauss–Legendre over `panels` equal panels of [a, b].
/// Spectrally accurate for smooth integrands with panel width ≲ 1.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let c = lo + 0.5 * h;
        let half = 0.5 * h;
        for k in 0..8 {
            sum += GL8_W[k] * f(c + half * GL8_X[k]);
        }
    }
    sum * 0.5 * (b - a) / panels as f64
}

/// Nodes and weights of the composite rule, for tensor-product use.
pub fn gauss_legendre_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * 8);
    for p in 0..panels {
        let c = a + p as f64 * h + 0.5 * h;
        let half = 0.5 * h;
        for k in 0..8 {
            out.push((c + half * GL8_X[k], GL8_W[k] * half));
        }
    }
    out
}
