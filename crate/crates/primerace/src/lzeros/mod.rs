//! Zeros of Dirichlet L-functions on the critical line.
//!
//! For a primitive character χ of conductor q*, L(1/2+it, χ) is evaluated
//! through Hurwitz zeta pieces, L(s,χ) = q*^{-s} Σ_a χ(a) ζ(s, a/q*),
//! rotated real by the root number and gamma-factor phase. Zeros are the
//! sign changes of that rotated function, located by a fixed-step scan
//! and refined by bisection. Counts are sanity-checked against the
//! (T/2π)·log(q*T/2πe) main term.
//!
//! Zero sets are cached on disk as CSV under
//! `<root>/q{conductor}/chi{index}_T{height}.csv` (override the root with
//! the `RACE_ZERO_DIR` environment variable).

pub mod gamma;
pub mod hurwitz;

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::characters::{conductor_and_inducer, CharacterTable, DirichletCharacter};
use crate::numerics::adaptive_simpson;
use crate::{RaceError, Result};
use gamma::lgamma_complex;
use hurwitz::hurwitz_zeta;

/// Default ceiling on supported conductors.
pub const DEFAULT_CONDUCTOR_CEILING: u64 = 500;
/// Default ceiling on |t|.
pub const DEFAULT_T_MAX: f64 = 1e4;
/// Default scan step for sign changes.
pub const DEFAULT_SCAN_STEP: f64 = 0.05;
/// Default bisection target for each ordinate.
pub const DEFAULT_ABS_ERROR: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Zero sets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSource {
    Computed,
    Imported,
}

/// Positive ordinates of the nontrivial zeros of one primitive character,
/// ascending, up to a search height.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    pub conductor: u64,
    pub conrey_index: u64,
    pub ordinates: Vec<f64>,
    pub height: f64,
    pub abs_error: f64,
    pub source: ZeroSource,
    /// Set when the count check failed even after the refined rescan.
    pub count_flagged: bool,
}

impl ZeroSet {
    fn validate(&self) -> Result<()> {
        if self.abs_error <= 0.0 {
            return Err(RaceError::ValidationError("abs_error must be positive".into()));
        }
        for (i, w) in self.ordinates.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(RaceError::ValidationError(format!(
                    "ordinates not strictly increasing at position {}: {} then {}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        if let Some(&first) = self.ordinates.first() {
            if first <= 0.0 {
                return Err(RaceError::ValidationError("ordinates must be positive".into()));
            }
        }
        if let Some(&last) = self.ordinates.last() {
            if last > self.height + self.abs_error {
                return Err(RaceError::ValidationError(format!(
                    "ordinate {last} above height {}",
                    self.height
                )));
            }
        }
        Ok(())
    }

    /// Σ over stored ordinates of 1/(¼+γ²).
    pub fn head_second_moment(&self) -> f64 {
        self.ordinates.iter().map(|g| 1.0 / (0.25 + g * g)).sum()
    }
}

/// Gauss sum and root number of a primitive character.
#[derive(Debug, Clone, Copy)]
pub struct RootNumberData {
    pub gauss_sum: Complex64,
    pub root_number: Complex64,
    pub parity: u8,
}

/// gauss_sum: τ(χ) = Σ_{n≤q*} χ(n) e(n/q*). |τ| = √q* for primitive χ.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() || chi.q() < 2 {
        return Err(RaceError::MustBePrimitive {
            conductor: chi.conductor(),
            modulus: chi.q(),
        });
    }
    let q = chi.q();
    let mut tau = Complex64::new(0.0, 0.0);
    for n in 1..=q {
        let e = Complex64::from_polar(1.0, TAU * n as f64 / q as f64);
        tau += chi.eval(n) * e;
    }
    Ok(tau)
}

pub fn root_number_data(chi: &DirichletCharacter) -> Result<RootNumberData> {
    let tau = gauss_sum(chi)?;
    let a = chi.parity();
    let i_a = if a == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let eps = tau / (i_a * (chi.q() as f64).sqrt());
    Ok(RootNumberData { gauss_sum: tau, root_number: eps, parity: a })
}

// ---------------------------------------------------------------------------
// Critical-line evaluator
// ---------------------------------------------------------------------------

/// Real-rotated L(1/2+it, χ) for one primitive character: a real-analytic
/// function of t whose zeros are the critical-line ordinates.
pub struct HardyZ {
    chi: DirichletCharacter,
    units: Vec<(u64, Complex64)>,
    parity: f64,
    log_q_over_pi: f64,
    half_eps_arg: f64,
    t_max: f64,
}

impl HardyZ {
    pub fn new(chi: &DirichletCharacter) -> Result<Self> {
        Self::with_limits(chi, DEFAULT_CONDUCTOR_CEILING, DEFAULT_T_MAX)
    }

    pub fn with_limits(chi: &DirichletCharacter, conductor_ceiling: u64, t_max: f64) -> Result<Self> {
        if !chi.is_primitive() || chi.q() < 2 {
            return Err(RaceError::MustBePrimitive {
                conductor: chi.conductor(),
                modulus: chi.q(),
            });
        }
        if chi.q() > conductor_ceiling {
            return Err(RaceError::UnsupportedConductor(chi.q(), conductor_ceiling));
        }
        let rn = root_number_data(chi)?;
        let units = (1..=chi.q())
            .filter_map(|n| {
                let v = chi.eval(n);
                (v.norm_sqr() > 0.5).then_some((n, v))
            })
            .collect();
        Ok(HardyZ {
            units,
            parity: chi.parity() as f64,
            log_q_over_pi: (chi.q() as f64 / PI).ln(),
            half_eps_arg: 0.5 * rn.root_number.arg(),
            t_max,
            chi: chi.clone(),
        })
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    /// L(1/2 + it, χ) by Hurwitz zeta pieces.
    pub fn l_value(&self, t: f64) -> Complex64 {
        let q = self.chi.q() as f64;
        let s = Complex64::new(0.5, t);
        let mut sum = Complex64::new(0.0, 0.0);
        for &(n, v) in &self.units {
            sum += v * hurwitz_zeta(s, n as f64 / q);
        }
        // q^{-s}
        let lq = q.ln();
        sum * Complex64::from_polar((-0.5 * lq).exp(), -t * lq)
    }

    /// Rotation phase θ(t): arg of (q/π)^{it/2} Γ((s+a)/2) ε(χ)^{-1/2}.
    fn theta(&self, t: f64) -> f64 {
        let z = Complex64::new(0.25 + 0.5 * self.parity, 0.5 * t);
        0.5 * t * self.log_q_over_pi + lgamma_complex(z).im - self.half_eps_arg
    }

    /// Z value and its imaginary residual (which vanishes in exact
    /// arithmetic).
    pub fn z_with_residual(&self, t: f64) -> (f64, f64) {
        assert!(t.abs() <= self.t_max, "t = {t} beyond configured ceiling");
        let rotated = Complex64::from_polar(1.0, self.theta(t)) * self.l_value(t);
        (rotated.re, rotated.im)
    }

    pub fn z(&self, t: f64) -> f64 {
        self.z_with_residual(t).0
    }
}

// ---------------------------------------------------------------------------
// Zero location
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub step: f64,
    pub abs_error: f64,
    /// Slack for the count check: |count − main term| ≤ 2·log(q*T) + slack_add.
    pub slack_add: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { step: DEFAULT_SCAN_STEP, abs_error: DEFAULT_ABS_ERROR, slack_add: 5.0 }
    }
}

/// zero_count_expected: main term (T/2π)·log(q*T/2πe). The flag is
/// set (and 0 returned) when the log argument is ≤ 1.
pub fn zero_count_expected(q_star: u64, height: f64) -> (f64, bool) {
    let arg = q_star as f64 * height / (TAU * std::f64::consts::E);
    if arg <= 1.0 {
        (0.0, true)
    } else {
        (height / TAU * arg.ln(), false)
    }
}

/// Count slack used everywhere: 2·log(q*·T) + 5 (calibrated O-constant).
pub fn count_slack(q_star: u64, height: f64, slack_add: f64) -> f64 {
    2.0 * (q_star as f64 * height).ln().max(0.0) + slack_add
}

/// find_zeros: all sign changes of Z on (0, T], refined by bisection.
/// A count shortfall triggers one rescan at step/4; a persistent breach
/// flags the set but still returns it.
pub fn find_zeros(hz: &HardyZ, height: f64, opts: ScanOptions) -> ZeroSet {
    let mut ordinates = scan(hz, height, opts.step, opts.abs_error);
    let (expected, _low) = zero_count_expected(hz.chi.q(), height);
    let slack = count_slack(hz.chi.q(), height, opts.slack_add);
    let mut flagged = false;
    if (expected - ordinates.len() as f64) > slack {
        ordinates = scan(hz, height, opts.step / 4.0, opts.abs_error);
        flagged = (expected - ordinates.len() as f64) > slack;
    }
    ZeroSet {
        conductor: hz.chi.q(),
        conrey_index: hz.chi.conrey_index(),
        ordinates,
        height,
        abs_error: opts.abs_error,
        source: ZeroSource::Computed,
        count_flagged: flagged,
    }
}

fn scan(hz: &HardyZ, height: f64, step: f64, abs_error: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if height <= step {
        return out;
    }
    let mut t_prev = step * 0.5; // start off 0 to dodge the t=0 parity point
    let mut z_prev = hz.z(t_prev);
    let mut t = t_prev + step;
    while t_prev < height {
        let t_here = t.min(height);
        let z_here = hz.z(t_here);
        if z_prev == 0.0 {
            out.push(t_prev);
        } else if z_prev.signum() != z_here.signum() && z_here != 0.0 {
            out.push(bisect(hz, t_prev, t_here, z_prev, abs_error));
        }
        t_prev = t_here;
        z_prev = z_here;
        t += step;
    }
    out
}

fn bisect(hz: &HardyZ, mut lo: f64, mut hi: f64, z_lo: f64, abs_error: f64) -> f64 {
    let mut sign_lo = z_lo.signum();
    while hi - lo > abs_error {
        let mid = 0.5 * (lo + hi);
        let z_mid = hz.z(mid);
        if z_mid == 0.0 {
            return mid;
        }
        if z_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
            let _ = &mut sign_lo;
        }
    }
    0.5 * (lo + hi)
}

/// tail_second_moment: (1/2π)∫_T^∞ log(q*t/2π)/(¼+t²) dt, the
/// estimated mass of Σ 1/(¼+γ²) above the truncation height.
pub fn tail_second_moment(q_star: u64, height: f64) -> f64 {
    // substitute t = T e^u; integrand becomes smooth and exponentially
    // decaying on [0, ~40]
    let l0 = (q_star as f64 * height / TAU).ln();
    let t0 = height;
    let f = move |u: f64| {
        let t = t0 * u.exp();
        t * (l0 + u) / (0.25 + t * t)
    };
    let scale = (l0.abs() + 1.0) / t0;
    adaptive_simpson(&f, 0.0, 40.0, 1e-7 * scale)
        .expect("tail integrand is smooth")
        / TAU
}

// ---------------------------------------------------------------------------
// Zero files
// ---------------------------------------------------------------------------

pub const ZERO_FILE_HEADER: &str = "conductor,conrey_index,ordinate,abs_error";

/// export_zeros.
pub fn export_zeros(set: &ZeroSet, path: &Path) -> Result<()> {
    set.validate()?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = BufWriter::new(std::fs::File::create(&tmp)?);
        writeln!(w, "{ZERO_FILE_HEADER}")?;
        for g in &set.ordinates {
            writeln!(
                w,
                "{},{},{:.12},{:e}",
                set.conductor, set.conrey_index, g, set.abs_error
            )?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// import_zeros. `height` defaults to the last ordinate when the
/// file name does not carry one.
pub fn import_zeros(path: &Path, height: Option<f64>) -> Result<ZeroSet> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| RaceError::ParseError {
        line: 1,
        msg: "empty file".into(),
    })?;
    let header = header?;
    if header.trim() != ZERO_FILE_HEADER {
        return Err(RaceError::ParseError {
            line: 1,
            msg: format!("bad header {header:?}"),
        });
    }
    let mut conductor = None;
    let mut index = None;
    let mut ordinates = Vec::new();
    let mut abs_error = DEFAULT_ABS_ERROR;
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(RaceError::ParseError {
                line: i + 1,
                msg: format!("expected 4 fields, got {}", parts.len()),
            });
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| RaceError::ParseError {
                line: i + 1,
                msg: format!("bad {what}: {s:?}"),
            })
        };
        let c = parse(parts[0], "conductor")? as u64;
        let ix = parse(parts[1], "conrey_index")? as u64;
        if *conductor.get_or_insert(c) != c || *index.get_or_insert(ix) != ix {
            return Err(RaceError::ParseError {
                line: i + 1,
                msg: "mixed characters in one file".into(),
            });
        }
        ordinates.push(parse(parts[2], "ordinate")?);
        abs_error = parse(parts[3], "abs_error")?;
    }
    let set = ZeroSet {
        conductor: conductor.unwrap_or(0),
        conrey_index: index.unwrap_or(0),
        height: height.unwrap_or_else(|| ordinates.last().copied().unwrap_or(0.0)),
        ordinates,
        abs_error,
        source: ZeroSource::Imported,
        count_flagged: false,
    };
    set.validate()?;
    Ok(set)
}

// ---------------------------------------------------------------------------
// Store: cache + routing through primitive inducers
// ---------------------------------------------------------------------------

/// Environment variable overriding the zero-data directory.
pub const ZERO_DIR_ENV: &str = "RACE_ZERO_DIR";

/// Disk-backed, memory-memoized zero sets keyed by
/// (conductor, Conrey index, height). Imprimitive characters never own a
/// set; every lookup routes through the primitive inducer.
pub struct ZeroStore {
    root: PathBuf,
    opts: ScanOptions,
    cache: Mutex<HashMap<(u64, u64, u64), Arc<ZeroSet>>>,
}

fn height_key(height: f64) -> u64 {
    (height * 1e6).round() as u64
}

impl ZeroStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ZeroStore {
            root: root.into(),
            opts: ScanOptions::default(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Honor RACE_ZERO_DIR, falling back to the given default.
    pub fn from_env(default_root: impl Into<PathBuf>) -> Self {
        match std::env::var(ZERO_DIR_ENV) {
            Ok(dir) if !dir.is_empty() => Self::new(dir),
            _ => Self::new(default_root),
        }
    }

    pub fn with_options(mut self, opts: ScanOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, conductor: u64, index: u64, height: f64) -> PathBuf {
        self.root
            .join(format!("q{conductor}"))
            .join(format!("chi{index}_T{height}.csv"))
    }

    /// Zero set of the primitive inducer of `chi`, computed on cache miss.
    pub fn get(&self, chi: &DirichletCharacter, height: f64) -> Result<Arc<ZeroSet>> {
        let (conductor, inducer) = conductor_and_inducer(chi)?;
        if conductor == 1 {
            return Err(RaceError::MustBePrimitive { conductor: 1, modulus: chi.q() });
        }
        self.get_primitive(&inducer, height)
    }

    pub fn get_primitive(&self, chi: &DirichletCharacter, height: f64) -> Result<Arc<ZeroSet>> {
        let key = (chi.q(), chi.conrey_index(), height_key(height));
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let path = self.path_for(chi.q(), chi.conrey_index(), height);
        let set = if path.exists() {
            Arc::new(import_zeros(&path, Some(height))?)
        } else {
            let hz = HardyZ::new(chi)?;
            let set = Arc::new(find_zeros(&hz, height, self.opts));
            export_zeros(&set, &path)?;
            set
        };
        self.cache.lock().unwrap().insert(key, set.clone());
        Ok(set)
    }

    /// Compute (in parallel, one task per distinct primitive inducer) the
    /// zero sets needed by every nontrivial character of a table.
    pub fn ensure_table(&self, table: &CharacterTable, height: f64) -> Result<()> {
        let mut inducers: Vec<DirichletCharacter> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for chi in table.nontrivial() {
            let (c, ind) = conductor_and_inducer(chi)?;
            if seen.insert((c, ind.conrey_index())) {
                inducers.push(ind);
            }
        }
        inducers
            .par_iter()
            .map(|chi| self.get_primitive(chi, height).map(|_| ()))
            .collect::<Result<Vec<()>>>()?;
        Ok(())
    }

    /// Per nontrivial character of the table, its inducer's zero set, in
    /// ascending Conrey-index order (the fixed combination order used by
    /// all downstream sums).
    pub fn table_zero_sets(
        &self,
        table: &CharacterTable,
        height: f64,
    ) -> Result<Vec<(DirichletCharacter, Arc<ZeroSet>)>> {
        self.ensure_table(table, height)?;
        let mut missing = Vec::new();
        let mut out = Vec::new();
        for chi in table.nontrivial() {
            match self.get(chi, height) {
                Ok(set) => out.push((chi.clone(), set)),
                Err(e) => missing.push(format!("chi_{}({}, .): {e}", chi.q(), chi.conrey_index())),
            }
        }
        if !missing.is_empty() {
            return Err(RaceError::IncompleteZeroData(missing));
        }
        Ok(out)
    }
}
