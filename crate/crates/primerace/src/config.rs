//! Run configuration: `key = value` file, environment overrides, and the
//! frozen calibration constants reported in every artifact.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::lzeros::ZERO_DIR_ENV;
use crate::{RaceError, Result};

/// Envelope validity threshold: decay-envelope checks require r ≤ c₁·log q.
pub const DEFAULT_C1: f64 = 0.1;
/// Calibration constant for the asymptotic error envelopes (c·r²/log q).
pub const DEFAULT_ENVELOPE_C: f64 = 5.0;
/// Additive part of the zero-count slack 2·log(q*T) + slack.
pub const DEFAULT_COUNT_SLACK: f64 = 5.0;
/// Correlation off-diagonal trend constant: max |𝒞_jk| ≤ α/log q.
pub const DEFAULT_CORRELATION_ALPHA: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub zero_dir: PathBuf,
    pub out_dir: PathBuf,
    pub default_t: f64,
    pub default_n: usize,
    pub seed: u64,
    pub c1: f64,
    pub envelope_c: f64,
    pub count_slack: f64,
    pub correlation_alpha: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            zero_dir: PathBuf::from("zeros"),
            out_dir: PathBuf::from("out"),
            default_t: 1000.0,
            default_n: 1_000_000,
            seed: 20260824,
            c1: DEFAULT_C1,
            envelope_c: DEFAULT_ENVELOPE_C,
            count_slack: DEFAULT_COUNT_SLACK,
            correlation_alpha: DEFAULT_CORRELATION_ALPHA,
        }
    }
}

impl RunConfig {
    /// Parse a `key = value` file; unknown keys are rejected so typos
    /// fail loudly. `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| RaceError::ParseError {
                line: i + 1,
                msg: format!("expected key = value, got {raw:?}"),
            })?;
            cfg.set(key.trim(), value.trim()).map_err(|msg| RaceError::ParseError {
                line: i + 1,
                msg,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("bad number {v:?}"))
        }
        match key {
            "zero_dir" => self.zero_dir = PathBuf::from(value),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "default_t" => self.default_t = num(value)?,
            "default_n" => self.default_n = num(value)?,
            "seed" => self.seed = num(value)?,
            "c1" => self.c1 = num(value)?,
            "envelope_c" => self.envelope_c = num(value)?,
            "count_slack" => self.count_slack = num(value)?,
            "correlation_alpha" => self.correlation_alpha = num(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("default_t", self.default_t),
            ("c1", self.c1),
            ("envelope_c", self.envelope_c),
            ("count_slack", self.count_slack),
            ("correlation_alpha", self.correlation_alpha),
        ] {
            if !(v > 0.0) {
                return Err(RaceError::ValidationError(format!("{name} must be positive")));
            }
        }
        if self.default_n == 0 {
            return Err(RaceError::ValidationError("default_n must be positive".into()));
        }
        Ok(())
    }

    /// Apply the RACE_ZERO_DIR environment override.
    pub fn with_env(mut self) -> Self {
        if let Ok(dir) = std::env::var(ZERO_DIR_ENV) {
            if !dir.is_empty() {
                self.zero_dir = PathBuf::from(dir);
            }
        }
        self
    }

    /// Canonical text form: fixed key order, one per line.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "zero_dir = {}", self.zero_dir.display());
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(s, "default_t = {}", self.default_t);
        let _ = writeln!(s, "default_n = {}", self.default_n);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "c1 = {}", self.c1);
        let _ = writeln!(s, "envelope_c = {}", self.envelope_c);
        let _ = writeln!(s, "count_slack = {}", self.count_slack);
        let _ = writeln!(s, "correlation_alpha = {}", self.correlation_alpha);
        s
    }

    /// The fields that determine computed values; the two directory
    /// paths are plumbing and stay out of the digest so the same run
    /// into a different location yields identical artifacts.
    fn calibration_canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "default_t = {}", self.default_t);
        let _ = writeln!(s, "default_n = {}", self.default_n);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "c1 = {}", self.c1);
        let _ = writeln!(s, "envelope_c = {}", self.envelope_c);
        let _ = writeln!(s, "count_slack = {}", self.count_slack);
        let _ = writeln!(s, "correlation_alpha = {}", self.correlation_alpha);
        s
    }

    /// Short hex digest of the calibration fields, embedded in artifacts.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.calibration_canonical().as_bytes());
        let mut s = String::new();
        for b in &digest[..8] {
            let _ = write!(s, "{b:02x}");
        }
        s
    }
}
