//! Deterministic output artifacts: CSV tables and SVG plots.
//!
//! Every artifact embeds the config hash and the seed so a file can be
//! traced back to the exact run that produced it. Rendering is pure
//! string formatting — identical inputs give byte-identical output.

use std::fmt::Write as _;
use std::path::Path;

use crate::characters::RaceSpec;
use crate::density::DensityEstimate;
use crate::empirical::{LogDensityEstimate, PrimeCheckpointSeries};
use crate::Result;

/// Provenance stamp carried by every artifact.
#[derive(Debug, Clone)]
pub struct ReportMeta {
    pub config_hash: String,
    pub seed: u64,
}

impl ReportMeta {
    fn comment(&self) -> String {
        format!("# config_hash={} seed={}", self.config_hash, self.seed)
    }
}

/// Compact ordering label: `q=5:2>3`.
pub fn spec_label(spec: &RaceSpec) -> String {
    let classes: Vec<String> = spec.classes().iter().map(|c| c.a().to_string()).collect();
    format!("q={}:{}", spec.modulus().q(), classes.join(">"))
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn fmt_opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV table of density estimates: `spec,method,value,uncertainty,T,N,seed`.
pub fn density_csv(rows: &[DensityEstimate], meta: &ReportMeta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", meta.comment());
    let _ = writeln!(s, "spec,method,value,uncertainty,T,N,seed");
    for est in rows {
        let seed = est.stream.map(|st| st.seed).unwrap_or(meta.seed);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            spec_label(&est.spec),
            est.method.label(),
            est.value,
            est.uncertainty,
            fmt_opt_f64(est.height),
            fmt_opt_usize(est.samples),
            seed,
        );
    }
    s
}

/// Empirical log-density rows: `spec,x_max,value,lower,upper,flips,cells`.
pub fn empirical_csv(rows: &[LogDensityEstimate], meta: &ReportMeta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", meta.comment());
    let _ = writeln!(s, "spec,x_max,value,lower,upper,flips,cells");
    for est in rows {
        let classes: Vec<String> = est.classes.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(
            s,
            "q={}:{},{},{},{},{},{},{}",
            est.q,
            classes.join(">"),
            est.x_max,
            est.value,
            est.lower,
            est.upper,
            est.flips,
            est.grid_cells,
        );
    }
    s
}

// ---------------------------------------------------------------------------
// Property-check report (verify-paper)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl CheckStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckLine {
    pub fn new(name: &str, status: CheckStatus, detail: impl Into<String>) -> Self {
        CheckLine { name: name.to_string(), status, detail: detail.into() }
    }

    pub fn pass_fail(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckLine::new(name, status, detail)
    }
}

pub fn any_failure(lines: &[CheckLine]) -> bool {
    lines.iter().any(|l| l.status == CheckStatus::Fail)
}

/// `name,status,detail` — detail sanitized so the row stays one CSV record.
pub fn check_report_csv(lines: &[CheckLine], meta: &ReportMeta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", meta.comment());
    let _ = writeln!(s, "check,status,detail");
    for l in lines {
        let detail: String = l
            .detail
            .chars()
            .map(|c| if c == ',' { ';' } else if c == '\n' { ' ' } else { c })
            .collect();
        let _ = writeln!(s, "{},{},{}", l.name, l.status.label(), detail);
    }
    s
}

// ---------------------------------------------------------------------------
// SVG plots
// ---------------------------------------------------------------------------

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 55.0;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct SvgCanvas {
    body: String,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl SvgCanvas {
    fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        SvgCanvas { body: String::new(), x_min, x_max, y_min, y_max }
    }

    fn px(&self, x: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-300);
        MARGIN + (x - self.x_min) / span * (SVG_W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-300);
        SVG_H - MARGIN - (y - self.y_min) / span * (SVG_H - 2.0 * MARGIN)
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
            color,
            coords.join(" ")
        );
    }

    fn rect(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, color: &str) {
        let (px0, px1) = (self.px(x0), self.px(x1));
        let (py0, py1) = (self.py(y0.max(y1)), self.py(y0.min(y1)));
        let _ = writeln!(
            self.body,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
            px0,
            py0,
            (px1 - px0).abs(),
            (py1 - py0).abs(),
            color
        );
    }

    fn text(&mut self, px: f64, py: f64, msg: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">{}</text>",
            px,
            py,
            xml_escape(msg)
        );
    }

    fn render(self, title: &str, meta: &ReportMeta) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
             viewBox=\"0 0 {SVG_W} {SVG_H}\">"
        );
        let _ = writeln!(s, "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{MARGIN}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{}</text>",
            xml_escape(title)
        );
        let _ = writeln!(
            s,
            "<text x=\"{MARGIN}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"10\" \
             fill=\"gray\">config_hash={} seed={}</text>",
            SVG_H - 12.0,
            xml_escape(&meta.config_hash),
            meta.seed
        );
        // axes
        let _ = writeln!(
            s,
            "<line x1=\"{MARGIN}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" stroke=\"black\"/>",
            SVG_H - MARGIN,
            SVG_W - MARGIN
        );
        let _ = writeln!(
            s,
            "<line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{:.2}\" stroke=\"black\"/>",
            SVG_H - MARGIN
        );
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Histogram of a sample column (e.g. one coordinate of the race model).
pub fn histogram_svg(samples: &[f64], bins: usize, title: &str, meta: &ReportMeta) -> String {
    let bins = bins.max(1);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in samples {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(lo < hi) {
        lo = -1.0;
        hi = 1.0;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in samples {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let peak = *counts.iter().max().unwrap() as f64;
    let mut c = SvgCanvas::new(lo, hi, 0.0, peak.max(1.0));
    for (i, &n) in counts.iter().enumerate() {
        if n > 0 {
            let x0 = lo + i as f64 * width;
            c.rect(x0, 0.0, x0 + width, n as f64, PALETTE[0]);
        }
    }
    c.text(MARGIN, 40.0, &format!("n={} range=[{lo:.3},{hi:.3}]", samples.len()));
    c.render(title, meta)
}

/// E-vector trajectories against log₁₀ x, with the running log-density of
/// the spec's strict ordering drawn on a secondary 0–1 scale.
pub fn race_svg(series: &PrimeCheckpointSeries, spec: &RaceSpec, meta: &ReportMeta) -> Result<String> {
    let n = series.xs.len();
    let mut trajectories: Vec<Vec<(f64, f64)>> = vec![Vec::with_capacity(n); spec.r()];
    let mut running: Vec<(f64, f64)> = Vec::with_capacity(n);
    let (mut y_lo, mut y_hi) = (-1.0f64, 1.0f64);
    let mut ordered_mass = 0.0;
    let mut prev_log = (series.xs[0] as f64).ln();
    for i in 0..n {
        let x = series.xs[i];
        let lx = (x as f64).log10();
        let (e, _) = series.e_vector(x, spec)?;
        for (j, &v) in e.iter().enumerate() {
            trajectories[j].push((lx, v));
            y_lo = y_lo.min(v);
            y_hi = y_hi.max(v);
        }
        let log_x = (x as f64).ln();
        if e.windows(2).all(|w| w[0] > w[1]) {
            ordered_mass += log_x - prev_log;
        }
        prev_log = log_x;
        let denom = (log_x - (series.xs[0] as f64).ln()).max(1e-12);
        running.push((lx, ordered_mass / denom));
    }
    let x_lo = trajectories[0].first().map(|p| p.0).unwrap_or(0.0);
    let x_hi = trajectories[0].last().map(|p| p.0).unwrap_or(1.0);
    let mut c = SvgCanvas::new(x_lo, x_hi, y_lo, y_hi);
    for (j, t) in trajectories.iter().enumerate() {
        c.polyline(t, PALETTE[j % PALETTE.len()]);
    }
    // running density mapped onto the same canvas: 0 → y_lo, 1 → y_hi
    let scaled: Vec<(f64, f64)> = running
        .iter()
        .map(|&(x, d)| (x, y_lo + d * (y_hi - y_lo)))
        .collect();
    c.polyline(&scaled, "black");
    for (j, cls) in spec.classes().iter().enumerate() {
        c.text(
            SVG_W - MARGIN - 150.0,
            40.0 + 14.0 * j as f64,
            &format!("E(x;{},{})", spec.modulus().q(), cls.a()),
        );
    }
    c.text(SVG_W - MARGIN - 150.0, 40.0 + 14.0 * spec.r() as f64, "running log-density");
    Ok(c.render(&format!("race {}", spec_label(spec)), meta))
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact")
    ));
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
