//! Output files: CSV, JSON reports, PGM frames and polyline SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::LabError;

/// Default output directory when neither `--out` nor `run.out` is given.
pub const OUT_ENV: &str = "RAMSEY_LAB_OUT";

pub fn resolve_out_dir(cli: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.run.out {
        return PathBuf::from(p);
    }
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("ramsey-lab-out"))
}

/// Every JSON report has this envelope so that it can be re-run from the
/// embedded configuration.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a RunConfig,
    pub results: T,
}

pub struct Output {
    pub dir: PathBuf,
    pub command: String,
    written: Vec<PathBuf>,
}

impl Output {
    /// Creates `<root>/<command>/`.
    pub fn create(root: &Path, command: &str) -> Result<Self, LabError> {
        let dir = root.join(command);
        fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;
        Ok(Self { dir, command: command.to_string(), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<PathBuf, LabError> {
        self.bytes(name, body.as_bytes())
    }

    pub fn bytes(&mut self, name: &str, body: &[u8]) -> Result<PathBuf, LabError> {
        let p = self.path(name);
        fs::write(&p, body).map_err(|e| LabError::io(&p, e))?;
        self.written.push(p.clone());
        Ok(p)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, LabError> {
        let p = self.path(name);
        let wrap = |source| LabError::Csv { path: p.clone(), source };
        let mut w = csv::Writer::from_path(&p).map_err(wrap)?;
        w.write_record(header).map_err(wrap)?;
        for r in rows {
            w.write_record(r).map_err(wrap)?;
        }
        w.flush().map_err(|e| LabError::io(&p, e))?;
        self.written.push(p.clone());
        Ok(p)
    }

    pub fn report<T: Serialize>(&mut self, cfg: &RunConfig, results: T) -> Result<PathBuf, LabError> {
        let r = Report { command: &self.command, version: env!("CARGO_PKG_VERSION"), config: cfg, results };
        let mut s = serde_json::to_string_pretty(&r)?;
        s.push('\n');
        self.text("report.json", &s)
    }

    pub fn config(&mut self, cfg: &RunConfig) -> Result<PathBuf, LabError> {
        self.text("config.toml", &cfg.to_toml())
    }
}

/// Shortest round-trip decimal; `inf`/`NaN` pass through as text.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Binary 16-bit PGM, values rounded and clamped to [0, 65535].
pub fn pgm16(width: usize, height: usize, data: &[f64]) -> Vec<u8> {
    assert_eq!(data.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    out.reserve(2 * data.len());
    for &v in data {
        let c = if v.is_finite() { v.round().clamp(0.0, 65535.0) as u16 } else { 0 };
        out.extend_from_slice(&c.to_be_bytes());
    }
    out
}

/// One-series line plot with axes and five ticks per axis.
pub struct Plot<'a> {
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const ML: f64 = 80.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 60.0;

impl Plot<'_> {
    pub fn svg(&self) -> String {
        let pts: Vec<(f64, f64)> =
            self.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        let (mut x0, mut x1) = bounds(pts.iter().map(|p| p.0));
        let (mut y0, mut y1) = bounds(pts.iter().map(|p| p.1));
        widen(&mut x0, &mut x1);
        widen(&mut y0, &mut y1);
        let pw = W - ML - MR;
        let ph = H - MT - MB;
        let sx = |x: f64| ML + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MT + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(self.title));
        let _ = writeln!(
            s,
            r#"<path d="M{ML} {MT} V{} H{}" fill="none" stroke="black"/>"#,
            H - MB,
            W - MR
        );
        for k in 0..5 {
            let f = k as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(s, r#"<path d="M{px:.2} {} v5" stroke="black"/>"#, H - MB);
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, H - MB + 18.0, tick(xv));
            let _ = writeln!(s, r#"<path d="M{ML} {py:.2} h-5" stroke="black"/>"#);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ML - 8.0, py + 4.0, tick(yv));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, ML + pw / 2.0, H - 16.0, esc(self.xlabel));
        let _ = writeln!(
            s,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            MT + ph / 2.0,
            esc(self.ylabel)
        );
        if !pts.is_empty() {
            let mut d = String::new();
            for (x, y) in &pts {
                let _ = write!(d, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#, d.trim_end());
        }
        s.push_str("</svg>\n");
        s
    }
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn widen(lo: &mut f64, hi: &mut f64) {
    if !lo.is_finite() || !hi.is_finite() {
        *lo = 0.0;
        *hi = 1.0;
    } else if *hi - *lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
        let pad = if *lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        *lo -= pad;
        *hi += pad;
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{v:.2e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
