//! CSV and SVG output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::PowerLawFit;

/// One replication (or one grid cell) of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub experiment: String,
    pub n: usize,
    /// Intrinsic-volume index, 0 where it does not apply.
    pub j: usize,
    /// Number of points; for parameter sweeps without one, the sweep position.
    pub big_n: usize,
    pub rep: usize,
    pub seed: u64,
    pub value: f64,
    pub wall_time_ms: f64,
}

pub const CSV_HEADER: [&str; 8] = ["experiment", "n", "j", "N", "rep", "seed", "value", "wall_time_ms"];

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Write records under the standard header. Values use Rust's shortest round-trip formatting.
pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    w.write_record(CSV_HEADER).map_err(csv_error(path))?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.n.to_string(),
            r.j.to_string(),
            r.big_n.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            r.value.to_string(),
            format!("{:.3}", r.wall_time_ms),
        ])
        .map_err(csv_error(path))?;
    }
    w.flush().map_err(io_error(path))
}

/// Read back a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_path(path).map_err(csv_error(path))?;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_error(path))?;
        let field = |k: usize| row.get(k).unwrap_or("");
        let bad = |k: usize| Error::Config {
            location: format!("{}:{}", path.display(), row.position().map_or(0, |p| p.line())),
            message: format!("bad `{}` field `{}`", CSV_HEADER[k], field(k)),
        };
        out.push(RunRecord {
            experiment: field(0).to_string(),
            n: field(1).parse().map_err(|_| bad(1))?,
            j: field(2).parse().map_err(|_| bad(2))?,
            big_n: field(3).parse().map_err(|_| bad(3))?,
            rep: field(4).parse().map_err(|_| bad(4))?,
            seed: field(5).parse().map_err(|_| bad(5))?,
            value: field(6).parse().map_err(|_| bad(6))?,
            wall_time_ms: field(7).parse().map_err(|_| bad(7))?,
        });
    }
    Ok(out)
}

/// A per-cell statistic such as a variance or a Wasserstein distance.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub n: usize,
    pub j: usize,
    pub big_n: usize,
    pub statistic: String,
    pub value: f64,
}

pub fn emit_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error(path))?;
    w.write_record(["experiment", "n", "j", "N", "statistic", "value"])
        .map_err(csv_error(path))?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.n.to_string(),
            r.j.to_string(),
            r.big_n.to_string(),
            r.statistic.clone(),
            r.value.to_string(),
        ])
        .map_err(csv_error(path))?;
    }
    w.flush().map_err(io_error(path))
}

/// One scatter series of a log-log plot, optionally with its fitted power law.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub fit: Option<PowerLawFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub name: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<PlotSeries>,
}

const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Slope annotation as printed in plots.
pub fn slope_label(fit: &PowerLawFit) -> String {
    format!("slope {:.3}", fit.exponent)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render a self-contained log-log scatter plot. Non-positive points are skipped.
pub fn render_svg(plot: &Plot) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const L: f64 = 80.0;
    const R: f64 = 200.0;
    const T: f64 = 40.0;
    const B: f64 = 60.0;
    let pts: Vec<(f64, f64)> = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0, 1.0, 0.0, 1.0);
    if !pts.is_empty() {
        x0 = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        x1 = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        y0 = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        y1 = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    }
    let pad = |a: f64, b: f64| if b - a < 1e-9 { (a - 0.5, b + 0.5) } else { (a - 0.05 * (b - a), b + 0.05 * (b - a)) };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let sy = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (W - R + L) / 2.0, escape(&plot.title));
    let _ = writeln!(s, r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - L - R, H - T - B);
    for k in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let x = sx(k as f64);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{}" x2="{x:.1}" y2="{}" stroke="black"/><text x="{x:.1}" y="{}" text-anchor="middle">1e{k}</text>"#, H - B, H - B + 5.0, H - B + 18.0);
    }
    for k in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let y = sy(k as f64);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.1}" x2="{L}" y2="{y:.1}" stroke="black"/><text x="{}" y="{:.1}" text-anchor="end">1e{k}</text>"#, L - 5.0, L - 8.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (W - R + L) / 2.0, H - 15.0, escape(&plot.x_label));
    let _ = writeln!(s, r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#, (H - B + T) / 2.0, (H - B + T) / 2.0, escape(&plot.y_label));
    for (k, series) in plot.series.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        for &(x, y) in series.points.iter().filter(|&&(x, y)| x > 0.0 && y > 0.0) {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="{colour}"/>"#, sx(x.log10()), sy(y.log10()));
        }
        let mut legend = escape(&series.label);
        if let Some(fit) = &series.fit {
            let xs: Vec<f64> = series.points.iter().filter(|p| p.0 > 0.0).map(|p| p.0.log10()).collect();
            if let (Some(a), Some(b)) = (xs.iter().copied().reduce(f64::min), xs.iter().copied().reduce(f64::max)) {
                let line_y = |lx: f64| (fit.log_intercept + fit.exponent * lx * std::f64::consts::LN_10) / std::f64::consts::LN_10;
                let _ = writeln!(s, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-dasharray="5,3"/>"#, sx(a), sy(line_y(a)), sx(b), sy(line_y(b)));
            }
            legend = format!("{legend}, {}", slope_label(fit));
        }
        let ly = T + 16.0 + 18.0 * k as f64;
        let _ = writeln!(s, r#"<circle cx="{}" cy="{:.1}" r="3.5" fill="{colour}"/><text x="{}" y="{:.1}">{legend}</text>"#, W - R + 15.0, ly - 4.0, W - R + 25.0, ly);
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg_plot(plot: &Plot, path: &Path) -> Result<()> {
    fs::write(path, render_svg(plot)).map_err(io_error(path))
}
