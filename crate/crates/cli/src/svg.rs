//! Minimal standalone SVG plots: one polyline and/or marker set per series
//! on linear or base-10 logarithmic axes.

use std::fmt::Write as _;
use std::path::Path;

use edgechaos::io::parse_csv;
use edgechaos::{Error, Result};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
pub const PLOT_WIDTH: f64 = WIDTH - LEFT - RIGHT;
pub const PLOT_HEIGHT: f64 = HEIGHT - TOP - BOTTOM;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Markers,
    Line,
    LineMarkers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Self {
            label: label.into(),
            points,
            style,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxesSpec {
    pub title: Option<String>,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
}

impl AxesSpec {
    pub fn linear(x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: None,
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
        }
    }

    pub fn semilog_x(x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            x_scale: Scale::Log10,
            ..Self::linear(x_label, y_label)
        }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }
}

fn reject(reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: "series",
        reason: reason.into(),
    }
}

/// Data range of one axis in transformed units.
#[derive(Debug, Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
    scale: Scale,
}

impl Range {
    fn new(values: impl Iterator<Item = f64>, scale: Scale) -> Self {
        let (mut lo, mut hi) = values
            .map(|v| transform(v, scale))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        match scale {
            Scale::Log10 => {
                lo = lo.floor();
                hi = hi.ceil();
                if hi == lo {
                    hi = lo + 1.0;
                }
            }
            Scale::Linear => {
                if hi == lo {
                    let half = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
                    lo -= half;
                    hi += half;
                } else {
                    let pad = 0.05 * (hi - lo);
                    lo -= pad;
                    hi += pad;
                }
            }
        }
        Self { lo, hi, scale }
    }

    fn unit(&self, v: f64) -> f64 {
        (transform(v, self.scale) - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log10 => (self.lo as i32..=self.hi as i32).map(|k| 10f64.powi(k)).collect(),
            Scale::Linear => {
                let step = nice_step((self.hi - self.lo) / 5.0);
                let first = (self.lo / step).ceil() as i64;
                let last = (self.hi / step).floor() as i64;
                (first..=last).map(|k| k as f64 * step).collect()
            }
        }
    }
}

fn transform(v: f64, scale: Scale) -> f64 {
    match scale {
        Scale::Linear => v,
        Scale::Log10 => v.log10(),
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_label(v: f64, scale: Scale) -> String {
    match scale {
        Scale::Log10 => format!("1e{}", v.log10().round() as i32),
        Scale::Linear => {
            let s = format!("{:.6}", v);
            let s = s.trim_end_matches('0').trim_end_matches('.');
            if s == "-0" {
                "0".to_string()
            } else {
                s.to_string()
            }
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if c.is_control() => {}
            c => out.push(c),
        }
    }
    out
}

fn validate(series: &[Series], axes: &AxesSpec) -> Result<()> {
    if series.is_empty() {
        return Err(reject("at least one series is required"));
    }
    for s in series {
        if s.points.is_empty() {
            return Err(reject(format!("series `{}` has no points", s.label)));
        }
        for &(x, y) in &s.points {
            if !x.is_finite() || !y.is_finite() {
                return Err(reject(format!("series `{}` has a non-finite point", s.label)));
            }
            if (axes.x_scale == Scale::Log10 && x <= 0.0) || (axes.y_scale == Scale::Log10 && y <= 0.0) {
                return Err(reject(format!("series `{}` has a non-positive value on a log axis", s.label)));
            }
        }
    }
    Ok(())
}

/// Render the plot as an SVG document.
pub fn render_svg(series: &[Series], axes: &AxesSpec) -> Result<String> {
    validate(series, axes)?;
    let all = || series.iter().flat_map(|s| s.points.iter());
    let xr = Range::new(all().map(|p| p.0), axes.x_scale);
    let yr = Range::new(all().map(|p| p.1), axes.y_scale);
    let px = |x: f64| LEFT + xr.unit(x) * PLOT_WIDTH;
    let py = |y: f64| TOP + (1.0 - yr.unit(y)) * PLOT_HEIGHT;

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if let Some(title) = &axes.title {
        let _ = writeln!(
            w,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
    }
    let (x0, x1, y0, y1) = (LEFT, LEFT + PLOT_WIDTH, TOP, TOP + PLOT_HEIGHT);
    let _ = writeln!(
        w,
        r#"<rect class="frame" x="{x0}" y="{y0}" width="{PLOT_WIDTH}" height="{PLOT_HEIGHT}" fill="none" stroke="black"/>"#
    );
    for t in xr.ticks() {
        let x = px(t);
        let _ = writeln!(w, r#"<line class="tick" x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y1 + 18.0,
            escape(&tick_label(t, xr.scale))
        );
    }
    for t in yr.ticks() {
        let y = py(t);
        let _ = writeln!(w, r#"<line class="tick" x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            y + 4.0,
            escape(&tick_label(t, yr.scale))
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (y0 + y1) / 2.0,
        escape(&axes.y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(w, r#"<g class="series">"#);
        if matches!(s.style, Style::Line | Style::LineMarkers) {
            let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(
                w,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        if matches!(s.style, Style::Markers | Style::LineMarkers) {
            for &(x, y) in &s.points {
                let _ = writeln!(
                    w,
                    r#"<circle class="marker" cx="{:.4}" cy="{:.4}" r="3" fill="{color}"/>"#,
                    px(x),
                    py(y)
                );
            }
        }
        let ly = y0 + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            x0 + 10.0,
            escape(&s.label)
        );
        let _ = writeln!(w, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render and write to `path`.
pub fn emit_svg(series: &[Series], axes: &AxesSpec, path: &Path) -> Result<()> {
    let text = render_svg(series, axes)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Build series from a CSV table. With `group`, rows are split by the value
/// of that column in order of first appearance.
pub fn series_from_csv(text: &str, x: &str, y: &str, group: Option<&str>, style: Style) -> Result<Vec<Series>> {
    let table = parse_csv(text)?;
    let col = |name: &str| {
        table.column(name).ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("missing column `{name}`"),
        })
    };
    let (xi, yi) = (col(x)?, col(y)?);
    let gi = group.map(col).transpose()?;
    let mut out: Vec<Series> = Vec::new();
    for (r, row) in table.rows.iter().enumerate() {
        let line = r + 2;
        let px = edgechaos::io::parse_real(&row[xi], line)?;
        let py = edgechaos::io::parse_real(&row[yi], line)?;
        let label = match gi {
            Some(g) => row[g].clone(),
            None => y.to_string(),
        };
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((px, py)),
            None => out.push(Series::new(label, vec![(px, py)], style)),
        }
    }
    if out.is_empty() {
        return Err(reject("table has no rows"));
    }
    Ok(out)
}
