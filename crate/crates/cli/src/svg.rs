//! Static SVG line plots.

use std::fmt::Write;
use std::path::Path;

use anyhow::{bail, Result};

use crate::output::write_file;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 300.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555"];

#[derive(Clone, Debug, Default)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Abscissas of vertical markers.
    pub markers: Vec<f64>,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), points, markers: Vec::new() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Axes {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl Axes {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Axes { title: title.into(), x_label: x_label.into(), y_label: y_label.into() }
    }
}

pub struct Panel {
    pub axes: Axes,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(x: f64) -> String {
    let r: f64 = format!("{x:.3e}").parse().unwrap_or(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Data range, optionally widened to contain zero and padded at the top.
fn range(values: impl Iterator<Item = f64>, include_zero: bool, pad: bool) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if include_zero {
        lo = lo.min(0.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, if pad { hi + 0.05 * (hi - lo) } else { hi })
}

fn render_panel(svg: &mut String, panel: &Panel, top: f64) -> Result<()> {
    if panel.series.is_empty() || panel.series.iter().all(|s| s.points.is_empty()) {
        bail!("nothing to plot");
    }
    let x_label = if panel.axes.x_label.is_empty() { "k" } else { &panel.axes.x_label };
    let y_label = if panel.axes.y_label.is_empty() { "S(k)" } else { &panel.axes.y_label };
    let pts = || panel.series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = range(pts().map(|p| p.0), false, false);
    let (y0, y1) = range(pts().map(|p| p.1), true, true);
    let (px0, px1) = (LEFT, WIDTH - RIGHT);
    let (py0, py1) = (top + PANEL_HEIGHT - BOTTOM, top + TOP);
    let sx = |x: f64| px0 + (x - x0) / (x1 - x0) * (px1 - px0);
    let sy = |y: f64| py0 + (y - y0) / (y1 - y0) * (py1 - py0);

    writeln!(svg, r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000"/>"##, px0, py1, px1 - px0, py0 - py1)?;
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (xp, yp) = (sx(xv), sy(yv));
        writeln!(svg, r##"<line x1="{xp:.2}" y1="{py0:.2}" x2="{xp:.2}" y2="{:.2}" stroke="#000"/>"##, py0 + 5.0)?;
        writeln!(svg, r#"<text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, py0 + 18.0, tick_label(xv))?;
        writeln!(svg, r##"<line x1="{:.2}" y1="{yp:.2}" x2="{px0:.2}" y2="{yp:.2}" stroke="#000"/>"##, px0 - 5.0)?;
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, px0 - 8.0, yp + 4.0, tick_label(yv))?;
    }
    writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (px0 + px1) / 2.0, py0 + 38.0, escape(x_label))?;
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        LEFT - 50.0,
        (py0 + py1) / 2.0,
        LEFT - 50.0,
        (py0 + py1) / 2.0,
        escape(y_label)
    )?;
    if !panel.axes.title.is_empty() {
        writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (px0 + px1) / 2.0, top + 20.0, escape(&panel.axes.title))?;
    }

    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for &m in s.markers.iter().filter(|m| (x0..=x1).contains(*m)) {
            let xp = sx(m);
            writeln!(svg, r##"<line class="marker" x1="{xp:.2}" y1="{py0:.2}" x2="{xp:.2}" y2="{py1:.2}" stroke="#999" stroke-dasharray="4 3"/>"##)?;
        }
        if s.points.is_empty() {
            continue;
        }
        let coords: Vec<String> = s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#, coords.join(" "))?;
        if !s.label.is_empty() {
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}" fill="{color}" text-anchor="end">{}</text>"#, px1 - 6.0, py1 + 16.0 * (i as f64 + 1.0), escape(&s.label))?;
        }
    }
    Ok(())
}

/// Panels stacked vertically in one standalone document.
pub fn render(panels: &[Panel]) -> Result<String> {
    if panels.is_empty() {
        bail!("nothing to plot");
    }
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##)?;
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut svg, p, PANEL_HEIGHT * i as f64)?;
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// One panel of `series` written to `path`.
pub fn emit_svg(series: &[Series], axes: &Axes, path: &Path) -> Result<()> {
    let text = render(&[Panel { axes: axes.clone(), series: series.to_vec() }])?;
    write_file(path, &text)
}
