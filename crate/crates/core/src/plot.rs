//! Deterministic SVG plots of data and fitted curves.
//!
//! Output depends only on the inputs: coordinates are printed with fixed
//! precision and nothing time- or address-dependent is emitted.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::data::RawSeries;
use crate::error::{Error, Result};
use crate::model::ModelKind;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

pub fn family_color(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Richards => "#1f77b4",
        ModelKind::Skewnormal => "#ff7f0e",
        ModelKind::GenGamma => "#2ca02c",
        ModelKind::MaxEnt => "#d62728",
        ModelKind::Beta => "#9467bd",
    }
}

/// Evenly spaced "nice" tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, usize) {
    let span = hi - lo;
    let raw = span / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * magnitude)
        .find(|s| span / s <= (target + 1) as f64)
        .unwrap_or(10.0 * magnitude);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), decimals)
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

/// Renders the data as markers and each fit as a polyline with a legend.
pub fn render_svg(data: Option<&RawSeries>, fits: &[(ModelKind, RawSeries)]) -> Result<String> {
    let data = data.filter(|d| !d.is_empty());
    if data.is_none() && fits.iter().all(|(_, c)| c.is_empty()) {
        return Err(Error::Argument("nothing to plot".into()));
    }
    let all_series = data.into_iter().chain(fits.iter().map(|(_, c)| c));
    let all_times = all_series.clone().flat_map(|s| s.times().iter().copied());
    let (mut t_lo, mut t_hi) = extent(all_times).expect("at least one point");
    if t_hi <= t_lo {
        t_lo -= 0.5;
        t_hi += 0.5;
    }
    let y_max = all_series
        .flat_map(|s| s.values().iter().copied())
        .fold(0.0, f64::max);
    let y_hi = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + (t - t_lo) / (t_hi - t_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // Axes.
    let (x0, x1, y0, y1) = (LEFT, LEFT + plot_w, TOP + plot_h, TOP);
    let _ = writeln!(
        svg,
        r#"<path class="axes" d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    let (xt, xd) = ticks(t_lo, t_hi, 6);
    for t in xt {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line class="tick" x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.xd$}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
    }
    let (yt, yd) = ticks(0.0, y_hi, 5);
    for v in yt {
        let y = sy(v);
        let _ = writeln!(
            svg,
            r#"<line class="tick" x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.yd$}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }

    for (kind, curve) in fits {
        let mut points = String::new();
        for (i, (&t, &v)) in curve.times().iter().zip(curve.values()).enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", sx(t), sy(v));
        }
        let _ = writeln!(
            svg,
            r#"<polyline class="fit" data-model="{}" points="{points}" fill="none" stroke="{}" stroke-width="2"/>"#,
            kind.slug(),
            family_color(*kind)
        );
    }

    if let Some(d) = data {
        for (&t, &v) in d.times().iter().zip(d.values()) {
            let _ = writeln!(
                svg,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
                sx(t),
                sy(v)
            );
        }
    }

    let legend_x = LEFT + plot_w + 15.0;
    let mut entries: Vec<(&str, &str)> = Vec::new();
    if data.is_some() {
        entries.push(("data", "black"));
    }
    entries.extend(fits.iter().map(|(k, _)| (k.name(), family_color(*k))));
    for (i, (label, color)) in entries.into_iter().enumerate() {
        let y = TOP + 10.0 + i as f64 * 20.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend-entry"><rect x="{legend_x:.2}" y="{:.2}" width="14" height="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{label}</text></g>"#,
            y - 2.0,
            legend_x + 20.0,
            y + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_plot(
    data: Option<&RawSeries>,
    fits: &[(ModelKind, RawSeries)],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg(data, fits)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
