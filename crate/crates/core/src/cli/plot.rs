//! Static SVG figures of aggregate tables.

use std::fmt::Write;

use crate::metrics::MetricsRecord;
use crate::pipeline::AggregateRow;

/// Metrics drawn, one panel each.
pub const PANELS: [&str; 3] = ["exposure_diff", "error_diff", "error_all"];

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 260.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const GAP: f64 = 30.0;

pub struct Series<'a> {
    pub label: String,
    pub rows: &'a [AggregateRow],
}

/// Color of the `k`-th series.
pub fn color(k: usize) -> &'static str {
    COLORS[k % COLORS.len()]
}

fn metric_index(name: &str) -> usize {
    MetricsRecord::METRICS
        .iter()
        .position(|m| *m == name)
        .expect("panel metric exists")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Renders one panel per metric in [`PANELS`]. Every series must be
/// non-empty.
pub fn render(series: &[Series<'_>]) -> String {
    let width = MARGIN_L + PANELS.len() as f64 * (PANEL_W + GAP + MARGIN_L) - GAP;
    let legend_h = 20.0 * series.len() as f64 + 10.0;
    let height = MARGIN_T + PANEL_H + MARGIN_B + legend_h;
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    let (x_lo, x_hi) = {
        let it = series.iter().flat_map(|s| s.rows.iter().map(|r| r.iteration as f64));
        let lo = it.clone().fold(f64::INFINITY, f64::min);
        let hi = it.fold(f64::NEG_INFINITY, f64::max);
        if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) }
    };

    for (p, name) in PANELS.iter().enumerate() {
        let m = metric_index(name);
        let left = MARGIN_L + p as f64 * (PANEL_W + GAP + MARGIN_L);
        let top = MARGIN_T;
        let (y_lo, y_hi) = range(
            series
                .iter()
                .flat_map(|s| s.rows.iter().flat_map(|r| [r.min[m], r.max[m]]))
                .chain(std::iter::once(0.0)),
        );
        let sx = |x: f64| left + (x - x_lo) / (x_hi - x_lo) * PANEL_W;
        let sy = |y: f64| top + (y_hi - y) / (y_hi - y_lo) * PANEL_H;

        writeln!(svg, r#"<g class="panel" id="panel-{name}">"#).unwrap();
        writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{name}</text>"#,
            left + PANEL_W / 2.0,
            top - 12.0
        )
        .unwrap();
        writeln!(
            svg,
            r##"<rect x="{left}" y="{top}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#333"/>"##
        )
        .unwrap();
        for t in ticks(y_lo, y_hi) {
            let y = sy(t);
            writeln!(
                svg,
                r##"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="#333"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
                left - 4.0,
                left - 6.0,
                y + 4.0,
                fmt_tick(t)
            )
            .unwrap();
        }
        for t in ticks(x_lo, x_hi) {
            let x = sx(t);
            let bottom = top + PANEL_H;
            writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="#333"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
                bottom + 4.0,
                bottom + 18.0,
                fmt_tick(t)
            )
            .unwrap();
        }
        writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">iteration</text>"#,
            left + PANEL_W / 2.0,
            top + PANEL_H + 36.0
        )
        .unwrap();
        // Optimal value.
        writeln!(
            svg,
            r##"<line class="optimal" x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#555" stroke-dasharray="6,4"/>"##,
            left + PANEL_W,
            y = sy(0.0)
        )
        .unwrap();

        for (k, s) in series.iter().enumerate() {
            let c = color(k);
            let upper = s.rows.iter().map(|r| format!("{:.2},{:.2}", sx(r.iteration as f64), sy(r.max[m])));
            let lower = s
                .rows
                .iter()
                .rev()
                .map(|r| format!("{:.2},{:.2}", sx(r.iteration as f64), sy(r.min[m])));
            let band: Vec<String> = upper.chain(lower).collect();
            writeln!(
                svg,
                r#"<polygon class="band" points="{}" fill="{c}" fill-opacity="0.2" stroke="none"/>"#,
                band.join(" ")
            )
            .unwrap();
            let line: Vec<String> = s
                .rows
                .iter()
                .map(|r| format!("{:.2},{:.2}", sx(r.iteration as f64), sy(r.median[m])))
                .collect();
            writeln!(
                svg,
                r#"<polyline class="median" points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
                line.join(" ")
            )
            .unwrap();
        }
        writeln!(svg, "</g>").unwrap();
    }

    writeln!(svg, r#"<g class="legend">"#).unwrap();
    for (k, s) in series.iter().enumerate() {
        let y = MARGIN_T + PANEL_H + MARGIN_B + 20.0 * k as f64 + 10.0;
        writeln!(
            svg,
            r#"<rect class="legend-entry" x="{MARGIN_L}" y="{}" width="16" height="10" fill="{}"/><text x="{}" y="{y}">{}</text>"#,
            y - 9.0,
            color(k),
            MARGIN_L + 22.0,
            escape(&s.label)
        )
        .unwrap();
    }
    writeln!(svg, "</g>\n</svg>").unwrap();
    svg
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}
