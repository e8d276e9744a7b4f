//! Hand-assembled SVG for R(E) and T(E) on a log axis.

use std::fmt::Write;

use crate::scatter::ScatteringResult;
use crate::singular::Branch;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const LOG_LIMIT: f64 = 16.0;

const R_COLOR: &str = "#1f5fbf";
const T_COLOR: &str = "#c0392b";
const DASHES: [&str; 4] = ["", "2,3", "8,4", "8,3,2,3"];

pub struct Series {
    pub label: String,
    pub rows: Vec<ScatteringResult>,
    /// Energy of the singularity present in this configuration.
    pub marker: Option<f64>,
}

/// Shortest round-trip form, used for labels and marker attributes.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn branch_symbol(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "+",
        Branch::Minus => "-",
    }
}

fn log_value(x: f64) -> Option<f64> {
    (x.is_finite() && x > 0.0).then(|| x.log10())
}

pub fn render(title: &str, series: &[Series]) -> String {
    let energies = series.iter().flat_map(|s| s.rows.iter().map(|r| r.energy));
    let (e_lo, e_hi) = energies.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)));
    let (e_lo, e_hi) = if e_lo < e_hi { (e_lo, e_hi) } else { (0.0, 1.0) };

    let logs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.rows.iter().flat_map(|r| [r.big_r, r.big_t]))
        .filter_map(log_value)
        .collect();
    let mut y_lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor().max(-LOG_LIMIT);
    let mut y_hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil().min(LOG_LIMIT);
    if !(y_lo < y_hi) {
        let mid = if y_lo.is_finite() { y_lo } else { 0.0 };
        y_lo = mid - 1.0;
        y_hi = mid + 1.0;
    }

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |e: f64| LEFT + (e - e_lo) / (e_hi - e_lo) * plot_w;
    let sy = |v: f64| {
        let l = if v.is_infinite() && v > 0.0 { y_hi } else { log_value(v).unwrap_or(y_lo) };
        TOP + (y_hi - l.clamp(y_lo, y_hi)) / (y_hi - y_lo) * plot_h
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes
    let (x0, x1, y0, y1) = (LEFT, LEFT + plot_w, TOP, TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1},{y0:.1} L{x0:.1},{y1:.1} L{x1:.1},{y1:.1}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for k in 0..=5 {
        let e = e_lo + (e_hi - e_lo) * k as f64 / 5.0;
        let x = sx(e);
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{y1:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{:.3}</text>"#,
            y1 + 20.0,
            e
        );
    }
    let decades = (y_hi - y_lo) as i64;
    let stride = ((decades + 7) / 8).max(1);
    let mut d = y_lo as i64;
    while d <= y_hi as i64 {
        let y = TOP + (y_hi - d as f64) / (y_hi - y_lo) * plot_h;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="end">1e{d}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
        d += stride;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">E</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );

    for (n, series) in series.iter().enumerate() {
        let dash = DASHES[n % DASHES.len()];
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        for (name, color, pick) in [
            ("R", R_COLOR, (|r: &ScatteringResult| r.big_r) as fn(&ScatteringResult) -> f64),
            ("T", T_COLOR, |r: &ScatteringResult| r.big_t),
        ] {
            let mut points = String::new();
            for row in &series.rows {
                let _ = write!(points, "{:.2},{:.2} ", sx(row.energy), sy(pick(row)));
            }
            let _ = writeln!(
                s,
                r#"<polyline class="curve-{name}" data-series="{n}" fill="none" stroke="{color}" stroke-width="1.2"{dash_attr} points="{}"/>"#,
                points.trim_end()
            );
        }
        if let Some(e) = series.marker.filter(|e| *e >= e_lo && *e <= e_hi) {
            let x = sx(e);
            let _ = writeln!(
                s,
                r#"<line class="ss-marker" data-energy="{}" x1="{x:.2}" y1="{y0:.1}" x2="{x:.2}" y2="{y1:.1}" stroke="gray"{dash_attr}/>"#,
                num(e)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.1}" font-family="sans-serif" font-size="11">E = {}</text>"#,
                x + 4.0,
                y0 + 14.0 + 14.0 * n as f64,
                num(e)
            );
        }
        let ly = TOP + 16.0 * n as f64 + 8.0;
        let lx = x1 - 190.0;
        let _ = writeln!(
            s,
            r#"<text x="{lx:.1}" y="{ly:.1}" font-family="sans-serif" font-size="12">{} (R blue, T red{})</text>"#,
            escape(&series.label),
            if dash.is_empty() { ", solid" } else { ", dotted" }
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
