//! Static SVG line charts from [`CurveTable`]s.
//!
//! The first column is the x axis and every other column is a series. If
//! the table carries `panels: a,b,...` metadata, series are split into one
//! panel per listed prefix (the column name up to its first `_`), stacked
//! vertically. `x_scale: log` / `y_scale: log` select logarithmic axes.

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::table::CurveTable;

const PANEL_W: f64 = 720.0;
const PANEL_H: f64 = 420.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 170.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Axis> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Some(Axis { lo, hi, log })
    }

    fn unit(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let stride = ((b - a) / 8).max(1);
            (a..=b)
                .step_by(stride as usize)
                .map(|e| 10f64.powi(e))
                .collect()
        } else {
            (0..=4)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0)
                .collect()
        }
    }
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Column indices of each panel, with the panel title.
fn panels(table: &CurveTable) -> Vec<(String, Vec<usize>)> {
    let series: Vec<usize> = (1..table.columns.len()).collect();
    let Some(spec) = table.get_meta("panels") else {
        return vec![(String::new(), series)];
    };
    spec.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|prefix| {
            let cols = series
                .iter()
                .copied()
                .filter(|&i| table.columns[i].name.split('_').next() == Some(prefix))
                .collect();
            (prefix.to_string(), cols)
        })
        .filter(|(_, cols): &(String, Vec<usize>)| !cols.is_empty())
        .collect()
}

/// Render the table as a deterministic SVG document.
pub fn render(table: &CurveTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Parse("nothing to plot: table has no rows".into()));
    }
    if table.columns.len() < 2 {
        return Err(Error::Parse("nothing to plot: need at least two columns".into()));
    }
    let x_log = table.get_meta("x_scale") == Some("log");
    let y_log = table.get_meta("y_scale") == Some("log");
    let panels = panels(table);
    let height = PANEL_H * panels.len() as f64;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(cmd) = table.get_meta("command") {
        let _ = writeln!(out, "<title>{}</title>", escape(cmd));
    }

    let x_axis = Axis::fit(table.rows.iter().map(|r| r[0]), x_log)
        .ok_or_else(|| Error::Parse("x column has no plottable values".into()))?;
    for (p, (title, cols)) in panels.iter().enumerate() {
        let y_axis = Axis::fit(
            table.rows.iter().flat_map(|r| cols.iter().map(move |&c| r[c])),
            y_log,
        )
        .ok_or_else(|| Error::Parse("series have no plottable values".into()))?;
        let top = PANEL_H * p as f64 + MARGIN_T;
        let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
        let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
        let px = |u: f64| MARGIN_L + u * plot_w;
        let py = |u: f64| top + (1.0 - u) * plot_h;

        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_L}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        if !title.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                px(0.5),
                top - 10.0,
                escape(title)
            );
        }
        for t in x_axis.ticks() {
            if let Some(u) = x_axis.unit(t) {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                    px(u),
                    top + plot_h + 18.0,
                    label(t)
                );
            }
        }
        for t in y_axis.ticks() {
            if let Some(u) = y_axis.unit(t) {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                    MARGIN_L - 6.0,
                    py(u) + 4.0,
                    label(t)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(0.5),
            top + plot_h + 40.0,
            escape(&table.columns[0].name)
        );

        for (k, &c) in cols.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let points: Vec<String> = table
                .rows
                .iter()
                .filter_map(|r| Some((x_axis.unit(r[0])?, y_axis.unit(r[c])?)))
                .map(|(u, v)| format!("{:.2},{:.2}", px(u), py(v)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            let ly = top + 14.0 + 16.0 * k as f64;
            let lx = PANEL_W - MARGIN_R + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
                ly - 4.0,
                lx + 18.0,
                ly - 4.0,
                lx + 24.0,
                escape(&table.columns[c].name)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Count of `<polyline class="series"` elements, i.e. plotted series.
pub fn series_count(svg: &str) -> usize {
    svg.matches(r#"<polyline class="series""#).count()
}

/// Count of panels (plot frames).
pub fn panel_count(svg: &str) -> usize {
    svg.matches(r#"fill="none" stroke="black""#).count()
}
