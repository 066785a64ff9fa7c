//! Minimal SVG line charts from CSV columns.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const MARGIN: f64 = 60.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Reads `csv`, plots each `y` column against `x`, and writes an SVG to
/// `out`. Nothing is written on error.
pub fn emit_plot(csv: &Path, x: &str, ys: &[&str], out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(csv).map_err(|e| Error::io(csv, e))?;
    let svg = render_plot(&text, x, ys)?;
    std::fs::write(out, svg).map_err(|e| Error::io(out, e))
}

/// SVG text for a chart of `ys` against `x` from CSV text with a header.
pub fn render_plot(csv_text: &str, x: &str, ys: &[&str]) -> Result<String> {
    if ys.is_empty() {
        return Err(Error::Validation("plot needs at least one y column".into()));
    }
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Validation(format!("unreadable CSV header: {e}")))?
        .clone();
    let index = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Validation(format!("column `{name}` not found in CSV")))
    };
    let xi = index(x)?;
    let yis = ys.iter().map(|y| index(y)).collect::<Result<Vec<usize>>>()?;

    let mut xs = Vec::new();
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); ys.len()];
    for record in reader.records() {
        let record = record.map_err(|e| Error::Validation(format!("malformed CSV row: {e}")))?;
        let parse = |i: usize| {
            record
                .get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .unwrap_or(f64::NAN)
        };
        xs.push(parse(xi));
        for (s, &yi) in series.iter_mut().zip(&yis) {
            s.push(parse(yi));
        }
    }
    if xs.is_empty() {
        return Err(Error::Validation("CSV has no data rows".into()));
    }

    let finite = |v: &[f64]| v.iter().copied().filter(|x| x.is_finite()).collect::<Vec<f64>>();
    let x_range = range(&finite(&xs))?;
    let y_range = range(&series.iter().flat_map(|s| finite(s)).collect::<Vec<f64>>())?;
    let px = |v: f64| MARGIN + (v - x_range.0) / span(x_range) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - y_range.0) / span(y_range) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x)
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&ys.join(", "))
    );
    for (v, anchor, xpos, ypos) in [
        (x_range.0, "middle", left, bottom + 18.0),
        (x_range.1, "middle", right, bottom + 18.0),
        (y_range.0, "end", left - 6.0, bottom),
        (y_range.1, "end", left - 6.0, top),
    ] {
        let _ = writeln!(
            svg,
            r#"<text class="tick" x="{xpos}" y="{ypos}" text-anchor="{anchor}" font-size="11">{}</text>"#,
            super::table::format_sig(v)
        );
    }
    for (k, (name, s)) in ys.iter().zip(&series).enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(s)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.6},{:.6}", px(a), py(b)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-column="{}" fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            escape(name),
            points.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{}" y="{}" fill="{colour}" font-size="12">{}</text>"#,
            right - 100.0,
            top + 15.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn range(v: &[f64]) -> Result<(f64, f64)> {
    if v.is_empty() {
        return Err(Error::Validation("plot columns contain no finite values".into()));
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

fn span((lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
