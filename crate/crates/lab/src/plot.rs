//! Line plots rendered to SVG from CSV files on disk.

use std::fmt::Write;
use std::path::Path;

use crate::error::{LabError, Result};

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Column index by name, ignoring the bracketed unit suffix.
fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers
        .iter()
        .position(|h| h.split(" [").next().map(str::trim) == Some(name))
}

/// `(x, y)` pairs of two columns, skipping empty or nonfinite cells.
pub fn read_series(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let missing =
        |c: &str| LabError::config("plot", format!("{} has no column `{c}`", path.display()));
    let xi = column(&headers, x).ok_or_else(|| missing(x))?;
    let yi = column(&headers, y).ok_or_else(|| missing(y))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if let (Ok(a), Ok(b)) = (rec[xi].parse::<f64>(), rec[yi].parse::<f64>()) {
            if a.is_finite() && b.is_finite() {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// One polyline per `(label, csv)` pair, all on shared linear axes.
pub fn svg_plot(title: &str, x: &str, y: &str, series: &[(String, &Path)]) -> Result<String> {
    let data: Vec<(String, Vec<(f64, f64)>)> = series
        .iter()
        .map(|(label, path)| Ok((label.clone(), read_series(path, x, y)?)))
        .collect::<Result<_>>()?;
    let pts = data.iter().flat_map(|(_, d)| d.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(a, b) in pts {
        (x0, x1, y0, y1) = (x0.min(a), x1.max(a), y0.min(b), y1.max(b));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |a: f64| MARGIN + (a - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |b: f64| H - MARGIN - (b - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 15.0,
        escape(x)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y)
    );
    for (v, anchor, px, py) in [
        (x0, "start", l, b + 16.0),
        (x1, "end", r, b + 16.0),
        (y0, "end", l - 4.0, b),
        (y1, "end", l - 4.0, t + 4.0),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{px}" y="{py}" text-anchor="{anchor}">{}</text>"#,
            tick(v)
        );
    }
    for (k, (label, d)) in data.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        if !d.is_empty() {
            let path: Vec<String> = d
                .iter()
                .map(|&(a, bb)| format!("{:.2},{:.2}", sx(a), sy(bb)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        let ly = t + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" text-anchor="end" fill="{color}">{}</text>"#,
            r - 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_reads_columns_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        std::fs::write(&p, "t [time],y [1]\n0,1\n1,\n2,3\n").unwrap();
        assert_eq!(
            read_series(&p, "t", "y").unwrap(),
            vec![(0.0, 1.0), (2.0, 3.0)]
        );
        let svg = svg_plot("y<t>", "t", "y", &[("run".into(), p.as_path())]).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline") && svg.contains("y&lt;t&gt;"));
        assert!(svg_plot("x", "t", "nope", &[("run".into(), p.as_path())]).is_err());
    }
}
