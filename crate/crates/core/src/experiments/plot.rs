use std::fmt::Write as _;
use std::path::Path;

use super::ExperimentError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter plot as standalone SVG. Data points are the only `<circle>`
/// elements; legend swatches are `<rect>`s.
pub fn render_scatter(x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (left, bottom, right, top) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (tx, ty) = (sx(xv), sy(yv));
        let _ = writeln!(
            out,
            r#"<text x="{tx:.1}" y="{:.1}" font-size="11" text-anchor="middle">{xv:.4}</text>"#,
            bottom + 16.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{ty:.1}" font-size="11" text-anchor="end">{yv:.4}</text>"#,
            left - 6.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        esc(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = MARGIN + 18.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{:.1}" y="{:.1}" width="10" height="10" fill="{color}"/>"#,
            MARGIN + 10.0,
            ly
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
            MARGIN + 26.0,
            ly + 9.0,
            esc(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Reads `x_col` and each of `y_cols` from a CSV file and renders them.
/// Blank cells are skipped. A file with no header gives an empty plot.
pub fn plot_csv(path: &Path, x_col: &str, y_cols: &[String]) -> Result<String, ExperimentError> {
    let mut series: Vec<Series> = y_cols
        .iter()
        .map(|c| Series {
            name: c.clone(),
            points: Vec::new(),
        })
        .collect();
    let y_label = y_cols.join(", ");
    if std::fs::metadata(path)?.len() == 0 {
        return Ok(render_scatter(x_col, &y_label, &series));
    }
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ExperimentError::MissingColumn(name.to_string()))
    };
    let xi = col(x_col)?;
    let yis: Vec<usize> = y_cols.iter().map(|c| col(c)).collect::<Result<_, _>>()?;
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let get = |i: usize, name: &str| -> Result<Option<f64>, ExperimentError> {
            let v = rec.get(i).unwrap_or("").trim();
            if v.is_empty() {
                return Ok(None);
            }
            v.parse().map(Some).map_err(|_| ExperimentError::BadValue {
                column: name.to_string(),
                row: row + 1,
                value: v.to_string(),
            })
        };
        let Some(x) = get(xi, x_col)? else { continue };
        for (s, (&yi, name)) in series.iter_mut().zip(yis.iter().zip(y_cols)) {
            if let Some(y) = get(yi, name)? {
                s.points.push((x, y));
            }
        }
    }
    Ok(render_scatter(x_col, &y_label, &series))
}
