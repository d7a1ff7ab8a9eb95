//! Run outputs: CSV time series, JSON summary and static SVG line charts.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::sim::{RunLog, RunSummary};

const FEATURE_NAMES: [&str; 9] = ["ul1", "ur1", "v1", "ul2", "ur2", "v2", "ul3", "ur3", "v3"];

/// CSV header: time, joints (rad), references, features, targets, errors
/// (mm), feedback and feedforward joint commands, projected errors.
pub fn csv_header() -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((1..=6).map(|i| format!("q{i}")));
    h.extend((1..=6).map(|i| format!("qref{i}")));
    h.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
    h.extend(FEATURE_NAMES.iter().map(|s| format!("target_{s}")));
    h.extend(FEATURE_NAMES.iter().map(|s| format!("err_{s}")));
    h.extend((1..=6).map(|i| format!("qfb{i}")));
    h.extend((1..=6).map(|i| format!("qff{i}")));
    h.extend((1..=9).map(|i| format!("proj{i}")));
    h
}

pub fn write_timeseries<W: Write>(log: &RunLog, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header())?;
    let mut row: Vec<String> = Vec::with_capacity(64);
    for k in 0..log.len() {
        row.clear();
        row.push(log.time[k].to_string());
        for block in [&log.q[k][..], &log.q_ref[k][..], &log.features[k][..], &log.feature_targets[..], &log.feature_error[k][..], &log.q_feedback[k][..], &log.q_feedforward[k][..], &log.projected_error[k][..]] {
            row.extend(block.iter().map(|v| v.to_string()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `timeseries.csv`, `summary.json`, `joints.svg` and `features.svg`.
pub fn write_run_outputs(dir: &Path, log: &RunLog, summary: &RunSummary) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_timeseries(log, std::io::BufWriter::new(std::fs::File::create(dir.join("timeseries.csv"))?))?;
    std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    let joints: Vec<Series> = (0..6)
        .map(|i| Series { name: format!("q{}", i + 1), values: log.q.iter().map(|r| r[i].to_degrees()).collect() })
        .collect();
    std::fs::write(dir.join("joints.svg"), line_chart("Joint angles", "deg", &log.time, &joints))?;
    let features: Vec<Series> = (0..9)
        .map(|i| Series { name: FEATURE_NAMES[i].to_string(), values: log.features.iter().map(|r| r[i]).collect() })
        .collect();
    std::fs::write(dir.join("features.svg"), line_chart("Image coordinates", "mm", &log.time, &features))?;
    Ok(())
}

pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

const PALETTE: [&str; 9] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"];

/// Self-contained SVG 1.1 line chart; long series are decimated to ~1500
/// points.
pub fn line_chart(title: &str, unit: &str, x: &[f64], series: &[Series]) -> String {
    let (w, h) = (800.0, 450.0);
    let (left, right, top, bottom) = (70.0, 110.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let finite = |v: &&f64| v.is_finite();
    let x0 = x.first().copied().unwrap_or(0.0);
    let x1 = x.last().copied().unwrap_or(1.0).max(x0 + f64::EPSILON);
    let all = series.iter().flat_map(|s| s.values.iter()).filter(finite);
    let (mut y0, mut y1) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |v: f64| left + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64| top + (y1 - v) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(s, r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r##"<line x1="{0:.1}" y1="{1}" x2="{0:.1}" y2="{2}" stroke="#ddd"/><text x="{0:.1}" y="{3}" text-anchor="middle">{4}</text>"##,
            sx(fx), top, top + ph, top + ph + 18.0, tick(fx)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{0}" y1="{1:.1}" x2="{2}" y2="{1:.1}" stroke="#ddd"/><text x="{3}" y="{4:.1}" text-anchor="end">{5}</text>"##,
            left, sy(fy), left + pw, left - 6.0, sy(fy) + 4.0, tick(fy)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">time (s)</text>"#, left + pw / 2.0, h - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        top + ph / 2.0,
        escape(unit)
    );

    let stride = (x.len() / 1500).max(1);
    for (k, ser) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        let idx = (0..x.len().min(ser.values.len())).step_by(stride).chain(std::iter::once(x.len().saturating_sub(1)));
        for i in idx {
            if let Some(v) = ser.values.get(i).filter(|v| v.is_finite()) {
                let _ = write!(pts, "{:.2},{:.2} ", sx(x[i]), sy(*v));
            }
        }
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, pts.trim_end());
        let ly = top + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{colour}" stroke-width="2"/><text x="{3}" y="{4}">{5}</text>"#,
            left + pw + 10.0, ly, left + pw + 30.0, left + pw + 35.0, ly + 4.0, escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-2 && v.abs() < 1e4) {
        format!("{:.3}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = csv_header();
        assert_eq!(h[0], "t");
        assert_eq!(h[1], "q1");
        assert_eq!(h[13], "ul1");
        assert_eq!(h.len(), 1 + 6 + 6 + 9 * 3 + 6 + 6 + 9);
    }

    #[test]
    fn chart_is_well_formed() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let svg = line_chart("a<b", "mm", &x, &[Series { name: "s".into(), values: x.iter().map(|v| v * v).collect() }]);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("a&lt;b"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn ticks() {
        assert_eq!(tick(0.0), "0");
        assert_eq!(tick(2.5), "2.5");
        assert_eq!(tick(1e-5), "1.00e-5");
    }
}
