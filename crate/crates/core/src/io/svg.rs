//! Reality-vs-simulation scatter plots as SVG.

use std::fmt::Write;

use super::IoError;
use crate::metrics::{PairedResults, SRCCReport};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 64.0;
const PLOT: f64 = SIZE - 2.0 * MARGIN;
const PALETTE: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf",
];

fn px(v: f64) -> f64 {
    MARGIN + v.clamp(0.0, 1.0) * PLOT
}

fn py(v: f64) -> f64 {
    SIZE - MARGIN - v.clamp(0.0, 1.0) * PLOT
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders one symbol per method with standard-error bars, the identity
/// diagonal and the SRCC in a title box. Output bytes depend only on inputs.
pub fn emit_scatter(paired: &PairedResults, report: &SRCCReport) -> Result<String, IoError> {
    if paired.entries.len() < 3 {
        return Err(IoError::Invalid(format!(
            "a scatter needs at least 3 methods, got {}",
            paired.entries.len()
        )));
    }
    if !report.srcc.is_finite() {
        return Err(IoError::Invalid("correlation is undefined".into()));
    }
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="#333"/>"##
    );
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let _ = writeln!(
            w,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            px(v),
            py(0.0),
            px(v),
            py(1.0)
        );
        let _ = writeln!(
            w,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            px(0.0),
            py(v),
            px(1.0),
            py(v)
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{v:.1}</text>"#,
            px(v),
            py(0.0) + 16.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{v:.1}</text>"#,
            px(0.0) - 6.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(
        w,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 4"/>"##,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    let metric = paired.metric.as_str();
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">performance in simulation ({metric})</text>"#,
        SIZE / 2.0,
        SIZE - 18.0
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">performance in reality ({metric})</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(
        w,
        r##"<rect x="{:.2}" y="14" width="160" height="28" fill="white" stroke="#333"/>"##,
        SIZE / 2.0 - 80.0
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="33" font-size="15" text-anchor="middle">SRCC={:.3}</text>"#,
        SIZE / 2.0,
        report.srcc
    );
    for (i, e) in paired.entries.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let (cx, cy) = (px(e.sim), py(e.real));
        let _ = writeln!(w, r#"<g class="method" data-method="{}">"#, escape(&e.method));
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="{color}"/>"#,
            px(e.sim - e.sim_se),
            px(e.sim + e.sim_se)
        );
        let _ = writeln!(
            w,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/>"#,
            py(e.real - e.real_se),
            py(e.real + e.real_se)
        );
        let _ = writeln!(w, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="{color}"/>"#);
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-size="9">{}</text>"#,
            cx + 7.0,
            cy - 6.0,
            escape(&e.method)
        );
        let _ = writeln!(w, "</g>");
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}
