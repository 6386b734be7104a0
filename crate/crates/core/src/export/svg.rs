use std::fmt::Write as _;

use super::{fmt_real, normalize_coords};
use crate::error::{Error, Result};
use crate::graph::ActantGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    /// Circle radius per unit of document frequency, in pixels.
    pub node_scale: f64,
    /// Stroke width per unit of edge weight, in pixels.
    pub edge_scale: f64,
    /// Nodes below this document frequency get no label.
    pub label_min_frequency: u64,
    /// Fill colours indexed by cluster id − 1, cycled.
    pub palette: Vec<String>,
    /// Side of the square drawing area, in pixels.
    pub size: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            node_scale: 1.0,
            edge_scale: 0.5,
            label_min_frequency: 1,
            palette: [
                "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                "#7f7f7f", "#bcbd22", "#17becf",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            size: 1000.0,
        }
    }
}

impl SvgStyle {
    /// Scales nodes so the most frequent one gets `max_radius` pixels and
    /// edges so the heaviest one is `max_stroke` wide.
    pub fn fitted(g: &ActantGraph, max_radius: f64, max_stroke: f64) -> Self {
        let max_df = g.nodes().iter().map(|n| n.doc_frequency).max().unwrap_or(1).max(1);
        let max_w = g.edges().iter().map(|e| e.weight).max().unwrap_or(1).max(1);
        SvgStyle {
            node_scale: max_radius / max_df as f64,
            edge_scale: max_stroke / max_w as f64,
            ..SvgStyle::default()
        }
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if c.is_control() => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

/// Static node-link drawing: one `<line>` per edge (width ∝ weight), one
/// `<circle>` per node (radius ∝ document frequency, fill by cluster), and
/// labels for frequent nodes.
pub fn render_svg(g: &ActantGraph, style: &SvgStyle) -> Result<String> {
    let coords = g
        .coords()
        .ok_or_else(|| Error::domain("SVG rendering needs coordinates"))?;
    let max_r = g
        .nodes()
        .iter()
        .map(|n| n.doc_frequency as f64 * style.node_scale)
        .fold(0.0, f64::max);
    let margin = max_r + 40.0;
    let total = style.size + 2.0 * margin;
    let pos: Vec<(f64, f64)> = normalize_coords(coords)
        .into_iter()
        .map(|(x, y)| (margin + x * style.size, margin + y * style.size))
        .collect();

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        fmt_real(total)
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<g stroke="#999999" stroke-opacity="0.6">"##);
    for e in g.edges() {
        let (a, b) = (pos[e.a], pos[e.b]);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="{}"/>"#,
            fmt_real(a.0),
            fmt_real(a.1),
            fmt_real(b.0),
            fmt_real(b.1),
            fmt_real(e.weight as f64 * style.edge_scale)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g stroke="#333333" stroke-width="0.5">"##);
    for (i, n) in g.nodes().iter().enumerate() {
        let fill = match (g.partition(), style.palette.len()) {
            (Some(p), len) if len > 0 => style.palette[(p[i] as usize - 1) % len].as_str(),
            _ => "#cccccc",
        };
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{}"><title>{}</title></circle>"#,
            fmt_real(pos[i].0),
            fmt_real(pos[i].1),
            fmt_real(n.doc_frequency as f64 * style.node_scale),
            escape(fill),
            escape(&n.display)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g font-family="sans-serif" font-size="12" text-anchor="middle" fill="#000000">"##);
    for (i, n) in g.nodes().iter().enumerate() {
        if n.doc_frequency < style.label_min_frequency {
            continue;
        }
        let r = n.doc_frequency as f64 * style.node_scale;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            fmt_real(pos[i].0),
            fmt_real(pos[i].1 - r - 3.0),
            escape(&n.display)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
