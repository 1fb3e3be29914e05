use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{LayoutError, LayoutGraph, LayoutSource, NodeLayout};
use crate::scalar::Scalar;

/// Drawing options; every field has a default so partial overrides work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvgStyle {
    pub margin: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub min_stroke: f64,
    pub max_stroke: f64,
    pub background: String,
    pub edge_color: String,
    pub edge_opacity: f64,
    pub palette: Vec<String>,
    pub labels: bool,
    pub font_size: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            margin: 40.0,
            min_radius: 3.0,
            max_radius: 30.0,
            min_stroke: 0.5,
            max_stroke: 8.0,
            background: "#ffffff".into(),
            edge_color: "#8c8c8c".into(),
            edge_opacity: 0.6,
            palette: [
                "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
                "#17becf",
            ]
            .map(String::from)
            .to_vec(),
            labels: true,
            font_size: 14.0,
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
            _ => out.push(c),
        }
    }
    out
}

/// Scales `value / max` into `[lo, hi]`; the square root keeps circle area
/// roughly proportional to size.
fn scale(value: f64, max: f64, lo: f64, hi: f64, sqrt: bool) -> f64 {
    if max <= 0.0 {
        return lo;
    }
    let t = (value / max).clamp(0.0, 1.0);
    lo + (hi - lo) * if sqrt { t.sqrt() } else { t }
}

/// Static SVG of a laid-out graph: edges as lines whose width grows with
/// weight, nodes as circles whose radius grows with display size.
pub fn render_svg<T: Scalar, G: LayoutSource<T> + ?Sized>(
    layout: &NodeLayout<T>,
    graph: &G,
    style: &SvgStyle,
) -> Result<String, LayoutError> {
    let graph: LayoutGraph<T> = graph.to_layout_graph();
    let mut at = Vec::with_capacity(graph.len());
    for name in &graph.nodes {
        let i = layout.nodes.iter().position(|n| n == name).ok_or_else(|| LayoutError::MissingNode(name.clone()))?;
        at.push(i);
    }
    let f = |x: T| x.to_f64().unwrap_or(0.0);
    let m = style.margin;
    let (w, h) = (f(layout.width) + 2.0 * m, f(layout.height) + 2.0 * m);
    let xy = |node: usize| {
        let (x, y) = layout.positions[at[node]];
        (f(x) + m, f(y) + m)
    };
    let max_size = graph.sizes.iter().map(|&s| f(s)).fold(0.0, f64::max);
    let max_weight = graph.edges.iter().map(|e| f(e.2)).fold(0.0, f64::max);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="{}"/>"#, escape(&style.background));
    let _ = writeln!(
        svg,
        r#"<g class="edges" stroke="{}" stroke-opacity="{:.2}" stroke-linecap="round">"#,
        escape(&style.edge_color),
        style.edge_opacity
    );
    for &(a, b, wt) in &graph.edges {
        let ((x1, y1), (x2, y2)) = (xy(a), xy(b));
        let sw = scale(f(wt), max_weight, style.min_stroke, style.max_stroke, false);
        let _ = writeln!(svg, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke-width="{sw:.2}"/>"#);
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r##"<g class="nodes" stroke="#ffffff" stroke-width="0.5">"##);
    for (i, name) in graph.nodes.iter().enumerate() {
        let (x, y) = xy(i);
        let r = scale(f(graph.sizes[i]), max_size, style.min_radius, style.max_radius, true);
        let fill = if style.palette.is_empty() {
            "#4a7bb7"
        } else {
            style.palette[graph.classes.get(i).copied().unwrap_or(0) % style.palette.len()].as_str()
        };
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{}"><title>{}</title></circle>"#,
            escape(fill),
            escape(name)
        );
    }
    let _ = writeln!(svg, "</g>");
    if style.labels {
        let _ = writeln!(
            svg,
            r#"<g class="labels" font-family="sans-serif" font-size="{:.1}" text-anchor="middle">"#,
            style.font_size
        );
        for (i, name) in graph.nodes.iter().enumerate() {
            let (x, y) = xy(i);
            let r = scale(f(graph.sizes[i]), max_size, style.min_radius, style.max_radius, true);
            let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}">{}</text>"#, y - r - 4.0, escape(name));
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
