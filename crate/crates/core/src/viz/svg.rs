//! Deterministic SVG rendering of a laid-out, styled network.

use std::fmt::Write as _;

use quick_xml::escape::escape;

use super::layout::LayoutResult;
use super::style::{truncate_label, StyleMap, DEFAULT_LABEL_LEN, NEUTRAL};
use super::VizError;
use crate::graph::ConceptGraph;

const MARGIN: f64 = 40.0;
const LEGEND_WIDTH: f64 = 220.0;
const LEGEND_ROW: f64 = 18.0;
const EDGE_STROKE: &str = "#cccccc";

/// Edges first, then nodes in graph order, then labels. A legend group is
/// added when the style declares entries. Nodes absent from `style` get
/// a neutral default.
pub fn render_svg(g: &ConceptGraph, layout: &LayoutResult, style: &StyleMap) -> Result<String, VizError> {
    let at = layout.lookup();
    let mut pos = Vec::with_capacity(g.node_count());
    for n in g.nodes() {
        pos.push(*at.get(n.id.as_str()).ok_or_else(|| VizError::MissingPosition(n.id.clone()))?);
    }
    let radius = |i: usize| style.get(&g.nodes()[i].id).map_or(4.0, |s| s.size / 2.0);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (i, &(x, y)) in pos.iter().enumerate() {
        let r = radius(i);
        x0 = x0.min(x - r);
        y0 = y0.min(y - r);
        x1 = x1.max(x + r);
        y1 = y1.max(y + r);
    }
    if pos.is_empty() {
        (x0, y0, x1, y1) = (0.0, 0.0, 0.0, 0.0);
    }
    let legend_h = if style.legend.is_empty() { 0.0 } else { LEGEND_ROW * (style.legend.len() as f64 + 1.0) };
    let plot_w = x1 - x0 + 2.0 * MARGIN;
    let width = plot_w + if style.legend.is_empty() { 0.0 } else { LEGEND_WIDTH };
    let height = (y1 - y0 + 2.0 * MARGIN).max(legend_h + 2.0 * MARGIN);
    let tx = |x: f64| x - x0 + MARGIN;
    let ty = |y: f64| y - y0 + MARGIN;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.3}\" height=\"{height:.3}\" \
         viewBox=\"0 0 {width:.3} {height:.3}\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>");
    if let Some(t) = &style.title {
        let _ = writeln!(out, "<title>{}</title>", escape(t.as_str()));
    }
    out.push_str("<g id=\"edges\">\n");
    for e in g.edges() {
        let (a, b) = (pos[e.book], pos[e.subject]);
        let _ = writeln!(
            out,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{EDGE_STROKE}\" stroke-width=\"{}\"/>",
            tx(a.0),
            ty(a.1),
            tx(b.0),
            ty(b.1),
            e.weight.min(5)
        );
    }
    out.push_str("</g>\n<g id=\"nodes\">\n");
    for (i, n) in g.nodes().iter().enumerate() {
        let fill = style.get(&n.id).map_or(NEUTRAL, |s| s.fill.as_str());
        let _ = writeln!(
            out,
            "<circle id=\"{}\" class=\"{}\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"{:.3}\" fill=\"{}\"/>",
            escape(n.id.as_str()),
            n.kind,
            tx(pos[i].0),
            ty(pos[i].1),
            radius(i),
            escape(fill)
        );
    }
    out.push_str("</g>\n<g id=\"labels\" font-family=\"sans-serif\">\n");
    for (i, n) in g.nodes().iter().enumerate() {
        let (label, size) = match style.get(&n.id) {
            Some(s) => (s.label.clone(), s.label_size),
            None => (truncate_label(&n.label, DEFAULT_LABEL_LEN), 6.0),
        };
        if label.is_empty() || size <= 0.0 {
            continue;
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"{size:.3}\" text-anchor=\"middle\">{}</text>",
            tx(pos[i].0),
            ty(pos[i].1) - radius(i) - 1.0,
            escape(label.as_str())
        );
    }
    out.push_str("</g>\n");
    if !style.legend.is_empty() {
        let lx = plot_w + 10.0;
        out.push_str("<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n");
        for (row, entry) in style.legend.iter().enumerate() {
            let y = MARGIN + LEGEND_ROW * row as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{lx:.3}\" y=\"{y:.3}\" width=\"12\" height=\"12\" fill=\"{}\"/>\
                 <text x=\"{:.3}\" y=\"{:.3}\">{}</text>",
                escape(entry.color.as_str()),
                lx + 18.0,
                y + 10.0,
                escape(entry.label.as_str())
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
