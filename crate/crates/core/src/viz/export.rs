//! File exporters. Every write goes through a temp file and a rename.

use std::fmt::Write as _;
use std::path::Path;

use super::layout::LayoutResult;
use super::style::StyleMap;
use super::svg::render_svg;
use super::VizError;
use crate::fsutil::{with_trailing_newline, write_atomic};
use crate::graph::graphml::to_graphml;
use crate::graph::ConceptGraph;

pub(crate) fn write_text(path: &Path, text: String) -> Result<(), VizError> {
    write_atomic(path, with_trailing_newline(text).as_bytes())
        .map_err(|source| VizError::Io { path: path.display().to_string(), source })
}

pub fn export_svg(g: &ConceptGraph, layout: &LayoutResult, style: &StyleMap, path: &Path) -> Result<(), VizError> {
    write_text(path, render_svg(g, layout, style)?)
}

pub fn export_graphml(g: &ConceptGraph, path: &Path) -> Result<(), VizError> {
    write_text(path, to_graphml(g))
}

pub fn export_edges_csv(g: &ConceptGraph, path: &Path) -> Result<(), VizError> {
    write_text(path, g.edges_csv())
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(g: &ConceptGraph) -> String {
    let mut out = String::from("graph G {\n");
    for n in g.nodes() {
        let _ = writeln!(out, "  {} [label={}, kind={}];", dot_quote(&n.id), dot_quote(&n.label), n.kind);
    }
    let nodes = g.nodes();
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  {} -- {} [weight={}];",
            dot_quote(&nodes[e.book].id),
            dot_quote(&nodes[e.subject].id),
            e.weight
        );
    }
    out.push_str("}\n");
    out
}

pub fn export_dot(g: &ConceptGraph, path: &Path) -> Result<(), VizError> {
    write_text(path, to_dot(g))
}
