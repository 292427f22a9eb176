//! Node colours, sizes and labels for the three network figures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{CommunityPartition, ConceptGraph, NodeKind, YearScheme};

pub const DEFAULT_LABEL_LEN: usize = 28;
pub const NEUTRAL: &str = "#bdbdbd";

/// Light-to-dark endpoints of the subject and book ramps.
pub const PINK_RAMP: (&str, &str) = ("#fbc5dc", "#8e0152");
pub const GREEN_RAMP: (&str, &str) = ("#c7e9c0", "#00441b");

pub const COMMUNITY_PALETTE: [&str; 12] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#1f78b4", "#b15928", "#6a3d9a",
    "#b2df8a", "#fb9a99",
];

/// Yellow for the earliest bin through cyan and green for the latest.
pub const YEAR_PALETTE: [&str; 8] =
    ["#ffe119", "#f58231", "#e6194b", "#911eb4", "#4363d8", "#42d4f4", "#3cb44b", "#008080"];

const SUBJECT_SIZE: (f64, f64) = (8.0, 28.0);
const SUBJECT_LABEL: (f64, f64) = (9.0, 22.0);
const BOOK_SIZE: (f64, f64) = (3.0, 12.0);
const BOOK_LABEL: (f64, f64) = (5.0, 11.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeStyle {
    pub fill: String,
    pub size: f64,
    pub label: String,
    pub label_size: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub label: String,
    pub color: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StyleMap {
    pub nodes: BTreeMap<String, NodeStyle>,
    pub legend: Vec<LegendEntry>,
    pub title: Option<String>,
    pub warnings: Vec<String>,
}

impl StyleMap {
    pub fn get(&self, id: &str) -> Option<&NodeStyle> {
        self.nodes.get(id)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn truncate_label(label: &str, max: usize) -> String {
    if label.chars().count() <= max {
        label.to_string()
    } else {
        let mut s: String = label.chars().take(max).collect();
        s.push('…');
        s
    }
}

fn hex_rgb(c: &str) -> (u8, u8, u8) {
    let v = u32::from_str_radix(c.trim_start_matches('#'), 16).unwrap_or(0);
    ((v >> 16) as u8, (v >> 8) as u8, v as u8)
}

fn rgb_hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Linear RGB interpolation, `t` in `[0, 1]`.
pub fn ramp(endpoints: (&str, &str), t: f64) -> String {
    let (a, b) = (hex_rgb(endpoints.0), hex_rgb(endpoints.1));
    let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t.clamp(0.0, 1.0)).round() as u8;
    rgb_hex((mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2)))
}

fn darken(c: &str, factor: f64) -> String {
    let (r, g, b) = hex_rgb(c);
    let f = |x: u8| (x as f64 * factor).round() as u8;
    rgb_hex((f(r), f(g), f(b)))
}

fn lerp(range: (f64, f64), t: f64) -> f64 {
    range.0 + (range.1 - range.0) * t
}

fn unit(v: usize, lo: usize, hi: usize) -> f64 {
    if hi > lo {
        (v - lo) as f64 / (hi - lo) as f64
    } else {
        0.0
    }
}

/// Subjects: pink ramp and size linear in degree within `g`.
/// Books: green ramp and size linear in their unfiltered heading count
/// (`full_degree`, falling back to the degree in `g`).
pub fn style_by_degree(g: &ConceptGraph) -> StyleMap {
    let deg = g.degrees();
    let quantity = |i: usize| match g.nodes()[i].kind {
        NodeKind::Subject => deg[i],
        NodeKind::Book => g.nodes()[i].full_degree.map_or(deg[i], |d| d as usize),
    };
    let mut out = StyleMap::default();
    for kind in [NodeKind::Book, NodeKind::Subject] {
        let idx: Vec<usize> = g.nodes_of(kind).map(|(i, _)| i).collect();
        let lo = idx.iter().map(|&i| quantity(i)).min().unwrap_or(0);
        let hi = idx.iter().map(|&i| quantity(i)).max().unwrap_or(0);
        let (colors, size, label) = match kind {
            NodeKind::Subject => (PINK_RAMP, SUBJECT_SIZE, SUBJECT_LABEL),
            NodeKind::Book => (GREEN_RAMP, BOOK_SIZE, BOOK_LABEL),
        };
        for i in idx {
            let t = unit(quantity(i), lo, hi);
            let n = &g.nodes()[i];
            out.nodes.insert(
                n.id.clone(),
                NodeStyle {
                    fill: ramp(colors, t),
                    size: lerp(size, t),
                    label: truncate_label(&n.label, DEFAULT_LABEL_LEN),
                    label_size: lerp(label, t),
                },
            );
        }
        if lo < hi || lo > 0 {
            let name = if kind == NodeKind::Subject { "subject degree" } else { "book headings" };
            out.legend.push(LegendEntry { label: format!("{name} {lo}"), color: ramp(colors, 0.0) });
            out.legend.push(LegendEntry { label: format!("{name} {hi}"), color: ramp(colors, 1.0) });
        }
    }
    out
}

/// Colour for community `c`; past the palette end colours repeat, darker
/// on each cycle.
pub fn community_color(c: usize, palette: &[&str]) -> String {
    let n = palette.len().max(1);
    let cycle = c / n;
    let base = palette.get(c % n).copied().unwrap_or(NEUTRAL);
    if cycle == 0 {
        base.to_string()
    } else {
        darken(base, 0.8f64.powi(cycle as i32))
    }
}

/// Degree sizes with fills taken from the community of each node.
/// `p.assignment` is indexed like `g.nodes()`.
pub fn style_by_community(g: &ConceptGraph, p: &CommunityPartition, palette: &[&str]) -> StyleMap {
    let mut out = style_by_degree(g);
    out.legend.clear();
    let k = p.community_count();
    if k > palette.len() {
        out.warnings.push(format!(
            "{k} communities exceed the {}-colour palette; colours repeat with darker shades",
            palette.len()
        ));
    }
    for (i, n) in g.nodes().iter().enumerate() {
        if let (Some(s), Some(&c)) = (out.nodes.get_mut(&n.id), p.assignment.get(i)) {
            s.fill = community_color(c, palette);
        }
    }
    let sizes = p.sizes();
    for (c, size) in sizes.iter().enumerate() {
        out.legend
            .push(LegendEntry { label: format!("community {c} ({size} nodes)"), color: community_color(c, palette) });
    }
    out
}

/// Books coloured by year bin, subjects neutral. Undated books and years
/// outside the scheme get the neutral colour and a warning.
pub fn style_by_year_bin(g: &ConceptGraph, scheme: &YearScheme) -> StyleMap {
    let mut out = style_by_degree(g);
    out.legend.clear();
    for n in g.nodes() {
        let fill = match n.kind {
            NodeKind::Subject => NEUTRAL.to_string(),
            NodeKind::Book => match n.year.and_then(|y| scheme.position(y)) {
                Some(b) => YEAR_PALETTE[b % YEAR_PALETTE.len()].to_string(),
                None => {
                    out.warnings.push(match n.year {
                        Some(y) => format!("{}: year {y} is outside every bin", n.id),
                        None => format!("{}: undated book", n.id),
                    });
                    NEUTRAL.to_string()
                }
            },
        };
        if let Some(s) = out.nodes.get_mut(&n.id) {
            s.fill = fill;
        }
    }
    for (i, b) in scheme.bins().iter().enumerate() {
        out.legend
            .push(LegendEntry { label: b.label.clone(), color: YEAR_PALETTE[i % YEAR_PALETTE.len()].to_string() });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_bipartite, BookHeadings};
    use std::collections::BTreeSet;

    fn graph() -> ConceptGraph {
        let b = |id: &str, year, hs: &[&str]| BookHeadings {
            book_id: id.into(),
            label: id.into(),
            year,
            headings: hs.iter().map(|h| (h.to_string(), 1)).collect(),
        };
        let books = vec![b("a", Some(1962), &["X", "Y", "Z"]), b("b", Some(1965), &["X", "Y"]), b("c", None, &["X"])];
        let canon: BTreeSet<String> = ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        build_bipartite(&books, &canon, false).unwrap()
    }

    #[test]
    fn degree_ramp_is_monotone() {
        let g = graph();
        let s = style_by_degree(&g);
        let x = s.get("subject:x").unwrap();
        let z = s.get("subject:z").unwrap();
        assert!(x.size > z.size);
        assert_eq!(x.fill, PINK_RAMP.1);
        assert!(s.get("book:a").unwrap().size > s.get("book:c").unwrap().size);
    }

    #[test]
    fn truncation() {
        assert_eq!(truncate_label("abc", 28), "abc");
        assert_eq!(truncate_label(&"x".repeat(30), 28), format!("{}…", "x".repeat(28)));
    }

    #[test]
    fn palette_overflow_warns() {
        let g = graph();
        let n = g.node_count();
        let p = CommunityPartition {
            assignment: (0..n).collect(),
            modularity_q: 0.0,
            resolution_gamma: 1.0,
            seed: 0,
            level_q: vec![],
        };
        let s = style_by_community(&g, &p, &COMMUNITY_PALETTE[..2]);
        assert_eq!(s.warnings.len(), 1);
        let fills: BTreeSet<&str> = s.nodes.values().map(|v| v.fill.as_str()).collect();
        assert_eq!(fills.len(), n);
    }

    #[test]
    fn year_bins() {
        let g = graph();
        let s = style_by_year_bin(&g, &YearScheme::default());
        assert_eq!(s.get("book:a").unwrap().fill, YEAR_PALETTE[2]);
        assert_eq!(s.get("book:a").unwrap().fill, s.get("book:b").unwrap().fill);
        assert_eq!(s.get("book:c").unwrap().fill, NEUTRAL);
        assert_eq!(s.get("subject:x").unwrap().fill, NEUTRAL);
        assert_eq!(s.warnings.len(), 1);
    }
}
