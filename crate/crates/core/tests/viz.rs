use std::collections::BTreeSet;

use biblionet::graph::{build_bipartite, BookHeadings, CommunityPartition, YearScheme};
use biblionet::ingest::reports::Histogram;
use biblionet::viz::chart::{FINAL_COLOR, INITIAL_COLOR};
use biblionet::viz::style::{COMMUNITY_PALETTE, PINK_RAMP, YEAR_PALETTE};
use biblionet::viz::{
    force_layout, render_histogram_svg, render_svg, style_by_community, style_by_degree, style_by_year_bin, to_dot,
    truncate_label, HistogramSeries, LayoutParams, StyleMap,
};
use biblionet::{ConceptGraph, VizError};
use proptest::prelude::*;
use quick_xml::events::Event;
use quick_xml::Reader;

fn graph(spec: &[(&str, Option<i32>, Vec<String>)]) -> ConceptGraph {
    let mut canon = BTreeSet::new();
    let books: Vec<BookHeadings> = spec
        .iter()
        .map(|(id, year, hs)| {
            canon.extend(hs.iter().cloned());
            BookHeadings {
                book_id: id.to_string(),
                label: format!("Title of {id}"),
                year: *year,
                headings: hs.iter().map(|h| (h.clone(), 1)).collect(),
            }
        })
        .collect();
    build_bipartite(&books, &canon, false).unwrap()
}

fn hs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn luminance(c: &str) -> u32 {
    let v = u32::from_str_radix(c.trim_start_matches('#'), 16).unwrap();
    299 * (v >> 16) + 587 * ((v >> 8) & 0xff) + 114 * (v & 0xff)
}

fn well_formed(svg: &str) -> usize {
    let mut r = Reader::from_str(svg);
    let mut elements = 0;
    loop {
        match r.read_event().expect("well-formed XML") {
            Event::Eof => return elements,
            Event::Start(_) | Event::Empty(_) => elements += 1,
            _ => {}
        }
    }
}

#[test]
fn isolated_nodes_repel() {
    let g = graph(&[("a", None, hs(&["X"])), ("b", None, hs(&["Y"]))]);
    let one = force_layout(&g, LayoutParams { iterations: 1, area: None, seed: 3 }).unwrap();
    let many = force_layout(&g, LayoutParams { iterations: 200, area: None, seed: 3 }).unwrap();
    let d = |l: &biblionet::viz::LayoutResult| dist(l.position("book:a").unwrap(), l.position("book:b").unwrap());
    assert!(d(&many) > d(&one));
}

#[test]
fn single_edge_settles_near_k() {
    let g = graph(&[("a", None, hs(&["X"]))]);
    let params = LayoutParams { iterations: 500, area: None, seed: 11 };
    let l = force_layout(&g, params).unwrap();
    let k = (2.0 * 1e4 / 2.0f64).sqrt();
    let d = dist(l.positions[0], l.positions[1]);
    assert!((d - k).abs() <= 0.1 * k, "distance {d}, k {k}");
    assert_eq!(force_layout(&g, params).unwrap(), l);
}

#[test]
fn layout_rejects_empty_input() {
    let g = ConceptGraph::default();
    assert!(matches!(force_layout(&g, LayoutParams::default()), Err(VizError::EmptyGraph)));
    let g = graph(&[("a", None, hs(&["X"]))]);
    assert!(matches!(
        force_layout(&g, LayoutParams { iterations: 0, area: None, seed: 0 }),
        Err(VizError::InvalidIterations)
    ));
}

#[test]
fn degree_styling() {
    let many: Vec<String> = (0..31).map(|i| format!("H{i:02}")).collect();
    let g = graph(&[("big", None, many.clone()), ("small", None, hs(&["H00"])), ("mid", None, hs(&["H00", "H01"]))]);
    let s = style_by_degree(&g);
    let top = s.get("subject:h00").unwrap();
    assert_eq!(top.fill, PINK_RAMP.1);
    for (id, st) in &s.nodes {
        if id.starts_with("subject:") {
            assert!(st.size <= top.size);
            assert!(luminance(&st.fill) >= luminance(&top.fill));
        }
    }
    let (h05, h30) = (s.get("subject:h05").unwrap(), s.get("subject:h30").unwrap());
    assert_eq!((h05.size, &h05.fill), (h30.size, &h30.fill));
    assert!(s.get("book:big").unwrap().size > s.get("book:small").unwrap().size);
}

#[test]
fn community_styling() {
    let spec: Vec<(String, Option<i32>, Vec<String>)> =
        (0..8).map(|i| (format!("b{i}"), None, vec![format!("S{i}")])).collect();
    let spec: Vec<(&str, Option<i32>, Vec<String>)> =
        spec.iter().map(|(a, b, c)| (a.as_str(), *b, c.clone())).collect();
    let g = graph(&spec);
    let partition = |assignment: Vec<usize>| CommunityPartition {
        assignment,
        modularity_q: 0.0,
        resolution_gamma: 1.0,
        seed: 0,
        level_q: vec![],
    };
    let eight = partition((0..16).map(|i| i % 8).collect());
    let s = style_by_community(&g, &eight, &COMMUNITY_PALETTE);
    let fills: BTreeSet<&str> = s.nodes.values().map(|n| n.fill.as_str()).collect();
    assert_eq!(fills.len(), 8);
    assert_eq!(s.legend.len(), 8);
    assert!(s.warnings.is_empty());

    let one = style_by_community(&g, &partition(vec![0; 16]), &COMMUNITY_PALETTE);
    let fills: BTreeSet<&str> = one.nodes.values().map(|n| n.fill.as_str()).collect();
    assert_eq!(fills.len(), 1);

    let over = style_by_community(&g, &eight, &COMMUNITY_PALETTE[..4]);
    assert_eq!(over.warnings.len(), 1);
}

#[test]
fn year_styling() {
    let g = graph(&[("kuhn", Some(1962), hs(&["Science"])), ("late", Some(2012), hs(&["Science"]))]);
    let s = style_by_year_bin(&g, &YearScheme::default());
    assert_eq!(s.get("book:kuhn").unwrap().fill, YEAR_PALETTE[2]);
    assert_eq!(s.warnings.len(), 1);
}

#[test]
fn svg_output() {
    let g = graph(&[("a", Some(2000), hs(&["Science & society", "Maps"])), ("b", None, hs(&["Maps"]))]);
    let l = force_layout(&g, LayoutParams { iterations: 50, area: None, seed: 1 }).unwrap();
    let s = style_by_degree(&g);
    let svg = render_svg(&g, &l, &s).unwrap();
    assert_eq!(render_svg(&g, &l, &s).unwrap(), svg);
    assert!(well_formed(&svg) > g.node_count());
    assert!(svg.contains("id=\"legend\""));
    let bare = render_svg(&g, &l, &StyleMap::default()).unwrap();
    assert!(!bare.contains("id=\"legend\""));
    well_formed(&bare);
    assert!(to_dot(&g).starts_with("graph G {"));
}

#[test]
fn labels_are_truncated() {
    assert_eq!(truncate_label("Science", 28), "Science");
    assert_eq!(truncate_label("Communication in science – Data processing", 10), "Communicat…");
}

#[test]
fn histogram_chart() {
    let initial = Histogram::from_years((0..198).map(|i| Some(1950 + i % 60)), 5).unwrap();
    let last = Histogram::from_years((0..177).map(|i| Some(1950 + i % 60)), 5).unwrap();
    let empty = Histogram::from_years(std::iter::empty(), 5).unwrap();
    assert_eq!((initial.total(), last.total()), (198, 177));
    let svg = render_histogram_svg(&[
        HistogramSeries { name: "initial", color: INITIAL_COLOR, histogram: &initial },
        HistogramSeries { name: "final", color: FINAL_COLOR, histogram: &last },
    ])
    .unwrap();
    well_formed(&svg);
    assert!(svg.contains(INITIAL_COLOR) && svg.contains(FINAL_COLOR));

    let svg =
        render_histogram_svg(&[HistogramSeries { name: "none", color: INITIAL_COLOR, histogram: &empty }]).unwrap();
    well_formed(&svg);
    assert!(!svg.contains(INITIAL_COLOR));

    let other = Histogram::from_years([Some(2000)], 10).unwrap();
    assert!(matches!(
        render_histogram_svg(&[
            HistogramSeries { name: "a", color: INITIAL_COLOR, histogram: &initial },
            HistogramSeries { name: "b", color: FINAL_COLOR, histogram: &other },
        ]),
        Err(VizError::MismatchedBins(5, 10))
    ));
}

fn arb_graph() -> impl Strategy<Value = ConceptGraph> {
    prop::collection::vec((prop::option::of(1750i32..2015), prop::collection::btree_set(0usize..10, 1..5)), 1..12)
        .prop_map(|rows| {
            let spec: Vec<(String, Option<i32>, Vec<String>)> = rows
                .into_iter()
                .enumerate()
                .map(|(i, (y, hs))| (format!("b{i}"), y, hs.into_iter().map(|h| format!("Topic <{h}> & co")).collect()))
                .collect();
            let spec: Vec<(&str, Option<i32>, Vec<String>)> =
                spec.iter().map(|(a, b, c)| (a.as_str(), *b, c.clone())).collect();
            graph(&spec)
        })
}

proptest! {
    #[test]
    fn size_follows_degree(g in arb_graph()) {
        let s = style_by_degree(&g);
        let deg = g.degrees();
        let subjects: Vec<usize> = g.nodes_of(biblionet::NodeKind::Subject).map(|(i, _)| i).collect();
        for &a in &subjects {
            for &b in &subjects {
                let (sa, sb) = (s.get(&g.nodes()[a].id).unwrap(), s.get(&g.nodes()[b].id).unwrap());
                if deg[a] < deg[b] {
                    prop_assert!(sa.size < sb.size);
                    prop_assert!(luminance(&sa.fill) >= luminance(&sb.fill));
                } else if deg[a] == deg[b] {
                    prop_assert_eq!(sa.size, sb.size);
                    prop_assert_eq!(&sa.fill, &sb.fill);
                }
            }
        }
    }

    #[test]
    fn svg_is_well_formed(g in arb_graph(), seed in any::<u64>()) {
        let l = force_layout(&g, LayoutParams { iterations: 20, area: None, seed }).unwrap();
        for style in [style_by_degree(&g), style_by_year_bin(&g, &YearScheme::default())] {
            let svg = render_svg(&g, &l, &style).unwrap();
            prop_assert!(well_formed(&svg) >= g.node_count());
        }
    }
}
