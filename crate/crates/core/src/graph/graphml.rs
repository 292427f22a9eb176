//! GraphML reader and writer for [`ConceptGraph`].
//!
//! Node keys: `kind`, `label`, `year`, `full_degree`, `community`,
//! `domain_code`; edge key: `weight`. Absent optional attributes are
//! omitted rather than written empty.

use std::collections::HashMap;
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::bipartite::{ConceptGraph, Edge, Node, NodeKind};
use super::GraphError;

const NODE_KEYS: [(&str, &str); 6] = [
    ("kind", "string"),
    ("label", "string"),
    ("year", "int"),
    ("full_degree", "int"),
    ("community", "int"),
    ("domain_code", "int"),
];

pub fn to_graphml(g: &ConceptGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    for (name, ty) in NODE_KEYS {
        let _ = writeln!(out, "  <key id=\"{name}\" for=\"node\" attr.name=\"{name}\" attr.type=\"{ty}\"/>");
    }
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for n in g.nodes() {
        let _ = writeln!(out, "    <node id=\"{}\">", escape(n.id.as_str()));
        let _ = writeln!(out, "      <data key=\"kind\">{}</data>", n.kind);
        let _ = writeln!(out, "      <data key=\"label\">{}</data>", escape(n.label.as_str()));
        let ints = [
            ("year", n.year.map(i64::from)),
            ("full_degree", n.full_degree.map(i64::from)),
            ("community", n.community.map(i64::from)),
            ("domain_code", n.domain_code.map(i64::from)),
        ];
        for (key, v) in ints {
            if let Some(v) = v {
                let _ = writeln!(out, "      <data key=\"{key}\">{v}</data>");
            }
        }
        out.push_str("    </node>\n");
    }
    let nodes = g.nodes();
    for e in g.edges() {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\">\n      <data key=\"weight\">{}</data>\n    </edge>",
            escape(nodes[e.book].id.as_str()),
            escape(nodes[e.subject].id.as_str()),
            e.weight
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn attr(e: &BytesStart, name: &[u8]) -> Result<Option<String>, GraphError> {
    for a in e.attributes() {
        let a = a.map_err(|err| GraphError::GraphMl(err.to_string()))?;
        if a.key.as_ref() == name {
            let v = a.unescape_value().map_err(|err| GraphError::GraphMl(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, GraphError> {
    v.trim().parse().map_err(|_| GraphError::GraphMl(format!("bad {key} value {v:?}")))
}

enum Open {
    Node(Node, bool),
    Edge(String, String, u32),
}

/// Reads GraphML written by [`to_graphml`] (key ids are matched through
/// their `attr.name`, so foreign key ids also work).
pub fn from_graphml(text: &str) -> Result<ConceptGraph, GraphError> {
    let mut reader = Reader::from_str(text);
    let mut key_names: HashMap<String, String> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut raw_edges: Vec<(String, String, u32)> = Vec::new();
    let mut open: Option<Open> = None;
    let mut data_key: Option<String> = None;
    let mut text_buf = String::new();
    loop {
        let ev = reader.read_event().map_err(|e| GraphError::GraphMl(e.to_string()))?;
        match &ev {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"key" => {
                let id = attr(e, b"id")?.ok_or_else(|| GraphError::GraphMl("key without id".into()))?;
                let name = attr(e, b"attr.name")?.unwrap_or_else(|| id.clone());
                key_names.insert(id, name);
            }
            Event::Start(e) if e.name().as_ref() == b"node" => {
                let id = attr(e, b"id")?.ok_or_else(|| GraphError::GraphMl("node without id".into()))?;
                open = Some(Open::Node(Node::new(&id, NodeKind::Book, ""), false));
            }
            Event::Empty(e) if e.name().as_ref() == b"node" => {
                let id = attr(e, b"id")?.unwrap_or_default();
                return Err(GraphError::GraphMl(format!("node {id} has no kind")));
            }
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"edge" => {
                let s = attr(e, b"source")?.ok_or_else(|| GraphError::GraphMl("edge without source".into()))?;
                let t = attr(e, b"target")?.ok_or_else(|| GraphError::GraphMl("edge without target".into()))?;
                let is_empty = matches!(ev, Event::Empty(_));
                if is_empty {
                    raw_edges.push((s, t, 1));
                } else {
                    open = Some(Open::Edge(s, t, 1));
                }
            }
            Event::Start(e) if e.name().as_ref() == b"data" => {
                let k = attr(e, b"key")?.ok_or_else(|| GraphError::GraphMl("data without key".into()))?;
                data_key = Some(key_names.get(&k).cloned().unwrap_or(k));
                text_buf.clear();
            }
            Event::Text(t) if data_key.is_some() => {
                text_buf.push_str(&t.unescape().map_err(|e| GraphError::GraphMl(e.to_string()))?);
            }
            Event::End(e) if e.name().as_ref() == b"data" => {
                let key = data_key.take().unwrap_or_default();
                let v = text_buf.as_str();
                match open.as_mut() {
                    Some(Open::Node(n, has_kind)) => match key.as_str() {
                        "kind" => {
                            n.kind = NodeKind::parse(v.trim())
                                .ok_or_else(|| GraphError::GraphMl(format!("unknown kind {v:?}")))?;
                            *has_kind = true;
                        }
                        "label" => n.label = v.to_string(),
                        "year" => n.year = Some(parse_int(&key, v)?),
                        "full_degree" => n.full_degree = Some(parse_int(&key, v)?),
                        "community" => n.community = Some(parse_int(&key, v)?),
                        "domain_code" => n.domain_code = Some(parse_int(&key, v)?),
                        _ => {}
                    },
                    Some(Open::Edge(_, _, w)) if key == "weight" => *w = parse_int(&key, v)?,
                    _ => {}
                }
            }
            Event::End(e) if e.name().as_ref() == b"node" => {
                if let Some(Open::Node(n, has_kind)) = open.take() {
                    if !has_kind {
                        return Err(GraphError::GraphMl(format!("node {} has no kind", n.id)));
                    }
                    nodes.push(n);
                }
            }
            Event::End(e) if e.name().as_ref() == b"edge" => {
                if let Some(Open::Edge(s, t, w)) = open.take() {
                    raw_edges.push((s, t, w));
                }
            }
            _ => {}
        }
    }
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (s, t, w) in &raw_edges {
        let (&a, &b) = match (index.get(s.as_str()), index.get(t.as_str())) {
            (Some(a), Some(b)) => (a, b),
            (None, _) => return Err(GraphError::UnknownNode(s.clone())),
            (_, None) => return Err(GraphError::UnknownNode(t.clone())),
        };
        let (book, subject) = if nodes[a].kind == NodeKind::Book { (a, b) } else { (b, a) };
        edges.push(Edge { book, subject, weight: *w });
    }
    ConceptGraph::from_parts(nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartite::{build_bipartite, BookHeadings};

    #[test]
    fn round_trip_preserves_everything() {
        let books = vec![
            BookHeadings {
                book_id: "kuhn1962".into(),
                label: "The structure of scientific revolutions".into(),
                year: Some(1962),
                headings: vec![("Science".into(), 2), ("Science – Philosophy".into(), 1)],
            },
            BookHeadings {
                book_id: "x".into(),
                label: "Tom & Jerry <\"quoted\">".into(),
                year: None,
                headings: vec![("Science".into(), 1)],
            },
        ];
        let canon = ["Science", "Science – Philosophy"].iter().map(|s| s.to_string()).collect();
        let mut g = build_bipartite(&books, &canon, true).unwrap();
        g.node_mut(0).community = Some(3);
        g.node_mut(2).domain_code = Some(0);
        let text = to_graphml(&g);
        let back = from_graphml(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(to_graphml(&back), text);
    }

    #[test]
    fn dangling_edge_is_an_error() {
        let text = r#"<graphml><graph edgedefault="undirected">
            <node id="a"><data key="kind">book</data></node>
            <edge source="a" target="zz"/></graph></graphml>"#;
        assert!(matches!(from_graphml(text), Err(GraphError::UnknownNode(id)) if id == "zz"));
    }
}
