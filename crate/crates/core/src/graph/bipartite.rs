use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::weighted::WeightedGraph;
use super::GraphError;
use crate::ingest::bibtex::slugify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Book,
    Subject,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Book => "book",
            NodeKind::Subject => "subject",
        }
    }

    pub fn parse(s: &str) -> Option<NodeKind> {
        match s {
            "book" => Some(NodeKind::Book),
            "subject" => Some(NodeKind::Subject),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub year: Option<i32>,
    /// Degree in the unfiltered network (a book's unique-heading count).
    pub full_degree: Option<u32>,
    pub community: Option<u32>,
    pub domain_code: Option<u8>,
}

impl Node {
    pub fn new(id: &str, kind: NodeKind, label: &str) -> Self {
        Node {
            id: id.to_string(),
            kind,
            label: label.to_string(),
            year: None,
            full_degree: None,
            community: None,
            domain_code: None,
        }
    }
}

/// Edge between node indices; `book` always indexes a book node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub book: usize,
    pub subject: usize,
    pub weight: u32,
}

/// Bipartite book/subject network. Book nodes come first, in input order,
/// followed by subject nodes sorted by label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
}

impl ConceptGraph {
    /// Validates bipartiteness and unique ids; edges are sorted and merged.
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.id.clone()));
            }
        }
        let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for e in edges {
            let (Some(b), Some(s)) = (nodes.get(e.book), nodes.get(e.subject)) else {
                return Err(GraphError::UnknownNode(format!("#{} or #{}", e.book, e.subject)));
            };
            if b.kind != NodeKind::Book || s.kind != NodeKind::Subject {
                return Err(GraphError::NotBipartite(b.id.clone(), s.id.clone()));
            }
            *merged.entry((e.book, e.subject)).or_default() += e.weight.max(1);
        }
        let edges = merged.into_iter().map(|((book, subject), weight)| Edge { book, subject, weight }).collect();
        Ok(ConceptGraph { nodes, edges, index })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn node_mut(&mut self, idx: usize) -> &mut Node {
        &mut self.nodes[idx]
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn nodes_of(&self, kind: NodeKind) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes.iter().enumerate().filter(move |(_, n)| n.kind == kind)
    }

    /// Distinct neighbours per node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            d[e.book] += 1;
            d[e.subject] += 1;
        }
        d
    }

    pub fn degree_of(&self, id: &str) -> Option<usize> {
        self.index_of(id).map(|i| self.degrees()[i])
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.book].push(e.subject);
            adj[e.subject].push(e.book);
        }
        adj
    }

    pub fn subject_labels(&self) -> BTreeSet<&str> {
        self.nodes_of(NodeKind::Subject).map(|(_, n)| n.label.as_str()).collect()
    }

    /// Keeps nodes flagged in `keep`; edges survive when both ends do.
    pub fn induced(&self, keep: &[bool]) -> ConceptGraph {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if keep[i] {
                remap[i] = nodes.len();
                nodes.push(n.clone());
            }
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| keep[e.book] && keep[e.subject])
            .map(|e| Edge { book: remap[e.book], subject: remap[e.subject], weight: e.weight })
            .collect();
        ConceptGraph::from_parts(nodes, edges).expect("subgraph of a valid graph")
    }

    /// Undirected weighted view; `unweighted` sets every edge weight to 1.
    pub fn to_weighted(&self, unweighted: bool) -> WeightedGraph {
        let mut g = WeightedGraph::new(self.nodes.len());
        for e in &self.edges {
            g.add_edge(e.book, e.subject, if unweighted { 1.0 } else { e.weight as f64 });
        }
        g
    }

    /// `source,target,weight` rows, one per edge.
    pub fn edges_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["source", "target", "weight"]).unwrap();
        for e in &self.edges {
            w.write_record([&self.nodes[e.book].id, &self.nodes[e.subject].id, &e.weight.to_string()]).unwrap();
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// One book and its canonical headings with the number of editions
/// carrying each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookHeadings {
    pub book_id: String,
    pub label: String,
    pub year: Option<i32>,
    pub headings: Vec<(String, u32)>,
}

pub fn subject_node_ids<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut used = HashSet::new();
    labels
        .into_iter()
        .map(|l| {
            let base = format!("subject:{}", slugify(l));
            let mut id = base.clone();
            let mut n = 2;
            while !used.insert(id.clone()) {
                id = format!("{base}-{n}");
                n += 1;
            }
            id
        })
        .collect()
}

/// One node per book and per canonical heading; an edge per (book,
/// heading) pair weighted by edition count, or 1 unless
/// `preserve_multiplicity` is set.
pub fn build_bipartite(
    books: &[BookHeadings],
    canonical: &BTreeSet<String>,
    preserve_multiplicity: bool,
) -> Result<ConceptGraph, GraphError> {
    let mut nodes = Vec::with_capacity(books.len() + canonical.len());
    let mut seen_books = HashSet::new();
    for b in books {
        if !seen_books.insert(b.book_id.as_str()) {
            return Err(GraphError::DuplicateBook(b.book_id.clone()));
        }
        let mut n = Node::new(&format!("book:{}", b.book_id), NodeKind::Book, &b.label);
        n.year = b.year;
        nodes.push(n);
    }
    let subject_base = nodes.len();
    let subject_index: HashMap<&str, usize> =
        canonical.iter().enumerate().map(|(i, h)| (h.as_str(), subject_base + i)).collect();
    for (id, label) in subject_node_ids(canonical.iter().map(String::as_str)).into_iter().zip(canonical) {
        nodes.push(Node::new(&id, NodeKind::Subject, label));
    }
    let mut edges = Vec::new();
    let mut attached = vec![false; canonical.len()];
    for (bi, b) in books.iter().enumerate() {
        let mut per_book: BTreeMap<usize, u32> = BTreeMap::new();
        for (h, editions) in &b.headings {
            let &si = subject_index
                .get(h.as_str())
                .ok_or_else(|| GraphError::UnknownHeading { book: b.book_id.clone(), heading: h.clone() })?;
            *per_book.entry(si).or_default() += (*editions).max(1);
        }
        for (si, w) in per_book {
            attached[si - subject_base] = true;
            edges.push(Edge { book: bi, subject: si, weight: if preserve_multiplicity { w } else { 1 } });
        }
    }
    let unattached: Vec<String> =
        canonical.iter().zip(&attached).filter(|(_, a)| !**a).map(|(h, _)| h.clone()).collect();
    if !unattached.is_empty() {
        return Err(GraphError::UnattachedHeadings(unattached));
    }
    let mut g = ConceptGraph::from_parts(nodes, edges)?;
    let deg = g.degrees();
    for (i, d) in deg.into_iter().enumerate() {
        g.nodes[i].full_degree = Some(d as u32);
    }
    Ok(g)
}

/// Subject-degree threshold. `GreaterThan(5)` keeps subjects linked to at
/// least six distinct books.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeFilter {
    GreaterThan(usize),
    AtLeast(usize),
}

impl DegreeFilter {
    pub fn min_degree(self) -> usize {
        match self {
            DegreeFilter::GreaterThan(n) => n + 1,
            DegreeFilter::AtLeast(n) => n,
        }
    }
}

/// Keeps qualifying subjects and every book adjacent to one of them.
pub fn filter_by_subject_degree(g: &ConceptGraph, threshold: DegreeFilter) -> ConceptGraph {
    let min = threshold.min_degree();
    let deg = g.degrees();
    let mut keep: Vec<bool> =
        g.nodes.iter().enumerate().map(|(i, n)| n.kind == NodeKind::Subject && deg[i] >= min).collect();
    for e in &g.edges {
        if keep[e.subject] {
            keep[e.book] = true;
        }
    }
    g.induced(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn books(spec: &[(&str, &[&str])]) -> (Vec<BookHeadings>, BTreeSet<String>) {
        let mut canon = BTreeSet::new();
        let books = spec
            .iter()
            .map(|(id, hs)| {
                canon.extend(hs.iter().map(|h| h.to_string()));
                BookHeadings {
                    book_id: id.to_string(),
                    label: id.to_string(),
                    year: Some(2000),
                    headings: hs.iter().map(|h| (h.to_string(), 1)).collect(),
                }
            })
            .collect();
        (books, canon)
    }

    #[test]
    fn one_book_two_headings() {
        let (b, c) = books(&[("b1", &["A", "B"])]);
        let g = build_bipartite(&b, &c, false).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
    }

    #[test]
    fn shared_heading_degree() {
        let (b, c) = books(&[("b1", &["A"]), ("b2", &["A"])]);
        let g = build_bipartite(&b, &c, false).unwrap();
        assert_eq!(g.degree_of("subject:a"), Some(2));
    }

    #[test]
    fn unattached_and_unknown_headings_are_errors() {
        let (b, mut c) = books(&[("b1", &["A"])]);
        c.insert("Z".into());
        assert!(matches!(build_bipartite(&b, &c, false), Err(GraphError::UnattachedHeadings(v)) if v == ["Z"]));
        let (b, _) = books(&[("b1", &["A"])]);
        assert!(matches!(build_bipartite(&b, &BTreeSet::new(), false), Err(GraphError::UnknownHeading { .. })));
    }

    #[test]
    fn multiplicity_flag() {
        let b =
            vec![BookHeadings { book_id: "b".into(), label: "b".into(), year: None, headings: vec![("A".into(), 3)] }];
        let c: BTreeSet<String> = ["A".to_string()].into();
        assert_eq!(build_bipartite(&b, &c, false).unwrap().edges()[0].weight, 1);
        assert_eq!(build_bipartite(&b, &c, true).unwrap().edges()[0].weight, 3);
    }

    #[test]
    fn degree_filter_threshold() {
        let six: Vec<String> = (0..6).map(|i| format!("b{i}")).collect();
        let mut spec: Vec<(&str, Vec<&str>)> = six.iter().map(|b| (b.as_str(), vec!["Wide"])).collect();
        for s in spec.iter_mut().take(3) {
            s.1.push("Narrow");
        }
        spec.push(("loner", vec!["Alone"]));
        let spec_ref: Vec<(&str, &[&str])> = spec.iter().map(|(b, h)| (*b, h.as_slice())).collect();
        let (b, c) = books(&spec_ref);
        let g = build_bipartite(&b, &c, false).unwrap();
        let f = filter_by_subject_degree(&g, DegreeFilter::GreaterThan(5));
        assert_eq!(f.subject_labels(), BTreeSet::from(["Wide"]));
        assert_eq!(f.count_kind(NodeKind::Book), 6);
        assert_eq!(f.node("book:b0").unwrap().full_degree, Some(2));
        assert_eq!(filter_by_subject_degree(&g, DegreeFilter::AtLeast(0)), g);
    }

    #[test]
    fn colliding_slugs_get_suffixes() {
        let ids = subject_node_ids(["Science!", "Science?", "Science"]);
        assert_eq!(ids, vec!["subject:science", "subject:science-2", "subject:science-3"]);
    }
}
