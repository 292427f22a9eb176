use std::collections::BTreeMap;

use super::bipartite::{ConceptGraph, NodeKind};
use super::weighted::WeightedGraph;

/// One-mode co-occurrence graph; weight = number of shared neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedGraph {
    pub kind: NodeKind,
    pub node_ids: Vec<String>,
    /// Keyed by `(i, j)` with `i < j` into `node_ids`.
    pub edges: BTreeMap<(usize, usize), u32>,
}

impl ProjectedGraph {
    pub fn weight(&self, a: &str, b: &str) -> u32 {
        let pos = |id: &str| self.node_ids.iter().position(|n| n == id);
        match (pos(a), pos(b)) {
            (Some(i), Some(j)) if i != j => self.edges.get(&(i.min(j), i.max(j))).copied().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn to_weighted(&self) -> WeightedGraph {
        let mut g = WeightedGraph::new(self.node_ids.len());
        for (&(i, j), &w) in &self.edges {
            g.add_edge(i, j, w as f64);
        }
        g
    }

    pub fn edges_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["source", "target", "weight"]).unwrap();
        for (&(i, j), &wt) in &self.edges {
            w.write_record([&self.node_ids[i], &self.node_ids[j], &wt.to_string()]).unwrap();
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Projects onto nodes of `keep`, connecting two nodes by the count of
/// opposite-kind neighbours they share. Pairs sharing none get no edge.
pub fn project_cooccurrence(g: &ConceptGraph, keep: NodeKind) -> ProjectedGraph {
    let kept: Vec<usize> = g.nodes_of(keep).map(|(i, _)| i).collect();
    let local: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(l, &i)| (i, l)).collect();
    let adj = g.neighbors();
    let mut edges: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (i, node) in g.nodes().iter().enumerate() {
        if node.kind == keep {
            continue;
        }
        let mut members: Vec<usize> = adj[i].iter().map(|j| local[j]).collect();
        members.sort_unstable();
        members.dedup();
        for (a, &x) in members.iter().enumerate() {
            for &y in &members[a + 1..] {
                *edges.entry((x, y)).or_default() += 1;
            }
        }
    }
    ProjectedGraph { kind: keep, node_ids: kept.iter().map(|&i| g.nodes()[i].id.clone()).collect(), edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartite::{build_bipartite, BookHeadings};
    use std::collections::BTreeSet;

    fn graph(spec: &[(&str, &[&str])]) -> ConceptGraph {
        let mut canon = BTreeSet::new();
        let books: Vec<BookHeadings> = spec
            .iter()
            .map(|(id, hs)| {
                canon.extend(hs.iter().map(|h| h.to_string()));
                BookHeadings {
                    book_id: id.to_string(),
                    label: id.to_string(),
                    year: None,
                    headings: hs.iter().map(|h| (h.to_string(), 1)).collect(),
                }
            })
            .collect();
        build_bipartite(&books, &canon, false).unwrap()
    }

    #[test]
    fn shared_books_weight_subject_edges() {
        let p = project_cooccurrence(&graph(&[("b1", &["A", "B"]), ("b2", &["A", "B"])]), NodeKind::Subject);
        assert_eq!(p.weight("subject:a", "subject:b"), 2);
        assert_eq!(p.edges.len(), 1);
    }

    #[test]
    fn single_book_has_no_edges() {
        let p = project_cooccurrence(&graph(&[("b1", &["A"])]), NodeKind::Subject);
        assert_eq!(p.node_ids, vec!["subject:a"]);
        assert!(p.edges.is_empty());
    }

    #[test]
    fn star_projects_to_complete_graph() {
        let spec: Vec<(String, [&str; 1])> = (0..5).map(|i| (format!("b{i}"), ["Hub"])).collect();
        let spec_ref: Vec<(&str, &[&str])> = spec.iter().map(|(b, h)| (b.as_str(), h.as_slice())).collect();
        let p = project_cooccurrence(&graph(&spec_ref), NodeKind::Book);
        assert_eq!(p.edges.len(), 10);
        assert!(p.edges.values().all(|&w| w == 1));
    }
}
