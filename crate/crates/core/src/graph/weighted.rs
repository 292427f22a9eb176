/// Undirected weighted graph over dense indices `0..n`.
///
/// A self-loop of weight `w` adds `2w` to its node's degree, so
/// `Σ degree = 2m` holds with loops included.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { adj: vec![Vec::new(); n], loops: vec![0.0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut g = WeightedGraph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) {
        if u == v {
            self.loops[u] += w;
        } else {
            self.adj[u].push((v, w));
            self.adj[v].push((u, w));
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    pub fn self_loop(&self, u: usize) -> f64 {
        self.loops[u]
    }

    pub fn degree(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|(_, w)| w).sum::<f64>() + 2.0 * self.loops[u]
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.node_count()).map(|u| self.degree(u)).collect()
    }

    /// `2m`: twice the total edge weight.
    pub fn two_m(&self) -> f64 {
        self.degrees().iter().sum()
    }

    /// Each undirected edge once as `(u, v, w)` with `u <= v`.
    pub fn edge_list(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for u in 0..self.node_count() {
            if self.loops[u] != 0.0 {
                out.push((u, u, self.loops[u]));
            }
            out.extend(self.adj[u].iter().filter(|(v, _)| *v > u).map(|&(v, w)| (u, v, w)));
        }
        out
    }
}
