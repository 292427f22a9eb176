//! Two-phase Louvain modularity optimization with a resolution parameter.
//!
//! Phase one visits nodes in a seeded random order and moves each to the
//! neighbouring community with the largest modularity gain; equal gains go
//! to the lowest community id and a node only leaves its community for a
//! strictly better one. Phase two collapses communities into nodes (internal
//! weight becomes a self-loop). Levels repeat until a pass moves nothing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::modularity::modularity;
use super::weighted::WeightedGraph;
use super::GraphError;
use crate::digest::child_seed;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    /// Community of each node index, numbered from 0 by first appearance.
    pub assignment: Vec<usize>,
    pub modularity_q: f64,
    pub resolution_gamma: f64,
    pub seed: u64,
    /// Modularity after each aggregation level.
    pub level_q: Vec<f64>,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.assignment.iter().copied().max().map_or(0, |c| c + 1)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.community_count()];
        for &c in &self.assignment {
            s[c] += 1;
        }
        s
    }
}

/// Renumbers labels to `0..k` in order of first appearance.
pub fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn local_moves(g: &WeightedGraph, gamma: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = g.node_count();
    let k = g.degrees();
    let two_m: f64 = k.iter().sum();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = k.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut moved_any = false;
    let mut weight_to: Vec<f64> = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    loop {
        let mut moved = false;
        for &u in &order {
            let cu = comm[u];
            for &(v, w) in g.neighbors(u) {
                let cv = comm[v];
                if weight_to[cv] == 0.0 && !touched.contains(&cv) {
                    touched.push(cv);
                }
                weight_to[cv] += w;
            }
            tot[cu] -= k[u];
            let gain = |c: usize, wt: f64| wt - gamma * tot[c] * k[u] / two_m;
            let stay = gain(cu, weight_to[cu]);
            let mut best = cu;
            let mut best_gain = stay;
            // ascending ids, strict improvement: equal gains keep the lower id
            touched.sort_unstable();
            for &c in &touched {
                if c == cu {
                    continue;
                }
                let gc = gain(c, weight_to[c]);
                if gc > best_gain + EPS {
                    best = c;
                    best_gain = gc;
                }
            }
            tot[best] += k[u];
            if best != cu {
                comm[u] = best;
                moved = true;
                moved_any = true;
            }
            for &c in &touched {
                weight_to[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
    }
    (relabel(&comm), moved_any)
}

fn aggregate(g: &WeightedGraph, comm: &[usize]) -> WeightedGraph {
    let k = comm.iter().copied().max().map_or(0, |c| c + 1);
    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (u, v, w) in g.edge_list() {
        let (a, b) = (comm[u].min(comm[v]), comm[u].max(comm[v]));
        *weights.entry((a, b)).or_default() += w;
    }
    let mut out = WeightedGraph::new(k);
    for ((a, b), w) in weights {
        out.add_edge(a, b, w);
    }
    out
}

/// Louvain with the node visit order drawn from `seed`.
pub fn louvain(g: &WeightedGraph, gamma: f64, seed: u64) -> Result<CommunityPartition, GraphError> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(GraphError::InvalidResolution(gamma));
    }
    if g.two_m() <= 0.0 {
        return Err(GraphError::ZeroWeight);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..g.node_count()).collect();
    let mut level = g.clone();
    let mut level_q = Vec::new();
    loop {
        let (comm, moved) = local_moves(&level, gamma, &mut rng);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        level_q.push(modularity(g, &membership, gamma)?);
        level = aggregate(&level, &comm);
    }
    let assignment = relabel(&membership);
    let modularity_q = modularity(g, &assignment, gamma)?;
    if level_q.is_empty() {
        level_q.push(modularity_q);
    }
    Ok(CommunityPartition { assignment, modularity_q, resolution_gamma: gamma, seed, level_q })
}

/// Best of `restarts` runs (at least one). Run 0 uses `seed`; run `r`
/// uses `child_seed(seed, "restart-r")`. Ties keep the earlier run.
pub fn louvain_with_restarts(
    g: &WeightedGraph,
    gamma: f64,
    seed: u64,
    restarts: usize,
) -> Result<CommunityPartition, GraphError> {
    let mut best = louvain(g, gamma, seed)?;
    for r in 1..restarts.max(1) {
        let p = louvain(g, gamma, child_seed(seed, &format!("restart-{r}")))?;
        if p.modularity_q > best.modularity_q + EPS {
            best = p;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangles() -> WeightedGraph {
        WeightedGraph::from_edges(6, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)])
    }

    #[test]
    fn two_triangles_for_many_seeds() {
        for seed in 0..50 {
            let p = louvain(&triangles(), 1.0, seed).unwrap();
            assert_eq!(p.assignment, vec![0, 0, 0, 1, 1, 1], "seed {seed}");
            assert!((p.modularity_q - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_edge_joins() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]);
        let p = louvain(&g, 1.0, 3).unwrap();
        assert_eq!(p.assignment, vec![0, 0]);
        assert_eq!(p.modularity_q, 0.0);
    }

    #[test]
    fn huge_resolution_gives_singletons() {
        let p = louvain(&triangles(), 1e3, 1).unwrap();
        assert_eq!(p.community_count(), 6);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = WeightedGraph::from_edges(
            7,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0), (6, 0, 1.0), (0, 3, 1.0)],
        );
        assert_eq!(louvain(&g, 0.9, 11).unwrap(), louvain(&g, 0.9, 11).unwrap());
    }

    #[test]
    fn reported_q_matches_modularity() {
        let g = triangles();
        let p = louvain_with_restarts(&g, 0.9, 5, 4).unwrap();
        assert_eq!(p.modularity_q, modularity(&g, &p.assignment, 0.9).unwrap());
    }

    #[test]
    fn relabel_by_first_appearance() {
        assert_eq!(relabel(&[5, 5, 2, 9, 2]), vec![0, 0, 1, 2, 1]);
    }
}
