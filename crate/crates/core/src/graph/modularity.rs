use super::weighted::WeightedGraph;
use super::GraphError;

/// Newman–Girvan modularity with resolution `gamma`:
/// `Q = (1/2m) Σ_c [Σ_in(c) − γ·Σ_tot(c)²/(2m)]`, where `Σ_in(c)` counts
/// each internal edge in both directions and each self-loop `w` as `2w`.
pub fn modularity(g: &WeightedGraph, assignment: &[usize], gamma: f64) -> Result<f64, GraphError> {
    if assignment.len() != g.node_count() {
        return Err(GraphError::PartitionSize { expected: g.node_count(), got: assignment.len() });
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(GraphError::InvalidResolution(gamma));
    }
    let two_m = g.two_m();
    if two_m <= 0.0 {
        return Err(GraphError::ZeroWeight);
    }
    let communities = assignment.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; communities];
    let mut total = vec![0.0; communities];
    for u in 0..g.node_count() {
        let cu = assignment[u];
        total[cu] += g.degree(u);
        internal[cu] += 2.0 * g.self_loop(u);
        for &(v, w) in g.neighbors(u) {
            if assignment[v] == cu {
                internal[cu] += w;
            }
        }
    }
    let q: f64 = internal.iter().zip(&total).map(|(i, t)| i - gamma * t * t / two_m).sum();
    Ok(q / two_m)
}
