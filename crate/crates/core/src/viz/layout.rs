//! Fruchterman–Reingold force-directed layout.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::VizError;
use crate::graph::ConceptGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    pub iterations: usize,
    /// Defaults to `|V|·10⁴`.
    pub area: Option<f64>,
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams { iterations: 500, area: None, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutResult {
    pub node_ids: Vec<String>,
    pub positions: Vec<(f64, f64)>,
    pub params: LayoutParams,
    /// `(min_x, min_y, max_x, max_y)`.
    pub bounding_box: (f64, f64, f64, f64),
}

impl LayoutResult {
    pub fn from_positions(node_ids: Vec<String>, positions: Vec<(f64, f64)>, params: LayoutParams) -> Self {
        let bounding_box = bbox(&positions);
        LayoutResult { node_ids, positions, params, bounding_box }
    }

    pub fn position(&self, id: &str) -> Option<(f64, f64)> {
        self.node_ids.iter().position(|n| n == id).map(|i| self.positions[i])
    }

    pub fn lookup(&self) -> HashMap<&str, (f64, f64)> {
        self.node_ids.iter().map(String::as_str).zip(self.positions.iter().copied()).collect()
    }

    /// `node_id,x,y` with shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        w.write_record(["node_id", "x", "y"]).unwrap();
        for (id, (x, y)) in self.node_ids.iter().zip(&self.positions) {
            w.write_record([id.clone(), x.to_string(), y.to_string()]).unwrap();
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn from_csv(text: &str, params: LayoutParams) -> Result<Self, VizError> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut ids = Vec::new();
        let mut pos = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let bad = |reason: String| VizError::LayoutLine { line, reason };
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.len() != 3 {
                return Err(bad(format!("expected 3 fields, got {}", rec.len())));
            }
            let x: f64 = rec[1].parse().map_err(|_| bad(format!("bad x {:?}", &rec[1])))?;
            let y: f64 = rec[2].parse().map_err(|_| bad(format!("bad y {:?}", &rec[2])))?;
            ids.push(rec[0].to_string());
            pos.push((x, y));
        }
        Ok(LayoutResult::from_positions(ids, pos, params))
    }
}

fn bbox(p: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    if p.is_empty() {
        return (0.0, 0.0, 0.0, 0.0);
    }
    p.iter().fold((f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |b, &(x, y)| {
        (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y))
    })
}

/// Classic FR on `n` nodes: repulsion `k²/d` between every pair,
/// attraction `d²/k` along edges, `k = sqrt(area/n)`, displacement capped
/// by a temperature cooling linearly from `sqrt(area)/10`.
pub fn fruchterman_reingold(
    n: usize,
    edges: &[(usize, usize)],
    params: &LayoutParams,
) -> Result<Vec<(f64, f64)>, VizError> {
    if n == 0 {
        return Err(VizError::EmptyGraph);
    }
    if params.iterations == 0 {
        return Err(VizError::InvalidIterations);
    }
    let area = params.area.unwrap_or(n as f64 * 1e4);
    let side = area.sqrt();
    let k = (area / n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pos: Vec<(f64, f64)> =
        (0..n).map(|_| (rng.gen_range(-0.5..0.5) * side, rng.gen_range(-0.5..0.5) * side)).collect();
    let t0 = side / 10.0;
    let mut disp = vec![(0.0f64, 0.0f64); n];
    for it in 0..params.iterations {
        let t = t0 * (1.0 - it as f64 / params.iterations as f64);
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));
        for u in 0..n {
            for v in (u + 1)..n {
                let (mut dx, mut dy) = (pos[u].0 - pos[v].0, pos[u].1 - pos[v].1);
                let mut d = (dx * dx + dy * dy).sqrt();
                if d < 1e-9 {
                    (dx, dy, d) = (0.01, 0.0, 0.01);
                }
                let f = k * k / d;
                let (fx, fy) = (dx / d * f, dy / d * f);
                disp[u].0 += fx;
                disp[u].1 += fy;
                disp[v].0 -= fx;
                disp[v].1 -= fy;
            }
        }
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            let (dx, dy) = (pos[u].0 - pos[v].0, pos[u].1 - pos[v].1);
            let d = (dx * dx + dy * dy).sqrt().max(1e-9);
            let f = d * d / k;
            let (fx, fy) = (dx / d * f, dy / d * f);
            disp[u].0 -= fx;
            disp[u].1 -= fy;
            disp[v].0 += fx;
            disp[v].1 += fy;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt();
            if len > 0.0 {
                let step = len.min(t);
                p.0 += d.0 / len * step;
                p.1 += d.1 / len * step;
            }
        }
    }
    Ok(pos)
}

pub fn force_layout(g: &ConceptGraph, params: LayoutParams) -> Result<LayoutResult, VizError> {
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.book, e.subject)).collect();
    let pos = fruchterman_reingold(g.node_count(), &edges, &params)?;
    Ok(LayoutResult::from_positions(g.nodes().iter().map(|n| n.id.clone()).collect(), pos, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[(f64, f64)]) -> f64 {
        ((p[0].0 - p[1].0).powi(2) + (p[0].1 - p[1].1).powi(2)).sqrt()
    }

    #[test]
    fn isolated_pair_moves_apart() {
        let start = fruchterman_reingold(2, &[], &LayoutParams { iterations: 1, area: None, seed: 4 }).unwrap();
        let later = fruchterman_reingold(2, &[], &LayoutParams { iterations: 50, area: None, seed: 4 }).unwrap();
        assert!(dist(&later) >= dist(&start));
    }

    #[test]
    fn single_edge_settles_near_k() {
        let p = LayoutParams::default();
        let pos = fruchterman_reingold(2, &[(0, 1)], &p).unwrap();
        let k = (2.0f64 * 1e4 / 2.0).sqrt();
        assert!((dist(&pos) - k).abs() <= 0.1 * k, "distance {}", dist(&pos));
    }

    #[test]
    fn deterministic() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)];
        let p = LayoutParams { iterations: 100, area: None, seed: 9 };
        assert_eq!(fruchterman_reingold(5, &edges, &p).unwrap(), fruchterman_reingold(5, &edges, &p).unwrap());
    }

    #[test]
    fn errors() {
        assert!(matches!(fruchterman_reingold(0, &[], &LayoutParams::default()), Err(VizError::EmptyGraph)));
        let p = LayoutParams { iterations: 0, ..Default::default() };
        assert!(matches!(fruchterman_reingold(1, &[], &p), Err(VizError::InvalidIterations)));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let pos = fruchterman_reingold(3, &[(0, 1)], &LayoutParams { iterations: 20, area: None, seed: 1 }).unwrap();
        let l = LayoutResult::from_positions(vec!["a".into(), "b".into(), "c".into()], pos, LayoutParams::default());
        assert_eq!(LayoutResult::from_csv(&l.to_csv(), l.params).unwrap(), l);
    }
}
