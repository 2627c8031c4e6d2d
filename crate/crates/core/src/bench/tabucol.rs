//! TabuCol local search for minimum-conflict `q`-coloring.
//!
//! A move recolours one conflicted vertex. The reverse move stays tabu for
//! `floor(0.6 * conflicts) + uniform{0..9}` iterations, unless it would beat
//! the best conflict count seen so far.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::stream_rng;
use crate::problem::ColoringInstance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabucolResult {
    pub coloring: Vec<usize>,
    pub wrong_edges: usize,
    pub iterations: usize,
}

pub fn tabucol(instance: &ColoringInstance, max_iters: usize, seed: u64) -> Result<TabucolResult> {
    let q = instance.q;
    if q < 2 {
        return Err(Error::InvalidParameter(format!("need q >= 2, got {q}")));
    }
    let n = instance.num_nodes();
    let adj = instance.graph.adjacency();
    let mut rng = stream_rng(seed, 0);
    let mut color: Vec<usize> = (0..n).map(|_| rng.random_range(0..q)).collect();
    // gamma[v * q + c]: neighbours of v currently coloured c.
    let mut gamma = vec![0i64; n * q];
    for v in 0..n {
        for &w in &adj[v] {
            gamma[v * q + color[w]] += 1;
        }
    }
    let mut conflicts: i64 = (0..n).map(|v| gamma[v * q + color[v]]).sum::<i64>() / 2;
    let mut best = conflicts;
    let mut best_color = color.clone();
    let mut tabu = vec![0usize; n * q];
    let mut iter = 0;
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    while iter < max_iters && best > 0 {
        iter += 1;
        let mut best_delta = i64::MAX;
        candidates.clear();
        for v in 0..n {
            let cur = gamma[v * q + color[v]];
            if cur == 0 {
                continue;
            }
            for c in 0..q {
                if c == color[v] {
                    continue;
                }
                let delta = gamma[v * q + c] - cur;
                let allowed = tabu[v * q + c] <= iter || conflicts + delta < best;
                if !allowed {
                    continue;
                }
                if delta < best_delta {
                    best_delta = delta;
                    candidates.clear();
                }
                if delta == best_delta {
                    candidates.push((v, c));
                }
            }
        }
        if candidates.is_empty() {
            continue;
        }
        let (v, c) = candidates[rng.random_range(0..candidates.len())];
        let old = color[v];
        for &w in &adj[v] {
            gamma[w * q + old] -= 1;
            gamma[w * q + c] += 1;
        }
        color[v] = c;
        conflicts += best_delta;
        let tenure = (0.6 * conflicts as f64).floor() as usize + rng.random_range(0..10);
        tabu[v * q + old] = iter + tenure + 1;
        if conflicts < best {
            best = conflicts;
            best_color.clone_from(&color);
        }
    }
    Ok(TabucolResult {
        wrong_edges: best as usize,
        coloring: best_color,
        iterations: iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generated_instance, queen_graph};
    use crate::oracles::count_conflicts;

    #[test]
    fn colors_myciel5() {
        let inst = generated_instance("myciel5").unwrap();
        let r = tabucol(&inst, 1000, 1).unwrap();
        assert_eq!(r.wrong_edges, 0);
        assert_eq!(count_conflicts(&inst, &r.coloring), 0);
    }

    #[test]
    fn reported_count_matches_coloring() {
        let inst = ColoringInstance::new(queen_graph(6, 6), 5, "q6").unwrap();
        let r = tabucol(&inst, 300, 4).unwrap();
        assert!(r.wrong_edges > 0);
        assert_eq!(count_conflicts(&inst, &r.coloring), r.wrong_edges);
    }

    #[test]
    fn rainbow_reachable() {
        let inst = ColoringInstance::new(queen_graph(3, 3), 9, "q3").unwrap();
        assert_eq!(tabucol(&inst, 1000, 2).unwrap().wrong_edges, 0);
    }
}
