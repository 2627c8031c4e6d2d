//! Exact reference solvers: minimum-conflict coloring, Held–Karp TSP and
//! brute-force energy minimisation.

use serde::{Deserialize, Serialize};

use crate::encoding::BitState;
use crate::error::{Error, Result};
use crate::model::EnergyModel;
use crate::problem::{ColoringInstance, TspInstance};

/// Largest tour handled by [`held_karp`].
pub const MAX_HELD_KARP_CITIES: usize = 20;
/// Largest model handled by [`enumerate_min_energy`].
pub const MAX_ENUMERATION_BITS: usize = 24;
/// Branch and bound is attempted when `N <= 64` or `q^N <= 1e7`.
pub const MAX_BNB_NODES: usize = 64;
pub const MAX_BNB_ASSIGNMENTS: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    Coloring(Vec<usize>),
    Tour(Vec<usize>),
    State(BitState),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub optimum: f64,
    pub witness: Witness,
    pub nodes_explored: u64,
}

/// Number of monochromatic edges of a coloring.
pub fn count_conflicts(instance: &ColoringInstance, colors: &[usize]) -> usize {
    instance
        .graph
        .edges()
        .iter()
        .filter(|&&(u, v)| colors[u] == colors[v])
        .count()
}

struct Bnb<'a> {
    order: &'a [usize],
    /// For position `p` in `order`, the earlier-ordered neighbours.
    back: Vec<Vec<usize>>,
    q: usize,
    colors: Vec<usize>,
    best: usize,
    best_colors: Vec<usize>,
    explored: u64,
}

impl Bnb<'_> {
    fn search(&mut self, pos: usize, conflicts: usize, used: usize) {
        self.explored += 1;
        if conflicts >= self.best {
            return;
        }
        if pos == self.order.len() {
            self.best = conflicts;
            self.best_colors.clone_from(&self.colors);
            return;
        }
        let node = self.order[pos];
        // Colours beyond the first unused one are interchangeable.
        let limit = (used + 1).min(self.q);
        let mut costs: Vec<(usize, usize)> = (0..limit)
            .map(|c| {
                let add = self.back[pos].iter().filter(|&&w| self.colors[w] == c).count();
                (add, c)
            })
            .collect();
        costs.sort_unstable();
        for (add, c) in costs {
            if self.best == 0 {
                return;
            }
            self.colors[node] = c;
            self.search(pos + 1, conflicts + add, used.max(c + 1));
        }
        self.colors[node] = usize::MAX;
    }
}

/// Minimum number of monochromatic edges over all `q`-colorings.
pub fn exact_min_conflicts(instance: &ColoringInstance) -> Result<OracleResult> {
    let n = instance.num_nodes();
    let q = instance.q;
    let space = (q as f64).powi(n as i32);
    if n > MAX_BNB_NODES && space > MAX_BNB_ASSIGNMENTS {
        return Err(Error::TooLarge(format!(
            "{n} nodes with {q} colours is beyond the exact search guard"
        )));
    }
    if q >= n {
        let colors: Vec<usize> = (0..n).collect();
        return Ok(OracleResult {
            optimum: 0.0,
            witness: Witness::Coloring(colors),
            nodes_explored: 0,
        });
    }
    let deg = instance.graph.degrees();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
    let mut rank = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        rank[v] = p;
    }
    let adj = instance.graph.adjacency();
    let back = order
        .iter()
        .map(|&v| adj[v].iter().copied().filter(|&w| rank[w] < rank[v]).collect())
        .collect();
    // Greedy upper bound seeds the search.
    let mut greedy = vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        let mut cnt = vec![0usize; q];
        for &w in &adj[v] {
            if rank[w] < p {
                cnt[greedy[w]] += 1;
            }
        }
        greedy[v] = (0..q).min_by_key(|&c| cnt[c]).unwrap();
    }
    let greedy_conflicts = count_conflicts(instance, &greedy);
    let mut bnb = Bnb {
        order: &order,
        back,
        q,
        colors: vec![usize::MAX; n],
        best: greedy_conflicts,
        best_colors: greedy,
        explored: 0,
    };
    if greedy_conflicts > 0 {
        bnb.best = greedy_conflicts;
        bnb.search(0, 0, 0);
    }
    Ok(OracleResult {
        optimum: bnb.best as f64,
        witness: Witness::Coloring(bnb.best_colors),
        nodes_explored: bnb.explored,
    })
}

/// Exact shortest closed tour by dynamic programming over subsets.
/// Costs are in normalised units; the tour starts at city 0.
pub fn held_karp(instance: &TspInstance) -> Result<OracleResult> {
    let n = instance.num_cities();
    if n > MAX_HELD_KARP_CITIES {
        return Err(Error::TooLarge(format!(
            "{n} cities exceed the Held-Karp limit of {MAX_HELD_KARP_CITIES}"
        )));
    }
    if n == 1 {
        return Ok(OracleResult {
            optimum: 0.0,
            witness: Witness::Tour(vec![0]),
            nodes_explored: 1,
        });
    }
    // Subsets of cities 1..n, city k stored at bit k-1.
    let m = n - 1;
    let full = 1usize << m;
    let mut dp = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for k in 0..m {
        dp[(1 << k) * m + k] = instance.weight(0, k + 1);
    }
    let mut explored = 0u64;
    for set in 1..full {
        for last in 0..m {
            if set & (1 << last) == 0 {
                continue;
            }
            let cur = dp[set * m + last];
            if !cur.is_finite() {
                continue;
            }
            explored += 1;
            let rest = !set & (full - 1);
            let mut r = rest;
            while r != 0 {
                let next = r.trailing_zeros() as usize;
                r &= r - 1;
                let ns = set | (1 << next);
                let c = cur + instance.weight(last + 1, next + 1);
                let slot = ns * m + next;
                if c < dp[slot] {
                    dp[slot] = c;
                    parent[slot] = last as u8;
                }
            }
        }
    }
    let all = full - 1;
    let (mut last, _) = (0..m)
        .map(|k| (k, dp[all * m + k] + instance.weight(k + 1, 0)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let mut tour = Vec::with_capacity(n);
    let mut set = all;
    loop {
        tour.push(last + 1);
        let p = parent[set * m + last];
        set &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    tour.push(0);
    tour.reverse();
    Ok(OracleResult {
        optimum: instance.tour_cost(&tour),
        witness: Witness::Tour(tour),
        nodes_explored: explored,
    })
}

/// Minimum energy over all `2^bits` states, visited in Gray-code order.
pub fn enumerate_min_energy<M: EnergyModel>(model: &M) -> Result<OracleResult> {
    let bits = model.num_bits();
    if bits > MAX_ENUMERATION_BITS {
        return Err(Error::TooLarge(format!(
            "{bits} bits exceed the enumeration limit of {MAX_ENUMERATION_BITS}"
        )));
    }
    let mut state = BitState::zeros(bits);
    let mut scratch = model.init_scratch(&state);
    let mut energy = model.eval(&state);
    let mut best = energy;
    let mut best_state = state.clone();
    let integer = model.has_integer_weights();
    for k in 1u64..(1u64 << bits) {
        let bit = k.trailing_zeros() as usize;
        let dh = model.delta(&state, &scratch, bit);
        let on = !state.get(bit);
        model.set_bit(&mut state, &mut scratch, bit, on);
        energy += if on { dh } else { -dh };
        if energy < best - if integer { 0.0 } else { 1e-9 } {
            best = energy;
            best_state.clone_from(&state);
        }
    }
    // Report the witness's own energy so it re-evaluates exactly.
    let optimum = model.eval(&best_state);
    Ok(OracleResult {
        optimum,
        witness: Witness::State(best_state),
        nodes_explored: 1u64 << bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::onehot::build_onehot;
    use crate::problem::Graph;
    use crate::vectorized::build_coloring_model;

    fn triangle(q: usize) -> ColoringInstance {
        ColoringInstance::new(Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap(), q, "k3").unwrap()
    }

    #[test]
    fn triangle_conflicts() {
        assert_eq!(exact_min_conflicts(&triangle(2)).unwrap().optimum, 1.0);
        assert_eq!(exact_min_conflicts(&triangle(3)).unwrap().optimum, 0.0);
    }

    #[test]
    fn witness_reevaluates() {
        let g = Graph::new(
            7,
            [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6), (6, 3), (3, 5), (4, 6)],
        )
        .unwrap();
        let inst = ColoringInstance::new(g, 3, "w").unwrap();
        let r = exact_min_conflicts(&inst).unwrap();
        let Witness::Coloring(c) = &r.witness else { panic!() };
        assert_eq!(count_conflicts(&inst, c) as f64, r.optimum);
        assert_eq!(r.optimum, 1.0);
    }

    #[test]
    fn held_karp_small() {
        let d = vec![vec![0.0, 2.0, 3.0], vec![2.0, 0.0, 4.0], vec![3.0, 4.0, 0.0]];
        let t = TspInstance::from_distances("t3", &d).unwrap();
        let r = held_karp(&t).unwrap();
        assert!((r.optimum - (2.0 + 4.0 + 3.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn held_karp_ring() {
        // Ring 0-1-2-3-0 with unit edges, diagonals of length 3.
        let d = vec![
            vec![0.0, 1.0, 3.0, 1.0],
            vec![1.0, 0.0, 1.0, 3.0],
            vec![3.0, 1.0, 0.0, 1.0],
            vec![1.0, 3.0, 1.0, 0.0],
        ];
        let t = TspInstance::from_distances("ring", &d).unwrap();
        let r = held_karp(&t).unwrap();
        assert!((r.optimum - 4.0 / 3.0).abs() < 1e-12);
        let Witness::Tour(tour) = r.witness else { panic!() };
        assert!(tour == vec![0, 1, 2, 3] || tour == vec![0, 3, 2, 1]);
    }

    #[test]
    fn enumeration_examples() {
        let k3 = build_coloring_model(&triangle(2)).unwrap();
        assert_eq!(enumerate_min_energy(&k3).unwrap().optimum, 1.0);
        let edge = ColoringInstance::new(Graph::new(2, [(0, 1)]).unwrap(), 2, "e").unwrap();
        let oh = build_onehot(&edge, 1.0, 1.0).unwrap();
        let r = enumerate_min_energy(&oh).unwrap();
        assert_eq!(r.optimum, 0.0);
        let Witness::State(s) = r.witness else { panic!() };
        assert_eq!(s.count_ones(), 2);
    }

    #[test]
    fn refusals() {
        let big = ColoringInstance::new(Graph::new(100, [(0, 1)]).unwrap(), 3, "big").unwrap();
        assert!(matches!(exact_min_conflicts(&big), Err(Error::TooLarge(_))));
        let d: Vec<Vec<f64>> = (0..21)
            .map(|i| (0..21).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let t = TspInstance::from_distances("t21", &d).unwrap();
        assert!(matches!(held_karp(&t), Err(Error::TooLarge(_))));
        let g = Graph::new(13, [(0, 1)]).unwrap();
        let m = build_coloring_model(&ColoringInstance::new(g, 4, "x").unwrap()).unwrap();
        assert!(matches!(enumerate_min_energy(&m), Err(Error::TooLarge(_))));
    }
}
