//! Problem descriptions: undirected graphs, coloring instances and
//! normalized TSP instances.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph with positive edge weights.
///
/// Edges are stored once, as `(u, v)` with `u < v`, in ingestion order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds an unweighted graph (every weight 1.0). Duplicate and reversed
    /// edges are dropped; self-loops are rejected.
    pub fn new<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::with_weights(num_nodes, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    /// Builds a weighted graph. The first occurrence of a duplicated edge wins.
    pub fn with_weights<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut seen = HashSet::new();
        let mut out_edges = Vec::new();
        let mut weights = Vec::new();
        for (u, v, w) in edges {
            for node in [u, v] {
                if node >= num_nodes {
                    return Err(Error::IndexOutOfRange {
                        what: "node",
                        index: node,
                        limit: num_nodes,
                    });
                }
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop on node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if seen.insert(key) {
                out_edges.push(key);
                weights.push(w);
            }
        }
        Ok(Graph {
            num_nodes,
            edges: out_edges,
            weights,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterates `(u, v, weight)` triples.
    pub fn weighted_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges
            .iter()
            .zip(&self.weights)
            .map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Applies a node relabeling `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.num_nodes {
            return Err(Error::LengthMismatch {
                expected: self.num_nodes,
                got: perm.len(),
            });
        }
        Graph::with_weights(
            self.num_nodes,
            self.weighted_edges().map(|(u, v, w)| (perm[u], perm[v], w)),
        )
    }
}

/// A graph to be colored with `q` colors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringInstance {
    pub graph: Graph,
    pub q: usize,
    pub name: String,
}

impl ColoringInstance {
    pub fn new(graph: Graph, q: usize, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if q < 2 {
            return Err(Error::InvalidInstance(format!("need at least 2 colors, got {q}")));
        }
        if name.is_empty() {
            return Err(Error::InvalidInstance("instance name is empty".into()));
        }
        Ok(ColoringInstance { graph, q, name })
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }
}

/// Symmetric TSP instance. Weights are normalized by the largest distance so
/// the maximum entry is exactly 1; the original scale is kept for reporting
/// tour costs in raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    pub name: String,
    num_cities: usize,
    raw: Vec<f64>,
    weights: Vec<f64>,
    scale: f64,
}

impl TspInstance {
    /// Normalizes a raw distance matrix. The matrix must be square, symmetric,
    /// non-negative and have a zero diagonal.
    pub fn from_distances(name: impl Into<String>, raw: &[Vec<f64>]) -> Result<Self> {
        let n = raw.len();
        if n == 0 {
            return Err(Error::InvalidInstance("empty distance matrix".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in raw.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        for i in 0..n {
            if flat[i * n + i] != 0.0 {
                return Err(Error::InvalidInstance(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let w = flat[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "invalid distance {w} at ({i}, {j})"
                    )));
                }
                if w != flat[j * n + i] {
                    return Err(Error::InvalidInstance(format!(
                        "distance matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let max = flat.iter().cloned().fold(0.0_f64, f64::max);
        let scale = if max > 0.0 { max } else { 1.0 };
        let weights = flat.iter().map(|w| w / scale).collect();
        Ok(TspInstance {
            name: name.into(),
            num_cities: n,
            raw: flat,
            weights,
            scale,
        })
    }

    pub fn num_cities(&self) -> usize {
        self.num_cities
    }

    /// Normalized weight between cities `i` and `j`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.num_cities + j]
    }

    pub fn raw_distance(&self, i: usize, j: usize) -> f64 {
        self.raw[i * self.num_cities + j]
    }

    /// Largest raw distance; normalized costs times this give raw costs.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().cloned().fold(0.0, f64::max)
    }

    /// Sum of column `j` of the normalized matrix.
    pub fn column_sum(&self, j: usize) -> f64 {
        (0..self.num_cities).map(|i| self.weight(i, j)).sum()
    }

    pub fn normalized_matrix(&self) -> Vec<Vec<f64>> {
        self.weights
            .chunks(self.num_cities)
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn raw_matrix(&self) -> Vec<Vec<f64>> {
        self.raw.chunks(self.num_cities).map(|r| r.to_vec()).collect()
    }

    /// Leading `k x k` block of the raw matrix, renormalized.
    pub fn sub_instance(&self, k: usize) -> Result<TspInstance> {
        if k == 0 || k > self.num_cities {
            return Err(Error::InvalidParameter(format!(
                "sub-instance size {k} not in 1..={}",
                self.num_cities
            )));
        }
        let block: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| self.raw_distance(i, j)).collect())
            .collect();
        TspInstance::from_distances(format!("{}_{k}", self.name), &block)
    }

    /// Closed-tour cost in normalized units.
    pub fn tour_cost(&self, tour: &[usize]) -> f64 {
        if tour.len() < 2 {
            return 0.0;
        }
        let mut cost = 0.0;
        for w in tour.windows(2) {
            cost += self.weight(w[0], w[1]);
        }
        cost + self.weight(tour[tour.len() - 1], tour[0])
    }
}
