//! Constructive generators for the benchmark graph families and the
//! benchmark instance registry.

use crate::error::{Error, Result};
use crate::problem::{ColoringInstance, Graph};

/// Queen graph on an `rows x cols` board: two squares are adjacent when a
/// queen could move between them. Square `(r, c)` is node `r * cols + c`.
pub fn queen_graph(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..rows * cols {
        let (ra, ca) = (a / cols, a % cols);
        for b in a + 1..rows * cols {
            let (rb, cb) = (b / cols, b % cols);
            if ra == rb || ca == cb || ra.abs_diff(rb) == ca.abs_diff(cb) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(rows * cols, edges).expect("queen edges are valid")
}

/// One Mycielski step: `n` originals, `n` shadows, and a hub joined to every
/// shadow. A shadow copies its original's neighbourhood among the originals.
pub fn mycielskian(g: &Graph) -> Graph {
    let n = g.num_nodes();
    let mut edges = g.edges().to_vec();
    for &(u, v) in g.edges() {
        edges.push((u, n + v));
        edges.push((v, n + u));
    }
    for i in 0..n {
        edges.push((n + i, 2 * n));
    }
    Graph::new(2 * n + 1, edges).expect("mycielskian edges are valid")
}

/// `myciel<k>`: `k - 1` Mycielski steps starting from a single edge.
pub fn mycielski(k: usize) -> Result<Graph> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("myciel{k} is undefined")));
    }
    let mut g = Graph::new(2, [(0, 1)])?;
    for _ in 1..k {
        g = mycielskian(&g);
    }
    Ok(g)
}

/// A published coloring benchmark with its reference size and colour count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub colors: usize,
}

const fn spec(name: &'static str, nodes: usize, edges: usize, colors: usize) -> BenchmarkSpec {
    BenchmarkSpec {
        name,
        nodes,
        edges,
        colors,
    }
}

/// The DIMACS coloring set used throughout the benchmarks.
pub const COLOR_BENCHMARKS: [BenchmarkSpec; 15] = [
    spec("anna", 138, 493, 11),
    spec("david", 87, 406, 11),
    spec("huck", 74, 301, 11),
    spec("myciel3", 11, 20, 4),
    spec("myciel4", 23, 71, 5),
    spec("myciel5", 47, 236, 6),
    spec("myciel6", 95, 755, 7),
    spec("myciel7", 191, 2360, 8),
    spec("queen5_5", 25, 160, 5),
    spec("queen6_6", 36, 290, 7),
    spec("queen7_7", 49, 476, 7),
    spec("queen8_8", 64, 728, 9),
    spec("queen9_9", 81, 1056, 10),
    spec("queen8_12", 96, 1368, 12),
    spec("queen11_11", 121, 1980, 11),
];

/// Larger citation graphs.
pub const CITATION_BENCHMARKS: [BenchmarkSpec; 3] = [
    spec("cora", 2708, 5278, 5),
    spec("citeseer", 3279, 4552, 6),
    spec("pubmed", 19717, 44324, 8),
];

pub const QUEEN13: BenchmarkSpec = spec("queen13_13", 169, 3328, 13);

/// Every coloring benchmark, `queen13_13` included.
pub fn all_coloring_benchmarks() -> Vec<BenchmarkSpec> {
    let mut v = COLOR_BENCHMARKS.to_vec();
    v.push(QUEEN13);
    v
}

pub fn lookup(name: &str) -> Option<BenchmarkSpec> {
    all_coloring_benchmarks()
        .into_iter()
        .chain(CITATION_BENCHMARKS)
        .find(|b| b.name == name)
}

/// Builds `myciel<k>` and `queen<r>_<c>` graphs by construction; other
/// names return `None`.
pub fn generate(name: &str) -> Option<Graph> {
    if let Some(k) = name.strip_prefix("myciel") {
        return k.parse().ok().and_then(|k| mycielski(k).ok());
    }
    let (r, c) = name.strip_prefix("queen")?.split_once('_')?;
    Some(queen_graph(r.parse().ok()?, c.parse().ok()?))
}

/// A generated benchmark instance with its reference colour count.
pub fn generated_instance(name: &str) -> Result<ColoringInstance> {
    let spec = lookup(name).ok_or_else(|| Error::InvalidInstance(format!("unknown benchmark {name}")))?;
    let graph = generate(name)
        .ok_or_else(|| Error::InvalidInstance(format!("{name} cannot be generated, load it from a file")))?;
    ColoringInstance::new(graph, spec.colors, name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_counts_match_registry() {
        for spec in all_coloring_benchmarks() {
            if let Some(g) = generate(spec.name) {
                assert_eq!((g.num_nodes(), g.num_edges()), (spec.nodes, spec.edges), "{}", spec.name);
            }
        }
    }

    #[test]
    fn generators_cover_myciel_and_queen() {
        let names: Vec<_> = all_coloring_benchmarks()
            .into_iter()
            .filter(|s| generate(s.name).is_some())
            .map(|s| s.name)
            .collect();
        assert_eq!(names.len(), 13);
        assert!(generate("anna").is_none());
    }

    #[test]
    fn mycielskian_of_edge_is_c5() {
        let k2 = Graph::new(2, [(0, 1)]).unwrap();
        let c5 = mycielskian(&k2);
        assert_eq!(mycielski(2).unwrap(), c5);
        assert_eq!((c5.num_nodes(), c5.num_edges()), (5, 5));
        assert!(c5.degrees().iter().all(|&d| d == 2));
    }
}
