//! Physical p-bit counts of the one-hot and vectorized mappings on the
//! coloring benchmarks.
//!
//!     cargo run --example node_counts

use multistate_ising::encoding::physical_node_count;
use multistate_ising::generators::{all_coloring_benchmarks, CITATION_BENCHMARKS};
use multistate_ising::{ColoringInstance, EncodingKind, Graph};

fn main() {
    println!("{:<12} {:>6} {:>3} {:>8} {:>10} {:>6}", "instance", "nodes", "q", "one-hot", "vectorized", "ratio");
    for b in all_coloring_benchmarks().into_iter().chain(CITATION_BENCHMARKS) {
        // Only the node count and q matter here, so an edgeless stand-in will do.
        let inst = ColoringInstance::new(Graph::new(b.nodes, []).unwrap(), b.colors, b.name).unwrap();
        let oh = physical_node_count(&inst, EncodingKind::OneHot);
        let vec = physical_node_count(&inst, EncodingKind::BinaryVector);
        println!(
            "{:<12} {:>6} {:>3} {:>8} {:>10} {:>6.3}",
            b.name,
            b.nodes,
            b.colors,
            oh,
            vec,
            oh as f64 / vec as f64
        );
    }
}
