//! Bundled instance files.

use std::path::PathBuf;

use multistate_ising::generators::{generate, lookup};
use multistate_ising::io::{read_graph, read_tsp};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn bundled_col_files_match_registry_and_generators() {
    let manifest = std::fs::read_to_string(data("manifest.txt")).unwrap();
    let mut seen = 0;
    for line in manifest.lines() {
        let (file, q) = line.split_once(' ').unwrap();
        let name = file.trim_end_matches(".col");
        let spec = lookup(name).unwrap();
        let g = read_graph(&data(file)).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (spec.nodes, spec.edges), "{name}");
        assert_eq!(q.parse::<usize>().unwrap(), spec.colors);
        assert_eq!(g, generate(name).unwrap());
        seen += 1;
    }
    assert_eq!(seen, 13);
}

#[test]
fn bundled_burma14() {
    let t = read_tsp(&data("burma14.tsp")).unwrap();
    assert_eq!(t.num_cities(), 14);
    assert_eq!(t.raw_distance(0, 1), 153.0);
    assert_eq!(t.max_weight(), 1.0);
    assert_eq!(t.scale(), 1261.0);
}
