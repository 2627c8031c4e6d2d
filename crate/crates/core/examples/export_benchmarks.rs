//! Writes the generated Mycielski and queen benchmarks as DIMACS `.col`
//! files plus a bench manifest, then parses them back.
//!
//!     cargo run --example export_benchmarks [dir]

use std::path::PathBuf;

use multistate_ising::generators::{all_coloring_benchmarks, generate};
use multistate_ising::io::{read_graph, write_dimacs_col, write_text};

fn main() -> multistate_ising::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "benchmarks".into()));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let mut manifest = String::new();
    for b in all_coloring_benchmarks() {
        let Some(g) = generate(b.name) else {
            println!("{:<11} not constructible, skipped", b.name);
            continue;
        };
        let path = dir.join(format!("{}.col", b.name));
        let comment = format!("{}: {} colors", b.name, b.colors);
        write_text(&path, &write_dimacs_col(&g, &[&comment]))?;
        let back = read_graph(&path)?;
        assert_eq!(back, g);
        println!("{:<11} {:>4} nodes {:>5} edges -> {}", b.name, g.num_nodes(), g.num_edges(), path.display());
        manifest.push_str(&format!("{}.col {}\n", b.name, b.colors));
    }
    write_text(&dir.join("manifest.txt"), &manifest)?;
    Ok(())
}
