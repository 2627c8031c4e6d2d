//! Exact reference solvers: branch-and-bound coloring, Held-Karp TSP and
//! exhaustive enumeration of a small binary model.
//!
//!     cargo run --release --example oracles

use multistate_ising::generators::generated_instance;
use multistate_ising::io::{parse_tsplib, BURMA14_TSP};
use multistate_ising::onehot::QuboBuilder;
use multistate_ising::oracles::{enumerate_min_energy, exact_min_conflicts, held_karp};
use multistate_ising::ColoringInstance;

fn main() -> multistate_ising::Result<()> {
    let m3 = generated_instance("myciel3")?;
    for q in [3, 4] {
        let inst = ColoringInstance::new(m3.graph.clone(), q, "myciel3")?;
        let r = exact_min_conflicts(&inst)?;
        println!("myciel3, q = {q}: minimum conflicts {} ({} search nodes)", r.optimum, r.nodes_explored);
    }

    let burma = parse_tsplib(BURMA14_TSP)?;
    let r = held_karp(&burma)?;
    println!("burma14: optimum {:.0} ({:.6} normalised), tour {:?}", r.optimum * burma.scale(), r.optimum, r.witness);

    let mut b = QuboBuilder::new(12);
    for i in 0..12 {
        b.add_term(i, (i + 1) % 12, 1.0).add_linear(i, -0.6);
    }
    let r = enumerate_min_energy(&b.build())?;
    println!("12-bit ring: ground energy {} over {} states", r.optimum, r.nodes_explored);
    Ok(())
}
