//! Readers and writers: DIMACS, edge lists, TSPLIB and result files.
//!
//!     cargo run --example parsers

use multistate_ising::io::{
    parse_dimacs_col, parse_edge_list, parse_tsplib, results_from_csv, results_to_csv, EdgeListOptions,
    ResultRecord, BURMA14_TSP,
};

fn main() -> multistate_ising::Result<()> {
    let col = "c toy\np edge 4 5\ne 1 2\ne 2 3\ne 3 4\ne 4 1\ne 2 1\n";
    let g = parse_dimacs_col(col)?;
    println!("DIMACS: {} nodes, {} distinct edges", g.num_nodes(), g.num_edges());

    let list = "# citation-style labels\npaperA paperB\npaperB paperC\npaperC paperC\n";
    let g = parse_edge_list(list, EdgeListOptions::default())?;
    println!("edge list: {} nodes, {} edges (self-loop dropped)", g.num_nodes(), g.num_edges());

    let burma = parse_tsplib(BURMA14_TSP)?;
    println!(
        "TSPLIB {}: {} cities, d(0,1) = {}, normalised {:.4}",
        burma.name,
        burma.num_cities(),
        burma.raw_distance(0, 1),
        burma.weight(0, 1)
    );

    match parse_dimacs_col("p edge 3 1\ne 1 9\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let rec = ResultRecord {
        instance: "toy".into(),
        method: "vectorized-gibbs".into(),
        run_id: 0,
        seed: 1,
        sweeps: 10,
        best_energy: 0.0,
        wrong_edges: 0,
        error_rate: 0.0,
        wall_time: 0.001,
        gap: None,
    };
    let csv = results_to_csv(std::slice::from_ref(&rec))?;
    print!("{csv}");
    assert_eq!(results_from_csv(&csv)?, vec![rec]);
    Ok(())
}
