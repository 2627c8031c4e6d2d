//! Grid search over the one-hot penalty factors A and B on queen6_6, and
//! over the TSP weight factor on an 8-city instance.
//!
//!     cargo run --release --example grid_search

use multistate_ising::bench::grid::{grid_search_coloring, grid_search_tsp_wt, GridBudget, DEFAULT_GRID};
use multistate_ising::bench::solve::{Method, MethodParams};
use multistate_ising::generators::generated_instance;
use multistate_ising::io::{parse_tsplib, BURMA14_TSP};
use multistate_ising::oracles::held_karp;

fn main() -> multistate_ising::Result<()> {
    let inst = generated_instance("queen6_6")?;
    let budget = GridBudget { runs: 4, sweeps: 1000, seed: 3 };
    let r = grid_search_coloring(&inst, Method::OnehotGibbs, &DEFAULT_GRID, &DEFAULT_GRID, &MethodParams::default(), &budget)?;
    print!("{}", r.surface_csv()?);
    println!("best: A = {:?}, B = {:?}, mean error {:.4}", r.best.a, r.best.b, r.best.mean_error);

    let tsp = parse_tsplib(BURMA14_TSP)?.sub_instance(8)?;
    let opt = held_karp(&tsp)?.optimum;
    let budget = GridBudget { runs: 10, sweeps: 4000, seed: 3 };
    let r = grid_search_tsp_wt(&tsp, opt, &DEFAULT_GRID, &budget)?;
    for p in &r.surface {
        println!("wt = {:<5} mean gap {:.4}", p.wt.unwrap(), p.mean_error);
    }
    Ok(())
}
