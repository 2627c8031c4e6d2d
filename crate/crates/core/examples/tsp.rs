//! Vectorized and one-hot TSP mappings on burma14 sub-instances, scored by
//! optimality gap against Held-Karp.
//!
//!     cargo run --release --example tsp

use multistate_ising::bench::metrics::optimality_gap;
use multistate_ising::bench::solve::{run_tsp, TspMethod};
use multistate_ising::gibbs::mix_seed;
use multistate_ising::io::{parse_tsplib, BURMA14_TSP};
use multistate_ising::oracles::held_karp;

fn best_gap(inst: &multistate_ising::TspInstance, method: TspMethod, opt: f64, runs: u64) -> f64 {
    (0..runs)
        .map(|r| run_tsp(inst, method, 4000, mix_seed(5, r)).unwrap().cost)
        .fold(f64::INFINITY, f64::min)
        / opt
        - 1.0
}

fn main() -> multistate_ising::Result<()> {
    let full = parse_tsplib(BURMA14_TSP)?;
    println!("{:>3} {:>10} {:>12} {:>12}", "N", "optimum", "vectorized", "one-hot");
    for n in [4, 6, 8, 10, 14] {
        let inst = full.sub_instance(n)?;
        let opt = held_karp(&inst)?.optimum;
        let v = best_gap(&inst, TspMethod::vectorized(0.25), opt, 20);
        let o = best_gap(&inst, TspMethod::onehot(1.0, 1.0), opt, 20);
        println!("{n:>3} {:>10.0} {v:>12.4} {o:>12.4}", opt * inst.scale());
    }
    let r = run_tsp(&full, TspMethod::vectorized(0.25), 4000, 1)?;
    println!("one vectorized run on burma14: tour {:?}, gap {:.4}", r.tour, optimality_gap(r.cost, held_karp(&full)?.optimum)?);
    Ok(())
}
