//! Parallel tempering on queen6_6: 100 replicas on a geometric ladder from
//! 0.01 to 40, swaps every 15 sweeps.
//!
//!     cargo run --release --example parallel_tempering

use multistate_ising::bench::metrics::coloring_error;
use multistate_ising::generators::generated_instance;
use multistate_ising::tempering::{run_pt, PtConfig};
use multistate_ising::vectorized::{build_coloring_model, coloring_layout};

fn main() -> multistate_ising::Result<()> {
    let inst = generated_instance("queen6_6")?;
    let model = build_coloring_model(&inst)?;
    let cfg = PtConfig::with_seed(11);
    let r = run_pt(&model, &cfg)?;
    let (wrong, _) = coloring_error(&r.trace.best_state, &inst, &coloring_layout(&inst))?;
    println!("{}: best H = {}, wrong edges = {wrong}", inst.name, r.trace.best_energy);
    println!("max energy drift found by audits: {}", r.max_drift);
    println!("{:>8} {:>10} {:>10}", "T", "chain best", "swap acc");
    for (k, t) in r.temperatures.iter().enumerate().step_by(10) {
        let acc = r
            .acceptance
            .get(k)
            .map(|&(a, n)| if n == 0 { 0.0 } else { a as f64 / n as f64 })
            .unwrap_or(f64::NAN);
        println!("{t:>8.4} {:>10} {acc:>10.3}", r.chain_best[k]);
    }
    Ok(())
}
