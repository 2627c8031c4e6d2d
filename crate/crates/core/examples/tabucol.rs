//! TabuCol baseline on the queen graphs.
//!
//!     cargo run --release --example tabucol

use multistate_ising::bench::tabucol::tabucol;
use multistate_ising::generators::generated_instance;

fn main() -> multistate_ising::Result<()> {
    for name in ["queen5_5", "queen6_6", "queen7_7", "queen8_8", "queen13_13"] {
        let inst = generated_instance(name)?;
        let best = (0..5)
            .map(|seed| tabucol(&inst, 20_000, seed))
            .collect::<multistate_ising::Result<Vec<_>>>()?
            .into_iter()
            .min_by_key(|r| r.wrong_edges)
            .unwrap();
        println!("{name:<11} q = {:>2}: {} wrong edges after {} iterations", inst.q, best.wrong_edges, best.iterations);
    }
    Ok(())
}
