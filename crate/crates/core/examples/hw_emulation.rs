//! Fixed-point datapath emulation: sigmoid lookup table, 16-bit LFSR, and a
//! full run on queen5_5 with its projected time at 90 MHz.
//!
//!     cargo run --release --example hw_emulation

use multistate_ising::bench::metrics::coloring_error;
use multistate_ising::generators::generated_instance;
use multistate_ising::hw::{build_sigmoid_lut, lfsr_period, lut_index, run_hw, FixedPointConfig, HwLimits, DEFAULT_TAPS};
use multistate_ising::vectorized::{build_coloring_model, coloring_layout};

fn main() -> multistate_ising::Result<()> {
    let cfg = FixedPointConfig::default();
    let lut = build_sigmoid_lut(0.2, &cfg)?;
    for d in [-4i8, -1, 0, 1, 4] {
        println!("LUT[dH = {d:>2}] = {:>5}", lut[lut_index(d)]);
    }
    println!("LFSR period with taps {DEFAULT_TAPS:?}: {:?}", lfsr_period(1, &DEFAULT_TAPS));

    let inst = generated_instance("queen5_5")?;
    let model = build_coloring_model(&inst)?;
    let layout = coloring_layout(&inst);
    for seed in 1..=5 {
        let run = run_hw(&model, 0.2, 1000, &FixedPointConfig::with_seed(seed), &HwLimits::default())?;
        let (wrong, _) = coloring_error(&run.trace.best_state, &inst, &layout)?;
        println!(
            "seed {seed}: wrong edges {wrong}, {} cycles, projected {:.3} ms, emulated in {:.3} s",
            run.summary.cycles,
            run.summary.projected_seconds * 1e3,
            run.trace.wall_time
        );
    }
    Ok(())
}
