//! One-hot QUBO for graph coloring: builds the model, shows that a proper
//! coloring has zero energy, and round-trips the coefficient export.
//!
//!     cargo run --example onehot_qubo

use multistate_ising::generators::generated_instance;
use multistate_ising::onehot::{build_onehot, coloring_layout, QuboModel};
use multistate_ising::oracles::exact_min_conflicts;
use multistate_ising::oracles::Witness;
use multistate_ising::EnergyModel;

fn main() -> multistate_ising::Result<()> {
    let inst = generated_instance("myciel3")?;
    let model = build_onehot(&inst, 1.0, 1.0)?;
    let layout = coloring_layout(&inst);
    println!("{}: {} nodes x {} colors = {} bits", inst.name, inst.num_nodes(), inst.q, model.num_bits());

    let exact = exact_min_conflicts(&inst)?;
    let Witness::Coloring(colors) = exact.witness else { unreachable!() };
    let state = layout.encode_all(&colors)?;
    println!("proper coloring {colors:?} has H = {}", model.eval(&state));

    let mut broken = state.clone();
    broken.flip(0);
    println!("clearing one bit gives H = {} (constraint penalty)", model.eval(&broken));

    let text = model.to_coefficient_text();
    let back = QuboModel::from_coefficient_text(&text)?;
    assert_eq!(back.eval(&broken), model.eval(&broken));
    println!("coefficient export: {} lines", text.lines().count());
    Ok(())
}
