//! Builds the vectorized coloring model for a small graph, prints its
//! truth table, exports and reloads it, and checks the incremental energy
//! difference against a full recompute.
//!
//!     cargo run --example truth_table

use multistate_ising::model::delta_by_recompute;
use multistate_ising::vectorized::{build_coloring_model, build_coloring_operator, TruthTableOperator, CODES};
use multistate_ising::{BitState, ColoringInstance, EnergyModel, Graph};
use rand::SeedableRng;

fn main() -> multistate_ising::Result<()> {
    let q = 3;
    let op = build_coloring_operator(q)?;
    println!("q = {q}, {} bits per node", op.bits_per_node());
    let side = 1 << op.bits_per_node();
    for a in 0..side {
        let row: Vec<String> = (0..side).map(|b| format!("{:>2}", op.code(a, b))).collect();
        println!("  a = {a:02b}: {}", row.join(" "));
    }
    println!("codes in slot order: {CODES:?}");

    let text = op.to_text();
    assert_eq!(TruthTableOperator::from_text(&text)?, op);
    println!("exported table reloads identically ({} lines)", text.lines().count());

    let triangle = ColoringInstance::new(Graph::new(3, [(0, 1), (1, 2), (0, 2)])?, q, "triangle")?;
    let model = build_coloring_model(&triangle)?;
    let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(3);
    let state = BitState::random(model.num_bits(), &mut rng);
    let values = model.node_values(&state);
    println!("random state {:?} -> node values {values:?}, H = {}", state.bits(), model.eval(&state));
    for bit in 0..model.num_bits() {
        let scratch = model.init_scratch(&state);
        let fast = model.delta(&state, &scratch, bit);
        assert_eq!(fast, delta_by_recompute(&model, &state, bit));
        println!("  bit {bit}: dH = {fast}");
    }
    Ok(())
}
