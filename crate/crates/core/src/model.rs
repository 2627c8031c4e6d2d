//! The interface samplers and oracles use to talk to a Hamiltonian.

use crate::encoding::BitState;

/// A binary energy model with incremental single-bit updates.
///
/// `Scratch` is model-owned per-chain bookkeeping (for example decoded node
/// values) that lets [`EnergyModel::delta`] run in time proportional to the
/// number of interactions touching a bit. Callers must route every bit
/// change through [`EnergyModel::set_bit`] so the scratch stays in sync.
pub trait EnergyModel: Sync {
    type Scratch: Clone + Send + Sync;

    fn num_bits(&self) -> usize;

    /// Full energy. `state.len()` must equal `num_bits()`.
    fn eval(&self, state: &BitState) -> f64;

    fn init_scratch(&self, state: &BitState) -> Self::Scratch;

    /// `H(bit = 1) - H(bit = 0)` with every other bit held fixed.
    fn delta(&self, state: &BitState, scratch: &Self::Scratch, bit: usize) -> f64;

    fn set_bit(&self, state: &mut BitState, scratch: &mut Self::Scratch, bit: usize, value: bool);

    /// True when every coefficient is an integer, so incremental energy
    /// bookkeeping is exact.
    fn has_integer_weights(&self) -> bool {
        false
    }
}

/// Full-recompute reference for `H(bit = 1) - H(bit = 0)`.
pub fn delta_by_recompute<M: EnergyModel + ?Sized>(model: &M, state: &BitState, bit: usize) -> f64 {
    let mut s = state.clone();
    s.set(bit, true);
    let h1 = model.eval(&s);
    s.set(bit, false);
    let h0 = model.eval(&s);
    h1 - h0
}
