//! Bit-exact software model of a fixed-point p-bit datapath.
//!
//! Per emulated clock cycle one physical node is updated: its pair energies
//! are summed into a signed 8-bit `dH` (saturating), `dH` indexes a 256-entry
//! sigmoid table of 16-bit probabilities, and the node is set iff the table
//! entry is strictly greater than the next output of that node's 16-bit LFSR.
//! Temperature lives only in the table.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::encoding::{BitState, EncodingLayout};
use crate::error::{Error, Result};
use crate::gibbs::{mix_seed, stream_rng, SampleTrace};
use crate::model::EnergyModel;
use crate::vectorized::{PairOperatorModel, PairTerm, TruthTableOperator};

pub const CLOCK_HZ: f64 = 90.0e6;
pub const LUT_ENTRIES: usize = 256;
/// Maximal-length 16-bit tap set.
pub const DEFAULT_TAPS: [u8; 4] = [16, 15, 13, 4];
const FALLBACK_SEED: u16 = 0xACE1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointConfig {
    /// Width of the saturating `dH` accumulator.
    pub acc_bits: u32,
    pub lut_out_bits: u32,
    pub lfsr_taps: Vec<u8>,
    /// Seed from which every per-node LFSR seed is derived.
    pub seed: u64,
    /// Multiplier applied to real pair energies before rounding to integers.
    pub weight_scale: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            acc_bits: 8,
            lut_out_bits: 16,
            lfsr_taps: DEFAULT_TAPS.to_vec(),
            seed: 1,
            weight_scale: 1.0,
        }
    }
}

impl FixedPointConfig {
    pub fn with_seed(seed: u64) -> Self {
        FixedPointConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.acc_bits != 8 || self.lut_out_bits != 16 {
            return Err(Error::InvalidParameter(
                "only an 8-bit accumulator with 16-bit table outputs is modelled".into(),
            ));
        }
        if self.lfsr_taps.is_empty() || self.lfsr_taps.iter().any(|&t| t == 0 || t > 16) {
            return Err(Error::InvalidParameter(format!(
                "LFSR taps must lie in 1..=16, got {:?}",
                self.lfsr_taps
            )));
        }
        if !(self.weight_scale > 0.0 && self.weight_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weight_scale must be positive, got {}",
                self.weight_scale
            )));
        }
        Ok(())
    }

    /// Nonzero LFSR seed of physical node `node`.
    pub fn node_seed(&self, node: usize) -> u16 {
        match mix_seed(self.seed, node as u64) as u16 {
            0 => FALLBACK_SEED,
            s => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HwLimits {
    pub max_graph_nodes: usize,
    pub max_colors: usize,
    pub max_physical_nodes: usize,
}

impl Default for HwLimits {
    fn default() -> Self {
        HwLimits {
            max_graph_nodes: 256,
            max_colors: 16,
            max_physical_nodes: 1024,
        }
    }
}

impl HwLimits {
    pub fn check(&self, layout: &EncodingLayout) -> Result<()> {
        if layout.num_nodes > self.max_graph_nodes {
            return Err(Error::Capacity(format!(
                "{} nodes exceed the {}-node limit",
                layout.num_nodes, self.max_graph_nodes
            )));
        }
        if layout.values > self.max_colors {
            return Err(Error::Capacity(format!(
                "{} values per node exceed the limit of {}",
                layout.values, self.max_colors
            )));
        }
        if layout.total_bits > self.max_physical_nodes {
            return Err(Error::Capacity(format!(
                "{} physical nodes exceed the limit of {}",
                layout.total_bits, self.max_physical_nodes
            )));
        }
        Ok(())
    }
}

/// Table index of a signed 8-bit input (its two's-complement byte).
#[inline]
pub fn lut_index(d: i8) -> usize {
    d as u8 as usize
}

/// `round(65535 / (1 + exp(d / t)))` for every signed 8-bit `d`, where `t`
/// is the temperature in quantized energy units.
pub fn build_sigmoid_lut(temperature: f64, config: &FixedPointConfig) -> Result<[u16; LUT_ENTRIES]> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    config.validate()?;
    let t = temperature * config.weight_scale;
    let mut lut = [0u16; LUT_ENTRIES];
    for d in i8::MIN..=i8::MAX {
        let p = 1.0 / (1.0 + (d as f64 / t).exp());
        lut[lut_index(d)] = (p * 65535.0).round() as u16;
    }
    Ok(lut)
}

/// 16-bit Fibonacci LFSR. The new bit enters at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lfsr16 {
    state: u16,
    mask: u16,
}

impl Lfsr16 {
    pub fn new(seed: u16, taps: &[u8]) -> Result<Self> {
        if seed == 0 {
            return Err(Error::InvalidParameter("LFSR seed must be nonzero".into()));
        }
        let mut mask = 0u16;
        for &t in taps {
            if t == 0 || t > 16 {
                return Err(Error::InvalidParameter(format!("bad LFSR tap {t}")));
            }
            mask |= 1 << (16 - t);
        }
        Ok(Lfsr16 { state: seed, mask })
    }

    pub fn state(&self) -> u16 {
        self.state
    }

    #[inline]
    pub fn next_value(&mut self) -> u16 {
        self.state = lfsr_step(self.state, self.mask);
        self.state
    }
}

#[inline]
fn lfsr_step(state: u16, mask: u16) -> u16 {
    let fb = ((state & mask).count_ones() & 1) as u16;
    (state >> 1) | (fb << 15)
}

/// One shift of a Fibonacci LFSR with the given tap positions.
pub fn lfsr_next(state: u16, taps: &[u8]) -> u16 {
    let mask = taps.iter().fold(0u16, |m, &t| m | (1 << (16 - t)));
    lfsr_step(state, mask)
}

/// Steps until the seed reappears. Returns `None` if it never does within
/// `2^16` steps.
pub fn lfsr_period(seed: u16, taps: &[u8]) -> Option<u32> {
    let mut s = seed;
    for k in 1..=(1u32 << 16) {
        s = lfsr_next(s, taps);
        if s == seed {
            return Some(k);
        }
    }
    None
}

#[inline]
pub fn saturate_i8(x: i64) -> i8 {
    x.clamp(i8::MIN as i64, i8::MAX as i64) as i8
}

/// Integer pair energies ready for the datapath.
#[derive(Debug, Clone)]
pub struct QuantizedModel<'m> {
    model: &'m PairOperatorModel,
    /// Four integer energies per pair, indexed like the operator's code slots.
    energies: Vec<[i64; 4]>,
    slots: Vec<u8>,
    /// Pairs with an energy above the accumulator range.
    pub oversized_pairs: usize,
}

impl<'m> QuantizedModel<'m> {
    pub fn new(model: &'m PairOperatorModel, config: &FixedPointConfig) -> Result<Self> {
        config.validate()?;
        let energies: Vec<[i64; 4]> = model
            .pairs()
            .iter()
            .map(|p| p.energies.map(|e| (e * config.weight_scale).round() as i64))
            .collect();
        let oversized_pairs = energies
            .iter()
            .filter(|e| e.iter().any(|&x| x.abs() > i8::MAX as i64))
            .count();
        if oversized_pairs > 0 {
            log::warn!(
                "{oversized_pairs} pair energies exceed the 8-bit range after scaling by {}; dH will saturate",
                config.weight_scale
            );
        }
        let op = model.operator();
        let n = op.bits_per_node();
        let slots = (0..1usize << (2 * n))
            .map(|idx| {
                let code = op.code(idx >> n, idx & ((1 << n) - 1));
                crate::vectorized::CODES.iter().position(|&c| c == code).unwrap_or(0) as u8
            })
            .collect();
        Ok(QuantizedModel {
            model,
            energies,
            slots,
            oversized_pairs,
        })
    }

    pub fn model(&self) -> &PairOperatorModel {
        self.model
    }

    #[inline]
    fn pair_energy(&self, p: usize, index: usize) -> i64 {
        self.energies[p][self.slots[index] as usize]
    }

    /// Integer energy of a state.
    pub fn energy(&self, values: &[u32]) -> i64 {
        let n = self.model.layout().bits_per_node;
        self.model
            .pairs()
            .iter()
            .enumerate()
            .map(|(p, pair)| self.pair_energy(p, ((values[pair.i] as usize) << n) | values[pair.j] as usize))
            .sum()
    }

    /// Full-width integer `dH` for physical node `bit`.
    pub fn wide_delta(&self, values: &[u32], bit: usize) -> i64 {
        let (node, k) = self.model.layout().split(bit);
        let n = self.model.layout().bits_per_node;
        let v = values[node] as usize;
        let (v1, v0) = (v | (1 << k), v & !(1 << k));
        self.model
            .incident(node)
            .map(|(p, other, first)| {
                let w = values[other] as usize;
                let (i1, i0) = if first {
                    ((v1 << n) | w, (v0 << n) | w)
                } else {
                    ((w << n) | v1, (w << n) | v0)
                };
                self.pair_energy(p, i1) - self.pair_energy(p, i0)
            })
            .sum()
    }

    /// `dH` as seen by the 8-bit accumulator.
    #[inline]
    pub fn delta_i8(&self, values: &[u32], bit: usize) -> i8 {
        saturate_i8(self.wide_delta(values, bit))
    }
}

/// One node update: returns the new value of `bit`, already written into
/// `state` and `values`.
pub fn hw_node_update(
    qmodel: &QuantizedModel,
    state: &mut BitState,
    values: &mut [u32],
    bit: usize,
    lut: &[u16; LUT_ENTRIES],
    lfsr: &mut Lfsr16,
) -> bool {
    let d = qmodel.delta_i8(values, bit);
    let on = lut[lut_index(d)] > lfsr.next_value();
    state.set(bit, on);
    let (node, k) = qmodel.model.layout().split(bit);
    if on {
        values[node] |= 1 << k;
    } else {
        values[node] &= !(1 << k);
    }
    on
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwSummary {
    pub total_bits: usize,
    pub sweeps: usize,
    pub cycles: u64,
    pub clock_hz: f64,
    /// `cycles / clock_hz`; a projection, not a measurement.
    pub projected_seconds: f64,
    pub best_energy: f64,
    pub saturated_updates: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HwRun {
    pub trace: SampleTrace,
    pub summary: HwSummary,
}

pub fn projected_seconds(cycles: u64) -> f64 {
    cycles as f64 / CLOCK_HZ
}

/// Runs `sweeps` ascending sweeps of the datapath at `temperature`.
pub fn run_hw(
    model: &PairOperatorModel,
    temperature: f64,
    sweeps: usize,
    config: &FixedPointConfig,
    limits: &HwLimits,
) -> Result<HwRun> {
    limits.check(model.layout())?;
    if sweeps == 0 {
        return Err(Error::InvalidParameter("need at least one sweep".into()));
    }
    let start = Instant::now();
    let lut = build_sigmoid_lut(temperature, config)?;
    let q = QuantizedModel::new(model, config)?;
    let total = model.num_bits();
    let mut lfsrs = (0..total)
        .map(|b| Lfsr16::new(config.node_seed(b), &config.lfsr_taps))
        .collect::<Result<Vec<_>>>()?;
    let mut state = BitState::random(total, &mut stream_rng(config.seed, 0));
    let mut values = model.node_values(&state);
    let mut energy = q.energy(&values);
    let mut best_energy = energy;
    let mut best_state = state.clone();
    let mut history = Vec::with_capacity(sweeps + 1);
    history.push((0, energy as f64));
    let mut saturated = 0u64;
    for sweep in 1..=sweeps {
        for bit in 0..total {
            let wide = q.wide_delta(&values, bit);
            if wide != saturate_i8(wide) as i64 {
                saturated += 1;
            }
            let old = state.get(bit);
            let new = hw_node_update(&q, &mut state, &mut values, bit, &lut, &mut lfsrs[bit]);
            match (old, new) {
                (false, true) => energy += wide,
                (true, false) => energy -= wide,
                _ => {}
            }
        }
        history.push((sweep, energy as f64 / config.weight_scale));
        if energy < best_energy {
            best_energy = energy;
            best_state.clone_from(&state);
        }
    }
    let cycles = (sweeps * total) as u64;
    let best_float = model.eval(&best_state);
    let trace = SampleTrace {
        best_energy: best_float,
        final_energy: model.eval(&state),
        best_state,
        final_state: state,
        energy_history: history,
        wall_time: start.elapsed().as_secs_f64(),
        bit_updates: cycles,
    };
    Ok(HwRun {
        summary: HwSummary {
            total_bits: total,
            sweeps,
            cycles,
            clock_hz: CLOCK_HZ,
            projected_seconds: projected_seconds(cycles),
            best_energy: best_float,
            saturated_updates: saturated,
        },
        trace,
    })
}

/// Rebuilds a model from an exported truth table plus its pair list.
pub fn model_from_truth_table(
    table_text: &str,
    layout: EncodingLayout,
    pairs: Vec<PairTerm>,
) -> Result<PairOperatorModel> {
    let op = TruthTableOperator::from_text(table_text)?;
    PairOperatorModel::new(layout, op, pairs)
}

pub fn summary_json(summary: &HwSummary) -> Result<String> {
    serde_json::to_string_pretty(summary).map_err(|e| Error::Serialization(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ColoringInstance, Graph};
    use crate::vectorized::{build_coloring_model, coloring_layout};

    #[test]
    fn lut_midpoint_and_saturation() {
        let lut = build_sigmoid_lut(0.5, &FixedPointConfig::default()).unwrap();
        assert_eq!(lut[lut_index(0)], 32768);
        assert_eq!(lut[lut_index(-128)], 65535);
        assert_eq!(lut[lut_index(127)], 0);
    }

    #[test]
    fn lut_is_monotone() {
        for t in [0.05, 0.2, 1.0, 40.0] {
            let lut = build_sigmoid_lut(t, &FixedPointConfig::default()).unwrap();
            for d in -128i16..127 {
                assert!(lut[lut_index(d as i8)] >= lut[lut_index((d + 1) as i8)]);
            }
        }
    }

    #[test]
    fn lfsr_full_period() {
        assert_eq!(lfsr_period(0xACE1, &DEFAULT_TAPS), Some(65535));
        assert_eq!(lfsr_period(1, &DEFAULT_TAPS), Some(65535));
    }

    #[test]
    fn lfsr_rejects_zero_seed() {
        assert!(Lfsr16::new(0, &DEFAULT_TAPS).is_err());
    }

    #[test]
    fn lfsr_matches_free_function() {
        let mut l = Lfsr16::new(0xACE1, &DEFAULT_TAPS).unwrap();
        let mut s = 0xACE1;
        for _ in 0..1000 {
            s = lfsr_next(s, &DEFAULT_TAPS);
            assert_eq!(l.next_value(), s);
            assert_ne!(s, 0);
        }
    }

    #[test]
    fn node_seeds_nonzero() {
        let c = FixedPointConfig::with_seed(42);
        assert!((0..5000).all(|n| c.node_seed(n) != 0));
    }

    #[test]
    fn saturation() {
        assert_eq!(saturate_i8(200), 127);
        assert_eq!(saturate_i8(-300), -128);
        assert_eq!(saturate_i8(-5), -5);
    }

    #[test]
    fn limits() {
        let l = HwLimits::default();
        assert!(l.check(&EncodingLayout::binary(96, 12)).is_ok());
        assert!(matches!(l.check(&EncodingLayout::binary(300, 4)), Err(Error::Capacity(_))));
        assert!(matches!(l.check(&EncodingLayout::binary(10, 17)), Err(Error::Capacity(_))));
    }

    #[test]
    fn projection_arithmetic() {
        assert!((projected_seconds(1_024_000) - 0.011_377_8).abs() < 1e-6);
    }

    #[test]
    fn truth_table_export_reloads() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let inst = ColoringInstance::new(g, 3, "p3").unwrap();
        let m = build_coloring_model(&inst).unwrap();
        let text = m.operator().to_text();
        let back = model_from_truth_table(&text, coloring_layout(&inst), m.pairs().to_vec()).unwrap();
        let r = run_hw(&back, 0.2, 50, &FixedPointConfig::default(), &HwLimits::default()).unwrap();
        assert_eq!(r.trace.best_energy, 0.0);
        assert_eq!(r.summary.cycles, 50 * 6);
        assert!(summary_json(&r.summary).unwrap().contains("\"projected_seconds\""));
    }

    #[test]
    fn run_is_deterministic() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let m = build_coloring_model(&ColoringInstance::new(g, 2, "c4").unwrap()).unwrap();
        let cfg = FixedPointConfig::with_seed(9);
        let a = run_hw(&m, 0.3, 40, &cfg, &HwLimits::default()).unwrap();
        let b = run_hw(&m, 0.3, 40, &cfg, &HwLimits::default()).unwrap();
        assert_eq!(a.trace.energy_history, b.trace.energy_history);
        assert_eq!(a.trace.final_state, b.trace.final_state);
    }
}
