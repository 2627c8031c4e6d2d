//! Single-flip Gibbs sampling at a constant temperature.
//!
//! Every bit is resampled from its conditional distribution
//! `P(s = 1) = 1 / (1 + exp(dH / T))`, with `dH = H(s = 1) - H(s = 0)`.
//! A bit is set when that probability is strictly greater than a fresh
//! uniform draw from `[0, 1)`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::encoding::BitState;
use crate::error::{Error, Result};
use crate::model::EnergyModel;

pub type ChainRng = Xoshiro256PlusPlus;

/// Independent stream for chain `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChainRng {
    Xoshiro256PlusPlus::seed_from_u64(seed ^ stream)
}

/// SplitMix64 finalizer; used to derive well-separated per-run seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `1 / (1 + exp(dH / T))`, saturating to 0 or 1 when the exponent overflows.
#[inline]
pub fn accept_probability(delta_h: f64, temperature: f64) -> f64 {
    1.0 / (1.0 + (delta_h / temperature).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ScanOrder {
    /// Ascending bit index.
    #[default]
    Sequential,
    /// A uniformly random bit per update, `num_bits` updates per sweep.
    Random,
}

/// When the best-so-far state is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BestTracking {
    #[default]
    Sweep,
    Bit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub temperature: f64,
    pub sweeps: usize,
    pub seed: u64,
    /// Record `(sweep, energy)` every this many sweeps; 0 disables history.
    pub record_energy_every: usize,
    pub scan: ScanOrder,
    pub best_tracking: BestTracking,
}

impl SamplerConfig {
    pub fn new(temperature: f64, sweeps: usize, seed: u64) -> Self {
        SamplerConfig {
            temperature,
            sweeps,
            seed,
            record_energy_every: 0,
            scan: ScanOrder::Sequential,
            best_tracking: BestTracking::Sweep,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidParameter("need at least one sweep".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTrace {
    pub best_energy: f64,
    pub best_state: BitState,
    pub final_energy: f64,
    pub final_state: BitState,
    pub energy_history: Vec<(usize, f64)>,
    /// Seconds of wall-clock time spent sampling.
    pub wall_time: f64,
    pub bit_updates: u64,
}

/// Start state for a chain.
#[derive(Debug, Clone)]
pub enum Initial {
    Random,
    State(BitState),
}

/// One Markov chain: a state, its model scratch, and a cached energy kept
/// current through incremental updates.
#[derive(Debug, Clone)]
pub struct Chain<'m, M: EnergyModel> {
    model: &'m M,
    state: BitState,
    scratch: M::Scratch,
    energy: f64,
    best_energy: f64,
    best_state: BitState,
    updates: u64,
}

impl<'m, M: EnergyModel> Chain<'m, M> {
    pub fn new(model: &'m M, state: BitState) -> Result<Self> {
        if state.len() != model.num_bits() {
            return Err(Error::LengthMismatch {
                expected: model.num_bits(),
                got: state.len(),
            });
        }
        let scratch = model.init_scratch(&state);
        let energy = model.eval(&state);
        Ok(Chain {
            model,
            best_state: state.clone(),
            best_energy: energy,
            state,
            scratch,
            energy,
            updates: 0,
        })
    }

    pub fn random<R: Rng + ?Sized>(model: &'m M, rng: &mut R) -> Self {
        let state = BitState::random(model.num_bits(), rng);
        Self::new(model, state).expect("random state has model length")
    }

    pub fn state(&self) -> &BitState {
        &self.state
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn best_energy(&self) -> f64 {
        self.best_energy
    }

    pub fn best_state(&self) -> &BitState {
        &self.best_state
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// Resamples one bit. Returns true when the bit changed.
    #[inline]
    pub fn update_bit<R: Rng + ?Sized>(&mut self, bit: usize, temperature: f64, rng: &mut R) -> bool {
        let dh = self.model.delta(&self.state, &self.scratch, bit);
        let u: f64 = rng.random();
        let new = accept_probability(dh, temperature) > u;
        self.updates += 1;
        let old = self.state.get(bit);
        if new == old {
            return false;
        }
        self.model.set_bit(&mut self.state, &mut self.scratch, bit, new);
        if new {
            self.energy += dh;
        } else {
            self.energy -= dh;
        }
        true
    }

    /// One sweep: `num_bits` single-bit updates.
    pub fn sweep<R: Rng + ?Sized>(
        &mut self,
        temperature: f64,
        order: ScanOrder,
        tracking: BestTracking,
        rng: &mut R,
    ) {
        let n = self.model.num_bits();
        for i in 0..n {
            let bit = match order {
                ScanOrder::Sequential => i,
                ScanOrder::Random => rng.random_range(0..n),
            };
            let changed = self.update_bit(bit, temperature, rng);
            if changed && tracking == BestTracking::Bit {
                self.observe_best();
            }
        }
        if tracking == BestTracking::Sweep {
            self.observe_best();
        }
    }

    pub fn observe_best(&mut self) {
        if self.energy < self.best_energy {
            self.best_energy = self.energy;
            self.best_state.clone_from(&self.state);
        }
    }

    /// Replaces the cached energy by a full recompute and returns the drift
    /// that had accumulated.
    pub fn resync_energy(&mut self) -> f64 {
        let exact = self.model.eval(&self.state);
        let drift = (exact - self.energy).abs();
        self.energy = exact;
        drift
    }

    /// Exchanges the configurations of two chains over the same model.
    pub fn swap_configuration(&mut self, other: &mut Chain<'m, M>) {
        std::mem::swap(&mut self.state, &mut other.state);
        std::mem::swap(&mut self.scratch, &mut other.scratch);
        std::mem::swap(&mut self.energy, &mut other.energy);
    }
}

/// One sequential sweep over every bit of `state`.
pub fn gibbs_sweep<M: EnergyModel, R: Rng + ?Sized>(
    model: &M,
    state: &mut BitState,
    temperature: f64,
    rng: &mut R,
) -> Result<()> {
    let mut chain = Chain::new(model, std::mem::replace(state, BitState::zeros(0)))?;
    chain.sweep(temperature, ScanOrder::Sequential, BestTracking::Sweep, rng);
    *state = chain.state;
    Ok(())
}

/// Runs `config.sweeps` sweeps from a random or given start state.
pub fn run_chain<M: EnergyModel>(model: &M, config: &SamplerConfig, initial: Initial) -> Result<SampleTrace> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, 0);
    let start = Instant::now();
    let mut chain = match initial {
        Initial::Random => Chain::random(model, &mut rng),
        Initial::State(s) => Chain::new(model, s)?,
    };
    let mut history = Vec::new();
    if config.record_energy_every > 0 {
        history.push((0, chain.energy()));
    }
    for sweep in 1..=config.sweeps {
        chain.sweep(config.temperature, config.scan, config.best_tracking, &mut rng);
        if config.record_energy_every > 0 && sweep % config.record_energy_every == 0 {
            history.push((sweep, chain.energy()));
        }
    }
    if !model.has_integer_weights() {
        chain.resync_energy();
        chain.observe_best();
    }
    let wall_time = start.elapsed().as_secs_f64();
    Ok(SampleTrace {
        best_energy: chain.best_energy,
        best_state: chain.best_state.clone(),
        final_energy: chain.energy,
        final_state: chain.state.clone(),
        energy_history: history,
        wall_time,
        bit_updates: chain.updates,
    })
}

/// Writes `(sweep, energy)` rows as CSV.
pub fn write_trace_csv<W: std::io::Write>(trace: &SampleTrace, out: W) -> Result<()> {
    write_history_csv(&trace.energy_history, out)
}

pub fn write_history_csv<W: std::io::Write>(history: &[(usize, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sweep", "energy"])
        .map_err(|e| Error::Serialization(e.to_string()))?;
    for (sweep, e) in history {
        w.write_record([sweep.to_string(), e.to_string()])
            .map_err(|e| Error::Serialization(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(())
}
