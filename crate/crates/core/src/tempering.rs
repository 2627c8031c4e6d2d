//! Replica-exchange (parallel tempering) over Gibbs chains.
//!
//! `M` chains sit at fixed temperatures on a geometric ladder. Between swap
//! rounds every chain performs `swap_interval` sweeps on its own RNG stream.
//! Neighbouring chains then try to exchange configurations with probability
//! `min(1, exp[(1/Ta - 1/Tb)(Ha - Hb)])`. Rounds alternate between pairs
//! `(0,1),(2,3),..` and `(1,2),(3,4),..`, starting with the former.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::BitState;
use crate::error::{Error, Result};
use crate::gibbs::{stream_rng, BestTracking, Chain, ChainRng, SampleTrace, ScanOrder};
use crate::model::EnergyModel;

/// Stream id reserved for swap decisions.
const SWAP_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtConfig {
    pub num_chains: usize,
    pub t_low: f64,
    pub t_high: f64,
    pub swap_interval: usize,
    pub total_sweeps: usize,
    pub seed: u64,
    /// Keep a per-round swap log.
    pub record_log: bool,
}

impl Default for PtConfig {
    fn default() -> Self {
        PtConfig {
            num_chains: 100,
            t_low: 0.01,
            t_high: 40.0,
            swap_interval: 15,
            total_sweeps: 1000,
            seed: 0,
            record_log: false,
        }
    }
}

impl PtConfig {
    pub fn with_seed(seed: u64) -> Self {
        PtConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_chains == 0 {
            return Err(Error::InvalidParameter("need at least one chain".into()));
        }
        check_bounds(self.t_low, self.t_high)?;
        if self.swap_interval == 0 {
            return Err(Error::InvalidParameter("swap interval must be at least 1".into()));
        }
        if self.total_sweeps == 0 {
            return Err(Error::InvalidParameter("need at least one sweep".into()));
        }
        Ok(())
    }
}

fn check_bounds(t_low: f64, t_high: f64) -> Result<()> {
    if !(t_low > 0.0 && t_low < t_high && t_high.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "temperature bounds must satisfy 0 < t_low < t_high, got ({t_low}, {t_high})"
        )));
    }
    Ok(())
}

/// `T_m = t_low * (t_high / t_low)^(m / (M - 1))` for `m = 0..M`. A single
/// chain sits at `t_low`.
pub fn temperature_ladder(m: usize, t_low: f64, t_high: f64) -> Result<Vec<f64>> {
    check_bounds(t_low, t_high)?;
    match m {
        0 => Err(Error::InvalidParameter("need at least one chain".into())),
        1 => Ok(vec![t_low]),
        _ => {
            let ratio = t_high / t_low;
            let mut ladder: Vec<f64> = (0..m)
                .map(|i| t_low * ratio.powf(i as f64 / (m - 1) as f64))
                .collect();
            ladder[m - 1] = t_high;
            Ok(ladder)
        }
    }
}

/// `min(1, exp[(1/Ta - 1/Tb)(Ha - Hb)])`.
pub fn swap_probability(t_a: f64, energy_a: f64, t_b: f64, energy_b: f64) -> f64 {
    let x = (1.0 / t_a - 1.0 / t_b) * (energy_a - energy_b);
    if x >= 0.0 {
        1.0
    } else {
        x.exp()
    }
}

/// Metropolis swap test. Always accepts when the probability is 1.
pub fn swap_attempt<R: Rng + ?Sized>(
    t_a: f64,
    energy_a: f64,
    t_b: f64,
    energy_b: f64,
    rng: &mut R,
) -> bool {
    let p = swap_probability(t_a, energy_a, t_b, energy_b);
    p >= 1.0 || rng.random::<f64>() < p
}

/// One row of the per-round log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapLogRow {
    pub round: usize,
    pub chain: usize,
    pub temperature: f64,
    pub energy: f64,
    /// Whether this chain took part in an accepted swap this round.
    pub swapped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: usize,
    pub attempted: usize,
    pub accepted: usize,
    /// Largest gap between a cached and a recomputed energy.
    pub max_drift: f64,
    pub best_energy: f64,
}

/// Stepwise engine; [`run_pt`] drives it to completion.
pub struct ParallelTempering<'m, M: EnergyModel> {
    temperatures: Vec<f64>,
    chains: Vec<Chain<'m, M>>,
    rngs: Vec<ChainRng>,
    swap_rng: ChainRng,
    round: usize,
    swap_interval: usize,
    accepted: Vec<u64>,
    attempted: Vec<u64>,
    log: Option<Vec<SwapLogRow>>,
}

impl<'m, M: EnergyModel> ParallelTempering<'m, M> {
    pub fn new(model: &'m M, config: &PtConfig) -> Result<Self> {
        config.validate()?;
        let temperatures = temperature_ladder(config.num_chains, config.t_low, config.t_high)?;
        let mut rngs: Vec<ChainRng> = (0..config.num_chains)
            .map(|m| stream_rng(config.seed, m as u64))
            .collect();
        let chains = rngs.iter_mut().map(|rng| Chain::random(model, rng)).collect();
        let pairs = config.num_chains.saturating_sub(1);
        Ok(ParallelTempering {
            temperatures,
            chains,
            rngs,
            swap_rng: stream_rng(config.seed, SWAP_STREAM),
            round: 0,
            swap_interval: config.swap_interval,
            accepted: vec![0; pairs],
            attempted: vec![0; pairs],
            log: config.record_log.then(Vec::new),
        })
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temperatures
    }

    pub fn energies(&self) -> Vec<f64> {
        self.chains.iter().map(|c| c.energy()).collect()
    }

    pub fn states(&self) -> Vec<&BitState> {
        self.chains.iter().map(|c| c.state()).collect()
    }

    pub fn rounds_done(&self) -> usize {
        self.round
    }

    /// Accepted / attempted swaps for each neighbouring pair `(m, m+1)`.
    pub fn acceptance(&self) -> Vec<(u64, u64)> {
        self.accepted.iter().copied().zip(self.attempted.iter().copied()).collect()
    }

    pub fn best(&self) -> (f64, &BitState) {
        let c = self
            .chains
            .iter()
            .min_by(|a, b| a.best_energy().total_cmp(&b.best_energy()))
            .expect("at least one chain");
        (c.best_energy(), c.best_state())
    }

    /// Advances every chain by `sweeps` sweeps.
    pub fn advance(&mut self, sweeps: usize) {
        let temps = &self.temperatures;
        self.chains
            .par_iter_mut()
            .zip(self.rngs.par_iter_mut())
            .enumerate()
            .for_each(|(m, (chain, rng))| {
                for _ in 0..sweeps {
                    chain.sweep(temps[m], ScanOrder::Sequential, BestTracking::Sweep, rng);
                }
            });
    }

    /// Recomputes every cached energy; returns the largest drift found.
    pub fn audit(&mut self) -> f64 {
        let drift = self
            .chains
            .iter_mut()
            .map(|c| c.resync_energy())
            .fold(0.0, f64::max);
        debug_assert!(drift <= 1e-9 * (1.0 + self.energies().iter().fold(0.0f64, |a, e| a.max(e.abs()))));
        drift
    }

    /// One swap phase on the current parity, without sweeping.
    pub fn swap_phase(&mut self) -> (usize, usize) {
        let start = self.round % 2;
        let m = self.chains.len();
        let mut swapped = vec![false; m];
        let (mut attempted, mut accepted) = (0, 0);
        let mut a = start;
        while a + 1 < m {
            let b = a + 1;
            attempted += 1;
            self.attempted[a] += 1;
            let ok = swap_attempt(
                self.temperatures[a],
                self.chains[a].energy(),
                self.temperatures[b],
                self.chains[b].energy(),
                &mut self.swap_rng,
            );
            if ok {
                let (left, right) = self.chains.split_at_mut(b);
                left[a].swap_configuration(&mut right[0]);
                accepted += 1;
                self.accepted[a] += 1;
                swapped[a] = true;
                swapped[b] = true;
            }
            a += 2;
        }
        if let Some(log) = self.log.as_mut() {
            for (c, chain) in self.chains.iter().enumerate() {
                log.push(SwapLogRow {
                    round: self.round,
                    chain: c,
                    temperature: self.temperatures[c],
                    energy: chain.energy(),
                    swapped: swapped[c],
                });
            }
        }
        (attempted, accepted)
    }

    /// `swap_interval` sweeps, an energy audit, then one swap phase.
    pub fn round(&mut self) -> RoundReport {
        self.advance(self.swap_interval);
        let max_drift = self.audit();
        let (attempted, accepted) = self.swap_phase();
        let report = RoundReport {
            round: self.round,
            attempted,
            accepted,
            max_drift,
            best_energy: self.best().0,
        };
        self.round += 1;
        report
    }

    pub fn take_log(&mut self) -> Vec<SwapLogRow> {
        self.log.take().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtResult {
    /// Global best over every chain and round. `energy_history` holds the
    /// running global best after each round.
    pub trace: SampleTrace,
    pub temperatures: Vec<f64>,
    pub chain_best: Vec<f64>,
    pub final_energies: Vec<f64>,
    /// Accepted / attempted swaps per neighbouring pair.
    pub acceptance: Vec<(u64, u64)>,
    pub max_drift: f64,
    pub log: Vec<SwapLogRow>,
}

/// Runs `total_sweeps` sweeps per chain: full rounds of `swap_interval`
/// sweeps each followed by a swap phase, then any remaining sweeps.
pub fn run_pt<M: EnergyModel>(model: &M, config: &PtConfig) -> Result<PtResult> {
    let start = Instant::now();
    let mut pt = ParallelTempering::new(model, config)?;
    let rounds = config.total_sweeps / config.swap_interval;
    let tail = config.total_sweeps % config.swap_interval;
    let mut history = Vec::with_capacity(rounds + 1);
    let mut max_drift = 0.0f64;
    for r in 0..rounds {
        let rep = pt.round();
        max_drift = max_drift.max(rep.max_drift);
        history.push(((r + 1) * config.swap_interval, rep.best_energy));
    }
    if tail > 0 {
        pt.advance(tail);
        max_drift = max_drift.max(pt.audit());
        history.push((config.total_sweeps, pt.best().0));
    }
    for c in pt.chains.iter_mut() {
        c.observe_best();
    }
    let (best_energy, best_state) = pt.best();
    let best_state = best_state.clone();
    let coldest = &pt.chains[0];
    let trace = SampleTrace {
        best_energy,
        best_state,
        final_energy: coldest.energy(),
        final_state: coldest.state().clone(),
        energy_history: history,
        wall_time: start.elapsed().as_secs_f64(),
        bit_updates: pt.chains.iter().map(|c| c.updates()).sum(),
    };
    Ok(PtResult {
        trace,
        temperatures: pt.temperatures.clone(),
        chain_best: pt.chains.iter().map(|c| c.best_energy()).collect(),
        final_energies: pt.energies(),
        acceptance: pt.acceptance(),
        max_drift,
        log: pt.take_log(),
    })
}

/// Writes the swap log as CSV `(round, chain, temperature, energy, swapped)`.
pub fn write_swap_log_csv<W: std::io::Write>(rows: &[SwapLogRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::{run_chain, Initial, SamplerConfig};
    use crate::problem::{ColoringInstance, Graph};
    use crate::vectorized::build_coloring_model;

    fn cycle5() -> ColoringInstance {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        ColoringInstance::new(g, 3, "c5").unwrap()
    }

    #[test]
    fn ladder_endpoints_and_middle() {
        let l = temperature_ladder(100, 0.01, 40.0).unwrap();
        assert_eq!(l[0], 0.01);
        assert_eq!(l[99], 40.0);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        let l3 = temperature_ladder(3, 0.01, 40.0).unwrap();
        assert!((l3[1] - 0.632_455_532).abs() < 1e-8);
        assert!(temperature_ladder(3, 1.0, 1.0).is_err());
        assert!(temperature_ladder(3, 0.0, 1.0).is_err());
    }

    #[test]
    fn swap_probability_signs() {
        assert_eq!(swap_probability(1.0, 3.0, 1.0, 7.0), 1.0);
        assert_eq!(swap_probability(0.5, 2.0, 3.0, 2.0), 1.0);
        assert_eq!(swap_probability(0.5, 5.0, 3.0, 2.0), 1.0);
        let p = swap_probability(0.5, 2.0, 1.0, 5.0);
        assert!((p - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn equal_temperature_always_swaps() {
        let mut rng = stream_rng(1, 2);
        for e in 0..100 {
            assert!(swap_attempt(0.7, e as f64, 0.7, 0.0, &mut rng));
        }
    }

    #[test]
    fn config_defaults() {
        let c = PtConfig::default();
        assert_eq!((c.num_chains, c.t_low, c.t_high, c.swap_interval), (100, 0.01, 40.0, 15));
        assert!(PtConfig { swap_interval: 0, ..c.clone() }.validate().is_err());
        assert!(PtConfig { num_chains: 0, ..c }.validate().is_err());
    }

    #[test]
    fn round_parity_alternates() {
        let inst = cycle5();
        let m = build_coloring_model(&inst).unwrap();
        let cfg = PtConfig {
            num_chains: 5,
            record_log: true,
            ..PtConfig::default()
        };
        let mut pt = ParallelTempering::new(&m, &cfg).unwrap();
        assert_eq!(pt.round().attempted, 2);
        assert_eq!(pt.round().attempted, 2);
        let cfg4 = PtConfig { num_chains: 4, ..cfg };
        let mut pt = ParallelTempering::new(&m, &cfg4).unwrap();
        assert_eq!(pt.round().attempted, 2);
        assert_eq!(pt.round().attempted, 1);
        let (_, attempted): (Vec<u64>, Vec<u64>) = pt.acceptance().into_iter().unzip();
        assert_eq!(attempted, vec![1, 1, 1]);
    }

    #[test]
    fn single_chain_matches_run_chain() {
        let inst = cycle5();
        let m = build_coloring_model(&inst).unwrap();
        let cfg = PtConfig {
            num_chains: 1,
            t_low: 0.2,
            t_high: 1.0,
            total_sweeps: 90,
            seed: 11,
            ..PtConfig::default()
        };
        let pt = run_pt(&m, &cfg).unwrap();
        let single = run_chain(&m, &SamplerConfig::new(0.2, 90, 11), Initial::Random).unwrap();
        assert_eq!(pt.trace.final_state, single.final_state);
        assert_eq!(pt.trace.best_energy, single.best_energy);
        assert!(pt.acceptance.is_empty());
    }

    #[test]
    fn run_is_reproducible_and_logs() {
        let inst = cycle5();
        let m = build_coloring_model(&inst).unwrap();
        let cfg = PtConfig {
            num_chains: 6,
            total_sweeps: 100,
            seed: 3,
            record_log: true,
            ..PtConfig::default()
        };
        let a = run_pt(&m, &cfg).unwrap();
        let b = run_pt(&m, &cfg).unwrap();
        assert_eq!(a.trace.best_state, b.trace.best_state);
        assert_eq!(a.log, b.log);
        assert_eq!(a.log.len(), 6 * (100 / 15));
        assert_eq!(a.trace.best_energy, 0.0);
        assert_eq!(a.max_drift, 0.0);
        assert!(a.trace.energy_history.windows(2).all(|w| w[1].1 <= w[0].1));
        let mut buf = Vec::new();
        write_swap_log_csv(&a.log, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("round,chain,temperature,energy,swapped\n"));
    }
}
