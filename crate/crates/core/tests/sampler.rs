//! Sampler statistics beyond the unit tests.

use multistate_ising::gibbs::{mix_seed, run_chain, stream_rng, BestTracking, Chain, Initial, SamplerConfig, ScanOrder};
use multistate_ising::onehot::QuboBuilder;
use multistate_ising::tempering::{run_pt, PtConfig};
use multistate_ising::{BitState, EnergyModel};

/// Batch-means z-scores of per-state frequencies against the Boltzmann law.
fn batch_means_z<M: EnergyModel>(model: &M, t: f64, seed: u64) -> f64 {
    let n = model.num_bits();
    let w: Vec<f64> = (0..1u64 << n).map(|s| (-model.eval(&BitState::from_word(s, n)) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    let (batches, per) = (50, 4000);
    let mut rng = stream_rng(seed, 0);
    let mut chain = Chain::random(model, &mut rng);
    let mut freq = vec![vec![0.0; w.len()]; batches];
    for b in freq.iter_mut() {
        for _ in 0..per {
            chain.sweep(t, ScanOrder::Sequential, BestTracking::Sweep, &mut rng);
            let i: usize = chain.state().bits().iter().enumerate().map(|(k, &x)| (x as usize) << k).sum();
            b[i] += 1.0 / per as f64;
        }
    }
    (0..w.len())
        .map(|s| {
            let p = w[s] / z;
            let mean = freq.iter().map(|b| b[s]).sum::<f64>() / batches as f64;
            let var = freq.iter().map(|b| (b[s] - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
            (mean - p).abs() / (var / batches as f64).sqrt().max(1e-12)
        })
        .fold(0.0, f64::max)
}

#[test]
fn gibbs_is_stationary_on_a_frustrated_model() {
    let mut b = QuboBuilder::new(4);
    b.add_term(0, 1, 1.0).add_term(1, 2, 1.0).add_term(0, 2, 1.0).add_term(2, 3, -0.7).add_linear(0, -0.8).add_linear(3, 0.4);
    let m = b.build();
    for (k, t) in [0.5, 1.0, 3.0].into_iter().enumerate() {
        let z = batch_means_z(&m, t, k as u64);
        // Bonferroni over 16 states at roughly the 1e-4 level.
        assert!(z < 4.5, "T = {t}: z = {z}");
    }
}

#[test]
fn parallel_tempering_reaches_the_ground_state() {
    let mut b = QuboBuilder::new(12);
    for i in 0..12 {
        b.add_term(i, (i + 1) % 12, 1.0).add_term(i, (i + 5) % 12, 0.6).add_linear(i, -0.9);
    }
    let m = b.build();
    let exact = multistate_ising::oracles::enumerate_min_energy(&m).unwrap().optimum;
    let cfg = PtConfig { num_chains: 12, total_sweeps: 300, ..PtConfig::with_seed(4) };
    let pt = run_pt(&m, &cfg).unwrap();
    assert!((pt.trace.best_energy - exact).abs() < 1e-9);
    let best_gibbs = (0..5)
        .map(|s| run_chain(&m, &SamplerConfig::new(0.01, 300, mix_seed(3, s)), Initial::Random).unwrap().best_energy)
        .fold(f64::INFINITY, f64::min);
    assert!(pt.trace.best_energy <= best_gibbs + 1e-9);
}
