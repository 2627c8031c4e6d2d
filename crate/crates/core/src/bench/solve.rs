//! Single runs of each solver method on coloring and TSP instances.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::metrics::{count_wrong, decode_tour};
use crate::bench::tabucol::tabucol;
use crate::error::{Error, Result};
use crate::gibbs::{run_chain, stream_rng, BestTracking, Chain, Initial, SampleTrace, SamplerConfig, ScanOrder};
use crate::hw::{run_hw, FixedPointConfig, HwLimits};
use crate::onehot;
use crate::problem::{ColoringInstance, TspInstance};
use crate::tempering::{run_pt, PtConfig};
use crate::vectorized;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    OnehotGibbs,
    VectorizedGibbs,
    OnehotPt,
    VectorizedPt,
    HwEmu,
    Tabucol,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::OnehotGibbs,
        Method::VectorizedGibbs,
        Method::OnehotPt,
        Method::VectorizedPt,
        Method::HwEmu,
        Method::Tabucol,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::OnehotGibbs => "onehot-gibbs",
            Method::VectorizedGibbs => "vectorized-gibbs",
            Method::OnehotPt => "onehot-pt",
            Method::VectorizedPt => "vectorized-pt",
            Method::HwEmu => "hw-emu",
            Method::Tabucol => "tabucol",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// Knobs shared by every coloring method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodParams {
    /// Gibbs and hardware temperature.
    pub temperature: f64,
    /// One-hot edge factor `A`.
    pub onehot_a: f64,
    /// One-hot constraint factor `B`.
    pub onehot_b: f64,
    /// Ladder and swap settings; `seed` and `total_sweeps` are set per run.
    pub pt: PtConfig,
    /// Datapath settings; `seed` is set per run.
    pub hw: FixedPointConfig,
    pub hw_limits: HwLimits,
}

impl Default for MethodParams {
    fn default() -> Self {
        MethodParams {
            temperature: 0.2,
            onehot_a: 1.0,
            onehot_b: 1.0,
            pt: PtConfig::default(),
            hw: FixedPointConfig::default(),
            hw_limits: HwLimits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColoringRun {
    pub wrong_edges: usize,
    pub error_rate: f64,
    pub best_energy: f64,
    /// Decoded colors of the best state; `None` marks an invalid node.
    pub colors: Vec<Option<usize>>,
    /// `(sweep, energy)` samples; empty for TabuCol.
    pub energy_history: Vec<(usize, f64)>,
    pub wall_time: f64,
}

/// One run of `method` with `sweeps` sweeps (iterations for TabuCol).
pub fn run_coloring(
    instance: &ColoringInstance,
    method: Method,
    params: &MethodParams,
    sweeps: usize,
    seed: u64,
) -> Result<ColoringRun> {
    let start = Instant::now();
    let (best_energy, colors, energy_history) = match method {
        Method::VectorizedGibbs | Method::VectorizedPt | Method::HwEmu => {
            let model = vectorized::build_coloring_model(instance)?;
            let layout = vectorized::coloring_layout(instance);
            let trace = match method {
                Method::VectorizedGibbs => gibbs_trace(&model, params.temperature, sweeps, seed)?,
                Method::VectorizedPt => pt_trace(&model, &params.pt, sweeps, seed)?,
                _ => {
                    let cfg = FixedPointConfig {
                        seed,
                        ..params.hw.clone()
                    };
                    run_hw(&model, params.temperature, sweeps, &cfg, &params.hw_limits)?.trace
                }
            };
            (trace.best_energy, layout.decode_all(&trace.best_state)?, trace.energy_history)
        }
        Method::OnehotGibbs | Method::OnehotPt => {
            let model = onehot::build_onehot(instance, params.onehot_a, params.onehot_b)?;
            let layout = onehot::coloring_layout(instance);
            let trace = if method == Method::OnehotGibbs {
                gibbs_trace(&model, params.temperature, sweeps, seed)?
            } else {
                pt_trace(&model, &params.pt, sweeps, seed)?
            };
            (trace.best_energy, layout.decode_all(&trace.best_state)?, trace.energy_history)
        }
        Method::Tabucol => {
            let r = tabucol(instance, sweeps, seed)?;
            (r.wrong_edges as f64, r.coloring.into_iter().map(Some).collect(), Vec::new())
        }
    };
    let (wrong_edges, error_rate) = count_wrong(instance, &colors);
    Ok(ColoringRun {
        wrong_edges,
        error_rate,
        best_energy,
        colors,
        energy_history,
        wall_time: start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE),
    })
}

fn gibbs_trace<M: crate::model::EnergyModel>(
    model: &M,
    temperature: f64,
    sweeps: usize,
    seed: u64,
) -> Result<SampleTrace> {
    run_chain(model, &SamplerConfig::new(temperature, sweeps, seed), Initial::Random)
}

fn pt_trace<M: crate::model::EnergyModel>(
    model: &M,
    template: &PtConfig,
    sweeps: usize,
    seed: u64,
) -> Result<SampleTrace> {
    let cfg = PtConfig {
        seed,
        total_sweeps: sweeps,
        record_log: false,
        ..template.clone()
    };
    Ok(run_pt(model, &cfg)?.trace)
}

/// TSP mapping and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TspMethod {
    Vectorized { wt: f64, temperature: f64 },
    OneHot { a: f64, b: f64, temperature: f64 },
}

impl TspMethod {
    pub const VECTORIZED_T: f64 = 0.2;
    pub const ONEHOT_T: f64 = 0.02;

    pub fn vectorized(wt: f64) -> Self {
        TspMethod::Vectorized {
            wt,
            temperature: Self::VECTORIZED_T,
        }
    }

    pub fn onehot(a: f64, b: f64) -> Self {
        TspMethod::OneHot {
            a,
            b,
            temperature: Self::ONEHOT_T,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspRun {
    /// Best readable tour seen; empty when none was.
    pub tour: Vec<usize>,
    /// Its closed cost in normalised units, infinite when none was readable.
    pub cost: f64,
    pub wall_time: f64,
}

/// One Gibbs run on a TSP mapping. After every sweep the state is decoded
/// and the cheapest readable closed tour so far is kept.
pub fn run_tsp(instance: &TspInstance, method: TspMethod, sweeps: usize, seed: u64) -> Result<TspRun> {
    let start = Instant::now();
    let (tour, cost) = match method {
        TspMethod::Vectorized { wt, temperature } => {
            let model = vectorized::build_tsp_operator_model(instance, wt)?;
            tsp_chain(&model, instance, &vectorized::tsp_layout(instance), temperature, sweeps, seed)?
        }
        TspMethod::OneHot { a, b, temperature } => {
            let model = onehot::build_onehot_tsp(instance, a, b)?;
            tsp_chain(&model, instance, &onehot::tsp_layout(instance), temperature, sweeps, seed)?
        }
    };
    Ok(TspRun {
        tour,
        cost,
        wall_time: start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE),
    })
}

fn tsp_chain<M: crate::model::EnergyModel>(
    model: &M,
    instance: &TspInstance,
    layout: &crate::encoding::EncodingLayout,
    temperature: f64,
    sweeps: usize,
    seed: u64,
) -> Result<(Vec<usize>, f64)> {
    SamplerConfig::new(temperature, sweeps, seed).validate()?;
    let mut rng = stream_rng(seed, 0);
    let mut chain = Chain::random(model, &mut rng);
    let mut best = (Vec::new(), f64::INFINITY);
    for _ in 0..sweeps {
        chain.sweep(temperature, ScanOrder::Sequential, BestTracking::Sweep, &mut rng);
        let d = decode_tour(chain.state(), instance, layout)?;
        if d.readable && d.cost < best.1 {
            best = (d.tour, d.cost);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::generated_instance;

    #[test]
    fn method_tags_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.tag().parse::<Method>().unwrap(), m);
        }
        assert!("annealing".parse::<Method>().is_err());
    }

    #[test]
    fn every_method_runs_on_myciel3() {
        let inst = generated_instance("myciel3").unwrap();
        let params = MethodParams {
            pt: PtConfig {
                num_chains: 8,
                ..PtConfig::default()
            },
            ..MethodParams::default()
        };
        for m in Method::ALL {
            let r = run_coloring(&inst, m, &params, 200, 5).unwrap();
            assert!(r.wrong_edges <= 20);
            assert!(r.wall_time > 0.0);
            if m != Method::OnehotGibbs && m != Method::OnehotPt {
                assert_eq!(r.wrong_edges, 0, "{m}");
            }
        }
    }

    #[test]
    fn hw_capacity_propagates() {
        let g = crate::generators::queen_graph(18, 18);
        let inst = ColoringInstance::new(g, 4, "q18").unwrap();
        let err = run_coloring(&inst, Method::HwEmu, &MethodParams::default(), 1, 1).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn tsp_runs_return_readable_tours() {
        let d: Vec<Vec<f64>> = (0..5)
            .map(|i: i32| (0..5).map(|j: i32| (i - j).abs() as f64).collect())
            .collect();
        let t = TspInstance::from_distances("line5", &d).unwrap();
        let r = run_tsp(&t, TspMethod::vectorized(1.0), 200, 1).unwrap();
        assert_eq!(r.tour.len(), 5);
        assert!((t.tour_cost(&r.tour) - r.cost).abs() < 1e-12);
        let r = run_tsp(&t, TspMethod::onehot(1.0, 1.0), 200, 1).unwrap();
        assert!(r.cost.is_infinite() || r.tour.len() == 5);
    }
}
