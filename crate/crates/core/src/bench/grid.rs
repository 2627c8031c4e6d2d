//! Grid search over mapping hyperparameters with fixed seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::metrics::optimality_gap;
use crate::bench::solve::{run_coloring, run_tsp, Method, MethodParams, TspMethod};
use crate::error::{Error, Result};
use crate::gibbs::mix_seed;
use crate::problem::{ColoringInstance, TspInstance};

/// Default grid for `A`, `B` and `wt`.
pub const DEFAULT_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBudget {
    pub runs: usize,
    pub sweeps: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub wt: Option<f64>,
    /// Mean coloring error rate or mean optimality gap.
    pub mean_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: GridPoint,
    pub surface: Vec<GridPoint>,
}

impl GridResult {
    /// CSV with columns `a, b, wt, mean_error`; unused parameters are empty.
    pub fn surface_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.surface {
            w.serialize(p).map_err(|e| Error::Serialization(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
    }
}

fn check(budget: &GridBudget, grids: &[&[f64]]) -> Result<()> {
    if budget.runs == 0 || budget.sweeps == 0 {
        return Err(Error::InvalidParameter("grid budget needs runs and sweeps".into()));
    }
    if grids.iter().any(|g| g.is_empty()) {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    Ok(())
}

fn argmin(surface: Vec<GridPoint>) -> GridResult {
    let best = *surface
        .iter()
        .min_by(|x, y| x.mean_error.total_cmp(&y.mean_error))
        .expect("nonempty surface");
    GridResult { best, surface }
}

fn mean_coloring_error(
    instance: &ColoringInstance,
    method: Method,
    params: &MethodParams,
    budget: &GridBudget,
) -> Result<f64> {
    let errs = (0..budget.runs)
        .into_par_iter()
        .map(|r| run_coloring(instance, method, params, budget.sweeps, mix_seed(budget.seed, r as u64)).map(|x| x.error_rate))
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64)
}

/// Mean coloring error over an `(A, B)` grid. `B = 0` is allowed and drops
/// the one-hot constraint. For vectorized methods the mapping has no `A` or
/// `B`, so one evaluation fills the whole (flat) surface.
pub fn grid_search_coloring(
    instance: &ColoringInstance,
    method: Method,
    a_grid: &[f64],
    b_grid: &[f64],
    base: &MethodParams,
    budget: &GridBudget,
) -> Result<GridResult> {
    check(budget, &[a_grid, b_grid])?;
    let onehot = matches!(method, Method::OnehotGibbs | Method::OnehotPt);
    let flat = if onehot {
        None
    } else {
        Some(mean_coloring_error(instance, method, base, budget)?)
    };
    let mut surface = Vec::with_capacity(a_grid.len() * b_grid.len());
    for &a in a_grid {
        for &b in b_grid {
            let mean_error = match flat {
                Some(e) => e,
                None if b == 0.0 => unconstrained_error(instance, a, base, budget)?,
                None => {
                    let params = MethodParams {
                        onehot_a: a,
                        onehot_b: b,
                        ..base.clone()
                    };
                    mean_coloring_error(instance, method, &params, budget)?
                }
            };
            surface.push(GridPoint {
                a: Some(a),
                b: Some(b),
                wt: None,
                mean_error,
            });
        }
    }
    Ok(argmin(surface))
}

fn unconstrained_error(instance: &ColoringInstance, a: f64, base: &MethodParams, budget: &GridBudget) -> Result<f64> {
    use crate::gibbs::{run_chain, Initial, SamplerConfig};
    let model = crate::onehot::build_onehot_unconstrained(instance, a, 0.0)?;
    let layout = crate::onehot::coloring_layout(instance);
    let errs = (0..budget.runs)
        .into_par_iter()
        .map(|r| {
            let cfg = SamplerConfig::new(base.temperature, budget.sweeps, mix_seed(budget.seed, r as u64));
            let t = run_chain(&model, &cfg, Initial::Random)?;
            crate::bench::metrics::coloring_error(&t.best_state, instance, &layout).map(|x| x.1)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64)
}

fn mean_gap(instance: &TspInstance, method: TspMethod, opt: f64, budget: &GridBudget) -> Result<f64> {
    let gaps = (0..budget.runs)
        .into_par_iter()
        .map(|r| {
            let run = run_tsp(instance, method, budget.sweeps, mix_seed(budget.seed, r as u64))?;
            optimality_gap(run.cost, opt)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.iter().sum::<f64>() / gaps.len() as f64)
}

/// Mean optimality gap of the vectorized TSP mapping over a `wt` grid.
pub fn grid_search_tsp_wt(
    instance: &TspInstance,
    optimum: f64,
    wt_grid: &[f64],
    budget: &GridBudget,
) -> Result<GridResult> {
    check(budget, &[wt_grid])?;
    let surface = wt_grid
        .iter()
        .map(|&wt| {
            Ok(GridPoint {
                a: None,
                b: None,
                wt: Some(wt),
                mean_error: mean_gap(instance, TspMethod::vectorized(wt), optimum, budget)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(argmin(surface))
}

/// Mean optimality gap of the one-hot TSP mapping over an `(A, B)` grid.
/// Runs that never produce a readable tour score an infinite gap.
pub fn grid_search_tsp_onehot(
    instance: &TspInstance,
    optimum: f64,
    a_grid: &[f64],
    b_grid: &[f64],
    budget: &GridBudget,
) -> Result<GridResult> {
    check(budget, &[a_grid, b_grid])?;
    let mut surface = Vec::new();
    for &a in a_grid {
        for &b in b_grid {
            surface.push(GridPoint {
                a: Some(a),
                b: Some(b),
                wt: None,
                mean_error: mean_gap(instance, TspMethod::onehot(a, b), optimum, budget)?,
            });
        }
    }
    Ok(argmin(surface))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::generated_instance;

    #[test]
    fn vectorized_surface_is_flat() {
        let inst = generated_instance("myciel3").unwrap();
        let budget = GridBudget { runs: 2, sweeps: 50, seed: 1 };
        let r = grid_search_coloring(&inst, Method::VectorizedGibbs, &DEFAULT_GRID, &DEFAULT_GRID, &MethodParams::default(), &budget).unwrap();
        assert_eq!(r.surface.len(), 25);
        assert!(r.surface.iter().all(|p| p.mean_error == r.surface[0].mean_error));
        let csv = r.surface_csv().unwrap();
        assert!(csv.starts_with("a,b,wt,mean_error\n"));
        assert_eq!(csv.lines().count(), 26);
    }

    #[test]
    fn dropping_the_constraint_hurts() {
        let inst = generated_instance("myciel3").unwrap();
        let budget = GridBudget { runs: 4, sweeps: 200, seed: 2 };
        let r = grid_search_coloring(&inst, Method::OnehotGibbs, &[1.0], &[0.0, 1.0], &MethodParams::default(), &budget).unwrap();
        let (zero, one) = (r.surface[0].mean_error, r.surface[1].mean_error);
        assert!(zero > 0.9, "B = 0 error {zero}");
        assert!(one < zero);
        assert_eq!(r.best.b, Some(1.0));
    }

    #[test]
    fn empty_grid_rejected() {
        let inst = generated_instance("myciel3").unwrap();
        let budget = GridBudget { runs: 1, sweeps: 1, seed: 0 };
        assert!(grid_search_coloring(&inst, Method::OnehotGibbs, &[], &[1.0], &MethodParams::default(), &budget).is_err());
    }
}
