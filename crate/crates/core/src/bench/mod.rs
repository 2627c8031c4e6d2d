//! Metrics, baselines, hyperparameter search and experiment orchestration.

pub mod experiment;
pub mod grid;
pub mod metrics;
pub mod solve;
pub mod tabucol;

pub use experiment::{run_experiment, ExperimentPlan, ExperimentReport, MethodSummary};
pub use grid::{GridBudget, GridPoint, GridResult, DEFAULT_GRID};
pub use metrics::{coloring_error, decode_tour, optimality_gap, success_probability, tts, Tts};
pub use solve::{run_coloring, run_tsp, Method, MethodParams, TspMethod};
pub use tabucol::tabucol;
