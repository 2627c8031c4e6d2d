//! Small benchmark table: several methods on the easy coloring instances,
//! with success probability and time to solution. Results go to CSV/JSON.
//!
//!     cargo run --release --example benchmark_table [out_dir]

use multistate_ising::bench::experiment::{run_experiment, ExperimentPlan};
use multistate_ising::bench::solve::Method;
use multistate_ising::generators::generated_instance;
use multistate_ising::io::write_results;

fn main() -> multistate_ising::Result<()> {
    let instances = ["myciel3", "myciel4", "myciel5", "queen5_5"]
        .into_iter()
        .map(generated_instance)
        .collect::<multistate_ising::Result<Vec<_>>>()?;
    let mut plan = ExperimentPlan::new(
        instances,
        vec![Method::VectorizedGibbs, Method::OnehotGibbs, Method::HwEmu, Method::Tabucol],
    );
    plan.runs = 50;
    plan.seed = 2024;
    let report = run_experiment(&plan)?;
    println!("{:<10} {:<17} {:>5} {:>8} {:>6} {:>12}", "instance", "method", "best", "mean", "p_s", "tts");
    for s in &report.summaries {
        println!(
            "{:<10} {:<17} {:>5} {:>8.2} {:>6.2} {:>12}",
            s.instance,
            s.method,
            s.best_wrong_edges.unwrap_or(usize::MAX),
            s.mean_wrong_edges.unwrap_or(f64::NAN),
            s.success_probability.unwrap_or(f64::NAN),
            s.tts.map(|t| t.to_string()).unwrap_or_default()
        );
    }
    if let Some(dir) = std::env::args().nth(1) {
        let (csv, json) = write_results(&report.records, dir.as_ref(), "benchmark")?;
        println!("wrote {} and {}", csv.display(), json.display());
    }
    Ok(())
}
