//! Full fused search on the demo scenario with default budgets.

use microgrid_dispatch::algorithms::AlgorithmConfig;
use microgrid_dispatch::fusion::run_fused;
use microgrid_dispatch::scenario::demo_scenario;

fn main() -> microgrid_dispatch::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let scenario = demo_scenario();
    let report = run_fused(&scenario, &AlgorithmConfig::default().with_seed(seed))?;

    println!(
        "warm start: {} generations, {} evaluations, {:.2?}",
        report.warm_start.generations, report.warm_start.evaluations, report.warm_start.wall_time
    );
    for b in &report.branches {
        println!(
            "{:<11} front {:>3}  hypervolume {:>12.3}  evaluations {:>6}  {:.2?}",
            b.branch.name(),
            b.archive.len(),
            b.hypervolume,
            b.evaluations,
            b.wall_time
        );
    }
    println!("merged      front {:>3}  hypervolume {:>12.3}", report.merged.len(), report.merged_hypervolume);
    for (k, best) in report.best_per_objective.iter().enumerate() {
        println!(
            "best on objective {k}: F = {:.2} USD, CE = {:.2} USD, penalty {}",
            best.objectives.operating_cost, best.objectives.environmental_cost, best.objectives.penalty
        );
    }
    println!("total {:.2?}", report.wall_time);
    Ok(())
}
