//! Single-objective runs on each cost and how the best schedules differ.

use microgrid_dispatch::algorithms::AlgorithmConfig;
use microgrid_dispatch::costs::{DispatchSchedule, ObjectiveMode};
use microgrid_dispatch::fusion::run_single_objective;
use microgrid_dispatch::scenario::{demo_scenario, StochasticMode};

/// Share of micro-turbine energy in micro-turbine plus diesel energy.
fn mt_share(s: &DispatchSchedule) -> f64 {
    let mt: f64 = s.hours.iter().map(|h| h.mt).sum();
    let de: f64 = s.hours.iter().map(|h| h.de).sum();
    mt / (mt + de)
}

fn main() -> microgrid_dispatch::Result<()> {
    let mut scenario = demo_scenario();
    scenario.economics.stochastic_mode = StochasticMode::Deterministic;
    let seeds: Vec<u64> = match std::env::args().nth(1) {
        Some(s) => vec![s.parse().unwrap_or(1)],
        None => (1..=5).collect(),
    };
    println!("seed  objective       F (USD)   CE (USD)  MT share");
    for seed in seeds {
        let cfg = AlgorithmConfig::default().with_seed(seed);
        for mode in [ObjectiveMode::Economic, ObjectiveMode::Environmental] {
            let r = run_single_objective(&scenario, &cfg, mode)?;
            let o = &r.best.objectives;
            println!(
                "{seed:>4}  {:<13} {:>9.3} {:>10.3} {:>9.3}",
                format!("{mode:?}"),
                o.operating_cost,
                o.environmental_cost,
                mt_share(&r.best.schedule)
            );
        }
    }
    Ok(())
}
