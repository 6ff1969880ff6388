//! Repairs a hand-written schedule and itemizes its costs.

use microgrid_dispatch::costs::{DispatchSchedule, HourlyDispatch, Model, StochasticFactors};
use microgrid_dispatch::scenario::demo_scenario;

fn main() {
    let s = demo_scenario();
    let model = Model::new(&s);
    // flat micro-turbine output, everything else left to repair
    let raw = DispatchSchedule {
        hours: vec![
            HourlyDispatch {
                mt: 20.0,
                ..HourlyDispatch::default()
            };
            s.horizon
        ],
    };
    let (repaired, o) = model.evaluate(&raw, &StochasticFactors::deterministic());
    let b = model.breakdown(&repaired.schedule);
    println!("operating cost  {:>9.3} USD", o.operating_cost);
    println!("  depreciation  {:>9.3}", b.depreciation);
    println!("  maintenance   {:>9.3}", b.maintenance);
    println!("  fuel          {:>9.3}", b.fuel);
    println!("  management    {:>9.3}", b.management);
    println!("  interruption  {:>9.3}", b.interruption);
    println!("environmental   {:>9.3} USD", o.environmental_cost);
    println!("penalty         {:>9.3}", o.penalty);
    println!("battery at end  {:>9.3} kWh", repaired.energy.last().copied().unwrap_or_default());

    let seeded = StochasticFactors::for_evaluation(s.economics.stochastic_mode, 1, &[0]);
    let noisy = model.objectives(&repaired.schedule, &seeded);
    println!(
        "one seeded draw: F x{:.4}, CE x{:.4}",
        noisy.operating_cost / o.operating_cost,
        noisy.environmental_cost / o.environmental_cost
    );
}
