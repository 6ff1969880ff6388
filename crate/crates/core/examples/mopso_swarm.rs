//! Particle swarm seeded by the GA, optionally with GA-style breeding.

use microgrid_dispatch::algorithms::{moga_run, mopso_run, AlgorithmConfig};
use microgrid_dispatch::costs::ObjectiveMode;
use microgrid_dispatch::scenario::demo_scenario;

fn main() -> microgrid_dispatch::Result<()> {
    let s = demo_scenario();
    let base = AlgorithmConfig::default().with_seed(5);
    let seeds = moga_run(&s, &base, ObjectiveMode::Multi, Some(base.warm_start_generations), None)?.population;
    for hybrid in [false, true] {
        let cfg = AlgorithmConfig {
            pso_hybrid_reproduction: hybrid,
            ..base.clone()
        };
        let archive = mopso_run(&s, &cfg, ObjectiveMode::Multi, &seeds)?;
        let best_f = archive.iter().map(|m| m.objectives.operating_cost).fold(f64::INFINITY, f64::min);
        let best_ce = archive.iter().map(|m| m.objectives.environmental_cost).fold(f64::INFINITY, f64::min);
        println!("breeding {hybrid:<5}: front {:>3}, best F {best_f:.2}, best CE {best_ce:.3}", archive.len());
    }
    Ok(())
}
