//! Ant colony on discretized power levels; shows where pheromone settles.

use microgrid_dispatch::algorithms::{moga_run, AlgorithmConfig, Moaco, Problem};
use microgrid_dispatch::costs::ObjectiveMode;
use microgrid_dispatch::scenario::demo_scenario;

const GENES: [&str; 5] = ["mt", "de", "hg", "bs", "ll"];

fn main() -> microgrid_dispatch::Result<()> {
    let s = demo_scenario();
    let cfg = AlgorithmConfig::default().with_seed(9);
    let seeds = moga_run(&s, &cfg, ObjectiveMode::Multi, Some(cfg.warm_start_generations), None)?.population;
    let problem = Problem::new(&s, ObjectiveMode::Multi, &cfg);
    let mut colony = Moaco::new(&problem, &cfg, &seeds);
    for _ in 0..cfg.generations {
        colony.step(cfg.generations);
    }

    // strongest level for each gene at the evening peak
    let hour = 19;
    for (k, name) in GENES.iter().enumerate() {
        let tau = &colony.pheromone()[hour * GENES.len() + k];
        let (level, t) = tau
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (l, &t)| if t > acc.1 { (l, t) } else { acc });
        println!("hour {hour} {name}: level {level:>2}/{} (tau {t:.3})", tau.len() - 1);
    }
    println!("archive {} after {} evaluations", colony.archive().len(), problem.evaluations());
    Ok(())
}
