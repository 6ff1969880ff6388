//! Anneals from a short GA run and prints the cooling schedule.

use microgrid_dispatch::algorithms::{moga_run, AlgorithmConfig, Mosa, Problem};
use microgrid_dispatch::costs::ObjectiveMode;
use microgrid_dispatch::scenario::demo_scenario;

fn main() -> microgrid_dispatch::Result<()> {
    let s = demo_scenario();
    let cfg = AlgorithmConfig::default().with_seed(3);
    let seeds = moga_run(&s, &cfg, ObjectiveMode::Multi, Some(cfg.warm_start_generations), None)?.population;
    let problem = Problem::new(&s, ObjectiveMode::Multi, &cfg);
    let mut sa = Mosa::new(&problem, &cfg, &seeds)?;
    let mut level = 0;
    while !sa.is_finished() {
        sa.step();
        level += 1;
        if level % 20 == 0 {
            let o = sa.current().scored.objectives;
            println!(
                "level {level:>3}: T {:.3e}, current F {:.2} CE {:.2}, archive {}",
                sa.temperature(),
                o.operating_cost,
                o.environmental_cost,
                sa.archive().len()
            );
        }
    }
    println!("{level} levels, {} evaluations", problem.evaluations());
    Ok(())
}
