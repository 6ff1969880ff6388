//! The genetic algorithm alone, stepped generation by generation.

use microgrid_dispatch::algorithms::{AlgorithmConfig, Moga, Problem};
use microgrid_dispatch::costs::ObjectiveMode;
use microgrid_dispatch::mocore::hypervolume;
use microgrid_dispatch::scenario::demo_scenario;

fn main() {
    let s = demo_scenario();
    let cfg = AlgorithmConfig::default().with_seed(7);
    let problem = Problem::new(&s, ObjectiveMode::Multi, &cfg);
    let mut ga = Moga::new(&problem, &cfg, None);
    let reference = [3000.0, 300.0];
    for _ in 0..10 {
        for _ in 0..10 {
            ga.step();
        }
        let front: Vec<Vec<f64>> = ga.archive().iter().map(|m| m.fitness.clone()).collect();
        println!(
            "generation {:>3}: archive {:>3}, hypervolume {:>10.1}, evaluations {}",
            ga.generation(),
            front.len(),
            hypervolume(&front, &reference).unwrap_or(f64::NAN),
            problem.evaluations()
        );
    }
}
