use microgrid_dispatch::algorithms::{
    moaco_run, moga_run, mopso_run, mosa_run, AlgorithmConfig, Individual, Moga, Problem,
};
use microgrid_dispatch::costs::ObjectiveMode;
use microgrid_dispatch::mocore::{dominates, hypervolume, non_dominated_sort, ParetoArchive, ScoredSolution};
use microgrid_dispatch::scenario::demo_scenario;

fn small(parallel: bool) -> AlgorithmConfig {
    AlgorithmConfig {
        population_size: 16,
        generations: 4,
        warm_start_generations: 2,
        aco_ants: 16,
        sa_neighbors_per_temp: 6,
        sa_cooling: 0.4,
        parallel,
        ..AlgorithmConfig::default()
    }
    .with_seed(17)
}

fn fitness(a: &ParetoArchive<ScoredSolution>) -> Vec<Vec<f64>> {
    a.iter().map(|m| m.fitness.clone()).collect()
}

fn assert_non_dominated(a: &ParetoArchive<ScoredSolution>) {
    let f = fitness(a);
    for x in &f {
        assert!(!f.iter().any(|y| dominates(y, x)));
    }
}

fn seeds(cfg: &AlgorithmConfig) -> Vec<Individual> {
    moga_run(&demo_scenario(), cfg, ObjectiveMode::Multi, Some(2), None).unwrap().population
}

#[test]
fn every_runner_is_reproducible_across_thread_modes() {
    let s = demo_scenario();
    let (seq, par) = (small(false), small(true));
    let moga = |c| fitness(&moga_run(&s, c, ObjectiveMode::Multi, None, None).unwrap().archive);
    assert_eq!(moga(&seq), moga(&par));

    let init = seeds(&seq);
    assert_eq!(init, seeds(&par));
    let check = |run: &dyn Fn(&AlgorithmConfig) -> ParetoArchive<ScoredSolution>| {
        let a = run(&seq);
        assert_eq!(fitness(&a), fitness(&run(&par)));
        assert_eq!(fitness(&a), fitness(&run(&seq)));
        assert_non_dominated(&a);
        assert!(!a.is_empty());
    };
    check(&|c| mosa_run(&s, c, ObjectiveMode::Multi, &init).unwrap());
    check(&|c| mopso_run(&s, c, ObjectiveMode::Multi, &init).unwrap());
    check(&|c| moaco_run(&s, c, ObjectiveMode::Multi, &init).unwrap());
}

#[test]
fn different_seeds_differ() {
    let s = demo_scenario();
    let a = moga_run(&s, &small(false), ObjectiveMode::Multi, None, None).unwrap();
    let b = moga_run(&s, &small(false).with_seed(18), ObjectiveMode::Multi, None, None).unwrap();
    assert_ne!(fitness(&a.archive), fitness(&b.archive));
}

#[test]
fn guarded_moga_archive_hypervolume_never_drops() {
    let s = demo_scenario();
    let cfg = AlgorithmConfig {
        archive_capacity: 8,
        hypervolume_guard: Some([2000.0, 200.0]),
        ..small(false)
    };
    let problem = Problem::new(&s, ObjectiveMode::Multi, &cfg);
    let mut ga = Moga::new(&problem, &cfg, None);
    let mut last = 0.0;
    for _ in 0..6 {
        ga.step();
        let hv = hypervolume(&fitness(ga.archive()), &[2000.0, 200.0]).unwrap();
        assert!(hv >= last - 1e-9, "{hv} < {last}");
        assert!(ga.archive().len() <= 8);
        last = hv;
    }
}

#[test]
fn genomes_stay_inside_bounds() {
    let s = demo_scenario();
    let cfg = small(false);
    let problem = Problem::new(&s, ObjectiveMode::Multi, &cfg);
    let mut ga = Moga::new(&problem, &cfg, None);
    for _ in 0..3 {
        ga.step();
        assert!(ga.population().iter().all(|i| problem.bounds.contains(&i.genome)));
    }
}

#[test]
fn zero_iterations_return_the_seed_front() {
    let s = demo_scenario();
    let cfg = AlgorithmConfig {
        generations: 0,
        sa_termination_temp: Some(f64::MAX),
        ..small(false)
    };
    let init = seeds(&small(false));
    let front: Vec<Vec<f64>> = {
        let f: Vec<Vec<f64>> = init.iter().map(|i| i.scored.fitness.clone()).collect();
        let mut v: Vec<Vec<f64>> = non_dominated_sort(&f)[0].iter().map(|&i| f[i].clone()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    };
    let sorted = |a: ParetoArchive<ScoredSolution>| {
        let mut v = fitness(&a);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    };
    assert_eq!(sorted(mopso_run(&s, &cfg, ObjectiveMode::Multi, &init).unwrap()), front);
    assert_eq!(sorted(moaco_run(&s, &cfg, ObjectiveMode::Multi, &init).unwrap()), front);
    assert_eq!(sorted(mosa_run(&s, &cfg, ObjectiveMode::Multi, &init).unwrap()), front);
}

#[test]
fn invalid_config_is_rejected() {
    let s = demo_scenario();
    let cfg = AlgorithmConfig {
        population_size: 0,
        ..small(false)
    };
    assert!(moga_run(&s, &cfg, ObjectiveMode::Multi, None, None).is_err());
    assert!(mosa_run(&s, &small(false), ObjectiveMode::Multi, &[]).is_err());
}
