//! Multi-objective metaheuristics over flat dispatch genomes.
//!
//! A genome holds `T × 5` reals laid out hour-major as
//! `[p_mt, p_de, p_hg, p_bs, p_ll]`. Every evaluation clamps it to its box,
//! repairs the hourly balance and writes the repaired setpoints back, so the
//! searches only ever carry box-feasible genomes.

mod moaco;
mod moga;
mod mopso;
mod mosa;
pub mod operators;

pub use moaco::{moaco_run, Moaco};
pub use moga::{moga_run, Moga, MogaOutcome};
pub use mopso::{mopso_run, Mopso};
pub use mosa::{mosa_run, Mosa};
pub use operators::{
    aco_level_weights, aco_path_select, aco_pheromone_update, adaptive_mutation, crossover_at, metropolis_accept, multipoint_crossover,
    mutation_rate, pso_velocity_update, roulette_select, select_levels, PsoCoefficients,
};

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costs::{DispatchSchedule, Model, ObjectiveMode, StochasticFactors};
use crate::error::{Error, Result};
use crate::mocore::{crowding_distance, non_dominated_sort, Objectives, ParetoArchive, ScoredSolution};
use crate::scenario::{Scenario, StochasticMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub population_size: usize,
    /// Iteration budget of the stand-alone GA and of every fused branch.
    pub generations: usize,
    /// GA generations run before seeding the branches.
    pub warm_start_generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub crossover_points: usize,
    pub elite_count: usize,
    /// Mean pairwise genome distance below which the GA reinitializes.
    pub diversity_threshold: f64,
    /// Share of the worst individuals replaced on low diversity.
    pub reinit_fraction: f64,

    /// `None` uses the spread of the seed set's scalarized objectives.
    pub sa_initial_temp: Option<f64>,
    pub sa_cooling: f64,
    /// `None` uses `1e-4 × initial temperature`.
    pub sa_termination_temp: Option<f64>,
    pub sa_neighbors_per_temp: usize,
    /// Neighbor step as a fraction of each gene's range.
    pub sa_step_fraction: f64,

    pub pso_inertia: f64,
    pub pso_c1: f64,
    pub pso_c2: f64,
    /// Velocity limit as a fraction of each gene's range.
    pub pso_velocity_fraction: f64,
    /// Share of particles perturbed every iteration.
    pub pso_perturb_fraction: f64,
    /// Also breed particles by roulette, crossover and mutation each iteration.
    pub pso_hybrid_reproduction: bool,

    pub aco_ants: usize,
    pub aco_evaporation: f64,
    pub aco_initial_pheromone: f64,
    pub aco_alpha: f64,
    pub aco_beta: f64,
    pub aco_levels: usize,

    pub archive_capacity: usize,
    /// Reference point that makes archive truncation hypervolume-safe.
    pub hypervolume_guard: Option<[f64; 2]>,
    pub master_seed: u64,
    /// Evaluate populations on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            population_size: 150,
            generations: 300,
            warm_start_generations: 30,
            crossover_prob: 0.95,
            mutation_prob: 0.05,
            crossover_points: 3,
            elite_count: 2,
            diversity_threshold: 0.05,
            reinit_fraction: 0.2,
            sa_initial_temp: None,
            sa_cooling: 0.95,
            sa_termination_temp: None,
            sa_neighbors_per_temp: 50,
            sa_step_fraction: 0.05,
            pso_inertia: 0.7,
            pso_c1: 1.5,
            pso_c2: 1.5,
            pso_velocity_fraction: 0.1,
            pso_perturb_fraction: 0.25,
            pso_hybrid_reproduction: false,
            aco_ants: 150,
            aco_evaporation: 0.3,
            aco_initial_pheromone: 0.2,
            aco_alpha: 1.0,
            aco_beta: 1.0,
            aco_levels: 21,
            archive_capacity: crate::mocore::DEFAULT_ARCHIVE_CAPACITY,
            hypervolume_guard: None,
            master_seed: 0,
            parallel: true,
        }
    }
}

impl AlgorithmConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |x: f64| (0.0..=1.0).contains(&x);
        let open = |x: f64| x > 0.0 && x < 1.0;
        let checks = [
            (self.population_size >= 2, "population_size must be at least 2"),
            (self.aco_ants >= 1, "aco_ants must be at least 1"),
            (prob(self.crossover_prob), "crossover_prob must lie in [0, 1]"),
            (prob(self.mutation_prob), "mutation_prob must lie in [0, 1]"),
            (self.crossover_points >= 1, "crossover_points must be at least 1"),
            (self.elite_count < self.population_size, "elite_count must be below population_size"),
            (prob(self.reinit_fraction), "reinit_fraction must lie in [0, 1]"),
            (open(self.sa_cooling), "sa_cooling must lie in (0, 1)"),
            (self.sa_neighbors_per_temp >= 1, "sa_neighbors_per_temp must be at least 1"),
            (self.sa_initial_temp.is_none_or(|t| t > 0.0), "sa_initial_temp must be positive"),
            (self.sa_termination_temp.is_none_or(|t| t > 0.0), "sa_termination_temp must be positive"),
            (self.pso_velocity_fraction > 0.0, "pso_velocity_fraction must be positive"),
            (prob(self.pso_perturb_fraction), "pso_perturb_fraction must lie in [0, 1]"),
            (open(self.aco_evaporation), "aco_evaporation must lie in (0, 1)"),
            (self.aco_initial_pheromone > 0.0, "aco_initial_pheromone must be positive"),
            (self.aco_levels >= 2, "aco_levels must be at least 2"),
            (self.archive_capacity >= 1, "archive_capacity must be at least 1"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidArgument(format!("invalid algorithm config: {msg}"))),
            None => Ok(()),
        }
    }

    pub(crate) fn new_archive(&self) -> ParetoArchive<ScoredSolution> {
        ParetoArchive::new(self.archive_capacity).with_hypervolume_guard(self.hypervolume_guard)
    }
}

/// Box bounds of the genome.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn range(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn clamp(&self, genome: &mut [f64]) {
        for (i, g) in genome.iter_mut().enumerate() {
            *g = g.clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn contains(&self, genome: &[f64]) -> bool {
        genome.len() == self.len()
            && genome
                .iter()
                .enumerate()
                .all(|(i, g)| *g >= self.lower[i] && *g <= self.upper[i])
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.lower[i] + rng.gen::<f64>() * self.range(i))
            .collect()
    }
}

/// A genome with its evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub scored: ScoredSolution,
}

impl Objectives for Individual {
    fn objectives(&self) -> &[f64] {
        &self.scored.fitness
    }
}

/// Evaluation context shared by every search on a scenario.
#[derive(Debug)]
pub struct Problem<'a> {
    pub model: Model<'a>,
    pub bounds: Bounds,
    pub mode: ObjectiveMode,
    stochastic: StochasticMode,
    seed: u64,
    parallel: bool,
    evaluations: AtomicU64,
}

impl<'a> Problem<'a> {
    pub fn new(scenario: &'a Scenario, mode: ObjectiveMode, cfg: &AlgorithmConfig) -> Self {
        let model = Model::new(scenario);
        let (lower, upper) = model.bounds();
        Problem {
            model,
            bounds: Bounds { lower, upper },
            mode,
            stochastic: scenario.economics.stochastic_mode,
            seed: cfg.master_seed,
            parallel: cfg.parallel,
            evaluations: AtomicU64::new(0),
        }
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.model.scenario
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Repairs and scores one genome. `key` selects the stochastic-factor
    /// stream, so equal keys give equal results regardless of thread.
    pub fn evaluate(&self, genome: &[f64], key: [u64; 3]) -> Individual {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let sf = StochasticFactors::for_evaluation(self.stochastic, self.seed, &key);
        let schedule = DispatchSchedule::from_genome(genome);
        let (repaired, objectives) = self.model.evaluate(&schedule, &sf);
        Individual {
            genome: repaired.schedule.to_genome(),
            scored: ScoredSolution::new(repaired.schedule, objectives, self.mode),
        }
    }

    /// Evaluates a batch; item `i` uses key `[stream, iteration, i]`.
    pub fn evaluate_batch(&self, genomes: Vec<Vec<f64>>, stream: u64, iteration: u64) -> Vec<Individual> {
        let run = |(i, g): (usize, Vec<f64>)| self.evaluate(&g, [stream, iteration, i as u64]);
        if self.parallel {
            genomes.into_par_iter().enumerate().map(run).collect()
        } else {
            genomes.into_iter().enumerate().map(run).collect()
        }
    }
}

/// Stream ids keeping each search's stochastic factors apart.
pub(crate) mod streams {
    pub const MOGA: u64 = 1;
    pub const MOSA: u64 = 2;
    pub const MOPSO: u64 = 3;
    pub const MOACO: u64 = 4;
}

/// Roulette weights from Pareto rank and crowding: every member of front `r`
/// outweighs every member of front `r + 1`; crowding breaks ties inside a front.
pub fn selection_weights<T: Objectives>(pop: &[T]) -> Vec<f64> {
    let fronts = non_dominated_sort(pop);
    let n_fronts = fronts.len() as f64;
    let mut w = vec![0.0; pop.len()];
    for (rank, front) in fronts.iter().enumerate() {
        let members: Vec<&T> = front.iter().map(|&i| &pop[i]).collect();
        let crowd = crowding_distance(&members);
        for (&i, c) in front.iter().zip(crowd) {
            let spread = if c.is_infinite() { 1.0 } else { c / (1.0 + c) };
            w[i] = (n_fronts - rank as f64) + 0.5 * spread;
        }
    }
    w
}

impl<T: Objectives + ?Sized> Objectives for &T {
    fn objectives(&self) -> &[f64] {
        (**self).objectives()
    }
}

/// Mean pairwise distance of genomes, each gene scaled by its range, in `[0, 1]`.
pub fn genome_diversity(genomes: &[&[f64]], bounds: &Bounds) -> f64 {
    let n = genomes.len();
    if n < 2 {
        return 0.0;
    }
    let active: Vec<usize> = (0..bounds.len()).filter(|&i| bounds.range(i) > 0.0).collect();
    if active.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            let sq: f64 = active
                .iter()
                .map(|&i| ((genomes[a][i] - genomes[b][i]) / bounds.range(i)).powi(2))
                .sum();
            total += (sq / active.len() as f64).sqrt();
        }
    }
    total / (n * (n - 1) / 2) as f64
}

/// Draws an archive member with probability proportional to its crowding
/// distance; infinite distances count as twice the largest finite one.
pub(crate) fn crowding_roulette<R: Rng + ?Sized>(archive: &ParetoArchive<ScoredSolution>, rng: &mut R) -> usize {
    let crowd = archive.crowding();
    let finite_max = crowd.iter().copied().filter(|c| c.is_finite()).fold(0.0, f64::max);
    let top = if finite_max > 0.0 { 2.0 * finite_max } else { 1.0 };
    let weights: Vec<f64> = crowd.iter().map(|c| if c.is_finite() { *c } else { top }).collect();
    roulette_select(&weights, rng).unwrap_or_else(|_| rng.gen_range(0..archive.len()))
}

/// Rejects an invalid scenario or configuration before a run.
pub fn check_inputs(scenario: &Scenario, cfg: &AlgorithmConfig) -> Result<()> {
    if let Some(v) = scenario.validate().into_iter().next() {
        return Err(Error::Validation(v.to_string()));
    }
    cfg.validate()
}
