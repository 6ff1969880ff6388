use rand::seq::index::sample;
use rand::Rng;

use super::operators::{adaptive_mutation, multipoint_crossover, pso_velocity_update, roulette_select, PsoCoefficients};
use super::{crowding_roulette, genome_diversity, selection_weights, streams, AlgorithmConfig, Individual, Problem};
use crate::costs::ObjectiveMode;
use crate::error::{Error, Result};
use crate::mocore::{dominates, ParetoArchive, ScoredSolution};
use crate::rng::stream;
use crate::scenario::Scenario;

/// Particle swarm with an external archive as the global-best pool.
#[derive(Debug)]
pub struct Mopso<'p, 'a> {
    problem: &'p Problem<'a>,
    cfg: AlgorithmConfig,
    positions: Vec<Individual>,
    velocities: Vec<Vec<f64>>,
    pbest: Vec<Individual>,
    vmax: Vec<f64>,
    archive: ParetoArchive<ScoredSolution>,
    iteration: usize,
}

impl<'p, 'a> Mopso<'p, 'a> {
    pub fn new(problem: &'p Problem<'a>, cfg: &AlgorithmConfig, seeds: &[Individual]) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::InvalidArgument("particle swarm needs at least one seed".into()));
        }
        let n = cfg.population_size;
        let positions: Vec<Individual> = (0..n).map(|i| seeds[i % seeds.len()].clone()).collect();
        let bounds = &problem.bounds;
        let vmax: Vec<f64> = (0..bounds.len())
            .map(|i| cfg.pso_velocity_fraction * bounds.range(i))
            .collect();
        let mut rng = stream(cfg.master_seed, "mopso.init", &[]);
        let velocities = (0..n)
            .map(|_| vmax.iter().map(|m| rng.gen_range(-1.0..=1.0) * m).collect())
            .collect();
        let mut archive = cfg.new_archive();
        archive.extend(seeds.iter().map(|s| s.scored.clone()));
        Ok(Mopso {
            problem,
            cfg: cfg.clone(),
            pbest: positions.clone(),
            positions,
            velocities,
            vmax,
            archive,
            iteration: 0,
        })
    }

    pub fn archive(&self) -> &ParetoArchive<ScoredSolution> {
        &self.archive
    }

    pub fn positions(&self) -> &[Individual] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    /// Moves every particle once. `horizon` is the total iteration budget,
    /// used to shrink the random perturbation over time.
    pub fn step(&mut self, horizon: usize) {
        let it = self.iteration as u64 + 1;
        let mut rng = stream(self.cfg.master_seed, "mopso.step", &[it]);
        let bounds = &self.problem.bounds;
        let n = self.positions.len();
        let coef = PsoCoefficients {
            inertia: self.cfg.pso_inertia,
            c1: self.cfg.pso_c1,
            c2: self.cfg.pso_c2,
        };

        let mut moved: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let gbest = &self.archive.members()[crowding_roulette(&self.archive, &mut rng)];
            let gbest_genome = gbest.schedule.to_genome();
            let x = &self.positions[i].genome;
            let v = pso_velocity_update(
                &self.velocities[i],
                x,
                &self.pbest[i].genome,
                &gbest_genome,
                coef,
                &self.vmax,
                &mut rng,
            );
            let mut next: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + b).collect();
            bounds.clamp(&mut next);
            self.velocities[i] = v;
            moved.push(next);
        }

        // perturb a share of the swarm with a step that shrinks over the run
        let count = ((n as f64 * self.cfg.pso_perturb_fraction).round() as usize).min(n);
        let scale = 0.05 * (1.0 - self.iteration as f64 / horizon.max(1) as f64).max(0.0);
        for i in sample(&mut rng, n, count) {
            for (g, x) in moved[i].iter_mut().enumerate() {
                *x += rng.gen_range(-1.0..=1.0) * scale * bounds.range(g);
            }
            bounds.clamp(&mut moved[i]);
        }

        if self.cfg.pso_hybrid_reproduction {
            self.breed(&mut moved, &mut rng);
        }

        let evaluated = self.problem.evaluate_batch(moved, streams::MOPSO, it);
        for (i, ind) in evaluated.into_iter().enumerate() {
            if !dominates(&self.pbest[i].scored.fitness, &ind.scored.fitness) {
                self.pbest[i] = ind.clone();
            }
            self.archive.insert(ind.scored.clone());
            self.positions[i] = ind;
        }
        self.iteration += 1;
    }

    /// Replaces the worse half of the moved swarm with offspring of the
    /// current positions.
    fn breed(&self, moved: &mut [Vec<f64>], rng: &mut crate::rng::StreamRng) {
        let weights = selection_weights(&self.positions);
        let genomes: Vec<&[f64]> = self.positions.iter().map(|p| p.genome.as_slice()).collect();
        let diversity = genome_diversity(&genomes, &self.problem.bounds);
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
        for &slot in order.iter().take(moved.len() / 2) {
            let a = roulette_select(&weights, rng).unwrap_or(0);
            let b = roulette_select(&weights, rng).unwrap_or(0);
            let (child, _) = multipoint_crossover(
                &self.positions[a].genome,
                &self.positions[b].genome,
                rng,
                self.cfg.crossover_points,
            );
            moved[slot] = adaptive_mutation(&child, diversity, rng, self.cfg.mutation_prob, &self.problem.bounds);
        }
    }

    pub fn run(mut self, iterations: usize) -> ParetoArchive<ScoredSolution> {
        for _ in 0..iterations {
            self.step(iterations);
        }
        self.archive
    }
}

/// Runs the swarm from `seeds` for `cfg.generations` iterations.
pub fn mopso_run(
    scenario: &Scenario,
    cfg: &AlgorithmConfig,
    mode: ObjectiveMode,
    seeds: &[Individual],
) -> Result<ParetoArchive<ScoredSolution>> {
    super::check_inputs(scenario, cfg)?;
    let problem = Problem::new(scenario, mode, cfg);
    Ok(Mopso::new(&problem, cfg, seeds)?.run(cfg.generations))
}
