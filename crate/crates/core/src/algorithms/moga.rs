use std::cmp::Ordering;

use rand::Rng;

use super::operators::{adaptive_mutation, multipoint_crossover, roulette_select};
use super::{genome_diversity, selection_weights, streams, AlgorithmConfig, Individual, Problem};
use crate::costs::ObjectiveMode;
use crate::error::Result;
use crate::mocore::{crowding_distance, non_dominated_sort, ParetoArchive, ScoredSolution};
use crate::rng::{stream, StreamRng};
use crate::scenario::Scenario;

/// Generational multi-objective GA with an external archive.
#[derive(Debug)]
pub struct Moga<'p, 'a> {
    problem: &'p Problem<'a>,
    cfg: AlgorithmConfig,
    population: Vec<Individual>,
    archive: ParetoArchive<ScoredSolution>,
    generation: usize,
}

#[derive(Debug, Clone)]
pub struct MogaOutcome {
    pub population: Vec<Individual>,
    pub archive: ParetoArchive<ScoredSolution>,
}

impl<'p, 'a> Moga<'p, 'a> {
    /// Builds and evaluates generation 0. Seed genomes come first; random
    /// genomes fill the rest of the population.
    pub fn new(problem: &'p Problem<'a>, cfg: &AlgorithmConfig, seeds: Option<&[Vec<f64>]>) -> Self {
        let mut rng = stream(cfg.master_seed, "moga.init", &[]);
        let mut genomes: Vec<Vec<f64>> = seeds.unwrap_or(&[]).iter().take(cfg.population_size).cloned().collect();
        while genomes.len() < cfg.population_size {
            genomes.push(problem.bounds.random(&mut rng));
        }
        let population = problem.evaluate_batch(genomes, streams::MOGA, 0);
        let mut archive = cfg.new_archive();
        archive.extend(population.iter().map(|i| i.scored.clone()));
        Moga {
            problem,
            cfg: cfg.clone(),
            population,
            archive,
            generation: 0,
        }
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn archive(&self) -> &ParetoArchive<ScoredSolution> {
        &self.archive
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Indices of the population ordered best first: by front, then by
    /// descending crowding distance, then by index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.population.len());
        for front in non_dominated_sort(&self.population) {
            let members: Vec<&Individual> = front.iter().map(|&i| &self.population[i]).collect();
            let crowd = crowding_distance(&members);
            let mut ranked: Vec<(usize, f64)> = front.into_iter().zip(crowd).collect();
            ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
            order.extend(ranked.into_iter().map(|(i, _)| i));
        }
        order
    }

    pub fn step(&mut self) {
        let gen = self.generation as u64 + 1;
        let mut rng = stream(self.cfg.master_seed, "moga.step", &[gen]);
        let n = self.population.len();
        let order = self.ranking();
        let elite_count = self.cfg.elite_count.min(n);
        let elites: Vec<Individual> = order[..elite_count].iter().map(|&i| self.population[i].clone()).collect();

        let weights = selection_weights(&self.population);
        let genomes: Vec<&[f64]> = self.population.iter().map(|i| i.genome.as_slice()).collect();
        let diversity = genome_diversity(&genomes, &self.problem.bounds);

        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n - elite_count {
            let a = &self.population[pick(&weights, &mut rng)].genome;
            let b = &self.population[pick(&weights, &mut rng)].genome;
            let (c1, c2) = if rng.gen::<f64>() < self.cfg.crossover_prob {
                multipoint_crossover(a, b, &mut rng, self.cfg.crossover_points)
            } else {
                (a.clone(), b.clone())
            };
            for child in [c1, c2] {
                if offspring.len() < n - elite_count {
                    offspring.push(adaptive_mutation(
                        &child,
                        diversity,
                        &mut rng,
                        self.cfg.mutation_prob,
                        &self.problem.bounds,
                    ));
                }
            }
        }
        let mut next = elites;
        next.extend(self.problem.evaluate_batch(offspring, streams::MOGA, gen));
        self.population = next;
        self.reinitialize_if_converged(gen, elite_count, &mut rng);
        self.archive.extend(self.population.iter().map(|i| i.scored.clone()));
        self.generation += 1;
    }

    /// Replaces the worst share of the population with random genomes when
    /// genome diversity falls below the threshold. Elites are never replaced.
    fn reinitialize_if_converged(&mut self, gen: u64, elite_count: usize, rng: &mut StreamRng) {
        let genomes: Vec<&[f64]> = self.population.iter().map(|i| i.genome.as_slice()).collect();
        if genome_diversity(&genomes, &self.problem.bounds) >= self.cfg.diversity_threshold {
            return;
        }
        let n = self.population.len();
        let count = ((n as f64 * self.cfg.reinit_fraction).round() as usize).min(n - elite_count);
        if count == 0 {
            return;
        }
        let order = self.ranking();
        let mut worst: Vec<usize> = order.into_iter().filter(|&i| i >= elite_count).rev().take(count).collect();
        worst.sort_unstable();
        let fresh: Vec<Vec<f64>> = (0..count).map(|_| self.problem.bounds.random(rng)).collect();
        // a separate evaluation key range keeps these apart from the offspring
        let evaluated = self.problem.evaluate_batch(fresh, streams::MOGA, gen | 1 << 32);
        for (slot, ind) in worst.into_iter().zip(evaluated) {
            self.population[slot] = ind;
        }
    }

    pub fn run(mut self, generations: usize) -> MogaOutcome {
        for _ in 0..generations {
            self.step();
        }
        self.into_outcome()
    }

    pub fn into_outcome(self) -> MogaOutcome {
        MogaOutcome {
            population: self.population,
            archive: self.archive,
        }
    }
}

fn pick(weights: &[f64], rng: &mut StreamRng) -> usize {
    roulette_select(weights, rng).unwrap_or_else(|_| rng.gen_range(0..weights.len()))
}

/// Runs the GA on `scenario` for `generations` (or `cfg.generations`).
pub fn moga_run(
    scenario: &Scenario,
    cfg: &AlgorithmConfig,
    mode: ObjectiveMode,
    generations: Option<usize>,
    seeds: Option<&[Vec<f64>]>,
) -> Result<MogaOutcome> {
    super::check_inputs(scenario, cfg)?;
    let problem = Problem::new(scenario, mode, cfg);
    Ok(Moga::new(&problem, cfg, seeds).run(generations.unwrap_or(cfg.generations)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::demo_scenario;

    fn small() -> AlgorithmConfig {
        AlgorithmConfig {
            population_size: 20,
            parallel: false,
            ..AlgorithmConfig::default()
        }
    }

    #[test]
    fn zero_generations_archive_is_initial_front() {
        let s = demo_scenario();
        let out = moga_run(&s, &small(), ObjectiveMode::Multi, Some(0), None).unwrap();
        let front = &non_dominated_sort(&out.population)[0];
        assert!(out.archive.len() <= front.len());
        for m in out.archive.members() {
            assert!(out.population.iter().any(|i| i.scored.fitness == m.fitness));
        }
    }

    #[test]
    fn best_individual_survives() {
        let s = demo_scenario();
        let cfg = small();
        let problem = Problem::new(&s, ObjectiveMode::Multi, &cfg);
        let mut ga = Moga::new(&problem, &cfg, None);
        for _ in 0..5 {
            let best = ga.population()[ga.ranking()[0]].clone();
            ga.step();
            assert!(ga.population().contains(&best));
        }
    }
}
