use rayon::prelude::*;

use super::operators::{aco_level_weights, aco_pheromone_update, select_levels};
use super::{crowding_roulette, streams, AlgorithmConfig, Bounds, Individual, Problem};
use crate::costs::{interruption_cost, ObjectiveMode, GENES_PER_HOUR};
use crate::devices::{de_fuel_cost, mt_fuel_cost};
use crate::error::Result;
use crate::mocore::{non_dominated_sort, normalize, Objectives, ParetoArchive, ScoredSolution};
use crate::rng::stream;
use crate::scenario::{Scenario, UnitKind};

/// Ant colony over a per-gene discretization of the genome box.
#[derive(Debug)]
pub struct Moaco<'p, 'a> {
    problem: &'p Problem<'a>,
    cfg: AlgorithmConfig,
    tau: Vec<Vec<f64>>,
    eta: Vec<Vec<f64>>,
    archive: ParetoArchive<ScoredSolution>,
    iteration: usize,
}

/// Lower bound keeping every level reachable.
fn tau_floor(cfg: &AlgorithmConfig) -> f64 {
    1e-3 * cfg.aco_initial_pheromone
}

pub fn level_value(bounds: &Bounds, gene: usize, level: usize, levels: usize) -> f64 {
    bounds.lower[gene] + bounds.range(gene) * level as f64 / (levels - 1) as f64
}

pub fn nearest_level(bounds: &Bounds, gene: usize, value: f64, levels: usize) -> usize {
    let range = bounds.range(gene);
    if range <= 0.0 {
        return 0;
    }
    let pos = ((value - bounds.lower[gene]) / range * (levels - 1) as f64).round();
    pos.clamp(0.0, (levels - 1) as f64) as usize
}

/// Marginal cost in USD per kWh of running gene `gene` at `power`, restricted
/// to the costs the search mode optimizes. Battery levels cost the same.
fn marginal_cost(problem: &Problem, gene: usize, power: f64) -> f64 {
    let s = problem.scenario();
    let econ = !matches!(problem.mode, ObjectiveMode::Environmental);
    let env = !matches!(problem.mode, ObjectiveMode::Economic);
    let fee = |k: UnitKind| s.unit(k).management_fee / 1000.0;
    let emission = |k: UnitKind| if env { s.emissions.cost_per_mwh(k) / 1000.0 } else { 0.0 };
    match gene % GENES_PER_HOUR {
        0 => {
            let op = if econ { mt_fuel_cost(power, 1.0, &s.mt_params()) / power + fee(UnitKind::MT) } else { 0.0 };
            op + emission(UnitKind::MT)
        }
        1 => {
            let max = s.unit(UnitKind::DE).power_max;
            let op = if econ { de_fuel_cost(power, max, &s.devices.de) / power + fee(UnitKind::DE) } else { 0.0 };
            op + emission(UnitKind::DE)
        }
        2 if econ => fee(UnitKind::HG),
        4 if econ => interruption_cost(power, &s.economics) / power,
        _ => 1.0,
    }
}

/// Heuristic desirability `1 / cost` per level. Zero-power levels borrow the
/// next level's cost; non-positive costs take the gene's cheapest positive one.
pub fn heuristic_matrix(problem: &Problem, levels: usize) -> Vec<Vec<f64>> {
    let bounds = &problem.bounds;
    (0..bounds.len())
        .map(|g| {
            let mut cost: Vec<f64> = (0..levels)
                .map(|l| {
                    let p = level_value(bounds, g, l, levels);
                    let p = if p.abs() > 0.0 { p } else { level_value(bounds, g, 1, levels) };
                    if p.abs() > 0.0 {
                        marginal_cost(problem, g, p)
                    } else {
                        1.0
                    }
                })
                .collect();
            let cheapest = cost
                .iter()
                .copied()
                .filter(|c| *c > 0.0 && c.is_finite())
                .fold(f64::INFINITY, f64::min);
            let fallback = if cheapest.is_finite() { cheapest } else { 1.0 };
            for c in cost.iter_mut() {
                if !(*c > 0.0 && c.is_finite()) {
                    *c = fallback;
                }
            }
            cost.into_iter().map(|c| (1.0 / c).max(1e-6)).collect()
        })
        .collect()
}

/// Deposit weight per point: one minus its mean normalized objective.
fn deposit_weights<T: Objectives>(points: &[T]) -> Vec<f64> {
    normalize(points)
        .into_iter()
        .map(|v| (1.0 - v.iter().sum::<f64>() / v.len() as f64).max(0.05))
        .collect()
}

impl<'p, 'a> Moaco<'p, 'a> {
    pub fn new(problem: &'p Problem<'a>, cfg: &AlgorithmConfig, seeds: &[Individual]) -> Self {
        let n = problem.bounds.len();
        let levels = cfg.aco_levels;
        let mut tau = vec![vec![cfg.aco_initial_pheromone; levels]; n];
        let mut archive = cfg.new_archive();
        if !seeds.is_empty() {
            let mut deposits = vec![vec![0.0; levels]; n];
            for (seed, w) in seeds.iter().zip(deposit_weights(seeds)) {
                for (g, x) in seed.genome.iter().enumerate() {
                    deposits[g][nearest_level(&problem.bounds, g, *x, levels)] += cfg.aco_initial_pheromone * w;
                }
            }
            aco_pheromone_update(&mut tau, &deposits, 0.0);
            archive.extend(seeds.iter().map(|s| s.scored.clone()));
        }
        Moaco {
            problem,
            cfg: cfg.clone(),
            eta: heuristic_matrix(problem, levels),
            tau,
            archive,
            iteration: 0,
        }
    }

    pub fn archive(&self) -> &ParetoArchive<ScoredSolution> {
        &self.archive
    }

    pub fn pheromone(&self) -> &[Vec<f64>] {
        &self.tau
    }

    /// Builds the genomes of one iteration's ants without evaluating them.
    pub fn construct(&self, iteration: u64) -> Vec<Vec<f64>> {
        let levels = self.cfg.aco_levels;
        let weights = aco_level_weights(&self.tau, &self.eta, self.cfg.aco_alpha, self.cfg.aco_beta);
        let build = |ant: usize| {
            let mut rng = stream(self.cfg.master_seed, "moaco.ant", &[iteration, ant as u64]);
            select_levels(&weights, &mut rng)
                .into_iter()
                .enumerate()
                .map(|(g, l)| level_value(&self.problem.bounds, g, l, levels))
                .collect::<Vec<f64>>()
        };
        if self.cfg.parallel {
            (0..self.cfg.aco_ants).into_par_iter().map(build).collect()
        } else {
            (0..self.cfg.aco_ants).map(build).collect()
        }
    }

    pub fn step(&mut self, horizon: usize) {
        let it = self.iteration as u64 + 1;
        let levels = self.cfg.aco_levels;
        let bounds = &self.problem.bounds;
        let ants = self.problem.evaluate_batch(self.construct(it), streams::MOACO, it);
        self.archive.extend(ants.iter().map(|a| a.scored.clone()));

        let q = self.cfg.aco_initial_pheromone;
        let mut deposits = vec![vec![0.0; levels]; bounds.len()];
        let front = &non_dominated_sort(&ants)[0];
        let weights = deposit_weights(&ants);
        for &a in front {
            for (g, x) in ants[a].genome.iter().enumerate() {
                deposits[g][nearest_level(bounds, g, *x, levels)] += q * weights[a];
            }
        }
        // global best drawn from the updated archive
        let mut rng = stream(self.cfg.master_seed, "moaco.elite", &[it]);
        let elite = self.archive.members()[crowding_roulette(&self.archive, &mut rng)]
            .schedule
            .to_genome();
        for (g, x) in elite.iter().enumerate() {
            deposits[g][nearest_level(bounds, g, *x, levels)] += q;
        }

        let rho = self.cfg.aco_evaporation * (1.0 - 0.5 * self.iteration as f64 / horizon.max(1) as f64);
        aco_pheromone_update(&mut self.tau, &deposits, rho);
        let floor = tau_floor(&self.cfg);
        for t in self.tau.iter_mut().flatten() {
            *t = t.max(floor);
        }
        self.iteration += 1;
    }

    pub fn run(mut self, iterations: usize) -> ParetoArchive<ScoredSolution> {
        for _ in 0..iterations {
            self.step(iterations);
        }
        self.archive
    }
}

/// Runs the colony from `seeds` for `cfg.generations` iterations.
pub fn moaco_run(
    scenario: &Scenario,
    cfg: &AlgorithmConfig,
    mode: ObjectiveMode,
    seeds: &[Individual],
) -> Result<ParetoArchive<ScoredSolution>> {
    super::check_inputs(scenario, cfg)?;
    let problem = Problem::new(scenario, mode, cfg);
    Ok(Moaco::new(&problem, cfg, seeds).run(cfg.generations))
}
