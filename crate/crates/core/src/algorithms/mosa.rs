use rand::seq::index::sample;
use rand::Rng;

use super::operators::metropolis_accept;
use super::{streams, AlgorithmConfig, Individual, Problem};
use crate::costs::ObjectiveMode;
use crate::error::{Error, Result};
use crate::mocore::{dominates, normalize, ParetoArchive, ScoredSolution};
use crate::rng::stream;
use crate::scenario::Scenario;

/// Single-chain multi-objective simulated annealing.
#[derive(Debug)]
pub struct Mosa<'p, 'a> {
    problem: &'p Problem<'a>,
    cfg: AlgorithmConfig,
    current: Individual,
    archive: ParetoArchive<ScoredSolution>,
    temperature: f64,
    stop_temperature: f64,
    level: usize,
}

/// Mean of max-min normalized objectives per point.
fn scalarize(points: &[&[f64]]) -> Vec<f64> {
    let owned: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    normalize(&owned)
        .into_iter()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64)
        .collect()
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

impl<'p, 'a> Mosa<'p, 'a> {
    pub fn new(problem: &'p Problem<'a>, cfg: &AlgorithmConfig, seeds: &[Individual]) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::InvalidArgument("simulated annealing needs at least one seed".into()));
        }
        let mut archive = cfg.new_archive();
        archive.extend(seeds.iter().map(|s| s.scored.clone()));

        let energies = scalarize(&seeds.iter().map(|s| s.scored.fitness.as_slice()).collect::<Vec<_>>());
        let spread = std_dev(&energies);
        let t0 = cfg
            .sa_initial_temp
            .unwrap_or(if spread > 0.0 && spread.is_finite() { spread } else { 1.0 });
        let stop = cfg.sa_termination_temp.unwrap_or(1e-4 * t0);

        // start from a non-dominated seed with the lowest scalarized energy
        let start = (0..seeds.len())
            .filter(|&i| !seeds.iter().any(|o| dominates(&o.scored.fitness, &seeds[i].scored.fitness)))
            .min_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)))
            .unwrap_or(0);

        Ok(Mosa {
            problem,
            cfg: cfg.clone(),
            current: seeds[start].clone(),
            archive,
            temperature: t0,
            stop_temperature: stop,
            level: 0,
        })
    }

    pub fn archive(&self) -> &ParetoArchive<ScoredSolution> {
        &self.archive
    }

    pub fn current(&self) -> &Individual {
        &self.current
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn is_finished(&self) -> bool {
        self.temperature < self.stop_temperature
    }

    /// Perturbs a random subset of genes by up to ±step of their range.
    fn neighbor<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let bounds = &self.problem.bounds;
        let n = bounds.len();
        let mut g = self.current.genome.clone();
        let max_genes = (n / 10).max(1);
        let count = rng.gen_range(1..=max_genes);
        for i in sample(rng, n, count) {
            g[i] += rng.gen_range(-1.0..=1.0) * self.cfg.sa_step_fraction * bounds.range(i);
        }
        bounds.clamp(&mut g);
        g
    }

    /// One temperature level: a batch of neighbor moves, then cooling.
    pub fn step(&mut self) {
        let level = self.level as u64;
        let mut rng = stream(self.cfg.master_seed, "mosa.level", &[level]);
        for k in 0..self.cfg.sa_neighbors_per_temp {
            let genome = self.neighbor(&mut rng);
            let cand = self.problem.evaluate(&genome, [streams::MOSA, level, k as u64]);
            self.archive.insert(cand.scored.clone());
            let cur = &self.current.scored.fitness;
            let accept = if !dominates(cur, &cand.scored.fitness) {
                true
            } else {
                let mut pts: Vec<&[f64]> = self.archive.iter().map(|m| m.fitness.as_slice()).collect();
                pts.push(cur);
                pts.push(&cand.scored.fitness);
                let e = scalarize(&pts);
                let (ec, en) = (e[e.len() - 2], e[e.len() - 1]);
                metropolis_accept(ec, en, self.temperature, &mut rng)
            };
            if accept {
                self.current = cand;
            }
        }
        self.temperature *= self.cfg.sa_cooling;
        self.level += 1;
    }

    pub fn run(mut self, max_levels: Option<usize>) -> ParetoArchive<ScoredSolution> {
        let mut steps = 0;
        while !self.is_finished() && max_levels.is_none_or(|m| steps < m) {
            self.step();
            steps += 1;
        }
        self.archive
    }
}

/// Anneals from `seeds` until the termination temperature.
pub fn mosa_run(
    scenario: &Scenario,
    cfg: &AlgorithmConfig,
    mode: ObjectiveMode,
    seeds: &[Individual],
) -> Result<ParetoArchive<ScoredSolution>> {
    super::check_inputs(scenario, cfg)?;
    let problem = Problem::new(scenario, mode, cfg);
    Ok(Mosa::new(&problem, cfg, seeds)?.run(None))
}
