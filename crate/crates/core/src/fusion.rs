//! GA warm start feeding the annealing, swarm and colony branches, with the
//! branch fronts merged into one non-dominated set.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{check_inputs, AlgorithmConfig, Individual, Moaco, Moga, Mopso, Mosa, Problem};
use crate::costs::ObjectiveMode;
use crate::error::{Error, Result};
use crate::mocore::{hypervolume, ParetoArchive, ScoredSolution};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// The GA itself, continued from the warm start.
    Moga,
    Mosa,
    Mopso,
    Moaco,
}

impl Branch {
    /// The three searches seeded by the GA.
    pub const FUSED: [Branch; 3] = [Branch::Mosa, Branch::Mopso, Branch::Moaco];

    pub fn name(self) -> &'static str {
        match self {
            Branch::Moga => "moga",
            Branch::Mosa => "moga-mosa",
            Branch::Mopso => "moga-mopso",
            Branch::Moaco => "moga-moaco",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Branch::Moga, Branch::Mosa, Branch::Mopso, Branch::Moaco]
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown branch `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct BranchReport {
    pub branch: Branch,
    pub archive: ParetoArchive<ScoredSolution>,
    pub hypervolume: f64,
    pub wall_time: Duration,
    pub evaluations: u64,
}

#[derive(Debug, Clone)]
pub struct WarmStart {
    pub generations: usize,
    pub population: Vec<Individual>,
    pub archive: ParetoArchive<ScoredSolution>,
    pub wall_time: Duration,
    pub evaluations: u64,
}

#[derive(Debug, Clone)]
pub struct FusionReport {
    pub mode: ObjectiveMode,
    pub seed: u64,
    pub warm_start: WarmStart,
    pub branches: Vec<BranchReport>,
    /// Non-dominated union of the branch archives, unbounded.
    pub merged: ParetoArchive<ScoredSolution>,
    pub merged_hypervolume: f64,
    /// Common hypervolume reference for every archive in the report.
    pub reference: Vec<f64>,
    /// Per fitness component, the merged member minimizing it (feasible first).
    pub best_per_objective: Vec<ScoredSolution>,
    pub wall_time: Duration,
}

impl FusionReport {
    pub fn branch(&self, branch: Branch) -> Option<&BranchReport> {
        self.branches.iter().find(|b| b.branch == branch)
    }

    pub fn evaluations(&self) -> u64 {
        self.warm_start.evaluations + self.branches.iter().map(|b| b.evaluations).sum::<u64>()
    }
}

/// Result of a run with a single cost as fitness.
#[derive(Debug, Clone)]
pub struct SingleObjectiveResult {
    pub objective: ObjectiveMode,
    pub best: ScoredSolution,
    pub report: FusionReport,
}

/// Reference point just beyond the worst value of each objective.
pub fn reference_point<'s, I: IntoIterator<Item = &'s ScoredSolution>>(points: I) -> Vec<f64> {
    let mut worst: Vec<f64> = Vec::new();
    let mut best: Vec<f64> = Vec::new();
    for p in points {
        if worst.is_empty() {
            worst = p.fitness.clone();
            best = p.fitness.clone();
        }
        for (k, x) in p.fitness.iter().enumerate() {
            worst[k] = worst[k].max(*x);
            best[k] = best[k].min(*x);
        }
    }
    worst
        .iter()
        .zip(&best)
        .map(|(w, b)| w + (0.1 * (w - b)).max(1e-6 * w.abs().max(1.0)))
        .collect()
}

fn run_branch(
    scenario: &Scenario,
    cfg: &AlgorithmConfig,
    mode: ObjectiveMode,
    branch: Branch,
    seeds: &[Individual],
) -> Result<(ParetoArchive<ScoredSolution>, u64)> {
    let problem = Problem::new(scenario, mode, cfg);
    let archive = match branch {
        Branch::Moga => {
            let genomes: Vec<Vec<f64>> = seeds.iter().map(|s| s.genome.clone()).collect();
            Moga::new(&problem, cfg, Some(&genomes)).run(cfg.generations).archive
        }
        Branch::Mosa => Mosa::new(&problem, cfg, seeds)?.run(None),
        Branch::Mopso => Mopso::new(&problem, cfg, seeds)?.run(cfg.generations),
        Branch::Moaco => Moaco::new(&problem, cfg, seeds).run(cfg.generations),
    };
    Ok((archive, problem.evaluations()))
}

/// Warm-starts the GA, runs `branches` from its final population and merges.
pub fn run_pipeline(
    scenario: &Scenario,
    cfg: &AlgorithmConfig,
    mode: ObjectiveMode,
    branches: &[Branch],
) -> Result<FusionReport> {
    check_inputs(scenario, cfg)?;
    let started = Instant::now();

    let problem = Problem::new(scenario, mode, cfg);
    let warm = Moga::new(&problem, cfg, None).run(cfg.warm_start_generations);
    let warm_start = WarmStart {
        generations: cfg.warm_start_generations,
        population: warm.population,
        archive: warm.archive,
        wall_time: started.elapsed(),
        evaluations: problem.evaluations(),
    };

    let run = |&branch: &Branch| {
        let t = Instant::now();
        run_branch(scenario, cfg, mode, branch, &warm_start.population)
            .map(|(archive, evaluations)| (branch, archive, evaluations, t.elapsed()))
            .map_err(|e| Error::Branch {
                branch: branch.name().to_string(),
                source: Box::new(e),
            })
    };
    let outcomes: Vec<_> = if cfg.parallel {
        branches.par_iter().map(run).collect::<Result<_>>()?
    } else {
        branches.iter().map(run).collect::<Result<_>>()?
    };

    let mut merged = ParetoArchive::unbounded();
    for (_, archive, _, _) in &outcomes {
        merged.extend(archive.iter().cloned());
    }
    let reference = reference_point(
        outcomes
            .iter()
            .flat_map(|(_, a, _, _)| a.iter())
            .chain(warm_start.archive.iter()),
    );
    let hv = |a: &ParetoArchive<ScoredSolution>| {
        if a.is_empty() {
            Ok(0.0)
        } else {
            hypervolume(a.members(), &reference).map_err(|e| Error::InvalidArgument(e.to_string()))
        }
    };
    let branches = outcomes
        .into_iter()
        .map(|(branch, archive, evaluations, wall_time)| {
            Ok(BranchReport {
                hypervolume: hv(&archive)?,
                branch,
                archive,
                wall_time,
                evaluations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let merged_hypervolume = hv(&merged)?;
    let best_per_objective = best_per_objective(&merged);

    Ok(FusionReport {
        mode,
        seed: cfg.master_seed,
        warm_start,
        branches,
        merged,
        merged_hypervolume,
        reference,
        best_per_objective,
        wall_time: started.elapsed(),
    })
}

fn best_per_objective(archive: &ParetoArchive<ScoredSolution>) -> Vec<ScoredSolution> {
    let Some(first) = archive.members().first() else {
        return Vec::new();
    };
    (0..first.fitness.len())
        .filter_map(|k| {
            archive
                .iter()
                .min_by(|a, b| {
                    b.objectives
                        .is_feasible()
                        .cmp(&a.objectives.is_feasible())
                        .then(a.fitness[k].total_cmp(&b.fitness[k]))
                        .then_with(|| a.fitness.iter().sum::<f64>().total_cmp(&b.fitness.iter().sum()))
                })
                .cloned()
        })
        .collect()
}

/// The full fused pipeline on both objectives.
pub fn run_fused(scenario: &Scenario, cfg: &AlgorithmConfig) -> Result<FusionReport> {
    run_pipeline(scenario, cfg, ObjectiveMode::Multi, &Branch::FUSED)
}

/// The fused pipeline with one penalized cost as sole fitness.
pub fn run_single_objective(
    scenario: &Scenario,
    cfg: &AlgorithmConfig,
    objective: ObjectiveMode,
) -> Result<SingleObjectiveResult> {
    if objective == ObjectiveMode::Multi {
        return Err(Error::InvalidArgument("single-objective run needs economic or environmental".into()));
    }
    let report = run_pipeline(scenario, cfg, objective, &Branch::FUSED)?;
    let best = report
        .best_per_objective
        .first()
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("search produced no solution".into()))?;
    Ok(SingleObjectiveResult {
        objective,
        best,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::demo_scenario;

    fn tiny() -> AlgorithmConfig {
        AlgorithmConfig {
            population_size: 12,
            generations: 3,
            warm_start_generations: 2,
            aco_ants: 12,
            sa_neighbors_per_temp: 5,
            sa_cooling: 0.5,
            parallel: false,
            ..AlgorithmConfig::default()
        }
    }

    #[test]
    fn merged_front_covers_branches() {
        let s = demo_scenario();
        let r = run_fused(&s, &tiny()).unwrap();
        assert_eq!(r.branches.len(), 3);
        for b in &r.branches {
            assert!(!b.archive.is_empty());
            assert!(r.merged_hypervolume >= b.hypervolume * (1.0 - 1e-12));
        }
        assert_eq!(r.best_per_objective.len(), 2);
    }

    #[test]
    fn zero_warm_start_still_reports() {
        let s = demo_scenario();
        let cfg = AlgorithmConfig {
            warm_start_generations: 0,
            ..tiny()
        };
        let r = run_fused(&s, &cfg).unwrap();
        assert!(!r.merged.is_empty());
    }

    #[test]
    fn single_objective_rejects_multi() {
        let s = demo_scenario();
        assert!(run_single_objective(&s, &tiny(), ObjectiveMode::Multi).is_err());
        let r = run_single_objective(&s, &tiny(), ObjectiveMode::Economic).unwrap();
        assert_eq!(r.best.fitness.len(), 1);
    }

    #[test]
    fn branch_names_round_trip() {
        for b in [Branch::Moga, Branch::Mosa, Branch::Mopso, Branch::Moaco] {
            assert_eq!(b.name().parse::<Branch>().unwrap(), b);
        }
        assert!("pso".parse::<Branch>().is_err());
    }
}
