//! Plot-ready CSV and run metadata for a finished search.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::algorithms::AlgorithmConfig;
use crate::costs::{DispatchSchedule, Model};
use crate::error::{Error, Result};
use crate::fusion::FusionReport;
use crate::mocore::ScoredSolution;
use crate::scenario::Scenario;

pub const PARETO_HEADER: &str = "branch,operating_cost_usd,environmental_cost_usd,penalty,schedule_id";
pub const SCHEDULE_HEADER: &str = "hour,p_mt_kw,p_de_kw,p_hg_kw,p_wt_kw,p_pv_kw,p_bs_kw,p_ll_kw,battery_kwh";

/// What produced a report, recorded in `summary.txt`.
#[derive(Debug, Clone)]
pub struct RunMetadata<'a> {
    pub algorithm: &'a str,
    pub scenario_source: &'a str,
    pub scenario: &'a Scenario,
    pub config: &'a AlgorithmConfig,
}

/// SHA-256 over every parameter that can change the result. The evaluation
/// thread mode is excluded because results do not depend on it.
pub fn config_hash(meta: &RunMetadata, report: &FusionReport) -> String {
    let mut cfg = meta.config.clone();
    cfg.parallel = false;
    let text = format!(
        "algorithm={}\nmode={:?}\nconfig={:?}\nscenario={:?}",
        meta.algorithm, report.mode, cfg, meta.scenario
    );
    Sha256::digest(text.as_bytes())
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Merged front members sorted by operating cost, then environmental cost,
/// each tagged with the first branch whose archive holds it.
pub fn front_rows(report: &FusionReport) -> Vec<(&'static str, &ScoredSolution)> {
    let mut rows: Vec<(&'static str, &ScoredSolution)> = report
        .merged
        .iter()
        .map(|m| {
            let origin = report
                .branches
                .iter()
                .find(|b| b.archive.iter().any(|x| x.fitness == m.fitness))
                .map_or("merged", |b| b.branch.name());
            (origin, m)
        })
        .collect();
    rows.sort_by(|a, b| {
        let (x, y) = (&a.1.objectives, &b.1.objectives);
        x.operating_cost
            .total_cmp(&y.operating_cost)
            .then(x.environmental_cost.total_cmp(&y.environmental_cost))
            .then(a.0.cmp(b.0))
    });
    rows
}

pub fn pareto_csv(rows: &[(&str, &ScoredSolution)]) -> String {
    let mut out = String::from(PARETO_HEADER);
    out.push('\n');
    for (id, (branch, m)) in rows.iter().enumerate() {
        let o = &m.objectives;
        let _ = writeln!(
            out,
            "{branch},{:.6},{:.6},{:.6},{id}",
            o.operating_cost, o.environmental_cost, o.penalty
        );
    }
    out
}

/// Power and energy use nine decimals so the rounded rows still balance
/// within 1e-6 kW.
pub fn schedule_csv(model: &Model, schedule: &DispatchSchedule) -> String {
    let energy = model.energy_trajectory(schedule);
    let mut out = String::from(SCHEDULE_HEADER);
    out.push('\n');
    for (t, x) in schedule.hours.iter().enumerate() {
        let h = &model.hours[t];
        let _ = writeln!(
            out,
            "{t},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            x.mt, x.de, x.hg, h.wind, h.pv, x.bs, x.ll, energy[t]
        );
    }
    out
}

fn summary_text(meta: &RunMetadata, report: &FusionReport, front: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "algorithm = {}", meta.algorithm);
    let _ = writeln!(s, "mode = {:?}", report.mode);
    let _ = writeln!(s, "seed = {}", report.seed);
    let _ = writeln!(s, "scenario = {}", meta.scenario_source);
    let _ = writeln!(s, "stochastic_mode = {:?}", meta.scenario.economics.stochastic_mode);
    let _ = writeln!(s, "config_hash = {}", config_hash(meta, report));
    let _ = writeln!(s, "population_size = {}", meta.config.population_size);
    let _ = writeln!(s, "generations = {}", meta.config.generations);
    let _ = writeln!(s, "warm_start_generations = {}", meta.config.warm_start_generations);
    let _ = writeln!(s, "front_size = {front}");
    for (k, best) in report.best_per_objective.iter().enumerate() {
        let _ = writeln!(
            s,
            "best_objective_{k} = F {:.6} USD, CE {:.6} USD, penalty {:.6}",
            best.objectives.operating_cost, best.objectives.environmental_cost, best.objectives.penalty
        );
    }
    let _ = writeln!(s, "merged_hypervolume = {:.6}", report.merged_hypervolume);
    let _ = writeln!(s, "evaluations = {}", report.evaluations());
    for b in &report.branches {
        let _ = writeln!(
            s,
            "branch {} = front {}, hypervolume {:.6}, evaluations {}, wall {:.3} s",
            b.branch.name(),
            b.archive.len(),
            b.hypervolume,
            b.evaluations,
            b.wall_time.as_secs_f64()
        );
    }
    let _ = writeln!(s, "wall_time_s = {:.3}", report.wall_time.as_secs_f64());
    s
}

/// Writes `pareto.csv`, one `schedule_<id>.csv` per front member and
/// `summary.txt` into `dir`. On failure every file written so far is removed.
pub fn write_outputs(report: &FusionReport, meta: &RunMetadata, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let model = Model::new(meta.scenario);
    let rows = front_rows(report);

    let mut files: Vec<(PathBuf, String)> = vec![(dir.join("pareto.csv"), pareto_csv(&rows))];
    for (id, (_, m)) in rows.iter().enumerate() {
        files.push((dir.join(format!("schedule_{id}.csv")), schedule_csv(&model, &m.schedule)));
    }
    files.push((dir.join("summary.txt"), summary_text(meta, report, rows.len())));

    let mut written = Vec::with_capacity(files.len());
    for (path, body) in files {
        if let Err(e) = fs::write(&path, body) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(Error::io(path, e));
        }
        written.push(path);
    }
    Ok(written)
}
