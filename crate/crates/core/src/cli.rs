//! The `mgdispatch` command line.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use crate::algorithms::AlgorithmConfig;
use crate::costs::ObjectiveMode;
use crate::error::Error;
use crate::fusion::{run_pipeline, Branch};
use crate::output::{front_rows, write_outputs, RunMetadata};
use crate::scenario::{load_demo, load_scenario, Scenario, StochasticMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SCENARIO: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Multi,
    Economic,
    Environmental,
}

impl From<Mode> for ObjectiveMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Multi => ObjectiveMode::Multi,
            Mode::Economic => ObjectiveMode::Economic,
            Mode::Environmental => ObjectiveMode::Environmental,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Moga,
    MogaMosa,
    MogaMopso,
    MogaMoaco,
    Fused,
}

impl Algorithm {
    pub fn branches(self) -> Vec<Branch> {
        match self {
            Algorithm::Moga => vec![Branch::Moga],
            Algorithm::MogaMosa => vec![Branch::Mosa],
            Algorithm::MogaMopso => vec![Branch::Mopso],
            Algorithm::MogaMoaco => vec![Branch::Moaco],
            Algorithm::Fused => Branch::FUSED.to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Moga => "moga",
            Algorithm::MogaMosa => "moga-mosa",
            Algorithm::MogaMopso => "moga-mopso",
            Algorithm::MogaMoaco => "moga-moaco",
            Algorithm::Fused => "fused",
        }
    }
}

/// Day-ahead microgrid dispatch with fused GA/SA/PSO/ACO search.
#[derive(Debug, Clone, Parser)]
#[command(name = "mgdispatch", version)]
pub struct RunRequest {
    /// Scenario TOML file, or `demo` for the bundled scenario.
    #[arg(long, default_value = "demo")]
    pub scenario: String,

    #[arg(long, value_enum, default_value_t = Mode::Multi)]
    pub mode: Mode,

    #[arg(long, value_enum, default_value_t = Algorithm::Fused)]
    pub algorithm: Algorithm,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Iterations of the GA and of every branch.
    #[arg(long)]
    pub generations: Option<usize>,

    /// GA generations before the branches start.
    #[arg(long)]
    pub warm_start: Option<usize>,

    /// Population, swarm and colony size.
    #[arg(long)]
    pub population: Option<usize>,

    #[arg(long, default_value = "results")]
    pub out: PathBuf,

    /// Fix every stochastic cost factor at its deterministic value.
    #[arg(long)]
    pub deterministic: bool,

    /// Evaluate on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

impl RunRequest {
    pub fn config(&self) -> AlgorithmConfig {
        let mut cfg = AlgorithmConfig::default().with_seed(self.seed);
        if let Some(g) = self.generations {
            cfg.generations = g;
        }
        if let Some(w) = self.warm_start {
            cfg.warm_start_generations = w;
        }
        if let Some(p) = self.population {
            cfg.population_size = p;
            cfg.aco_ants = p;
        }
        cfg.parallel = !self.sequential;
        cfg
    }

    pub fn load_scenario(&self) -> Result<Scenario, Error> {
        let mut s = if self.scenario == "demo" {
            load_demo()?
        } else {
            load_scenario(&self.scenario)?
        };
        if self.deterministic {
            s.economics.stochastic_mode = StochasticMode::Deterministic;
        }
        Ok(s)
    }
}

/// Parses `args` (program name first), runs the request and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let req = match RunRequest::try_parse_from(args) {
        Ok(r) => r,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = req.config();
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let scenario = match req.load_scenario() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_SCENARIO;
        }
    };

    let started = Instant::now();
    let report = match run_pipeline(&scenario, &cfg, req.mode.into(), &req.algorithm.branches()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RUNTIME;
        }
    };
    let meta = RunMetadata {
        algorithm: req.algorithm.name(),
        scenario_source: &req.scenario,
        scenario: &scenario,
        config: &cfg,
    };
    if let Err(e) = write_outputs(&report, &meta, &req.out) {
        eprintln!("error: {e}");
        return EXIT_RUNTIME;
    }

    let rows = front_rows(&report);
    let best_f = rows.iter().map(|r| r.1.objectives.operating_cost).fold(f64::INFINITY, f64::min);
    let best_ce = rows
        .iter()
        .map(|r| r.1.objectives.environmental_cost)
        .fold(f64::INFINITY, f64::min);
    println!(
        "{}: front {} | best F {:.2} USD | best CE {:.2} USD | {:.2} s | {}",
        req.algorithm.name(),
        rows.len(),
        best_f,
        best_ce,
        started.elapsed().as_secs_f64(),
        req.out.display()
    );
    EXIT_OK
}
