//! Runs one branch and writes the CSV and summary files without the CLI.

use microgrid_dispatch::algorithms::AlgorithmConfig;
use microgrid_dispatch::costs::ObjectiveMode;
use microgrid_dispatch::fusion::{run_pipeline, Branch};
use microgrid_dispatch::output::{write_outputs, RunMetadata};
use microgrid_dispatch::scenario::demo_scenario;

fn main() -> microgrid_dispatch::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "results-example".into());
    let s = demo_scenario();
    let cfg = AlgorithmConfig::default().with_seed(1);
    let report = run_pipeline(&s, &cfg, ObjectiveMode::Multi, &[Branch::Mopso])?;
    let meta = RunMetadata {
        algorithm: "moga-mopso",
        scenario_source: "demo",
        scenario: &s,
        config: &cfg,
    };
    for path in write_outputs(&report, &meta, &out)?.iter().take(4) {
        println!("{}", path.display());
    }
    println!("... {} schedules in {out}", report.merged.len());
    Ok(())
}
