//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines show without `--nocapture`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use microgrid_dispatch::algorithms::AlgorithmConfig;
use microgrid_dispatch::costs::{balance_residual, DispatchSchedule, Model, ObjectiveMode, StochasticFactors};
use microgrid_dispatch::devices::{battery_dispatch, wind_power, BatteryParams, WindParams};
use microgrid_dispatch::fusion::{run_fused, run_single_objective, FusionReport};
use microgrid_dispatch::mocore::{dominates, hypervolume_2d, non_dominated_sort, ParetoArchive};
use microgrid_dispatch::scenario::{demo_scenario, Scenario, StochasticMode, UnitKind};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn deterministic_demo() -> Scenario {
    let mut s = demo_scenario();
    s.economics.stochastic_mode = StochasticMode::Deterministic;
    s
}

fn mt_share(s: &DispatchSchedule) -> f64 {
    let mt: f64 = s.hours.iter().map(|h| h.mt).sum();
    let de: f64 = s.hours.iter().map(|h| h.de).sum();
    mt / (mt + de)
}

/// Best schedules of the economic and environmental runs for one seed.
struct SeedRuns {
    seed: u64,
    economic: (f64, f64, DispatchSchedule),
    environmental: (f64, f64, DispatchSchedule),
}

fn single_objective_runs(scenario: &Scenario) -> (Vec<SeedRuns>, Duration) {
    let started = Instant::now();
    let runs = (1..=5)
        .map(|seed| {
            let cfg = AlgorithmConfig::default().with_seed(seed);
            let best = |mode| {
                let r = run_single_objective(scenario, &cfg, mode).expect("single-objective run");
                let o = r.best.objectives;
                (o.operating_cost, o.environmental_cost, r.best.schedule)
            };
            SeedRuns {
                seed,
                economic: best(ObjectiveMode::Economic),
                environmental: best(ObjectiveMode::Environmental),
            }
        })
        .collect();
    (runs, started.elapsed())
}

fn criterion_1(runs: &[SeedRuns], elapsed: Duration) -> Outcome {
    let ordered = runs
        .iter()
        .filter(|r| r.economic.0 < r.environmental.0 && r.environmental.1 < r.economic.1)
        .count();
    let detail = runs
        .iter()
        .map(|r| {
            format!(
                "seed {}: F {:.2}<{:.2}, CE {:.3}<{:.3}",
                r.seed, r.economic.0, r.environmental.0, r.environmental.1, r.economic.1
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(
        ordered >= 4 && elapsed < Duration::from_secs(600),
        format!("{ordered}/5 seeds ordered in {:.1} s ({detail})", elapsed.as_secs_f64()),
    )
}

fn criterion_2(runs: &[SeedRuns]) -> Outcome {
    let gaps: Vec<f64> = runs
        .iter()
        .map(|r| mt_share(&r.environmental.2) - mt_share(&r.economic.2))
        .collect();
    let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        gaps.iter().all(|g| *g >= 0.1),
        format!("MT share gap env-econ per seed {gaps:.3?}, min {min:.3}"),
    )
}

fn criterion_3() -> Outcome {
    let s = demo_scenario();
    // By hand: kg/MWh times USD/kg, summed over CO2, NOx, SO2.
    let de = 1.55 * 0.013 + 19.8 * 3.892 + 0.51 * 0.892;
    let mt = 1.65 * 0.013 + 0.50 * 3.892 + 0.01 * 0.892;
    let got_de = s.emissions.cost_per_mwh(UnitKind::DE);
    let got_mt = s.emissions.cost_per_mwh(UnitKind::MT);
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let pass = rel(got_de, de) <= 1e-9
        && rel(got_mt, mt) <= 1e-9
        && (got_de - 77.537).abs() < 5e-4
        && (got_mt - 1.976).abs() < 5e-4;
    outcome(pass, format!("DE {got_de:.6} (hand {de:.6}), MT {got_mt:.6} (hand {mt:.6}) USD/MWh"))
}

/// Fronts by repeatedly peeling off the points no remaining point dominates.
fn brute_force_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: BTreeSet<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        for i in &front {
            left.remove(i);
        }
        fronts.push(front);
    }
    fronts
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=200);
        let m = rng.gen_range(2..=3);
        // coarse grid values force ties and duplicates
        let levels = rng.gen_range(3..=50);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(0..levels) as f64).collect())
            .collect();
        if non_dominated_sort(&points) != brute_force_fronts(&points) {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(30),
        format!("{mismatches} mismatches over 1000 instances in {:.2} s", elapsed.as_secs_f64()),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let reference = [1.1, 1.1];
    let mut violations = 0;
    let mut insertions = 0;
    for round in 0..20 {
        let m = if round % 4 == 3 { 3 } else { 2 };
        let capacity = rng.gen_range(5..=40);
        let guard = (m == 2).then_some(reference);
        let mut archive: ParetoArchive<Vec<f64>> = ParetoArchive::new(capacity).with_hypervolume_guard(guard);
        let mut last_hv = 0.0;
        for _ in 0..500 {
            insertions += 1;
            let p: Vec<f64> = if m == 2 {
                // points near a convex front so truncation happens often
                let x: f64 = rng.gen();
                vec![x, (1.0 - x.sqrt()).powi(2) + 0.05 * rng.gen::<f64>()]
            } else {
                (0..m).map(|_| rng.gen()).collect()
            };
            archive.insert(p);
            let members = archive.members();
            if members.len() > capacity {
                violations += 1;
            }
            for a in members {
                if members.iter().any(|b| dominates(b, a)) {
                    violations += 1;
                }
            }
            if m == 2 {
                let pts: Vec<[f64; 2]> = members.iter().map(|v| [v[0], v[1]]).collect();
                let hv = hypervolume_2d(&pts, reference).expect("inside reference");
                if hv < last_hv - 1e-12 {
                    violations += 1;
                }
                last_hv = hv;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations over {insertions} insertions"))
}

fn criterion_6() -> Outcome {
    let p = WindParams::default();
    // Cubic ramp by hand with v_ci = 3, v_r = 15, v_co = 25, P_r = 15 kW.
    let expected = [(2.0, 0.0), (3.0, 0.0), (9.0, 702.0 / 3348.0 * 15.0), (15.0, 15.0), (25.0, 15.0), (26.0, 0.0)];
    let wind_err = expected
        .iter()
        .map(|(v, e)| (wind_power(*v, &p) - e).abs())
        .fold(0.0, f64::max);

    let battery = BatteryParams {
        power_max: 5.0,
        capacity: 25.0,
        initial_energy: 12.5,
        min_energy: 5.0,
        inverter_efficiency: 1.0,
        charge_discharge_efficiency: 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..100 {
        let mut energy = battery.initial_energy;
        let mut delivered = 0.0;
        for _ in 0..24 {
            let (next, realized) = battery_dispatch(energy, rng.gen_range(-7.0..7.0), &battery, 1.0);
            energy = next;
            delivered += realized;
        }
        let expected = battery.initial_energy - delivered;
        worst_rel = worst_rel.max(((energy - expected) / expected).abs());
    }
    outcome(
        wind_err <= 1e-12 && worst_rel <= 1e-9,
        format!("wind max error {wind_err:.1e} kW, battery max relative drift {worst_rel:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let s = demo_scenario();
    let model = Model::new(&s);
    let (lo, hi) = model.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let det = StochasticFactors::deterministic();
    let (mut f_lo, mut f_hi, mut ce_lo, mut ce_hi) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
    for i in 0..10_000u64 {
        let genome: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| l + rng.gen::<f64>() * (h - l)).collect();
        let sched = model.repair(&DispatchSchedule::from_genome(&genome)).schedule;
        let sf = StochasticFactors::for_evaluation(StochasticMode::Seeded, 7, &[i]);
        let f = model.operating_cost(&sched, &sf) / model.operating_cost(&sched, &det);
        let ce = model.environmental_cost(&sched, &sf) / model.environmental_cost(&sched, &det);
        f_lo = f_lo.min(f);
        f_hi = f_hi.max(f);
        ce_lo = ce_lo.min(ce);
        ce_hi = ce_hi.max(ce);
    }
    outcome(
        f_lo >= 1.0 && f_hi <= 1.01 && ce_lo >= 1.0 && ce_hi <= 1.08,
        format!("F ratio [{f_lo:.5}, {f_hi:.5}], CE ratio [{ce_lo:.5}, {ce_hi:.5}]"),
    )
}

fn criterion_8() -> Outcome {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().expect("tempdir")).collect();
    let run = |dir: &tempfile::TempDir, extra: &[&str]| {
        let out = dir.path().to_str().expect("utf-8 path").to_string();
        let mut args = vec!["mgdispatch", "--scenario", "demo", "--seed", "8", "--out", &out];
        args.extend_from_slice(extra);
        let code = microgrid_dispatch::cli::run(args);
        let bytes = std::fs::read(dir.path().join("pareto.csv")).unwrap_or_default();
        (code, bytes)
    };
    let a = run(&dirs[0], &[]);
    let b = run(&dirs[1], &[]);
    let c = run(&dirs[2], &["--sequential"]);
    let pass = a.0 == 0 && b.0 == 0 && c.0 == 0 && !a.1.is_empty() && a.1 == b.1 && a.1 == c.1;
    outcome(
        pass,
        format!(
            "exit codes {}/{}/{}, pareto.csv {} bytes, threaded rerun identical: {}, sequential identical: {}",
            a.0,
            b.0,
            c.0,
            a.1.len(),
            a.1 == b.1,
            a.1 == c.1
        ),
    )
}

fn criterion_9(report: &FusionReport) -> Outcome {
    let max_branch = report.branches.iter().map(|b| b.hypervolume).fold(0.0, f64::max);
    let all_non_empty = report.branches.len() == 3 && report.branches.iter().all(|b| !b.archive.is_empty());
    let sizes: Vec<String> = report
        .branches
        .iter()
        .map(|b| format!("{} {} pts HV {:.3}", b.branch, b.archive.len(), b.hypervolume))
        .collect();
    outcome(
        all_non_empty && report.merged_hypervolume >= max_branch,
        format!("merged HV {:.6} vs max branch {:.6}; {}", report.merged_hypervolume, max_branch, sizes.join(", ")),
    )
}

/// Worst violation of the hourly limits across `schedules`.
fn constraint_violations<'a>(scenario: &Scenario, schedules: impl Iterator<Item = &'a DispatchSchedule>) -> (usize, usize) {
    let model = Model::new(scenario);
    let b = &scenario.battery;
    let mut checked = 0;
    let mut bad = 0;
    for s in schedules {
        checked += 1;
        let energy = model.energy_trajectory(s);
        let ok = s.hours.iter().enumerate().all(|(t, x)| {
            balance_residual(s, scenario, t).abs() <= 1e-6
                && x.bs.abs() <= b.power_max + 1e-12
                && x.ll >= 0.0
                && x.ll <= 0.2 * scenario.load.values[t] + 1e-12
                && energy[t] >= b.min_energy - 1e-9
                && energy[t] <= b.capacity + 1e-9
        });
        if !ok {
            bad += 1;
        }
    }
    (checked, bad)
}

fn criterion_10(scenario: &Scenario, report: &FusionReport, runs: &[SeedRuns]) -> Outcome {
    let emitted = report
        .merged
        .iter()
        .chain(report.branches.iter().flat_map(|b| b.archive.iter()))
        .map(|m| &m.schedule);
    let (n1, bad1) = constraint_violations(scenario, emitted);
    let det = deterministic_demo();
    let (n2, bad2) = constraint_violations(
        &det,
        runs.iter().flat_map(|r| [&r.economic.2, &r.environmental.2]),
    );
    outcome(
        bad1 + bad2 == 0,
        format!("{} of {} emitted schedules violate a limit", bad1 + bad2, n1 + n2),
    )
}

fn criterion_11(report: &FusionReport) -> Outcome {
    let t = report.wall_time;
    outcome(
        t < Duration::from_secs(60),
        format!("fused run with default budgets took {:.2} s ({} evaluations)", t.as_secs_f64(), report.evaluations()),
    )
}

fn main() {
    let det = deterministic_demo();
    let (runs, runs_time) = single_objective_runs(&det);
    let demo = demo_scenario();
    let report = run_fused(&demo, &AlgorithmConfig::default().with_seed(11)).expect("fused run");

    let results = [
        ("1 dispatch ordering", criterion_1(&runs, runs_time)),
        ("2 fuel-source roles", criterion_2(&runs)),
        ("3 emission-cost arithmetic", criterion_3()),
        ("4 non-dominated sort oracle", criterion_4()),
        ("5 archive properties", criterion_5()),
        ("6 device exactness", criterion_6()),
        ("7 stochastic-factor bounds", criterion_7()),
        ("8 determinism", criterion_8()),
        ("9 fusion dominance", criterion_9(&report)),
        ("10 constraint compliance", criterion_10(&demo, &report, &runs)),
        ("11 desk-scale performance", criterion_11(&report)),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        println!("criterion {name}: {} | {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {}/{} passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
