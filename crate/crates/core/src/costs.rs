//! Operating cost, environmental cost and constraint handling for a dispatch
//! schedule.
//!
//! Rates quoted "per MW" in the unit and emission tables are charged per MWh of
//! delivered energy. Battery power is positive when discharging.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::devices::{self, battery_dispatch, MtParams};
use crate::rng;
use crate::scenario::{EconomicParams, Scenario, StochasticMode, UnitKind, UnitParams};

/// Hourly imbalance below this magnitude counts as balanced (kW).
pub const BALANCE_TOLERANCE: f64 = 1e-6;
const BOUND_TOLERANCE: f64 = 1e-9;

/// Setpoints for one interval, kW.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HourlyDispatch {
    pub mt: f64,
    pub de: f64,
    pub hg: f64,
    /// Battery power at the bus, positive = discharge.
    pub bs: f64,
    /// Interrupted load.
    pub ll: f64,
}

/// Number of decision variables per interval.
pub const GENES_PER_HOUR: usize = 5;

impl HourlyDispatch {
    pub fn to_array(self) -> [f64; GENES_PER_HOUR] {
        [self.mt, self.de, self.hg, self.bs, self.ll]
    }

    pub fn from_slice(g: &[f64]) -> Self {
        HourlyDispatch {
            mt: g[0],
            de: g[1],
            hg: g[2],
            bs: g[3],
            ll: g[4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DispatchSchedule {
    pub hours: Vec<HourlyDispatch>,
}

impl DispatchSchedule {
    pub fn zeros(horizon: usize) -> Self {
        DispatchSchedule {
            hours: vec![HourlyDispatch::default(); horizon],
        }
    }

    /// Decodes a flat genome laid out hour-major as `[mt, de, hg, bs, ll]`.
    pub fn from_genome(genome: &[f64]) -> Self {
        DispatchSchedule {
            hours: genome.chunks_exact(GENES_PER_HOUR).map(HourlyDispatch::from_slice).collect(),
        }
    }

    pub fn to_genome(&self) -> Vec<f64> {
        self.hours.iter().flat_map(|h| h.to_array()).collect()
    }

    pub fn horizon(&self) -> usize {
        self.hours.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// USD
    pub operating_cost: f64,
    /// USD
    pub environmental_cost: f64,
    /// USD-equivalent, zero for feasible schedules.
    pub penalty: f64,
}

/// Which objectives a search compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveMode {
    /// Both costs, penalty added to each.
    Multi,
    /// Operating cost plus penalty only.
    Economic,
    /// Environmental cost plus penalty only.
    Environmental,
}

impl ObjectiveVector {
    pub fn penalized(&self) -> [f64; 2] {
        [self.operating_cost + self.penalty, self.environmental_cost + self.penalty]
    }

    pub fn fitness(&self, mode: ObjectiveMode) -> Vec<f64> {
        let [f, ce] = self.penalized();
        match mode {
            ObjectiveMode::Multi => vec![f, ce],
            ObjectiveMode::Economic => vec![f],
            ObjectiveMode::Environmental => vec![ce],
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.penalty == 0.0
    }
}

/// Multiplicative market/uncertainty corrections. All equal one in
/// deterministic mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticFactors {
    /// Applied to fuel, management fees and interruption compensation; `1 + U(0, 0.01)`.
    pub eps: f64,
    /// Depreciation; `1 + U(0, 0.01)`.
    pub eps1: f64,
    /// Maintenance; `1 + U(0, 0.01)`.
    pub eps2: f64,
    /// Pollutant treatment prices; `1 + U(0, 0.08)`.
    pub eps3: f64,
}

impl StochasticFactors {
    pub const OPERATING_SPREAD: f64 = 0.01;
    pub const EMISSION_SPREAD: f64 = 0.08;

    pub fn deterministic() -> Self {
        StochasticFactors {
            eps: 1.0,
            eps1: 1.0,
            eps2: 1.0,
            eps3: 1.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut u = |spread: f64| 1.0 + spread * rng.gen::<f64>();
        StochasticFactors {
            eps: u(Self::OPERATING_SPREAD),
            eps1: u(Self::OPERATING_SPREAD),
            eps2: u(Self::OPERATING_SPREAD),
            eps3: u(Self::EMISSION_SPREAD),
        }
    }

    /// Factors for one evaluation, keyed so results do not depend on
    /// evaluation order.
    pub fn for_evaluation(mode: StochasticMode, seed: u64, key: &[u64]) -> Self {
        match mode {
            StochasticMode::Deterministic => Self::deterministic(),
            StochasticMode::Seeded => Self::sample(&mut rng::stream(seed, "stochastic-factors", key)),
        }
    }
}

/// Capital recovery cost in USD per kWh of expected annual output.
pub fn depreciation_cost(u: &UnitParams, d: f64) -> f64 {
    let m = f64::from(u.service_life_years) as i32;
    let growth = (1.0 + d).powi(m);
    let crf = d * growth / (growth - 1.0);
    u.install_cost / (8760.0 * u.power_max * u.capacity_factor) * crf
}

/// Maintenance cost rate in USD per hour at elapsed time `t` hours.
pub fn maintenance_cost(u: &UnitParams, t: f64) -> f64 {
    let cost = 3014.0 / 3125.0 * u.maintenance_base_cost * (286.0 * t / 3200.0).exp();
    let prob = (1.0 + t / 502.0 + t * t / 3398.0) * u.maintenance_base_prob;
    cost * prob
}

/// Compensation in USD for interrupting `p_ll` kW during one interval.
pub fn interruption_cost(p_ll: f64, econ: &EconomicParams) -> f64 {
    let k = &econ.interruption;
    let l = econ.load_priority.weight();
    let h = econ.interruption_history;
    k.a + k.b * p_ll * l + k.c * h + k.d * (p_ll * h).powi(2)
}

/// Exogenous quantities and box bounds for one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HourContext {
    pub load: f64,
    pub wind: f64,
    pub pv: f64,
    /// min(HG rating, hydro power available from the water flow)
    pub hydro_max: f64,
    /// interruptible_fraction × load
    pub ll_max: f64,
    /// Depreciation + maintenance for all units, USD for the interval (before corrections).
    pub depreciation: f64,
    pub maintenance: f64,
}

/// Cost model of a scenario with all per-hour constants precomputed.
#[derive(Debug, Clone)]
pub struct Model<'a> {
    pub scenario: &'a Scenario,
    pub hours: Vec<HourContext>,
    mt: MtParams,
    mt_max: f64,
    de_max: f64,
    step: f64,
    /// USD per MWh
    fees: Fees,
    /// USD per MWh, before the emission correction factor
    emission_mt: f64,
    emission_de: f64,
}

#[derive(Debug, Clone, Copy)]
struct Fees {
    mt: f64,
    de: f64,
    hg: f64,
    wt: f64,
    pv: f64,
}

/// Result of balance repair: a box-feasible schedule with its battery
/// energy at the end of each interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Repaired {
    pub schedule: DispatchSchedule,
    pub energy: Vec<f64>,
}

/// Itemized operating cost for one evaluation, USD.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub depreciation: f64,
    pub maintenance: f64,
    pub fuel: f64,
    pub management: f64,
    pub interruption: f64,
    pub environmental: f64,
}

impl<'a> Model<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let step = scenario.step();
        let d = scenario.economics.depreciation_factor;
        let dev = &scenario.devices;
        let hg_max = scenario.unit(UnitKind::HG).power_max;
        let pv_max = scenario.unit(UnitKind::PV).power_max;
        let hours = (0..scenario.horizon)
            .map(|t| {
                let load = scenario.load.values[t];
                let elapsed = t as f64 * step;
                let (depreciation, maintenance) = scenario.units.iter().fold((0.0, 0.0), |(dep, om), u| {
                    (
                        dep + depreciation_cost(u, d) * u.power_max * u.capacity_factor * step,
                        om + maintenance_cost(u, elapsed) * step,
                    )
                });
                HourContext {
                    load,
                    wind: devices::wind_power(scenario.wind_speed.values[t], &dev.wind),
                    pv: devices::pv_power(scenario.irradiance.values[t], &dev.pv, pv_max),
                    hydro_max: devices::hydro_power(scenario.water_flow.values[t], &dev.hydro, hg_max),
                    ll_max: scenario.economics.interruptible_fraction * load,
                    depreciation,
                    maintenance,
                }
            })
            .collect();
        let fee = |k| scenario.unit(k).management_fee;
        Model {
            scenario,
            hours,
            mt: scenario.mt_params(),
            mt_max: scenario.unit(UnitKind::MT).power_max,
            de_max: scenario.unit(UnitKind::DE).power_max,
            step,
            fees: Fees {
                mt: fee(UnitKind::MT),
                de: fee(UnitKind::DE),
                hg: fee(UnitKind::HG),
                wt: fee(UnitKind::WT),
                pv: fee(UnitKind::PV),
            },
            emission_mt: scenario.emissions.cost_per_mwh(UnitKind::MT),
            emission_de: scenario.emissions.cost_per_mwh(UnitKind::DE),
        }
    }

    pub fn horizon(&self) -> usize {
        self.hours.len()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Lower and upper box bounds of the flat genome.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let pb = self.scenario.battery.power_max;
        let mut lo = Vec::with_capacity(self.horizon() * GENES_PER_HOUR);
        let mut hi = Vec::with_capacity(self.horizon() * GENES_PER_HOUR);
        for h in &self.hours {
            lo.extend_from_slice(&[0.0, 0.0, 0.0, -pb, 0.0]);
            hi.extend_from_slice(&[self.mt_max, self.de_max, h.hydro_max, pb, h.ll_max]);
        }
        (lo, hi)
    }

    fn clamp_hour(&self, t: usize, x: HourlyDispatch) -> HourlyDispatch {
        let h = &self.hours[t];
        let pb = self.scenario.battery.power_max;
        HourlyDispatch {
            mt: x.mt.clamp(0.0, self.mt_max),
            de: x.de.clamp(0.0, self.de_max),
            hg: x.hg.clamp(0.0, h.hydro_max),
            bs: x.bs.clamp(-pb, pb),
            ll: x.ll.clamp(0.0, h.ll_max),
        }
    }

    /// Supply minus demand at the bus for interval `t`, kW.
    ///
    /// Served load is referred through the inverter, so with unit inverter
    /// efficiency this is `Σ P_i + P_LL − (P_L − P_BS)`.
    pub fn residual(&self, t: usize, x: &HourlyDispatch) -> f64 {
        let h = &self.hours[t];
        let eta = self.scenario.battery.inverter_efficiency;
        let supply = x.mt + x.de + x.hg + h.wind + h.pv + x.bs;
        if eta == 1.0 {
            supply + x.ll - h.load
        } else {
            supply - (h.load - x.ll) / eta
        }
    }

    /// Clamps every setpoint into its box, runs the battery through its energy
    /// window and rebalances each interval.
    ///
    /// Controllable units are rescaled toward the balance point keeping their
    /// ratios; only when they saturate does the repair move interrupted load
    /// and then the battery.
    pub fn repair(&self, schedule: &DispatchSchedule) -> Repaired {
        let battery = &self.scenario.battery;
        let eta_inv = battery.inverter_efficiency;
        let mut energy = battery.initial_energy;
        let mut hours = Vec::with_capacity(self.horizon());
        let mut trajectory = Vec::with_capacity(self.horizon());
        for (t, raw) in schedule.hours.iter().enumerate().take(self.horizon()) {
            let h = &self.hours[t];
            let mut x = self.clamp_hour(t, *raw);
            let (mut e_next, bs) = battery_dispatch(energy, x.bs, battery, self.step);
            x.bs = bs;

            let caps = [self.mt_max, self.de_max, h.hydro_max];
            let cap_total: f64 = caps.iter().sum();
            let need = |x: &HourlyDispatch| (h.load - x.ll) / eta_inv - h.wind - h.pv - x.bs;

            let mut target = need(&x);
            if target > cap_total {
                let short = target - cap_total;
                x.ll = (x.ll + short * eta_inv).min(h.ll_max);
                target = need(&x);
                if target > cap_total {
                    let (e, bs) = battery_dispatch(energy, x.bs + (target - cap_total), battery, self.step);
                    e_next = e;
                    x.bs = bs;
                    target = need(&x);
                }
            } else if target < 0.0 {
                x.ll = (x.ll + target * eta_inv).max(0.0);
                target = need(&x);
                if target < 0.0 {
                    let (e, bs) = battery_dispatch(energy, x.bs + target, battery, self.step);
                    e_next = e;
                    x.bs = bs;
                    target = need(&x);
                }
            }
            let [mt, de, hg] = waterfill([x.mt, x.de, x.hg], caps, target.clamp(0.0, cap_total));
            x.mt = mt;
            x.de = de;
            x.hg = hg;

            energy = e_next;
            hours.push(x);
            trajectory.push(energy);
        }
        Repaired {
            schedule: DispatchSchedule { hours },
            energy: trajectory,
        }
    }

    /// Battery energy after each interval, integrating the schedule's battery
    /// power without clipping.
    pub fn energy_trajectory(&self, schedule: &DispatchSchedule) -> Vec<f64> {
        let b = &self.scenario.battery;
        let mut e = b.initial_energy;
        schedule
            .hours
            .iter()
            .map(|x| {
                e -= x.bs * b.charge_discharge_efficiency * self.step;
                e
            })
            .collect()
    }

    /// Constraint penalty of the schedule as given (no repair).
    pub fn penalty(&self, schedule: &DispatchSchedule) -> f64 {
        let w = &self.scenario.penalty;
        let b = &self.scenario.battery;
        let mut imbalance = 0.0;
        let mut bounds = 0.0;
        for (t, x) in schedule.hours.iter().enumerate() {
            let r = self.residual(t, x).abs();
            if r > BALANCE_TOLERANCE {
                imbalance += r * self.step;
            }
            let h = &self.hours[t];
            let excess = |v: f64, lo: f64, hi: f64| {
                let e = (lo - v).max(0.0) + (v - hi).max(0.0);
                if e > BOUND_TOLERANCE {
                    e
                } else {
                    0.0
                }
            };
            bounds += excess(x.mt, 0.0, self.mt_max)
                + excess(x.de, 0.0, self.de_max)
                + excess(x.hg, 0.0, h.hydro_max)
                + excess(x.bs, -b.power_max, b.power_max)
                + excess(x.ll, 0.0, h.ll_max);
        }
        let mut excursion = 0.0;
        for e in self.energy_trajectory(schedule) {
            let out = (b.min_energy - e).max(0.0) + (e - b.capacity).max(0.0);
            if out > BOUND_TOLERANCE {
                excursion += out;
            }
        }
        // a short schedule leaves hours unserved
        for h in self.hours.iter().skip(schedule.hours.len()) {
            imbalance += h.load * self.step;
        }
        w.balance * imbalance + w.bounds * bounds + w.energy * excursion
    }

    pub fn breakdown(&self, schedule: &DispatchSchedule) -> CostBreakdown {
        let econ = &self.scenario.economics;
        let mwh = self.step / 1000.0;
        let mut c = CostBreakdown::default();
        for (h, x) in self.hours.iter().zip(&schedule.hours) {
            c.depreciation += h.depreciation;
            c.maintenance += h.maintenance;
            c.fuel += devices::mt_fuel_cost(x.mt, self.step, &self.mt)
                + devices::de_fuel_cost(x.de, self.de_max, &self.scenario.devices.de) * self.step;
            c.management += mwh
                * (self.fees.mt * x.mt
                    + self.fees.de * x.de
                    + self.fees.hg * x.hg
                    + self.fees.wt * h.wind
                    + self.fees.pv * h.pv);
            c.interruption += interruption_cost(x.ll, econ);
            c.environmental += mwh * (self.emission_mt * x.mt + self.emission_de * x.de);
        }
        c
    }

    /// Generation cost: corrected depreciation and maintenance plus fuel and
    /// management fees.
    pub fn generation_cost(&self, schedule: &DispatchSchedule, sf: &StochasticFactors) -> f64 {
        let c = self.breakdown(schedule);
        c.depreciation * sf.eps1 + c.maintenance * sf.eps2 + c.fuel + c.management
    }

    /// Operating cost. Each term carries exactly one correction factor:
    /// depreciation `ε₁`, maintenance `ε₂`, everything else `ε`.
    pub fn operating_cost(&self, schedule: &DispatchSchedule, sf: &StochasticFactors) -> f64 {
        let c = self.breakdown(schedule);
        c.depreciation * sf.eps1 + c.maintenance * sf.eps2 + (c.fuel + c.management + c.interruption) * sf.eps
    }

    pub fn environmental_cost(&self, schedule: &DispatchSchedule, sf: &StochasticFactors) -> f64 {
        self.breakdown(schedule).environmental * sf.eps3
    }

    /// Costs and penalty of a schedule taken as-is.
    pub fn objectives(&self, schedule: &DispatchSchedule, sf: &StochasticFactors) -> ObjectiveVector {
        let c = self.breakdown(schedule);
        ObjectiveVector {
            operating_cost: c.depreciation * sf.eps1
                + c.maintenance * sf.eps2
                + (c.fuel + c.management + c.interruption) * sf.eps,
            environmental_cost: c.environmental * sf.eps3,
            penalty: self.penalty(schedule),
        }
    }

    /// Repairs the schedule, then scores the repaired version.
    pub fn evaluate(&self, schedule: &DispatchSchedule, sf: &StochasticFactors) -> (Repaired, ObjectiveVector) {
        let repaired = self.repair(schedule);
        let obj = self.objectives(&repaired.schedule, sf);
        (repaired, obj)
    }
}

/// Moves the three controllable outputs so they sum to `target`, keeping
/// their ratios where possible. `target` must lie in `[0, Σ caps]`.
fn waterfill(mut v: [f64; 3], caps: [f64; 3], target: f64) -> [f64; 3] {
    let total: f64 = v.iter().sum();
    if total >= target {
        if total > 0.0 {
            let k = target / total;
            v.iter_mut().for_each(|x| *x *= k);
        }
        return v;
    }
    let mut remaining = target - total;
    for _ in 0..v.len() {
        let free: Vec<usize> = (0..v.len()).filter(|&i| v[i] < caps[i]).collect();
        if free.is_empty() || remaining <= 0.0 {
            break;
        }
        let by_value: f64 = free.iter().map(|&i| v[i]).sum();
        let weight = |i: usize| if by_value > 0.0 { v[i] } else { caps[i] - v[i] };
        let norm: f64 = free.iter().map(|&i| weight(i)).sum();
        if norm <= 0.0 {
            break;
        }
        let mut used = 0.0;
        let share: Vec<(usize, f64)> = free.iter().map(|&i| (i, remaining * weight(i) / norm)).collect();
        for (i, add) in share {
            let room = caps[i] - v[i];
            if add >= room {
                v[i] = caps[i];
                used += room;
            } else {
                v[i] += add;
                used += add;
            }
        }
        remaining -= used;
    }
    v
}

pub fn generation_cost(schedule: &DispatchSchedule, scenario: &Scenario, sf: &StochasticFactors) -> f64 {
    Model::new(scenario).generation_cost(schedule, sf)
}

pub fn operating_cost(schedule: &DispatchSchedule, scenario: &Scenario, sf: &StochasticFactors) -> f64 {
    Model::new(scenario).operating_cost(schedule, sf)
}

pub fn environmental_cost(schedule: &DispatchSchedule, scenario: &Scenario, sf: &StochasticFactors) -> f64 {
    Model::new(scenario).environmental_cost(schedule, sf)
}

pub fn balance_residual(schedule: &DispatchSchedule, scenario: &Scenario, t: usize) -> f64 {
    Model::new(scenario).residual(t, &schedule.hours[t])
}

pub fn penalty(schedule: &DispatchSchedule, scenario: &Scenario) -> f64 {
    Model::new(scenario).penalty(schedule)
}

/// Repairs and scores a schedule in one pass.
pub fn evaluate(schedule: &DispatchSchedule, scenario: &Scenario, sf: &StochasticFactors) -> ObjectiveVector {
    Model::new(scenario).evaluate(schedule, sf).1
}
