//! Problem instance: time series, unit tables, battery, economics, emissions.
//!
//! A scenario is stored as a TOML document plus one CSV file per time series
//! (header `hour,value`). See `docs/scenario-format.md` for the grammar.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::devices::{btu_per_ft3_to_kwh_per_m3, BatteryParams, DeParams, HydroParams, MtParams, PvParams, WindParams};
use crate::error::{Error, Result};

/// Overrides the directory `load_demo` reads `demo.toml` from.
pub const DEMO_DIR_ENV: &str = "MICROGRID_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UnitKind {
    MT,
    HG,
    DE,
    WT,
    PV,
    ES,
}

impl UnitKind {
    /// Units that must appear in every scenario.
    pub const GENERATORS: [UnitKind; 5] = [UnitKind::MT, UnitKind::HG, UnitKind::DE, UnitKind::WT, UnitKind::PV];
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    /// Hours per entry.
    pub step: f64,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, step: f64) -> Self {
        TimeSeries { values, step }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitParams {
    pub kind: UnitKind,
    /// kW
    pub power_max: f64,
    /// USD per MWh delivered.
    pub management_fee: f64,
    pub service_life_years: u32,
    /// USD
    pub install_cost: f64,
    pub capacity_factor: f64,
    /// USD per hour at t = 0.
    pub maintenance_base_cost: f64,
    pub maintenance_base_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PollutantValues {
    pub co2: f64,
    pub nox: f64,
    pub so2: f64,
}

impl PollutantValues {
    pub fn iter(&self) -> impl Iterator<Item = f64> {
        [self.co2, self.nox, self.so2].into_iter()
    }

    pub fn dot(&self, other: &PollutantValues) -> f64 {
        self.co2 * other.co2 + self.nox * other.nox + self.so2 * other.so2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionTable {
    /// USD per kg treated.
    pub processing_cost: PollutantValues,
    /// kg per MWh, keyed by unit kind. Missing kinds emit nothing.
    #[serde(default)]
    pub factors: BTreeMap<UnitKind, PollutantValues>,
}

impl EmissionTable {
    pub fn factor(&self, kind: UnitKind) -> PollutantValues {
        self.factors.get(&kind).copied().unwrap_or_default()
    }

    /// Purification cost in USD per MWh produced by `kind`, before market correction.
    pub fn cost_per_mwh(&self, kind: UnitKind) -> f64 {
        self.processing_cost.dot(&self.factor(kind))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadPriority {
    Critical,
    Important,
    Normal,
}

impl LoadPriority {
    pub fn weight(self) -> f64 {
        match self {
            LoadPriority::Critical => 3.0,
            LoadPriority::Important => 2.0,
            LoadPriority::Normal => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StochasticMode {
    Deterministic,
    Seeded,
}

/// Interruption compensation `A + B·P·L + C·H + D·(P·H)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterruptionCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for InterruptionCoeffs {
    fn default() -> Self {
        InterruptionCoeffs {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 0.01,
        }
    }
}

fn default_history() -> f64 {
    0.3
}

fn default_priority() -> LoadPriority {
    LoadPriority::Normal
}

fn default_mode() -> StochasticMode {
    StochasticMode::Seeded
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicParams {
    pub depreciation_factor: f64,
    /// USD/m³
    pub gas_price: f64,
    pub heating_value_btu_per_ft3: f64,
    #[serde(default)]
    pub interruption: InterruptionCoeffs,
    pub interruptible_fraction: f64,
    #[serde(default = "default_priority")]
    pub load_priority: LoadPriority,
    #[serde(default = "default_history")]
    pub interruption_history: f64,
    #[serde(default = "default_mode")]
    pub stochastic_mode: StochasticMode,
}

/// Efficiency window of the micro gas turbine; fuel prices live in `EconomicParams`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MtCurve {
    pub efficiency_floor: f64,
    pub efficiency_cap: f64,
    pub reference_power: f64,
}

impl Default for MtCurve {
    fn default() -> Self {
        MtCurve {
            efficiency_floor: 0.05,
            efficiency_cap: 0.95,
            reference_power: 65.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    #[serde(default)]
    pub wind: WindParams,
    pub pv: PvParams,
    pub hydro: HydroParams,
    #[serde(default)]
    pub mt: MtCurve,
    #[serde(default)]
    pub de: DeParams,
}

/// Penalty weights in USD-equivalent per unit of violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    /// per kWh of hourly imbalance
    pub balance: f64,
    /// per kW outside a box bound
    pub bounds: f64,
    /// per kWh of battery energy outside its window
    pub energy: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        PenaltyWeights {
            balance: 1e3,
            bounds: 1e3,
            energy: 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub horizon: usize,
    pub load: TimeSeries,
    pub wind_speed: TimeSeries,
    pub irradiance: TimeSeries,
    pub water_flow: TimeSeries,
    pub units: Vec<UnitParams>,
    pub battery: BatteryParams,
    pub emissions: EmissionTable,
    pub economics: EconomicParams,
    pub devices: DeviceParams,
    pub penalty: PenaltyWeights,
}

/// One failed invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

impl Scenario {
    /// Hours per interval.
    pub fn step(&self) -> f64 {
        self.load.step
    }

    /// Parameters of `kind`. Panics if the unit is missing; validated scenarios
    /// always carry every generator.
    pub fn unit(&self, kind: UnitKind) -> &UnitParams {
        self.units
            .iter()
            .find(|u| u.kind == kind)
            .unwrap_or_else(|| panic!("scenario has no {kind} unit"))
    }

    pub fn mt_params(&self) -> MtParams {
        MtParams {
            gas_price: self.economics.gas_price,
            heating_value_kwh_per_m3: btu_per_ft3_to_kwh_per_m3(self.economics.heating_value_btu_per_ft3),
            efficiency_floor: self.devices.mt.efficiency_floor,
            efficiency_cap: self.devices.mt.efficiency_cap,
            reference_power: self.devices.mt.reference_power,
        }
    }

    pub fn peak_load(&self) -> f64 {
        self.load.max()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }
}

/// Checks every scenario invariant; an empty list means the scenario is valid.
pub fn validate(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut check = |ok: bool, field: &str, rule: &str| {
        if !ok {
            out.push(Violation {
                field: field.to_string(),
                rule: rule.to_string(),
            });
        }
    };
    let unit_interval = |x: f64| x > 0.0 && x <= 1.0;

    check(s.horizon >= 1, "horizon", "must be at least 1");
    for (name, series) in [
        ("load", &s.load),
        ("wind_speed", &s.wind_speed),
        ("irradiance", &s.irradiance),
        ("water_flow", &s.water_flow),
    ] {
        check(
            series.len() == s.horizon,
            name,
            &format!("series length {} does not match horizon {}", series.len(), s.horizon),
        );
        check(series.values.iter().all(|v| v.is_finite()), name, "values must be finite");
        check(series.values.iter().all(|v| *v >= 0.0), name, "values must be non-negative");
        check(
            series.step > 0.0 && series.step == s.load.step,
            name,
            "step must be positive and shared by all series",
        );
    }

    for kind in UnitKind::GENERATORS {
        let n = s.units.iter().filter(|u| u.kind == kind).count();
        check(n == 1, &format!("units.{kind}"), &format!("expected exactly one entry, found {n}"));
    }
    check(
        s.units.iter().filter(|u| u.kind == UnitKind::ES).count() <= 1,
        "units.ES",
        "at most one entry",
    );
    for u in &s.units {
        let f = |name: &str| format!("units.{}.{name}", u.kind);
        check(u.power_max > 0.0 && u.power_max.is_finite(), &f("power_max"), "must be positive");
        check(u.service_life_years >= 1, &f("service_life_years"), "must be at least 1");
        check(unit_interval(u.capacity_factor), &f("capacity_factor"), "must lie in (0, 1]");
        check(
            (0.0..=1.0).contains(&u.maintenance_base_prob),
            &f("maintenance_base_prob"),
            "must lie in [0, 1]",
        );
        check(u.install_cost >= 0.0, &f("install_cost"), "must be non-negative");
        check(u.management_fee >= 0.0, &f("management_fee"), "must be non-negative");
        check(u.maintenance_base_cost >= 0.0, &f("maintenance_base_cost"), "must be non-negative");
    }

    let b = &s.battery;
    check(b.power_max > 0.0, "battery.power_max", "must be positive");
    check(
        0.0 <= b.min_energy && b.min_energy <= b.initial_energy && b.initial_energy <= b.capacity,
        "battery",
        "energy ordering 0 <= min_energy <= initial_energy <= capacity violated",
    );
    check(unit_interval(b.inverter_efficiency), "battery.inverter_efficiency", "efficiency range (0, 1]");
    check(
        unit_interval(b.charge_discharge_efficiency),
        "battery.charge_discharge_efficiency",
        "efficiency range (0, 1]",
    );

    let e = &s.emissions;
    check(e.processing_cost.iter().all(|v| v >= 0.0), "emissions.processing_cost", "must be non-negative");
    for (kind, f) in &e.factors {
        check(f.iter().all(|v| v >= 0.0), &format!("emissions.factors.{kind}"), "must be non-negative");
        if matches!(kind, UnitKind::WT | UnitKind::PV | UnitKind::HG) {
            check(f.iter().all(|v| v == 0.0), &format!("emissions.factors.{kind}"), "clean units emit nothing");
        }
    }

    let ec = &s.economics;
    check(
        ec.depreciation_factor > 0.0 && ec.depreciation_factor < 1.0,
        "economics.depreciation_factor",
        "must lie in (0, 1)",
    );
    check(ec.gas_price > 0.0, "economics.gas_price", "must be positive");
    check(ec.heating_value_btu_per_ft3 > 0.0, "economics.heating_value_btu_per_ft3", "must be positive");
    check(
        (0.0..=1.0).contains(&ec.interruptible_fraction),
        "economics.interruptible_fraction",
        "must lie in [0, 1]",
    );
    check(
        (0.0..=1.0).contains(&ec.interruption_history),
        "economics.interruption_history",
        "must lie in [0, 1]",
    );

    let w = &s.devices.wind;
    check(
        0.0 < w.cut_in && w.cut_in < w.rated_speed && w.rated_speed < w.cut_out,
        "devices.wind",
        "requires 0 < cut_in < rated_speed < cut_out",
    );
    check(w.rated_power > 0.0, "devices.wind.rated_power", "must be positive");
    let pv = &s.devices.pv;
    check(pv.panel_area > 0.0, "devices.pv.panel_area", "must be positive");
    check(
        unit_interval(pv.mppt_efficiency) && unit_interval(pv.panel_efficiency),
        "devices.pv",
        "efficiency range (0, 1]",
    );
    check(
        pv.incidence_angle.abs() < std::f64::consts::FRAC_PI_2,
        "devices.pv.incidence_angle",
        "must lie in (-pi/2, pi/2)",
    );
    let h = &s.devices.hydro;
    check(
        h.water_density > 0.0 && h.gravity > 0.0 && h.head > 0.0,
        "devices.hydro",
        "density, gravity and head must be positive",
    );
    check(unit_interval(h.hydraulic_efficiency), "devices.hydro.hydraulic_efficiency", "efficiency range (0, 1]");
    let mt = &s.devices.mt;
    check(
        0.0 < mt.efficiency_floor && mt.efficiency_floor < mt.efficiency_cap && mt.efficiency_cap <= 1.0,
        "devices.mt",
        "requires 0 < efficiency_floor < efficiency_cap <= 1",
    );
    check(mt.reference_power > 0.0, "devices.mt.reference_power", "must be positive");
    let de = &s.devices.de;
    check(de.polynomial_degree >= 1, "devices.de.polynomial_degree", "must be at least 1");
    check(de.cost_scale >= 0.0, "devices.de.cost_scale", "must be non-negative");
    if let Some(c) = &de.coefficient_override {
        check(!c.is_empty() && c.iter().all(|v| v.is_finite()), "devices.de.coefficient_override", "must be finite and non-empty");
    }

    let p = &s.penalty;
    check(
        p.balance >= 0.0 && p.bounds >= 0.0 && p.energy >= 0.0,
        "penalty",
        "weights must be non-negative",
    );
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeriesFiles {
    load: String,
    wind_speed: String,
    irradiance: String,
    water_flow: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioDocument {
    horizon: usize,
    #[serde(default = "one")]
    step_hours: f64,
    series: SeriesFiles,
    units: Vec<UnitParams>,
    battery: BatteryParams,
    economics: EconomicParams,
    emissions: EmissionTable,
    devices: DeviceParams,
    #[serde(default)]
    penalty: PenaltyWeights,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
struct SeriesRow {
    hour: usize,
    value: f64,
}

fn parse_series(text: &str, origin: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::parse(origin, e))?.clone();
    if headers.len() != 2 || &headers[0] != "hour" || &headers[1] != "value" {
        return Err(Error::parse(origin, "expected header `hour,value`"));
    }
    let mut values = Vec::new();
    for (i, row) in reader.deserialize::<SeriesRow>().enumerate() {
        let row = row.map_err(|e| Error::parse(origin, e))?;
        if row.hour != i {
            return Err(Error::parse(origin, format!("row {} has hour {}, expected {i}", i + 1, row.hour)));
        }
        values.push(row.value);
    }
    Ok(values)
}

fn write_series(values: &[f64]) -> String {
    let mut out = String::from("hour,value\n");
    for (h, v) in values.iter().enumerate() {
        out.push_str(&format!("{h},{v:?}\n"));
    }
    out
}

/// Builds a scenario from TOML text, resolving series names through `read`.
fn from_document<F>(text: &str, origin: &Path, read: F) -> Result<Scenario>
where
    F: Fn(&str) -> Result<(String, PathBuf)>,
{
    let doc: ScenarioDocument = toml::from_str(text).map_err(|e| Error::parse(origin, e))?;
    let series = |name: &str| -> Result<TimeSeries> {
        let (body, path) = read(name)?;
        Ok(TimeSeries::new(parse_series(&body, &path)?, doc.step_hours))
    };
    let scenario = Scenario {
        horizon: doc.horizon,
        load: series(&doc.series.load)?,
        wind_speed: series(&doc.series.wind_speed)?,
        irradiance: series(&doc.series.irradiance)?,
        water_flow: series(&doc.series.water_flow)?,
        units: doc.units,
        battery: doc.battery,
        emissions: doc.emissions,
        economics: doc.economics,
        devices: doc.devices,
        penalty: doc.penalty,
    };
    if let Some(v) = validate(&scenario).into_iter().next() {
        return Err(Error::Validation(v.to_string()));
    }
    Ok(scenario)
}

/// Reads and validates a scenario document. Series paths resolve relative to
/// the document's directory.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    from_document(&text, path, |name| {
        let p = base.join(name);
        let body = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        Ok((body, p))
    })
}

/// Writes `scenario.toml` plus four series CSVs into `dir`; returns the document path.
pub fn write_scenario(s: &Scenario, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = SeriesFiles {
        load: "load.csv".into(),
        wind_speed: "wind_speed.csv".into(),
        irradiance: "irradiance.csv".into(),
        water_flow: "water_flow.csv".into(),
    };
    for (name, series) in [
        (&files.load, &s.load),
        (&files.wind_speed, &s.wind_speed),
        (&files.irradiance, &s.irradiance),
        (&files.water_flow, &s.water_flow),
    ] {
        let p = dir.join(name);
        fs::write(&p, write_series(&series.values)).map_err(|e| Error::io(&p, e))?;
    }
    let doc = ScenarioDocument {
        horizon: s.horizon,
        step_hours: s.step(),
        series: files,
        units: s.units.clone(),
        battery: s.battery,
        economics: s.economics.clone(),
        emissions: s.emissions.clone(),
        devices: s.devices.clone(),
        penalty: s.penalty,
    };
    let path = dir.join("scenario.toml");
    let text = toml::to_string(&doc).map_err(|e| Error::parse(&path, e))?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

const DEMO_TOML: &str = include_str!("../data/demo/demo.toml");
const DEMO_SERIES: [(&str, &str); 4] = [
    ("load.csv", include_str!("../data/demo/load.csv")),
    ("wind_speed.csv", include_str!("../data/demo/wind_speed.csv")),
    ("irradiance.csv", include_str!("../data/demo/irradiance.csv")),
    ("water_flow.csv", include_str!("../data/demo/water_flow.csv")),
];

/// The bundled 24-hour demo microgrid.
pub fn demo_scenario() -> Scenario {
    from_document(DEMO_TOML, Path::new("<demo>/demo.toml"), |name| {
        DEMO_SERIES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, body)| (body.to_string(), PathBuf::from(format!("<demo>/{n}"))))
            .ok_or_else(|| Error::parse("<demo>", format!("unknown series {name}")))
    })
    .expect("bundled demo scenario is valid")
}

/// The demo scenario, read from `$MICROGRID_DATA_DIR/demo.toml` when the
/// variable is set and from the bundled copy otherwise.
pub fn load_demo() -> Result<Scenario> {
    match std::env::var_os(DEMO_DIR_ENV) {
        Some(dir) => load_scenario(Path::new(&dir).join("demo.toml")),
        None => Ok(demo_scenario()),
    }
}
