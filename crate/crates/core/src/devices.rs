//! Per-device physics and fuel-cost models.
//!
//! Every function here is pure. Power is in kW, energy in kWh, time in hours.

use serde::{Deserialize, Serialize};

/// 1 Btu in kWh.
pub const KWH_PER_BTU: f64 = 0.000_293_071;
/// 1 ft³ in m³.
pub const M3_PER_FT3: f64 = 0.028_316_8;

/// Converts a heating value in Btu/ft³ to kWh/m³.
pub fn btu_per_ft3_to_kwh_per_m3(btu_per_ft3: f64) -> f64 {
    btu_per_ft3 * KWH_PER_BTU / M3_PER_FT3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindParams {
    /// m/s
    pub cut_in: f64,
    /// m/s
    pub cut_out: f64,
    /// m/s
    pub rated_speed: f64,
    /// kW
    pub rated_power: f64,
}

impl Default for WindParams {
    fn default() -> Self {
        WindParams {
            cut_in: 3.0,
            cut_out: 25.0,
            rated_speed: 15.0,
            rated_power: 15.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PvParams {
    /// m²
    pub panel_area: f64,
    pub mppt_efficiency: f64,
    pub panel_efficiency: f64,
    /// Incidence angle in radians.
    pub incidence_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroParams {
    /// kg/m³
    pub water_density: f64,
    /// m/s²
    pub gravity: f64,
    /// m
    pub head: f64,
    pub hydraulic_efficiency: f64,
    /// Turbine/water friction coefficient, kg/m.
    pub friction_water: f64,
    /// Turbine/shaft friction coefficient, N·m·s².
    pub friction_shaft: f64,
    /// m/s
    pub water_speed: f64,
    /// rad/s
    pub shaft_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MtParams {
    /// USD/m³
    pub gas_price: f64,
    /// Lower heating value, kWh/m³.
    pub heating_value_kwh_per_m3: f64,
    pub efficiency_floor: f64,
    pub efficiency_cap: f64,
    /// Normalizing power of the efficiency curve, kW.
    pub reference_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeParams {
    pub polynomial_degree: u32,
    /// Replaces the generated `0.284 - 1.426 log10(i)` coefficients when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient_override: Option<Vec<f64>>,
    /// USD per hour of unit-polynomial value.
    pub cost_scale: f64,
    /// USD per hour.
    #[serde(default)]
    pub cost_floor: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams {
            polynomial_degree: 4,
            coefficient_override: None,
            cost_scale: 10.0,
            cost_floor: 0.0,
        }
    }
}

impl DeParams {
    pub fn coefficients(&self) -> Vec<f64> {
        match &self.coefficient_override {
            Some(c) => c.clone(),
            None => (1..=self.polynomial_degree)
                .map(|i| 0.284 - 1.426 * f64::from(i).log10())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryParams {
    /// Charge and discharge limit, kW.
    pub power_max: f64,
    /// kWh
    pub capacity: f64,
    /// kWh
    pub initial_energy: f64,
    /// kWh
    pub min_energy: f64,
    pub inverter_efficiency: f64,
    pub charge_discharge_efficiency: f64,
}

/// Piecewise wind-turbine power curve.
pub fn wind_power(v: f64, p: &WindParams) -> f64 {
    if v < p.cut_in || v > p.cut_out {
        0.0
    } else if v <= p.rated_speed {
        let ci3 = p.cut_in.powi(3);
        (v.powi(3) - ci3) / (p.rated_speed.powi(3) - ci3) * p.rated_power
    } else {
        p.rated_power
    }
}

/// PV output under MPPT. `irradiance` is in W/m²; result clamped to `power_max`.
pub fn pv_power(irradiance: f64, p: &PvParams, power_max: f64) -> f64 {
    let watts = irradiance * p.mppt_efficiency * p.panel_area * p.panel_efficiency * p.incidence_angle.cos();
    (watts / 1000.0).clamp(0.0, power_max)
}

fn hydraulic_power_w(flow: f64, p: &HydroParams) -> f64 {
    p.water_density * p.gravity * flow * p.head
}

/// Available hydro power for a water flow in m³/s, clamped to `power_max`.
pub fn hydro_power(flow: f64, p: &HydroParams, power_max: f64) -> f64 {
    (hydraulic_power_w(flow, p) * p.hydraulic_efficiency / 1000.0).clamp(0.0, power_max)
}

/// Turbomachinery friction loss in kW.
pub fn hydro_mech_loss(p: &HydroParams) -> f64 {
    (p.friction_water * p.water_speed.powi(2) + p.friction_shaft * p.shaft_speed.powi(2)) / 1000.0
}

/// Turbine efficiency, clamped to `[0, 1]`. Returns `None` when the hydraulic
/// power is zero.
pub fn hydro_turbine_efficiency(flow: f64, p: &HydroParams) -> Option<f64> {
    let hydraulic_kw = hydraulic_power_w(flow, p) / 1000.0;
    if hydraulic_kw <= 0.0 {
        return None;
    }
    Some(((hydraulic_kw - hydro_mech_loss(p)) / hydraulic_kw).clamp(0.0, 1.0))
}

/// Micro gas turbine efficiency curve before clamping.
pub fn mt_efficiency_raw(power: f64, reference_power: f64) -> f64 {
    let x = power / reference_power;
    (1..=4)
        .map(|i| {
            let i = f64::from(i);
            0.372 / (1.0 + (i / 3.445).powf(3.529)) * x.powf(i)
        })
        .sum()
}

pub fn mt_efficiency(power: f64, p: &MtParams) -> f64 {
    mt_efficiency_raw(power, p.reference_power).clamp(p.efficiency_floor, p.efficiency_cap)
}

/// Gas cost in USD of running the turbine at `power` for `dt` hours.
pub fn mt_fuel_cost(power: f64, dt: f64, p: &MtParams) -> f64 {
    if power <= 0.0 {
        return 0.0;
    }
    p.gas_price * power * dt / (p.heating_value_kwh_per_m3 * mt_efficiency(power, p))
}

/// Diesel consumption polynomial on per-unit power, before scaling and flooring.
pub fn de_fuel_polynomial(per_unit: f64, p: &DeParams) -> f64 {
    p.coefficients()
        .iter()
        .zip(1..)
        .map(|(c, i)| c * per_unit.powi(i))
        .sum()
}

/// Diesel fuel cost in USD per hour.
pub fn de_fuel_cost(power: f64, power_max: f64, p: &DeParams) -> f64 {
    let per_unit = power / power_max;
    (p.cost_scale * de_fuel_polynomial(per_unit, p)).max(p.cost_floor)
}

/// Stored-energy change for a requested bus-side battery power.
///
/// `request > 0` discharges, `request < 0` charges. The request is clipped to
/// `power_max` and to what the energy window `[min_energy, capacity]` allows.
/// Returns `(new_energy, realized_power)`.
pub fn battery_dispatch(energy: f64, request: f64, p: &BatteryParams, dt: f64) -> (f64, f64) {
    let eta = p.charge_discharge_efficiency;
    let request = request.clamp(-p.power_max, p.power_max);
    if request >= 0.0 {
        let room = ((energy - p.min_energy) / (eta * dt)).max(0.0);
        let power = request.min(room);
        // snap onto the bound so rounding cannot leave the window
        let new_energy = if power == room { p.min_energy.min(energy) } else { energy - power * eta * dt };
        (new_energy, power)
    } else {
        let room = ((p.capacity - energy) / (eta * dt)).max(0.0);
        let power = (-request).min(room);
        let new_energy = if power == room { p.capacity.max(energy) } else { energy + power * eta * dt };
        (new_energy, -power)
    }
}

/// One battery interval from the generation/load view.
///
/// Surplus `p_total - p_load / η_inv` charges the battery, deficit discharges
/// it. Returns `(new_energy, p_bs)` with `p_bs > 0` meaning discharge.
pub fn battery_step(energy: f64, p_total: f64, p_load: f64, p: &BatteryParams, dt: f64) -> (f64, f64) {
    let request = p_load / p.inverter_efficiency - p_total;
    battery_dispatch(energy, request, p, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hydro() -> HydroParams {
        HydroParams {
            water_density: 1000.0,
            gravity: 9.81,
            head: 10.0,
            hydraulic_efficiency: 0.8,
            friction_water: 1.0,
            friction_shaft: 1.0,
            water_speed: 2.0,
            shaft_speed: 3.0,
        }
    }

    fn battery() -> BatteryParams {
        BatteryParams {
            power_max: 5.0,
            capacity: 25.0,
            initial_energy: 12.5,
            min_energy: 5.0,
            inverter_efficiency: 0.9,
            charge_discharge_efficiency: 0.9,
        }
    }

    fn mt() -> MtParams {
        MtParams {
            gas_price: 0.31,
            heating_value_kwh_per_m3: btu_per_ft3_to_kwh_per_m3(1000.0),
            efficiency_floor: 0.05,
            efficiency_cap: 0.95,
            reference_power: 65.0,
        }
    }

    #[test]
    fn wind_curve_points() {
        let p = WindParams::default();
        assert_eq!(wind_power(2.0, &p), 0.0);
        assert_eq!(wind_power(15.0, &p), 15.0);
        // (729 - 27) / (3375 - 27) * 15
        assert_relative_eq!(wind_power(9.0, &p), 702.0 / 3348.0 * 15.0, max_relative = 1e-12);
        assert_relative_eq!(wind_power(9.0, &p), 3.1452, epsilon = 1e-4);
        assert_eq!(wind_power(25.5, &p), 0.0);
    }

    #[test]
    fn pv_examples() {
        let p = PvParams {
            panel_area: 20.0,
            mppt_efficiency: 0.9,
            panel_efficiency: 0.15,
            incidence_angle: 0.0,
        };
        assert_eq!(pv_power(0.0, &p, 18.0), 0.0);
        assert_relative_eq!(pv_power(1000.0, &p, 18.0), 2.7, max_relative = 1e-12);
        assert_eq!(pv_power(1000.0, &p, 1.0), 1.0);
        let grazing = PvParams {
            incidence_angle: std::f64::consts::FRAC_PI_2 - 1e-9,
            ..p
        };
        assert!(pv_power(1000.0, &grazing, 18.0) < 1e-8);
    }

    #[test]
    fn hydro_examples() {
        let p = hydro();
        assert_eq!(hydro_power(0.0, &p, 28.0), 0.0);
        assert_relative_eq!(hydro_power(0.1, &p, 28.0), 7.848, max_relative = 1e-12);
        let lossless = HydroParams {
            hydraulic_efficiency: 1.0,
            ..p
        };
        assert_relative_eq!(hydro_power(0.1, &lossless, 28.0), 9.81, max_relative = 1e-12);
        assert_relative_eq!(hydro_mech_loss(&p), 0.013, max_relative = 1e-12);
        let faster = HydroParams {
            water_speed: 4.0,
            friction_shaft: 0.0,
            ..p
        };
        assert_relative_eq!(hydro_mech_loss(&faster), 4.0 * 0.004, max_relative = 1e-12);
    }

    #[test]
    fn turbine_efficiency_cases() {
        let still = HydroParams {
            water_speed: 0.0,
            shaft_speed: 0.0,
            ..hydro()
        };
        assert_eq!(hydro_turbine_efficiency(0.1, &still), Some(1.0));
        // 10 kW hydraulic (Q·ρ·g·H = 10 000 W), 1 kW loss
        let p = HydroParams {
            head: 10.0 / 9.81,
            friction_water: 250.0,
            water_speed: 2.0,
            friction_shaft: 0.0,
            ..hydro()
        };
        assert_relative_eq!(hydro_turbine_efficiency(1.0, &p).unwrap(), 0.9, max_relative = 1e-12);
        let lossy = HydroParams {
            friction_water: 1e9,
            ..p
        };
        assert_eq!(hydro_turbine_efficiency(1.0, &lossy), Some(0.0));
        assert_eq!(hydro_turbine_efficiency(0.0, &p), None);
    }

    #[test]
    fn mt_efficiency_curve() {
        assert_relative_eq!(mt_efficiency_raw(32.5, 65.0), 0.3022, epsilon = 1e-4);
        assert_relative_eq!(mt_efficiency_raw(65.0, 65.0), 1.0603, epsilon = 1e-4);
        assert_eq!(mt_efficiency_raw(0.0, 65.0), 0.0);
        let p = mt();
        assert_eq!(mt_efficiency(65.0, &p), 0.95);
        assert_eq!(mt_efficiency(0.0, &p), 0.05);
    }

    #[test]
    fn mt_fuel_examples() {
        let p = mt();
        assert_relative_eq!(p.heating_value_kwh_per_m3, 10.3497, epsilon = 1e-4);
        assert_eq!(mt_fuel_cost(0.0, 1.0, &p), 0.0);
        assert_relative_eq!(mt_fuel_cost(32.5, 1.0, &p), 3.22, epsilon = 5e-3);
        let dear = MtParams { gas_price: 0.62, ..p };
        assert_relative_eq!(
            mt_fuel_cost(32.5, 1.0, &dear),
            2.0 * mt_fuel_cost(32.5, 1.0, &p),
            max_relative = 1e-12
        );
    }

    #[test]
    fn de_polynomial() {
        let p = DeParams::default();
        let c = p.coefficients();
        for (got, want) in c.iter().zip([0.284, -0.14527, -0.39638, -0.57454]) {
            assert_relative_eq!(*got, want, epsilon = 1e-5);
        }
        assert_eq!(de_fuel_polynomial(0.0, &p), 0.0);
        assert_relative_eq!(de_fuel_polynomial(0.5, &p), 0.0202, epsilon = 1e-4);
        assert_relative_eq!(de_fuel_polynomial(1.0, &p), -0.8322, epsilon = 1e-4);
        assert_eq!(de_fuel_cost(30.0, 30.0, &p), 0.0);
        let custom = DeParams {
            coefficient_override: Some(vec![1.0, 1.0]),
            ..p
        };
        assert_relative_eq!(de_fuel_polynomial(0.5, &custom), 0.75);
    }

    #[test]
    fn battery_step_examples() {
        let p = battery();
        let (e, pbs) = battery_step(10.0, 10.0, 8.1, &p, 1.0);
        assert_relative_eq!(e - 10.0, 0.9, max_relative = 1e-12);
        assert_relative_eq!(pbs, -1.0, max_relative = 1e-12);

        let (e, pbs) = battery_step(10.0, 9.0, 8.1, &p, 1.0);
        assert_relative_eq!(e, 10.0, max_relative = 1e-12);
        assert!(pbs.abs() < 1e-12);

        let (e, pbs) = battery_step(p.capacity, 20.0, 5.0, &p, 1.0);
        assert_eq!(e, p.capacity);
        assert_eq!(pbs, 0.0);
    }

    #[test]
    fn battery_limits() {
        let p = battery();
        // power limit
        let (e, pbs) = battery_dispatch(12.0, 50.0, &p, 1.0);
        assert_eq!(pbs, 5.0);
        assert_relative_eq!(e, 12.0 - 4.5);
        // energy floor
        let (e, pbs) = battery_dispatch(6.0, 5.0, &p, 1.0);
        assert_relative_eq!(e, 5.0);
        assert_relative_eq!(pbs, 1.0 / 0.9, max_relative = 1e-12);
        // energy ceiling
        let (e, pbs) = battery_dispatch(24.1, -5.0, &p, 1.0);
        assert_eq!(e, 25.0);
        assert_relative_eq!(pbs, -1.0, max_relative = 1e-9);
    }
}
