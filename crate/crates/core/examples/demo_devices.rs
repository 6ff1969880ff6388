//! Hourly renewable availability and fuel curves of the bundled demo.

use microgrid_dispatch::costs::Model;
use microgrid_dispatch::devices::{de_fuel_cost, mt_efficiency, mt_fuel_cost};
use microgrid_dispatch::scenario::{demo_scenario, UnitKind};

fn main() {
    let s = demo_scenario();
    let model = Model::new(&s);
    println!("hour  load   wind     pv  hydro-max  ll-max");
    for (t, h) in model.hours.iter().enumerate() {
        println!(
            "{t:>4} {:>5.1} {:>6.2} {:>6.2} {:>10.2} {:>7.2}",
            s.load.values[t], h.wind, h.pv, h.hydro_max, h.ll_max
        );
    }

    let mt = s.mt_params();
    let de_max = s.unit(UnitKind::DE).power_max;
    println!("\n  kW   MT eff  MT USD/h  DE USD/h");
    for p in [5.0, 10.0, 20.0, 30.0] {
        println!(
            "{p:>4.0} {:>8.3} {:>9.3} {:>9.3}",
            mt_efficiency(p, &mt),
            mt_fuel_cost(p, 1.0, &mt),
            de_fuel_cost(p.min(de_max), de_max, &s.devices.de)
        );
    }
    for kind in [UnitKind::MT, UnitKind::DE] {
        println!("{kind:?} emission treatment: {:.4} USD/MWh", s.emissions.cost_per_mwh(kind));
    }
}
