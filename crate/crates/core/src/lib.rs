//! Day-ahead multi-objective dispatch of an islanded microgrid.
//!
//! The crate models wind, solar, hydro, gas micro-turbine, diesel and battery
//! units, prices a 24-hour dispatch schedule in operating and environmental
//! cost, and searches the trade-off front with a genetic warm start that seeds
//! simulated annealing, particle swarm and ant colony branches.

pub mod algorithms;
pub mod cli;
pub mod costs;
pub mod devices;
pub mod error;
pub mod fusion;
pub mod mocore;
pub mod output;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
