//! Decentralized scheduling of EV charging on a shared distribution
//! transformer, modeled as a finite game among the vehicles.
//!
//! Each EV picks the start slot of a fixed-power charging block inside its
//! plug-in window. Costs combine transformer insulation aging driven by the
//! hot-spot temperature, resistive distribution losses and an optional
//! electricity bill; sequential best response settles the fleet on a Nash
//! equilibrium, certified by an ordinal potential in the documented
//! configurations. Exhaustive equilibrium search, a non-atomic
//! valley-filling relaxation and three baseline policies put the scheduler
//! in context, and a seeded experiment harness runs multi-day Monte-Carlo
//! studies on synthetic horizons.
//!
//! The `examples/` directory is the front door; each example is a runnable
//! walk through one capability:
//!
//! - `schedule_day`: one evening of sequential best response, slot by slot.
//! - `potential_trajectory`: the potential climbing to a fixed point.
//! - `equilibrium_map`: all equilibria of a small instance and their gap.
//! - `valley_filling`: the exact water-filling benchmark.
//! - `baseline_comparison`: plug-and-charge and two decentralized
//!   optimization baselines against the game.
//! - `forecast_noise`: how forecast error reorders the policies.
//! - `optimal_power`: lifetime across charger powers with a fixed energy
//!   need.
//! - `pareto_tradeoff`: aging against losses across the blend weight.
//! - `monetary_cost`: bills under bill-, aging- and losses-driven
//!   objectives.
//! - `calibrate_demand`: sizing a demand profile to the nominal-life
//!   budget.
//! - `thermal_trace`: the transformer thermal model on its own.
//!
//! The same capabilities are scriptable through the `evcs` binary
//! (`schedule`, `baseline`, `enumerate`, `experiment`, `calibrate`).

pub mod baselines;
pub mod brd;
pub mod cli;
pub mod cost;
pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod io;
pub mod model;
pub mod synth;
pub mod thermal;

pub use baselines::{
    gan_style_schedule, plug_and_charge, shinwari_style_schedule, valley_fill_exact,
    ContinuousProfileSet, GanConfig, GanResult, ValleyFill,
};
pub use brd::{best_response, run_brd, BrdConfig, BrdResult, InitialSchedule, UpdateOrder};
pub use cost::{CostConfig, EvCostMode, GameContext, InertiaMode, PricingMode, WindowMode};
pub use equilibrium::{
    enumerate_equilibria, hill_instance, is_nash, nonatomic_valley_fill, pod_nonatomic_check,
    NeReport, PodTable, DEFAULT_SEARCH_BUDGET,
};
pub use error::{Error, Result};
pub use experiments::{
    apply_forecast_noise, lifetime_vs_fleet, monetary_cost_comparison, optimal_power_search,
    pareto_frontier, run_replicate, ExperimentReport, ForecastNoiseModel, Policy, SimSettings,
};
pub use model::{
    action_set, total_load, EvSpec, FleetSpec, LoadProfile, ProfileKind, ScheduleVector, TimeGrid,
};
pub use synth::{synthesize_horizon, Horizon, SynthConfig};
pub use thermal::{
    aging_factor, calibrate_exogenous_scale, hotspot_memoryless, hotspot_with_inertia,
    hotspot_with_inertia_from, lifetime_years, ThermalTrace, TransformerParams,
    NOMINAL_LIFE_YEARS,
};
