//! Schedules one synthetic day for a commuter fleet and compares the result
//! against plug-and-charge, where every EV starts the moment it arrives.
//!
//! Run with `cargo run --example schedule_day`.

use evcs::baselines::plug_and_charge;
use evcs::brd::{run_brd, BrdConfig};
use evcs::cost::{CostConfig, GameContext};
use evcs::error::Result;
use evcs::model::{total_load, FleetSpec, LoadProfile};
use evcs::synth::{synthesize_horizon, SynthConfig};
use evcs::thermal::{hotspot_with_inertia, TransformerParams};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn main() -> Result<()> {
    let params = TransformerParams::default();
    let horizon = synthesize_horizon(
        &SynthConfig {
            days: 1,
            seed: 7,
            ..Default::default()
        },
        &params,
    )?;
    let exo = &horizon.exo[0];
    let ambient = &horizon.ambient[0];

    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let fleet = FleetSpec::gaussian_mobility(8, 3.0, &exo.grid, &mut rng)?;
    let cost = CostConfig::default();
    let ctx = GameContext::new(exo, ambient, &fleet, &params, &cost)?;

    let result = run_brd(&ctx, &BrdConfig::default())?;
    println!(
        "best response {} after {} rounds",
        if result.converged { "converged" } else { "hit its round budget" },
        result.rounds_used
    );
    println!("\n ev  window      duration  start");
    for (i, ev) in fleet.evs.iter().enumerate() {
        println!(
            " {:2}  [{:2}, {:2}]    {:4}     {:4}",
            ev.id, ev.arrival, ev.departure, ev.duration, result.schedule.starts[i]
        );
    }

    let report = |label: &str, load: Vec<f64>| -> Result<()> {
        let profile = LoadProfile::new(exo.grid, exo.kind, load)?;
        let trace = hotspot_with_inertia(&profile, ambient, &params)?;
        let losses: f64 = profile
            .values
            .iter()
            .map(|l| cost.joule_losses(*l) * exo.grid.dt_hours)
            .sum();
        println!(
            "{label:16} lifetime {:7.2} years   losses {:6.2} kWh   peak hot-spot {:5.1} C",
            trace.lifetime_years(),
            losses,
            trace.hotspot_c.iter().cloned().fold(f64::MIN, f64::max)
        );
        Ok(())
    };

    println!();
    report("no EVs", exo.values.clone())?;
    let pac = plug_and_charge(&fleet);
    report("plug-and-charge", total_load(exo, &pac.starts, &fleet)?)?;
    report("scheduled", total_load(exo, &result.schedule.starts, &fleet)?)?;
    Ok(())
}
