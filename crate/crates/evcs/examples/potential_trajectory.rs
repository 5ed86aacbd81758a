//! Tracks the game's potential function across a best-response run. Under a
//! shared billing window the potential rises with every accepted move, which
//! is what guarantees the dynamics terminate.

use evcs::brd::{run_brd, BrdConfig, InitialSchedule};
use evcs::cost::{CostConfig, GameContext, WindowMode};
use evcs::error::Result;
use evcs::model::{FleetSpec, LoadProfile, ProfileKind, TimeGrid};
use evcs::thermal::TransformerParams;

fn main() -> Result<()> {
    let grid = TimeGrid::new(12, 0.5)?;
    let exo = LoadProfile::new(
        grid,
        ProfileKind::PowerKw,
        vec![6.0, 5.0, 3.0, 1.0, 0.5, 0.5, 1.0, 2.0, 4.0, 6.0, 7.0, 7.0],
    )?;
    let ambient = LoadProfile::flat(grid, ProfileKind::TemperatureC, 20.0)?;
    let fleet = FleetSpec::uniform(5, 1, 12, 3, 2.0)?;
    let cost = CostConfig {
        window_mode: WindowMode::Common((1..=12).collect()),
        ..Default::default()
    };
    let params = TransformerParams::default();
    let ctx = GameContext::new(&exo, &ambient, &fleet, &params, &cost)?;

    let config = BrdConfig {
        initial: InitialSchedule::Random,
        seed: 11,
        ..Default::default()
    };
    let result = run_brd(&ctx, &config)?;
    let trajectory = result
        .potential_trajectory
        .expect("a common billing window always has a potential");

    println!("potential after each turn (initial value first):");
    for (turn, phi) in trajectory.iter().enumerate() {
        let marker = if turn == 0 {
            String::from("start")
        } else {
            let update = &result.updates[turn - 1];
            format!("ev {} -> slot {}", update.ev, update.start)
        };
        println!("{turn:3}  {phi:14.8}  {marker}");
    }

    let monotone = trajectory.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    println!(
        "\n{} turns, converged: {}, non-decreasing: {monotone}",
        trajectory.len() - 1,
        result.converged
    );
    println!("final schedule: {:?}", result.schedule.starts);
    Ok(())
}
