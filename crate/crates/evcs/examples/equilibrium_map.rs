//! Enumerates every pure Nash equilibrium of a small hill-shaped instance
//! and reports how far the worst one falls short of the welfare optimum.

use evcs::cost::{CostConfig, GameContext, InertiaMode, WindowMode};
use evcs::equilibrium::{enumerate_equilibria, hill_instance, DEFAULT_SEARCH_BUDGET};
use evcs::error::Result;
use evcs::model::{FleetSpec, LoadProfile, ProfileKind, TimeGrid};
use evcs::thermal::TransformerParams;

fn main() -> Result<()> {
    let (exo, ambient, fleet, cost) = hill_instance();
    let params = TransformerParams::low_inertia();
    let ctx = GameContext::new(&exo, &ambient, &fleet, &params, &cost)?;

    println!("demand hill: {:?}", exo.values);
    println!(
        "{} EVs, duration {}, window [{}, {}]\n",
        fleet.evs.len(),
        fleet.evs[0].duration,
        fleet.evs[0].arrival,
        fleet.evs[0].departure
    );

    let report = enumerate_equilibria(&ctx, DEFAULT_SEARCH_BUDGET)?;
    println!(
        "searched {} joint schedules, found {} equilibria:",
        report.search_space_size,
        report.equilibria.len()
    );
    for schedule in &report.equilibria {
        let welfare = ctx.sum_payoff(&schedule.starts)?;
        println!("  starts {:?}  welfare {welfare:.6}", schedule.starts);
    }

    println!("\nwelfare optimum {:.6} at:", report.best_sum_payoff);
    for schedule in &report.best_schedules {
        println!("  starts {:?}", schedule.starts);
    }
    println!(
        "worst equilibrium welfare {:.6}, decentralization gap {:.4}",
        report.worst_ne_sum_payoff, report.pod
    );

    // A tighter game where selfishness actually costs something: four 2-slot
    // jobs on eight empty slots, everyone billed over the whole window.
    let grid = TimeGrid::new(8, 0.5)?;
    let exo = LoadProfile::flat(grid, ProfileKind::PowerKw, 0.0)?;
    let ambient = LoadProfile::flat(grid, ProfileKind::TemperatureC, 20.0)?;
    let fleet = FleetSpec::uniform(4, 1, 8, 2, 1.0)?;
    let cost = CostConfig {
        alpha: 0.0,
        window_mode: WindowMode::Common((1..=8).collect()),
        inertia: InertiaMode::Memoryless,
        ..Default::default()
    };
    let ctx = GameContext::new(&exo, &ambient, &fleet, &params, &cost)?;
    let report = enumerate_equilibria(&ctx, DEFAULT_SEARCH_BUDGET)?;
    println!(
        "\ntight-capacity game: {} equilibria out of {} joint schedules",
        report.equilibria.len(),
        report.search_space_size
    );
    println!(
        "best welfare {:.4}, worst equilibrium {:.4}, gap {:.4}",
        report.best_sum_payoff, report.worst_ne_sum_payoff, report.pod
    );
    Ok(())
}
