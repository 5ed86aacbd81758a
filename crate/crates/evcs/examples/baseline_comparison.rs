//! Runs every scheduling policy over the same five synthetic days and the
//! same fleet draws, then compares transformer lifetime, resistive losses,
//! and the average electricity bill.

use evcs::error::Result;
use evcs::experiments::{run_replicate, Policy, SimSettings};
use evcs::synth::{synthesize_horizon, SynthConfig};
use evcs::thermal::TransformerParams;

fn main() -> Result<()> {
    let horizon = synthesize_horizon(
        &SynthConfig {
            days: 5,
            seed: 21,
            ..Default::default()
        },
        &TransformerParams::default(),
    )?;
    let settings = SimSettings::new(10);
    let outcomes = run_replicate(&horizon, &Policy::ALL, &settings, 42)?;

    println!("five days, ten EVs at {} kW, exact forecasts\n", settings.power_kw);
    println!("policy            lifetime (y)   losses (kWh)   bill per EV");
    for outcome in &outcomes {
        println!(
            "{:16}  {:10.2}    {:10.2}    {:9.3}",
            outcome.policy.label(),
            outcome.lifetime_years,
            outcome.losses_kwh,
            outcome.monetary_cost_per_ev
        );
        if outcome.unconverged_days > 0 {
            println!("                  ({} days hit the round budget)", outcome.unconverged_days);
        }
    }
    Ok(())
}
