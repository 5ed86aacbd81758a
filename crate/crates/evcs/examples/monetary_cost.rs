//! What does chasing the network's health cost the drivers? Schedules the
//! same days under three pure objectives and compares the average
//! electricity bill per EV under time-of-use prices.
//!
//! With the usual night-valley tariff the objectives coincide: the cheap
//! hours are the empty hours, so protecting the transformer is free. The
//! example then inverts the tariff, as when wholesale prices and the local
//! feeder's load stop agreeing, and a real gap opens.

use evcs::error::Result;
use evcs::experiments::monetary_cost_comparison;
use evcs::model::LoadProfile;
use evcs::synth::{synthesize_horizon, SynthConfig};
use evcs::thermal::TransformerParams;

fn main() -> Result<()> {
    let mut horizon = synthesize_horizon(
        &SynthConfig {
            days: 5,
            seed: 3,
            ..Default::default()
        },
        &TransformerParams::default(),
    )?;
    let hi = horizon.prices.values.iter().cloned().fold(f64::MIN, f64::max);
    let lo = horizon.prices.values.iter().cloned().fold(f64::MAX, f64::min);
    println!("time-of-use prices: peak {hi}, off-peak {lo}");

    let print_bills = |title: &str, horizon: &evcs::synth::Horizon| -> Result<()> {
        let report = monetary_cost_comparison(horizon, 10, 3.0, 10, 42)?;
        println!("\n{title}");
        for row in &report.rows {
            if row.metric == "monetary_cost_per_ev" {
                println!("  scheduling for {:12}  {:8.3}", row.label, row.median);
            }
        }
        Ok(())
    };

    print_bills("median bill per EV, cheap-at-night tariff:", &horizon)?;

    horizon.prices = LoadProfile::new(
        horizon.prices.grid,
        horizon.prices.kind,
        horizon.prices.values.iter().map(|p| hi + lo - p).collect(),
    )?;
    print_bills("median bill per EV, tariff inverted against the valley:", &horizon)?;

    println!("\nunder the inverted tariff the money-only scheduler abandons the");
    println!("demand valley for the cheap hours; the aging and losses schedulers");
    println!("stay in the valley and their drivers pay the difference.");
    Ok(())
}
