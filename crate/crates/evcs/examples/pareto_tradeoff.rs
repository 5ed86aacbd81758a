//! The scheduling objective blends insulation aging against resistive
//! losses through the weight alpha. Sweeping alpha traces the frontier
//! between the two, and the oil time constant decides how much there is to
//! trade: a sluggish transformer forgives short spikes that a nimble one
//! punishes immediately.

use evcs::error::Result;
use evcs::experiments::pareto_frontier;
use evcs::synth::{synthesize_horizon, SynthConfig};
use evcs::thermal::TransformerParams;

fn main() -> Result<()> {
    let horizon = synthesize_horizon(
        &SynthConfig {
            days: 1,
            seed: 1,
            ..Default::default()
        },
        &TransformerParams::default(),
    )?;
    let alphas = [0.0, 0.25, 0.5, 0.75, 0.9, 1.0];
    let taus = [0.5, 2.5];
    let report = pareto_frontier(&horizon, &alphas, &taus, 20, 7.0, 42)?;

    println!("normalized to the no-EV day (1.0 = adding the fleet cost nothing)\n");
    for &tau in &taus {
        let label = format!("t0={tau}");
        println!("oil time constant {tau} h:");
        println!("  alpha   aging ratio   losses ratio");
        for &alpha in &alphas {
            let sweep = format!("alpha={alpha}");
            let pick = |metric: &str| {
                report
                    .rows
                    .iter()
                    .find(|r| r.sweep == sweep && r.label == label && r.metric == metric)
                    .map(|r| r.median)
                    .unwrap()
            };
            println!(
                "  {alpha:5}   {:11.4}   {:12.5}",
                pick("normalized_aging"),
                pick("normalized_losses")
            );
        }
        println!();
    }
    Ok(())
}
