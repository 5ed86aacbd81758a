//! Demand calibration: scale a background demand profile so that, with no
//! EVs at all, the transformer consumes exactly its nominal life. Starting
//! from a calibrated base makes lifetime numbers across scenarios
//! comparable, because every deviation from nominal is then caused by the
//! fleet and not by an arbitrary demand level.

use evcs::error::Result;
use evcs::synth::{synthesize_horizon, SynthConfig};
use evcs::thermal::{calibrate_exogenous_scale, hotspot_with_inertia, TransformerParams};

fn main() -> Result<()> {
    let params = TransformerParams::default();

    let raw = synthesize_horizon(
        &SynthConfig {
            days: 30,
            seed: 5,
            calibrate: false,
            ..Default::default()
        },
        &params,
    )?;
    let exo = raw.concat_exo()?;
    let ambient = raw.concat_ambient()?;
    let trace = hotspot_with_inertia(&exo, &ambient, &params)?;
    println!(
        "uncalibrated month: mean aging {:.4}, implied lifetime {:.1} years",
        trace.total_aging() / trace.len() as f64,
        trace.lifetime_years()
    );

    let scale = calibrate_exogenous_scale(&exo, &ambient, &params)?;
    println!("calibration scale: {scale:.6}");

    let calibrated = synthesize_horizon(
        &SynthConfig {
            days: 30,
            seed: 5,
            ..Default::default()
        },
        &params,
    )?;
    println!(
        "synthesizer applied {:.6}: no-EV lifetime {:.2} years",
        calibrated.scale,
        calibrated.no_ev_lifetime(&params)?
    );
    Ok(())
}
