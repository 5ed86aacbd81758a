//! Traces the transformer's hot-spot temperature through one loaded day,
//! with and without oil inertia. The lagged model lets the oil integrate
//! over short spikes; the memoryless model reacts instantly and ages the
//! insulation much harder at the evening peak.

use evcs::error::Result;
use evcs::model::{LoadProfile, ProfileKind, TimeGrid};
use evcs::thermal::{hotspot_memoryless, hotspot_with_inertia, TransformerParams};

fn main() -> Result<()> {
    let grid = TimeGrid::new(48, 0.5)?;
    let load = LoadProfile::new(
        grid,
        ProfileKind::PowerKw,
        (0..48)
            .map(|t| {
                let h = t as f64 * 0.5;
                let morning = 25.0 * (-(h - 8.0) * (h - 8.0) / 4.5).exp();
                let evening = 85.0 * (-(h - 19.0) * (h - 19.0) / 6.0).exp();
                20.0 + morning + evening
            })
            .collect(),
    )?;
    let ambient = LoadProfile::flat(grid, ProfileKind::TemperatureC, 22.0)?;
    let params = TransformerParams::default();

    let lagged = hotspot_with_inertia(&load, &ambient, &params)?;
    let instant = hotspot_memoryless(&load, &ambient, &params)?;

    println!("hour   load    hot-spot (lagged / instant)");
    for t in (0..48).step_by(4) {
        println!(
            "{:4.1}  {:5.1}     {:6.1} / {:6.1}",
            t as f64 * 0.5,
            load.values[t],
            lagged.hotspot_c[t],
            instant.hotspot_c[t]
        );
    }

    let peak = |trace: &evcs::thermal::ThermalTrace| {
        trace.hotspot_c.iter().cloned().fold(f64::MIN, f64::max)
    };
    println!(
        "\npeak hot-spot: lagged {:.1} C, instant {:.1} C",
        peak(&lagged),
        peak(&instant)
    );
    println!(
        "daily aging:   lagged {:.3}, instant {:.3}",
        lagged.total_aging(),
        instant.total_aging()
    );
    println!(
        "lifetime:      lagged {:.1} years, instant {:.1} years",
        lagged.lifetime_years(),
        instant.lifetime_years()
    );
    Ok(())
}
