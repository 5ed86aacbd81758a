//! Synthetic demand, temperature and price data.
//!
//! Real metering data cannot ship with the crate, so experiments run on a
//! generated stand-in: a double-peak household demand day (evening peak
//! shortly after 19:00, overnight valley, morning rise around 08:30) with
//! seasonal modulation and day-to-day jitter, an ambient temperature year
//! with seasonal and intraday swings, and a two-level on/off-peak price
//! profile. The CSV interfaces accept real data with the same shapes.
//!
//! Days run from 17:00 to 17:00 (48 half-hour slots); the scheduling window
//! is the first 30 slots, 17:00 to 08:00. Demand is calibrated by default so
//! that a transformer serving the exogenous load alone ages at exactly its
//! nominal rate over the horizon.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{LoadProfile, ProfileKind, TimeGrid};
use crate::thermal::{calibrate_exogenous_scale, hotspot_with_inertia, TransformerParams};

/// Half-hour slots in a full day.
pub const DAY_SLOTS: usize = 48;
/// Half-hour slots in the overnight scheduling window (17:00 to 08:00).
pub const WINDOW_SLOTS: usize = 30;

/// Wall-clock hour at the middle granularity of a 1-based day slot.
pub fn slot_hour(slot: usize) -> f64 {
    (17.0 + (slot as f64 - 1.0) * 0.5) % 24.0
}

/// Normalized demand shape over a 48-slot day starting at 17:00: an evening
/// peak near 19:30, a deep overnight valley near 03:00 and a smaller
/// morning peak near 08:30. Dimensionless, roughly in [0.35, 1].
pub fn daily_shape(slot: usize) -> f64 {
    let k = slot as f64;
    let bump = |center: f64, width: f64| (-((k - center) / width).powi(2)).exp();
    0.45 + 0.55 * bump(6.0, 4.0) + 0.40 * bump(32.0, 5.0) - 0.10 * bump(21.0, 6.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub days: usize,
    /// Day-of-year offset for the seasonal terms.
    pub start_day: usize,
    /// Demand scale before calibration, kW.
    pub base_kw: f64,
    pub seed: u64,
    /// Standard deviation of the multiplicative day-to-day demand jitter.
    pub day_jitter_sd: f64,
    pub ambient_mean_c: f64,
    pub ambient_seasonal_c: f64,
    pub ambient_daily_c: f64,
    pub ambient_noise_sd_c: f64,
    pub peak_price: f64,
    pub offpeak_price: f64,
    /// Scale demand so the no-EV horizon ages at exactly the nominal rate.
    pub calibrate: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            days: 30,
            start_day: 0,
            base_kw: 60.0,
            seed: 0,
            day_jitter_sd: 0.03,
            ambient_mean_c: 12.0,
            ambient_seasonal_c: 8.0,
            ambient_daily_c: 4.0,
            ambient_noise_sd_c: 0.5,
            peak_price: 0.20,
            offpeak_price: 0.08,
            calibrate: true,
        }
    }
}

/// A sequence of scheduling windows with aligned temperatures and prices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub window_grid: TimeGrid,
    /// Exogenous demand, one 30-slot window per day.
    pub exo: Vec<LoadProfile>,
    /// Ambient temperature, aligned with `exo`.
    pub ambient: Vec<LoadProfile>,
    /// Electricity price over one scheduling window (shared by all days).
    pub prices: LoadProfile,
    /// Mean squared demand of each full 48-slot day, for noise sizing.
    pub day_mean_sq: Vec<f64>,
    /// Calibration factor that was applied to the demand.
    pub scale: f64,
}

impl Horizon {
    pub fn days(&self) -> usize {
        self.exo.len()
    }

    /// All scheduling windows glued into one long profile.
    pub fn concat_exo(&self) -> Result<LoadProfile> {
        concat(&self.exo, ProfileKind::PowerKw)
    }

    pub fn concat_ambient(&self) -> Result<LoadProfile> {
        concat(&self.ambient, ProfileKind::TemperatureC)
    }

    /// Forecast noise level for one day at a given signal-to-noise ratio
    /// (dB): `sigma^2 = mean_t(L_t^2) / 10^(fsnr/10)` over the full day.
    pub fn noise_sigma(&self, day: usize, fsnr_db: f64) -> f64 {
        if fsnr_db == f64::INFINITY {
            return 0.0;
        }
        (self.day_mean_sq[day] / 10f64.powf(fsnr_db / 10.0)).sqrt()
    }

    /// Hot-spot trace of the horizon without any EV load.
    pub fn no_ev_lifetime(&self, params: &TransformerParams) -> Result<f64> {
        let trace = hotspot_with_inertia(&self.concat_exo()?, &self.concat_ambient()?, params)?;
        Ok(trace.lifetime_years())
    }
}

fn concat(profiles: &[LoadProfile], kind: ProfileKind) -> Result<LoadProfile> {
    let total: usize = profiles.iter().map(|p| p.grid.slots).sum();
    let dt = profiles
        .first()
        .map(|p| p.grid.dt_hours)
        .unwrap_or(TimeGrid::overnight().dt_hours);
    let mut values = Vec::with_capacity(total);
    for p in profiles {
        values.extend_from_slice(&p.values);
    }
    LoadProfile::new(TimeGrid::new(total, dt)?, kind, values)
}

/// Generates the synthetic horizon: demand windows, ambient windows, the
/// price window and per-day noise scales, optionally calibrated so that the
/// exogenous load alone produces exactly nominal aging.
pub fn synthesize_horizon(config: &SynthConfig, params: &TransformerParams) -> Result<Horizon> {
    use crate::error::Error;
    if config.days == 0 {
        return Err(Error::Invalid("horizon needs at least one day".into()));
    }
    if !(config.base_kw.is_finite() && config.base_kw > 0.0) {
        return Err(Error::Invalid(format!(
            "base demand must be positive, got {}",
            config.base_kw
        )));
    }
    let window_grid = TimeGrid::overnight();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let jitter_dist = Normal::new(0.0, config.day_jitter_sd.max(1e-12)).unwrap();
    let noise_dist = Normal::new(0.0, config.ambient_noise_sd_c.max(1e-12)).unwrap();

    let mut exo = Vec::with_capacity(config.days);
    let mut ambient = Vec::with_capacity(config.days);
    let mut day_mean_sq = Vec::with_capacity(config.days);
    for d in 0..config.days {
        let year_angle =
            2.0 * std::f64::consts::PI * ((config.start_day + d) as f64) / 366.0;
        let season = 1.0 + 0.15 * year_angle.cos();
        let jitter = (1.0 + jitter_dist.sample(&mut rng)).max(0.5);
        let day_kw = config.base_kw * season * jitter;

        let full: Vec<f64> = (1..=DAY_SLOTS).map(|k| day_kw * daily_shape(k)).collect();
        day_mean_sq.push(full.iter().map(|v| v * v).sum::<f64>() / DAY_SLOTS as f64);
        exo.push(LoadProfile::new(
            window_grid,
            ProfileKind::PowerKw,
            full[..WINDOW_SLOTS].to_vec(),
        )?);

        let temps: Vec<f64> = (1..=WINDOW_SLOTS)
            .map(|k| {
                let hour_angle = 2.0 * std::f64::consts::PI * (slot_hour(k) - 14.0) / 24.0;
                config.ambient_mean_c - config.ambient_seasonal_c * year_angle.cos()
                    + config.ambient_daily_c * hour_angle.cos()
                    + noise_dist.sample(&mut rng)
            })
            .collect();
        ambient.push(LoadProfile::new(
            window_grid,
            ProfileKind::TemperatureC,
            temps,
        )?);
    }

    // Peak price while households are active (17:00-22:00, 06:00-08:00),
    // off-peak overnight: matches the demand shape so that price-seeking
    // and aging-seeking schedules genuinely differ.
    let prices = LoadProfile::new(
        window_grid,
        ProfileKind::PricePerKwh,
        (1..=WINDOW_SLOTS)
            .map(|k| {
                let h = slot_hour(k);
                if (6.0..22.0).contains(&h) {
                    config.peak_price
                } else {
                    config.offpeak_price
                }
            })
            .collect(),
    )?;

    let mut horizon = Horizon {
        window_grid,
        exo,
        ambient,
        prices,
        day_mean_sq,
        scale: 1.0,
    };
    if config.calibrate {
        let scale = calibrate_exogenous_scale(
            &horizon.concat_exo()?,
            &horizon.concat_ambient()?,
            params,
        )?;
        for day in &mut horizon.exo {
            for v in &mut day.values {
                *v *= scale;
            }
        }
        for ms in &mut horizon.day_mean_sq {
            *ms *= scale * scale;
        }
        horizon.scale = scale;
    }
    Ok(horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_has_evening_peak_and_overnight_valley() {
        let peak = daily_shape(6);
        let valley = daily_shape(21);
        let morning = daily_shape(32);
        assert!(peak > morning, "evening {peak} should top morning {morning}");
        assert!(morning > valley, "morning {morning} should top valley {valley}");
        assert!(valley > 0.0);
        for k in 1..=DAY_SLOTS {
            assert!(daily_shape(k) <= peak + 1e-12, "slot {k} above evening peak");
        }
    }

    #[test]
    fn window_covers_17_to_08() {
        assert_eq!(slot_hour(1), 17.0);
        assert_eq!(slot_hour(WINDOW_SLOTS), 7.5);
        assert_eq!(slot_hour(15), 0.0);
    }

    #[test]
    fn horizon_is_deterministic_in_the_seed() {
        let params = TransformerParams::default();
        let config = SynthConfig {
            days: 3,
            calibrate: false,
            ..Default::default()
        };
        let a = synthesize_horizon(&config, &params).unwrap();
        let b = synthesize_horizon(&config, &params).unwrap();
        assert_eq!(a, b);
        let c = synthesize_horizon(
            &SynthConfig {
                seed: 1,
                ..config
            },
            &params,
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn calibrated_horizon_reaches_nominal_life() {
        let params = TransformerParams::default();
        let config = SynthConfig {
            days: 5,
            ..Default::default()
        };
        let horizon = synthesize_horizon(&config, &params).unwrap();
        let life = horizon.no_ev_lifetime(&params).unwrap();
        assert!(
            (life - crate::thermal::NOMINAL_LIFE_YEARS).abs() < 0.01,
            "calibrated no-EV lifetime {life}"
        );
        assert!(horizon.scale > 0.0 && horizon.scale.is_finite());
    }

    #[test]
    fn noise_sigma_follows_the_snr_formula() {
        let params = TransformerParams::default();
        let config = SynthConfig {
            days: 1,
            calibrate: false,
            ..Default::default()
        };
        let horizon = synthesize_horizon(&config, &params).unwrap();
        let sigma = horizon.noise_sigma(0, 20.0);
        let expect = (horizon.day_mean_sq[0] / 100.0).sqrt();
        assert!((sigma - expect).abs() < 1e-12);
        assert_eq!(horizon.noise_sigma(0, f64::INFINITY), 0.0);
    }

    #[test]
    fn prices_are_two_level_and_peak_in_the_evening() {
        let params = TransformerParams::default();
        let config = SynthConfig {
            days: 1,
            calibrate: false,
            ..Default::default()
        };
        let horizon = synthesize_horizon(&config, &params).unwrap();
        let p = &horizon.prices.values;
        assert_eq!(p[0], 0.20);
        assert_eq!(p[10], 0.08);
        assert_eq!(p[25], 0.08);
        assert_eq!(p[26], 0.20);
        let levels: std::collections::BTreeSet<String> =
            p.iter().map(|v| format!("{v}")).collect();
        assert_eq!(levels.len(), 2);
    }
}
