//! Batch studies on synthetic horizons: forecast-noise robustness, lifetime
//! versus fleet size, charging-power selection, the aging/losses trade-off
//! and monetary-cost comparisons.
//!
//! Every study is driven by a master seed. Per-replicate RNG streams are
//! derived from (master seed, sweep index, replicate index), so serial and
//! parallel runs produce identical reports. Within a replicate all policies
//! see the same fleets and the same noisy forecasts, which pairs the
//! comparisons and sharpens the medians.
//!
//! Schedules are always computed on the forecast demand and evaluated on
//! the true demand; with zero noise the two coincide.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{gan_style_schedule, shinwari_style_schedule, GanConfig};
use crate::brd::{run_brd, BrdConfig};
use crate::cost::{CostConfig, EvCostMode, GameContext};
use crate::error::{Error, Result};
use crate::model::{
    total_load, EvSpec, FleetSpec, LoadProfile, ProfileKind, TimeGrid, MOBILITY_ARRIVAL_MEAN,
    MOBILITY_ARRIVAL_SD, MOBILITY_DEPARTURE_MEAN, MOBILITY_DEPARTURE_SD, MOBILITY_MAX_REDRAWS,
};
use crate::synth::Horizon;
use crate::thermal::{
    hotspot_with_inertia, hotspot_with_inertia_from, ThermalTrace, TransformerParams,
    NOMINAL_LIFE_YEARS,
};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a master seed and a path of
/// indices (sweep point, replicate, day, ...). Stable across runs.
pub fn subseed(master: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix64(master);
    for &p in parts {
        s = splitmix64(s ^ splitmix64(p));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Policy {
    NoEv,
    PlugAndCharge,
    Brd,
    GanStyle,
    ShinwariStyle,
}

impl Policy {
    pub const ALL: [Policy; 5] = [
        Policy::NoEv,
        Policy::PlugAndCharge,
        Policy::Brd,
        Policy::GanStyle,
        Policy::ShinwariStyle,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Policy::NoEv => "no_ev",
            Policy::PlugAndCharge => "plug_and_charge",
            Policy::Brd => "brd",
            Policy::GanStyle => "gan",
            Policy::ShinwariStyle => "shinwari",
        }
    }

    pub fn from_label(label: &str) -> Option<Policy> {
        Policy::ALL.iter().copied().find(|p| p.label() == label)
    }
}

/// Additive Gaussian forecast error sized by a signal-to-noise ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForecastNoiseModel {
    pub fsnr_db: f64,
    /// Noise standard deviation, kW. Derived from `fsnr_db` and the mean
    /// squared demand of the full day.
    pub sigma_day: f64,
    /// Independent noise per slot; otherwise one shared offset per day.
    pub per_slot_iid: bool,
    pub rng_seed: u64,
}

impl ForecastNoiseModel {
    /// Sizes the noise from the ratio definition
    /// `fsnr = 10 log10(mean_t L_t^2 / sigma^2)` over the full-day profile.
    pub fn from_fsnr(fsnr_db: f64, day_mean_sq: f64, rng_seed: u64) -> Self {
        let sigma_day = if fsnr_db == f64::INFINITY {
            0.0
        } else {
            (day_mean_sq / 10f64.powf(fsnr_db / 10.0)).sqrt()
        };
        ForecastNoiseModel {
            fsnr_db,
            sigma_day,
            per_slot_iid: true,
            rng_seed,
        }
    }

    /// The zero-noise model: forecasts equal the truth.
    pub fn exact() -> Self {
        ForecastNoiseModel {
            fsnr_db: f64::INFINITY,
            sigma_day: 0.0,
            per_slot_iid: true,
            rng_seed: 0,
        }
    }
}

/// Adds the model's noise to a demand profile, clipping at zero. The model
/// seed fully determines the draw, so repeated calls agree.
pub fn apply_forecast_noise(exo: &LoadProfile, model: &ForecastNoiseModel) -> LoadProfile {
    if model.sigma_day == 0.0 {
        return exo.clone();
    }
    let mut rng = ChaCha12Rng::seed_from_u64(model.rng_seed);
    let dist = Normal::new(0.0, model.sigma_day).unwrap();
    let values: Vec<f64> = if model.per_slot_iid {
        exo.values
            .iter()
            .map(|v| (v + dist.sample(&mut rng)).max(0.0))
            .collect()
    } else {
        let z = dist.sample(&mut rng);
        exo.values.iter().map(|v| (v + z).max(0.0)).collect()
    };
    LoadProfile::new(exo.grid, exo.kind, values)
        .expect("noisy forecast stays finite and non-negative")
}

/// Charging slots needed to deliver an energy at a given power.
pub fn blocks_for_energy(energy_kwh: f64, power_kw: f64, dt_hours: f64) -> usize {
    (energy_kwh / (power_kw * dt_hours)).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DurationRule {
    /// Durations drawn from the commuter mobility model.
    Mobility,
    /// Every EV charges for exactly this many slots.
    Fixed(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub fleet_size: usize,
    pub power_kw: f64,
    pub duration: DurationRule,
    pub fsnr_db: f64,
    pub per_slot_noise: bool,
    /// Aging weight of the scheduling objective.
    pub alpha: f64,
    pub brd_max_rounds: usize,
    pub transformer: TransformerParams,
}

impl SimSettings {
    pub fn new(fleet_size: usize) -> Self {
        SimSettings {
            fleet_size,
            power_kw: 3.0,
            duration: DurationRule::Mobility,
            fsnr_db: f64::INFINITY,
            per_slot_noise: true,
            alpha: 1.0,
            brd_max_rounds: 100,
            transformer: TransformerParams::default(),
        }
    }

    fn brd_cost(&self) -> CostConfig {
        CostConfig {
            alpha: self.alpha,
            ..Default::default()
        }
    }

    /// Proximal weight large enough for the synchronous baseline to
    /// contract at this fleet size.
    fn gan_config(&self) -> GanConfig {
        let base = GanConfig::default();
        GanConfig {
            penalty_weight: base
                .penalty_weight
                .max(2.5 * base.loss_slope * self.fleet_size as f64),
            max_iters: 600,
            ..base
        }
    }
}

/// One policy's totals over one simulated horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub policy: Policy,
    pub lifetime_years: f64,
    /// Resistive losses over the horizon, kWh.
    pub losses_kwh: f64,
    /// Average electricity bill per EV over the horizon.
    pub monetary_cost_per_ev: f64,
    /// Days on which the policy's iterative scheme hit its round budget.
    pub unconverged_days: usize,
}

struct PolicyState {
    rise: Option<f64>,
    aging_total: f64,
    slots: usize,
    losses_kwh: f64,
    money_total: f64,
    unconverged: usize,
}

fn draw_fleet<R: Rng>(settings: &SimSettings, grid: &TimeGrid, rng: &mut R) -> Result<FleetSpec> {
    match settings.duration {
        DurationRule::Mobility => {
            FleetSpec::gaussian_mobility(settings.fleet_size, settings.power_kw, grid, rng)
        }
        DurationRule::Fixed(duration) => {
            fixed_duration_fleet(settings.fleet_size, duration, settings.power_kw, grid, rng)
        }
    }
}

/// Mobility windows with a forced common charging duration; used by the
/// power sweeps where the energy need fixes the block length.
fn fixed_duration_fleet<R: Rng>(
    count: usize,
    duration: usize,
    power_kw: f64,
    grid: &TimeGrid,
    rng: &mut R,
) -> Result<FleetSpec> {
    if duration == 0 || duration > grid.slots {
        return Err(Error::Invalid(format!(
            "duration {duration} does not fit a {}-slot window",
            grid.slots
        )));
    }
    let arr = Normal::new(MOBILITY_ARRIVAL_MEAN, MOBILITY_ARRIVAL_SD).unwrap();
    let dep = Normal::new(MOBILITY_DEPARTURE_MEAN, MOBILITY_DEPARTURE_SD).unwrap();
    let t = grid.slots;
    let clamp_slot = |x: f64| -> usize { (x.round().max(1.0) as usize).min(t) };
    let mut evs = Vec::with_capacity(count);
    for id in 1..=count {
        let mut drawn = None;
        for _ in 0..=MOBILITY_MAX_REDRAWS {
            let a = clamp_slot(arr.sample(rng));
            let d = clamp_slot(dep.sample(rng));
            if a <= d && d - a + 1 >= duration {
                drawn = Some(EvSpec {
                    id,
                    arrival: a,
                    departure: d,
                    duration,
                });
                break;
            }
        }
        match drawn {
            Some(ev) => evs.push(ev),
            None => {
                return Err(Error::Invalid(format!(
                    "ev {id}: no window of at least {duration} slots within \
                     {MOBILITY_MAX_REDRAWS} redraws"
                )))
            }
        }
    }
    FleetSpec::new(evs, power_kw)
}

/// Simulates one seeded horizon for several policies at once. Fleets and
/// forecasts are drawn once per day and shared, the thermal state chains
/// from day to day separately per policy, and every metric is evaluated on
/// the true demand.
pub fn run_replicate(
    horizon: &Horizon,
    policies: &[Policy],
    settings: &SimSettings,
    seed: u64,
) -> Result<Vec<ReplicateOutcome>> {
    let grid = horizon.window_grid;
    let dt = grid.dt_hours;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let brd_cost = settings.brd_cost();
    let gan_config = settings.gan_config();
    let loss_coeff = brd_cost.r_total();
    let prices = &horizon.prices;

    let mut states: Vec<PolicyState> = policies
        .iter()
        .map(|_| PolicyState {
            rise: None,
            aging_total: 0.0,
            slots: 0,
            losses_kwh: 0.0,
            money_total: 0.0,
            unconverged: 0,
        })
        .collect();

    for day in 0..horizon.days() {
        let exo = &horizon.exo[day];
        let ambient = &horizon.ambient[day];
        let fleet = draw_fleet(settings, &grid, &mut rng)?;
        let noise = ForecastNoiseModel {
            per_slot_iid: settings.per_slot_noise,
            rng_seed: rng.random::<u64>(),
            ..ForecastNoiseModel::from_fsnr(settings.fsnr_db, horizon.day_mean_sq[day], 0)
        };
        let forecast = apply_forecast_noise(exo, &noise);
        let brd_seed = rng.random::<u64>();

        for (state, policy) in states.iter_mut().zip(policies) {
            let mut money = 0.0;
            let mut failed = false;
            let true_load: Vec<f64> = match policy {
                Policy::NoEv => exo.values.clone(),
                Policy::PlugAndCharge => {
                    let starts = crate::baselines::plug_and_charge(&fleet);
                    money = rectangular_money(&starts.starts, &fleet, prices, dt);
                    total_load(exo, &starts.starts, &fleet)?
                }
                Policy::Brd => {
                    let mut ctx = GameContext::new(
                        &forecast,
                        ambient,
                        &fleet,
                        &settings.transformer,
                        &brd_cost,
                    )?;
                    if let Some(rise) = state.rise {
                        ctx = ctx.with_initial_top_oil(rise);
                    }
                    let config = BrdConfig {
                        max_rounds: settings.brd_max_rounds,
                        seed: brd_seed,
                        ..Default::default()
                    };
                    let result = run_brd(&ctx, &config)?;
                    failed = !result.converged;
                    money = rectangular_money(&result.schedule.starts, &fleet, prices, dt);
                    total_load(exo, &result.schedule.starts, &fleet)?
                }
                Policy::GanStyle => {
                    let result = gan_style_schedule(&fleet, &forecast, &gan_config)?;
                    failed = !result.converged;
                    money = continuous_money(&result.profiles.rates_kw, prices, dt);
                    add_rates(exo, &result.profiles.rates_kw)
                }
                Policy::ShinwariStyle => {
                    let set = shinwari_style_schedule(&fleet, &forecast)?;
                    money = continuous_money(&set.rates_kw, prices, dt);
                    add_rates(exo, &set.rates_kw)
                }
            };

            let profile = LoadProfile::new(grid, ProfileKind::PowerKw, true_load)?;
            let trace: ThermalTrace = match state.rise {
                None => hotspot_with_inertia(&profile, ambient, &settings.transformer)?,
                Some(rise) => {
                    hotspot_with_inertia_from(&profile, ambient, &settings.transformer, rise)?
                }
            };
            state.rise = Some(trace.final_top_oil_rise_c());
            state.aging_total += trace.total_aging();
            state.slots += profile.values.len();
            state.losses_kwh += profile
                .values
                .iter()
                .map(|l| loss_coeff * l * l * dt)
                .sum::<f64>();
            state.money_total += money;
            if failed {
                state.unconverged += 1;
            }
        }
    }

    Ok(states
        .iter()
        .zip(policies)
        .map(|(state, policy)| ReplicateOutcome {
            policy: *policy,
            lifetime_years: NOMINAL_LIFE_YEARS * state.slots as f64 / state.aging_total,
            losses_kwh: state.losses_kwh,
            monetary_cost_per_ev: state.money_total / settings.fleet_size.max(1) as f64,
            unconverged_days: state.unconverged,
        })
        .collect())
}

fn rectangular_money(starts: &[usize], fleet: &FleetSpec, prices: &LoadProfile, dt: f64) -> f64 {
    starts
        .iter()
        .zip(&fleet.evs)
        .map(|(s, ev)| {
            let sum: f64 = prices.values[s - 1..s - 1 + ev.duration].iter().sum();
            fleet.power_kw * dt * sum
        })
        .sum()
}

fn continuous_money(rates: &[Vec<f64>], prices: &LoadProfile, dt: f64) -> f64 {
    rates
        .iter()
        .map(|row| {
            row.iter()
                .zip(&prices.values)
                .map(|(x, pi)| x * dt * pi)
                .sum::<f64>()
        })
        .sum()
}

fn add_rates(exo: &LoadProfile, rates: &[Vec<f64>]) -> Vec<f64> {
    let mut load = exo.values.clone();
    for row in rates {
        for (l, x) in load.iter_mut().zip(row) {
            *l += x;
        }
    }
    load
}

/// Empirical quantile with linear interpolation; `sorted` must be ascending.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

fn summarize(mut values: Vec<f64>) -> (f64, f64, f64, usize) {
    let n = values.len();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (
        quantile(&values, 0.5),
        quantile(&values, 0.16),
        quantile(&values, 0.84),
        n,
    )
}

/// One aggregated cell of a study: a sweep point, a policy or variant
/// label, a metric name and its median with a 68% empirical interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub sweep: String,
    pub label: String,
    pub metric: String,
    pub median: f64,
    pub lo68: f64,
    pub hi68: f64,
    pub replicates: usize,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn push_values(&mut self, sweep: &str, label: &str, metric: &str, values: Vec<f64>) {
        let (median, lo68, hi68, replicates) = summarize(values);
        self.rows.push(ReportRow {
            sweep: sweep.to_string(),
            label: label.to_string(),
            metric: metric.to_string(),
            median,
            lo68,
            hi68,
            replicates,
        });
    }

    pub fn push_scalar(&mut self, sweep: &str, label: &str, metric: &str, value: f64, n: usize) {
        self.rows.push(ReportRow {
            sweep: sweep.to_string(),
            label: label.to_string(),
            metric: metric.to_string(),
            median: value,
            lo68: value,
            hi68: value,
            replicates: n,
        });
    }

    pub fn find(&self, sweep: &str, label: &str, metric: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.sweep == sweep && r.label == label && r.metric == metric)
    }

    pub fn median_of(&self, sweep: &str, label: &str, metric: &str) -> Option<f64> {
        self.find(sweep, label, metric).map(|r| r.median)
    }
}

/// Lifetime and normalized losses per (policy, fleet size) under forecast
/// noise. Losses are normalized per replicate against the no-EV baseline of
/// the same seed.
pub fn lifetime_vs_fleet(
    horizon: &Horizon,
    policies: &[Policy],
    fleet_sizes: &[usize],
    base: &SimSettings,
    replicates: usize,
    master_seed: u64,
) -> Result<ExperimentReport> {
    if replicates == 0 {
        return Err(Error::Invalid("need at least one replicate".into()));
    }
    let mut sim_policies = vec![Policy::NoEv];
    for p in policies {
        if !sim_policies.contains(p) {
            sim_policies.push(*p);
        }
    }

    let mut report = ExperimentReport::default();
    for (si, &fleet_size) in fleet_sizes.iter().enumerate() {
        let settings = SimSettings {
            fleet_size,
            ..base.clone()
        };
        let outcomes: Vec<Vec<ReplicateOutcome>> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                run_replicate(
                    horizon,
                    &sim_policies,
                    &settings,
                    subseed(master_seed, &[si as u64, r as u64]),
                )
            })
            .collect::<Result<Vec<_>>>()?;

        let sweep = format!("I={fleet_size}");
        let noev_losses: Vec<f64> = outcomes.iter().map(|o| o[0].losses_kwh).collect();
        for (pi, policy) in sim_policies.iter().enumerate() {
            if !policies.contains(policy) {
                continue;
            }
            let lifetimes: Vec<f64> = outcomes.iter().map(|o| o[pi].lifetime_years).collect();
            report.push_values(&sweep, policy.label(), "lifetime_years", lifetimes);
            let normalized: Vec<f64> = outcomes
                .iter()
                .zip(&noev_losses)
                .map(|(o, base)| o[pi].losses_kwh / base)
                .collect();
            report.push_values(&sweep, policy.label(), "normalized_losses", normalized);
            let total_days = (replicates * horizon.days()) as f64;
            let unconverged: usize = outcomes.iter().map(|o| o[pi].unconverged_days).sum();
            report.push_scalar(
                &sweep,
                policy.label(),
                "converged_fraction",
                1.0 - unconverged as f64 / total_days,
                replicates,
            );
        }
    }
    Ok(report)
}

/// Fraction of randomized instances on which sequential best response
/// settles within the round budget, per fleet size. Runs the scheduler in
/// its aging-with-inertia configuration, where no closed-form potential
/// certifies convergence.
pub fn convergence_probability_sweep(
    horizon: &Horizon,
    fleet_sizes: &[usize],
    replicates: usize,
    exo_sigma_kw: f64,
    power_kw: f64,
    max_rounds: usize,
    master_seed: u64,
) -> Result<ExperimentReport> {
    if replicates == 0 {
        return Err(Error::Invalid("need at least one replicate".into()));
    }
    let exo = &horizon.exo[0];
    let ambient = &horizon.ambient[0];
    let cost = CostConfig::default();
    let transformer = TransformerParams::default();

    let mut report = ExperimentReport::default();
    for (si, &fleet_size) in fleet_sizes.iter().enumerate() {
        let converged: Vec<bool> = (0..replicates)
            .into_par_iter()
            .map(|r| -> Result<bool> {
                let seed = subseed(master_seed, &[si as u64, r as u64]);
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let dist = Normal::new(0.0, exo_sigma_kw.max(1e-12)).unwrap();
                let values: Vec<f64> = exo
                    .values
                    .iter()
                    .map(|v| (v + dist.sample(&mut rng)).max(0.0))
                    .collect();
                let drawn = LoadProfile::new(exo.grid, ProfileKind::PowerKw, values)?;
                let fleet =
                    FleetSpec::gaussian_mobility(fleet_size, power_kw, &exo.grid, &mut rng)?;
                let ctx = GameContext::new(&drawn, ambient, &fleet, &transformer, &cost)?;
                let config = BrdConfig {
                    max_rounds,
                    seed: rng.random::<u64>(),
                    ..Default::default()
                };
                Ok(run_brd(&ctx, &config)?.converged)
            })
            .collect::<Result<Vec<_>>>()?;
        let fraction =
            converged.iter().filter(|c| **c).count() as f64 / replicates as f64;
        report.push_scalar(
            &format!("I={fleet_size}"),
            Policy::Brd.label(),
            "convergence_probability",
            fraction,
            replicates,
        );
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSearchResult {
    pub report: ExperimentReport,
    /// Feasible grid power with the highest median lifetime.
    pub best_power_kw: Option<f64>,
}

/// Median lifetime per charging power. The energy need is fixed, so the
/// block length shrinks as the power grows; grid points whose blocks cannot
/// fit the mobility windows are flagged infeasible rather than failing the
/// sweep.
pub fn optimal_power_search(
    horizon: &Horizon,
    powers_kw: &[f64],
    energy_kwh: f64,
    fleet_size: usize,
    fsnr_db: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<PowerSearchResult> {
    if replicates == 0 {
        return Err(Error::Invalid("need at least one replicate".into()));
    }
    if !(energy_kwh.is_finite() && energy_kwh > 0.0) {
        return Err(Error::Invalid(format!(
            "energy need must be positive, got {energy_kwh}"
        )));
    }
    let dt = horizon.window_grid.dt_hours;
    let mut report = ExperimentReport::default();
    let mut best: Option<(f64, f64)> = None;
    for (pi, &power) in powers_kw.iter().enumerate() {
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::Invalid(format!("charging power {power} is invalid")));
        }
        let sweep = format!("p={power}");
        let duration = blocks_for_energy(energy_kwh, power, dt);
        let settings = SimSettings {
            fleet_size,
            power_kw: power,
            duration: DurationRule::Fixed(duration),
            fsnr_db,
            alpha: 1.0,
            ..SimSettings::new(fleet_size)
        };
        let outcomes: Result<Vec<Vec<ReplicateOutcome>>> = (0..replicates)
            .into_par_iter()
            .map(|r| {
                run_replicate(
                    horizon,
                    &[Policy::Brd],
                    &settings,
                    subseed(master_seed, &[pi as u64, r as u64]),
                )
            })
            .collect();
        match outcomes {
            Ok(rows) => {
                let lifetimes: Vec<f64> = rows.iter().map(|o| o[0].lifetime_years).collect();
                let (median, ..) = summarize(lifetimes.clone());
                report.push_values(&sweep, Policy::Brd.label(), "lifetime_years", lifetimes);
                if best.map(|(_, m)| median > m).unwrap_or(true) {
                    best = Some((power, median));
                }
            }
            Err(Error::Invalid(message)) => {
                report.push_scalar(&sweep, Policy::Brd.label(), "infeasible", f64::NAN, 0);
                let _ = message;
            }
            Err(other) => return Err(other),
        }
    }
    Ok(PowerSearchResult {
        report,
        best_power_kw: best.map(|(p, _)| p),
    })
}

/// Normalized aging and losses of the scheduled outcome across the aging
/// weight grid, for each oil time constant. Single day, no forecast noise;
/// the same fleet draw is reused everywhere so the frontier reflects the
/// objective, not sampling.
pub fn pareto_frontier(
    horizon: &Horizon,
    alpha_grid: &[f64],
    oil_time_constants_h: &[f64],
    fleet_size: usize,
    power_kw: f64,
    master_seed: u64,
) -> Result<ExperimentReport> {
    let exo = &horizon.exo[0];
    let ambient = &horizon.ambient[0];
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    let fleet = FleetSpec::gaussian_mobility(fleet_size, power_kw, &exo.grid, &mut rng)?;
    let brd_seed = rng.random::<u64>();

    let mut report = ExperimentReport::default();
    for &t0 in oil_time_constants_h {
        let transformer = TransformerParams {
            oil_time_constant_h: t0,
            ..Default::default()
        };
        let base_trace = hotspot_with_inertia(exo, ambient, &transformer)?;
        let base_aging = base_trace.total_aging();
        let base_losses: f64 = exo.values.iter().map(|l| l * l).sum();
        let label = format!("t0={t0}");

        for &alpha in alpha_grid {
            let cost = CostConfig {
                alpha,
                ..Default::default()
            };
            let ctx = GameContext::new(exo, ambient, &fleet, &transformer, &cost)?;
            let config = BrdConfig {
                seed: brd_seed,
                ..Default::default()
            };
            let result = run_brd(&ctx, &config)?;
            let load = total_load(exo, &result.schedule.starts, &fleet)?;
            let profile = LoadProfile::new(exo.grid, ProfileKind::PowerKw, load)?;
            let trace = hotspot_with_inertia(&profile, ambient, &transformer)?;
            let losses: f64 = profile.values.iter().map(|l| l * l).sum();
            let sweep = format!("alpha={alpha}");
            report.push_scalar(
                &sweep,
                &label,
                "normalized_aging",
                trace.total_aging() / base_aging,
                1,
            );
            report.push_scalar(&sweep, &label, "normalized_losses", losses / base_losses, 1);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    MoneyOnly,
    AgingOnly,
    LossesOnly,
}

impl Objective {
    pub const ALL: [Objective; 3] =
        [Objective::MoneyOnly, Objective::AgingOnly, Objective::LossesOnly];

    pub fn label(&self) -> &'static str {
        match self {
            Objective::MoneyOnly => "money_only",
            Objective::AgingOnly => "aging_only",
            Objective::LossesOnly => "losses_only",
        }
    }
}

/// Average per-EV electricity bill of the scheduled outcome when the
/// objective is the bill itself, the transformer aging, or the resistive
/// losses. Same fleets and tie-break draws across objectives.
pub fn monetary_cost_comparison(
    horizon: &Horizon,
    fleet_size: usize,
    power_kw: f64,
    replicates: usize,
    master_seed: u64,
) -> Result<ExperimentReport> {
    if replicates == 0 {
        return Err(Error::Invalid("need at least one replicate".into()));
    }
    let transformer = TransformerParams::default();
    let grid = horizon.window_grid;
    let dt = grid.dt_hours;
    let configs: Vec<(Objective, CostConfig)> = Objective::ALL
        .iter()
        .map(|objective| {
            let cost = match objective {
                Objective::MoneyOnly => CostConfig {
                    alpha: 0.0,
                    beta: 1.0,
                    r_transformer: 0.0,
                    r_line: 0.0,
                    ev_cost: EvCostMode::PriceSum(vec![horizon.prices.clone()]),
                    ..Default::default()
                },
                Objective::AgingOnly => CostConfig {
                    alpha: 1.0,
                    ..Default::default()
                },
                Objective::LossesOnly => CostConfig {
                    alpha: 0.0,
                    ..Default::default()
                },
            };
            (*objective, cost)
        })
        .collect();

    let per_rep: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let mut rng =
                ChaCha12Rng::seed_from_u64(subseed(master_seed, &[r as u64]));
            let mut rises: Vec<Option<f64>> = vec![None; configs.len()];
            let mut money = vec![0.0; configs.len()];
            for day in 0..horizon.days() {
                let exo = &horizon.exo[day];
                let ambient = &horizon.ambient[day];
                let fleet =
                    FleetSpec::gaussian_mobility(fleet_size, power_kw, &grid, &mut rng)?;
                let brd_seed = rng.random::<u64>();
                for (k, (_, cost)) in configs.iter().enumerate() {
                    let mut ctx = GameContext::new(exo, ambient, &fleet, &transformer, cost)?;
                    if let Some(rise) = rises[k] {
                        ctx = ctx.with_initial_top_oil(rise);
                    }
                    let config = BrdConfig {
                        seed: brd_seed,
                        ..Default::default()
                    };
                    let result = run_brd(&ctx, &config)?;
                    money[k] +=
                        rectangular_money(&result.schedule.starts, &fleet, &horizon.prices, dt);
                    let load = total_load(exo, &result.schedule.starts, &fleet)?;
                    let profile = LoadProfile::new(grid, ProfileKind::PowerKw, load)?;
                    let trace = match rises[k] {
                        None => hotspot_with_inertia(&profile, ambient, &transformer)?,
                        Some(rise) => {
                            hotspot_with_inertia_from(&profile, ambient, &transformer, rise)?
                        }
                    };
                    rises[k] = Some(trace.final_top_oil_rise_c());
                }
            }
            Ok(money
                .into_iter()
                .map(|m| m / fleet_size.max(1) as f64)
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::default();
    for (k, (objective, _)) in configs.iter().enumerate() {
        let values: Vec<f64> = per_rep.iter().map(|rep| rep[k]).collect();
        report.push_values("default", objective.label(), "monetary_cost_per_ev", values);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{synthesize_horizon, SynthConfig};

    fn tiny_horizon(days: usize) -> Horizon {
        let params = TransformerParams::default();
        synthesize_horizon(
            &SynthConfig {
                days,
                ..Default::default()
            },
            &params,
        )
        .unwrap()
    }

    #[test]
    fn subseed_is_stable_and_spread_out() {
        let a = subseed(7, &[1, 2]);
        assert_eq!(a, subseed(7, &[1, 2]));
        assert_ne!(a, subseed(7, &[2, 1]));
        assert_ne!(a, subseed(8, &[1, 2]));
        assert_ne!(a, subseed(7, &[1, 3]));
    }

    #[test]
    fn noise_sigma_matches_the_ratio_definition() {
        // Flat 10 kW day: mean square 100, so 20 dB leaves sigma = 1.
        let model = ForecastNoiseModel::from_fsnr(20.0, 100.0, 0);
        assert!((model.sigma_day - 1.0).abs() < 1e-12);
        assert_eq!(ForecastNoiseModel::exact().sigma_day, 0.0);
    }

    #[test]
    fn zero_noise_returns_the_profile_unchanged() {
        let grid = TimeGrid::overnight();
        let exo = LoadProfile::flat(grid, ProfileKind::PowerKw, 12.0).unwrap();
        let noisy = apply_forecast_noise(&exo, &ForecastNoiseModel::exact());
        assert_eq!(noisy, exo);
    }

    #[test]
    fn empirical_noise_sd_matches_sigma() {
        let grid = TimeGrid::new(48, 0.5).unwrap();
        let exo = LoadProfile::flat(grid, ProfileKind::PowerKw, 50.0).unwrap();
        let mut sum_sq = 0.0;
        let mut n = 0usize;
        for seed in 0..2500u64 {
            let model = ForecastNoiseModel::from_fsnr(20.0, 2500.0, seed);
            let noisy = apply_forecast_noise(&exo, &model);
            for (a, b) in noisy.values.iter().zip(&exo.values) {
                sum_sq += (a - b) * (a - b);
                n += 1;
            }
        }
        let sigma = (sum_sq / n as f64).sqrt();
        // 20 dB of 2500 gives sigma 5; load 50 makes clipping negligible.
        assert!((sigma - 5.0).abs() / 5.0 < 0.01, "empirical sigma {sigma}");
    }

    #[test]
    fn day_offset_noise_shifts_all_slots_equally() {
        let grid = TimeGrid::overnight();
        let exo = LoadProfile::flat(grid, ProfileKind::PowerKw, 40.0).unwrap();
        let model = ForecastNoiseModel {
            per_slot_iid: false,
            ..ForecastNoiseModel::from_fsnr(20.0, 1600.0, 5)
        };
        let noisy = apply_forecast_noise(&exo, &model);
        let shift = noisy.values[0] - 40.0;
        assert!(shift.abs() > 1e-9);
        for (a, b) in noisy.values.iter().zip(&exo.values) {
            assert!((a - b - shift).abs() < 1e-12);
        }
    }

    #[test]
    fn clipping_keeps_forecasts_non_negative() {
        let grid = TimeGrid::overnight();
        let exo = LoadProfile::flat(grid, ProfileKind::PowerKw, 0.1).unwrap();
        for seed in 0..20u64 {
            let model = ForecastNoiseModel::from_fsnr(-10.0, 0.01, seed);
            let noisy = apply_forecast_noise(&exo, &model);
            assert!(noisy.values.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn blocks_round_up() {
        assert_eq!(blocks_for_energy(9.0, 24.0, 0.5), 1);
        assert_eq!(blocks_for_energy(9.0, 3.0, 0.5), 6);
        assert_eq!(blocks_for_energy(9.0, 2.2, 0.5), 9);
        assert_eq!(blocks_for_energy(12.0, 24.0, 0.5), 1);
    }

    #[test]
    fn replicates_are_reproducible_and_policies_paired() {
        let horizon = tiny_horizon(2);
        let settings = SimSettings::new(3);
        let a = run_replicate(&horizon, &Policy::ALL, &settings, 42).unwrap();
        let b = run_replicate(&horizon, &Policy::ALL, &settings, 42).unwrap();
        assert_eq!(a, b);
        let c = run_replicate(&horizon, &Policy::ALL, &settings, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn no_ev_replicate_matches_the_horizon_baseline() {
        let horizon = tiny_horizon(3);
        let settings = SimSettings::new(2);
        let outcome = &run_replicate(&horizon, &[Policy::NoEv], &settings, 0).unwrap()[0];
        let expect = horizon.no_ev_lifetime(&settings.transformer).unwrap();
        assert!((outcome.lifetime_years - expect).abs() < 1e-9);
        assert_eq!(outcome.monetary_cost_per_ev, 0.0);
    }

    #[test]
    fn charging_always_costs_lifetime() {
        let horizon = tiny_horizon(2);
        let settings = SimSettings::new(4);
        let outcomes =
            run_replicate(&horizon, &[Policy::NoEv, Policy::Brd], &settings, 9).unwrap();
        assert!(outcomes[1].lifetime_years < outcomes[0].lifetime_years);
        assert!(outcomes[1].losses_kwh > outcomes[0].losses_kwh);
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert!((quantile(&v, 0.5) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn lifetime_report_has_aligned_rows() {
        let horizon = tiny_horizon(2);
        let report = lifetime_vs_fleet(
            &horizon,
            &[Policy::Brd, Policy::PlugAndCharge],
            &[2, 3],
            &SimSettings::new(0),
            3,
            11,
        )
        .unwrap();
        for sweep in ["I=2", "I=3"] {
            for label in ["brd", "plug_and_charge"] {
                assert!(report.find(sweep, label, "lifetime_years").is_some());
                let row = report.find(sweep, label, "normalized_losses").unwrap();
                assert!(row.median >= 1.0);
                assert!(row.lo68 <= row.median && row.median <= row.hi68);
            }
        }
    }

    #[test]
    fn flat_prices_equalize_the_objectives() {
        let params = TransformerParams::default();
        let horizon = synthesize_horizon(
            &SynthConfig {
                days: 2,
                peak_price: 0.1,
                offpeak_price: 0.1,
                ..Default::default()
            },
            &params,
        )
        .unwrap();
        let report = monetary_cost_comparison(&horizon, 3, 3.0, 2, 5).unwrap();
        let money = report
            .median_of("default", "money_only", "monetary_cost_per_ev")
            .unwrap();
        for label in ["aging_only", "losses_only"] {
            let other = report
                .median_of("default", label, "monetary_cost_per_ev")
                .unwrap();
            assert!(
                (other - money).abs() < 1e-12,
                "{label} bill {other} differs from {money}"
            );
        }
    }

    #[test]
    fn single_ev_money_objective_wins_on_money() {
        let horizon = tiny_horizon(2);
        let report = monetary_cost_comparison(&horizon, 1, 3.0, 3, 21).unwrap();
        let money = report
            .median_of("default", "money_only", "monetary_cost_per_ev")
            .unwrap();
        for label in ["aging_only", "losses_only"] {
            let other = report
                .median_of("default", label, "monetary_cost_per_ev")
                .unwrap();
            assert!(money <= other + 1e-6, "{label}: {money} vs {other}");
        }
    }

    #[test]
    fn infeasible_power_is_flagged_not_fatal() {
        let horizon = tiny_horizon(1);
        // 40 kWh at 1 kW needs 80 half-hour slots, beyond any window.
        let result =
            optimal_power_search(&horizon, &[1.0, 24.0], 40.0, 2, f64::INFINITY, 2, 3).unwrap();
        assert!(result.report.find("p=1", "brd", "infeasible").is_some());
        assert!(result
            .report
            .find("p=24", "brd", "lifetime_years")
            .is_some());
        assert_eq!(result.best_power_kw, Some(24.0));
    }
}
