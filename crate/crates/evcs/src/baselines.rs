//! Reference charging policies: plug-and-charge, exact valley filling,
//! a penalized iterative valley-filler (Gan-style), and proportional
//! valley spreading (Shinwari-style).
//!
//! The continuous policies return per-EV power sequences rather than
//! rectangular start times. Energy is tracked in kW-slots throughout
//! (multiply by the slot length for kWh); every policy delivers each EV's
//! energy need exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FleetSpec, LoadProfile, ScheduleVector, TimeGrid};

/// Per-EV continuous charging rates, one row per EV, one column per slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousProfileSet {
    pub grid: TimeGrid,
    pub rates_kw: Vec<Vec<f64>>,
}

impl ContinuousProfileSet {
    pub fn zeros(grid: TimeGrid, evs: usize) -> Self {
        ContinuousProfileSet {
            grid,
            rates_kw: vec![vec![0.0; grid.slots]; evs],
        }
    }

    /// Fleet charging power summed over EVs, per slot.
    pub fn aggregate(&self) -> Vec<f64> {
        let mut agg = vec![0.0; self.grid.slots];
        for row in &self.rates_kw {
            for (a, x) in agg.iter_mut().zip(row) {
                *a += x;
            }
        }
        agg
    }

    /// Exogenous demand plus the fleet's charging power, per slot.
    pub fn total_load(&self, exo: &LoadProfile) -> Result<Vec<f64>> {
        if exo.grid.slots != self.grid.slots {
            return Err(Error::Dimension {
                what: "exogenous profile",
                expected: self.grid.slots,
                got: exo.grid.slots,
            });
        }
        let mut load = exo.values.clone();
        for (l, a) in load.iter_mut().zip(self.aggregate()) {
            *l += a;
        }
        Ok(load)
    }

    /// Delivered energy of one EV, in kW-slots.
    pub fn energy_slots(&self, i: usize) -> f64 {
        self.rates_kw[i].iter().sum()
    }

    /// Checks shape, rate bounds, window support and exact energy delivery.
    pub fn validate(&self, fleet: &FleetSpec, power_cap: f64) -> Result<()> {
        if self.rates_kw.len() != fleet.len() {
            return Err(Error::Dimension {
                what: "profile rows",
                expected: fleet.len(),
                got: self.rates_kw.len(),
            });
        }
        for (row, ev) in self.rates_kw.iter().zip(&fleet.evs) {
            if row.len() != self.grid.slots {
                return Err(Error::Dimension {
                    what: "profile columns",
                    expected: self.grid.slots,
                    got: row.len(),
                });
            }
            let mut energy = 0.0;
            for (t, &x) in row.iter().enumerate() {
                let slot = t + 1;
                if !x.is_finite() || x < -1e-12 {
                    return Err(Error::Invalid(format!(
                        "ev {}: rate at slot {slot} must be non-negative, got {x}",
                        ev.id
                    )));
                }
                if x > power_cap + 1e-9 {
                    return Err(Error::Invalid(format!(
                        "ev {}: rate {x} at slot {slot} exceeds the cap {power_cap}",
                        ev.id
                    )));
                }
                if (slot < ev.arrival || slot > ev.departure) && x.abs() > 1e-12 {
                    return Err(Error::Invalid(format!(
                        "ev {}: nonzero rate at slot {slot} outside window [{}, {}]",
                        ev.id, ev.arrival, ev.departure
                    )));
                }
                energy += x;
            }
            let need = ev.duration as f64 * fleet.power_kw;
            if (energy - need).abs() > 1e-9 * need.max(1.0) {
                return Err(Error::Invalid(format!(
                    "ev {}: delivered {energy} kW-slots, needs {need}",
                    ev.id
                )));
            }
        }
        Ok(())
    }
}

/// Everyone starts charging the moment they arrive.
pub fn plug_and_charge(fleet: &FleetSpec) -> ScheduleVector {
    ScheduleVector::at_arrival(fleet)
}

/// Water-filling solution together with the water level it was cut at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValleyFill {
    /// Per-slot allocation; the load added at slot t is `power_scale * x[t]`.
    pub x: Vec<f64>,
    pub level: f64,
}

/// Exact single-resource valley filling: finds the water level `L*` by
/// bisection so that `x_t = clamp((L* - exo_t) / power_scale, lower, upper)`
/// sums to `energy_slots`, to a relative tolerance of 1e-9. The filled load
/// `exo_t + power_scale * x_t` equals `L*` wherever `x_t` is strictly
/// between its bounds.
pub fn valley_fill_exact(
    exo: &[f64],
    energy_slots: f64,
    power_scale: f64,
    lower: f64,
    upper: f64,
) -> Result<ValleyFill> {
    let t = exo.len();
    if t == 0 {
        return Err(Error::Invalid("valley filling needs at least one slot".into()));
    }
    if !(power_scale.is_finite() && power_scale > 0.0) {
        return Err(Error::Invalid(format!(
            "power scale must be positive, got {power_scale}"
        )));
    }
    if !(lower.is_finite() && upper.is_finite() && lower >= 0.0 && upper > lower) {
        return Err(Error::Invalid(format!(
            "need 0 <= lower < upper, got [{lower}, {upper}]"
        )));
    }
    let min_sum = t as f64 * lower;
    let max_sum = t as f64 * upper;
    if !(energy_slots >= min_sum - 1e-12 && energy_slots <= max_sum + 1e-12) {
        return Err(Error::Invalid(format!(
            "energy {energy_slots} outside the feasible range [{min_sum}, {max_sum}]"
        )));
    }

    let fill = |level: f64| -> Vec<f64> {
        exo.iter()
            .map(|&e| ((level - e) / power_scale).clamp(lower, upper))
            .collect()
    };
    let min_exo = exo.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_exo = exo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = min_exo + power_scale * lower;
    let mut hi = max_exo + power_scale * upper;
    let tol = 1e-9 * energy_slots.abs().max(1.0);
    let mut level = 0.5 * (lo + hi);
    for _ in 0..200 {
        level = 0.5 * (lo + hi);
        let sum: f64 = fill(level).iter().sum();
        if (sum - energy_slots).abs() <= tol {
            break;
        }
        if sum < energy_slots {
            lo = level;
        } else {
            hi = level;
        }
    }
    let x = fill(level);
    let sum: f64 = x.iter().sum();
    if (sum - energy_slots).abs() > tol {
        return Err(Error::Invalid(format!(
            "water level search stalled: delivered {sum} of {energy_slots}"
        )));
    }
    Ok(ValleyFill { x, level })
}

/// Knobs of the penalized synchronous valley-filler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GanConfig {
    /// Weight of the proximal term that keeps the parallel updates stable.
    /// Needs to grow with the fleet size (roughly `2 * loss_slope * I`)
    /// for the iteration to contract.
    pub penalty_weight: f64,
    pub max_iters: usize,
    /// Stop when no EV's rate moves by more than this between rounds.
    pub tolerance: f64,
    /// Quadratic loss coefficient of the broadcast price signal.
    pub loss_slope: f64,
}

impl Default for GanConfig {
    fn default() -> Self {
        GanConfig {
            penalty_weight: 0.5,
            max_iters: 500,
            tolerance: 1e-6,
            loss_slope: 0.06,
        }
    }
}

impl GanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.penalty_weight.is_finite() && self.penalty_weight > 0.0) {
            return Err(Error::Invalid(format!(
                "penalty weight must be positive, got {}",
                self.penalty_weight
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least one".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.loss_slope.is_finite() && self.loss_slope > 0.0) {
            return Err(Error::Invalid(format!(
                "loss slope must be positive, got {}",
                self.loss_slope
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GanResult {
    pub profiles: ContinuousProfileSet,
    pub iterations: usize,
    pub converged: bool,
    /// Largest per-EV per-slot rate change in the last round.
    pub max_change: f64,
}

/// Penalized synchronous valley filling. Every round the aggregator
/// broadcasts the current total load; each EV then minimizes
/// `sum_t price_t * x_t + (w/2) * sum_t (x_t - x_t^prev)^2` over its own
/// window, rates in `[0, P]`, energy fixed, where the price is the marginal
/// distribution loss `2 * loss_slope * load_t`. All EVs update from the
/// same broadcast. Non-convergence is reported in the result, not raised.
pub fn gan_style_schedule(
    fleet: &FleetSpec,
    exo: &LoadProfile,
    config: &GanConfig,
) -> Result<GanResult> {
    config.validate()?;
    fleet.validate(&exo.grid)?;
    let t = exo.grid.slots;
    let p = fleet.power_kw;

    // Start from each EV's energy spread uniformly over its own window.
    let mut rates: Vec<Vec<f64>> = fleet
        .evs
        .iter()
        .map(|ev| {
            let window = ev.departure - ev.arrival + 1;
            let rate = ev.duration as f64 * p / window as f64;
            let mut row = vec![0.0; t];
            for x in row.iter_mut().skip(ev.arrival - 1).take(window) {
                *x = rate;
            }
            row
        })
        .collect();

    let w = config.penalty_weight;
    let mut iterations = 0;
    let mut max_change = 0.0;
    let mut converged = fleet.is_empty();
    for _ in 0..config.max_iters {
        iterations += 1;
        let mut load = exo.values.clone();
        for row in &rates {
            for (l, x) in load.iter_mut().zip(row) {
                *l += x;
            }
        }
        let price: Vec<f64> = load.iter().map(|l| 2.0 * config.loss_slope * l).collect();

        max_change = 0.0;
        let mut next = rates.clone();
        for (i, ev) in fleet.evs.iter().enumerate() {
            let lo_slot = ev.arrival - 1;
            let len = ev.departure - ev.arrival + 1;
            let prev = &rates[i][lo_slot..lo_slot + len];
            let cost = &price[lo_slot..lo_slot + len];
            let energy = ev.duration as f64 * p;
            let solved = proximal_step(prev, cost, w, p, energy);
            for (k, x) in solved.into_iter().enumerate() {
                let change = (x - rates[i][lo_slot + k]).abs();
                if change > max_change {
                    max_change = change;
                }
                next[i][lo_slot + k] = x;
            }
        }
        rates = next;
        if max_change <= config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(GanResult {
        profiles: ContinuousProfileSet {
            grid: exo.grid,
            rates_kw: rates,
        },
        iterations,
        converged,
        max_change,
    })
}

/// Minimizes `sum_t cost_t x_t + (w/2) sum_t (x_t - prev_t)^2` subject to
/// `0 <= x_t <= cap` and `sum_t x_t = energy`. The optimality conditions
/// give `x_t = clamp(prev_t - (cost_t + nu)/w, 0, cap)` with the multiplier
/// `nu` fixed by the energy constraint; the sum is non-increasing in `nu`,
/// so bisection applies.
fn proximal_step(prev: &[f64], cost: &[f64], w: f64, cap: f64, energy: f64) -> Vec<f64> {
    let at = |nu: f64| -> Vec<f64> {
        prev.iter()
            .zip(cost)
            .map(|(&y, &c)| (y - (c + nu) / w).clamp(0.0, cap))
            .collect()
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&y, &c) in prev.iter().zip(cost) {
        lo = lo.min(w * (y - cap) - c);
        hi = hi.max(w * y - c);
    }
    let tol = 1e-12 * energy.abs().max(1.0);
    let mut nu = 0.5 * (lo + hi);
    for _ in 0..200 {
        nu = 0.5 * (lo + hi);
        let sum: f64 = at(nu).iter().sum();
        if (sum - energy).abs() <= tol {
            break;
        }
        if sum > energy {
            lo = nu;
        } else {
            hi = nu;
        }
    }
    at(nu)
}

/// Proportional valley spreading. The depth of slot t below the exogenous
/// peak, restricted to the EV's window, decides its share of the EV's
/// energy; rates above the cap are clipped and the excess is spread
/// uniformly over the still-uncapped window slots until nothing moves.
/// A flat exogenous profile degenerates to a uniform allocation.
pub fn shinwari_style_schedule(
    fleet: &FleetSpec,
    exo: &LoadProfile,
) -> Result<ContinuousProfileSet> {
    fleet.validate(&exo.grid)?;
    let t = exo.grid.slots;
    let p = fleet.power_kw;
    let peak = exo.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let depth: Vec<f64> = exo.values.iter().map(|&e| peak - e).collect();

    let mut rates = Vec::with_capacity(fleet.len());
    for ev in &fleet.evs {
        let lo = ev.arrival - 1;
        let len = ev.departure - ev.arrival + 1;
        let energy = ev.duration as f64 * p;
        if energy > len as f64 * p + 1e-9 {
            return Err(Error::Invalid(format!(
                "ev {}: energy {energy} does not fit under the cap {p} in {len} slots",
                ev.id
            )));
        }
        let window_depth = &depth[lo..lo + len];
        let total_depth: f64 = window_depth.iter().sum();
        let mut x: Vec<f64> = if total_depth > 0.0 {
            window_depth.iter().map(|d| energy * d / total_depth).collect()
        } else {
            vec![energy / len as f64; len]
        };

        // Clip-and-spread passes; each pass saturates at least one new slot,
        // so the window length bounds the number of passes.
        for _ in 0..len {
            let mut excess = 0.0;
            let mut open = 0usize;
            for v in x.iter_mut() {
                if *v > p {
                    excess += *v - p;
                    *v = p;
                } else if *v < p {
                    open += 1;
                }
            }
            if excess <= 1e-15 {
                break;
            }
            if open == 0 {
                return Err(Error::Invalid(format!(
                    "ev {}: cap redistribution failed, all window slots saturated",
                    ev.id
                )));
            }
            let share = excess / open as f64;
            for v in x.iter_mut() {
                if *v < p {
                    *v += share;
                }
            }
        }

        let mut row = vec![0.0; t];
        row[lo..lo + len].copy_from_slice(&x);
        rates.push(row);
    }

    Ok(ContinuousProfileSet {
        grid: exo.grid,
        rates_kw: rates,
    })
}
