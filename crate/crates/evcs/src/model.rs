//! Core data model: the discrete time grid, load profiles, the EV fleet and
//! its feasible charging windows, and the start-time schedule vector.
//!
//! Slots are 1-based throughout the public API. An EV with arrival `a`,
//! departure `d` and duration `C` occupies slots `s..s+C-1` when it starts at
//! `s`, and its feasible starts are `a..=d-C+1`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform discrete time grid.
///
/// The default grid is the overnight charging window used across the crate:
/// 30 half-hour slots from 17:00 to 08:00 the next day.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub slots: usize,
    pub dt_hours: f64,
}

impl TimeGrid {
    pub fn new(slots: usize, dt_hours: f64) -> Result<Self> {
        if slots == 0 {
            return Err(Error::Invalid("time grid needs at least one slot".into()));
        }
        if !(dt_hours.is_finite() && dt_hours > 0.0) {
            return Err(Error::Invalid(format!(
                "slot length must be positive, got {dt_hours}"
            )));
        }
        Ok(TimeGrid { slots, dt_hours })
    }

    /// The overnight window: 30 slots of 30 minutes (17:00 -> 08:00).
    pub fn overnight() -> Self {
        TimeGrid {
            slots: 30,
            dt_hours: 0.5,
        }
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::overnight()
    }
}

/// What a per-slot series represents. Used to keep power, temperature and
/// price profiles from being mixed up at interface boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    PowerKw,
    TemperatureC,
    PricePerKwh,
}

/// A per-slot series on a [`TimeGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub grid: TimeGrid,
    pub kind: ProfileKind,
    pub values: Vec<f64>,
}

impl LoadProfile {
    /// Power profiles must be non-negative; every value must be finite.
    pub fn new(grid: TimeGrid, kind: ProfileKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.slots {
            return Err(Error::Dimension {
                what: "profile values",
                expected: grid.slots,
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("slot {}: non-finite value", i + 1)));
            }
            if kind == ProfileKind::PowerKw && *v < 0.0 {
                return Err(Error::Invalid(format!(
                    "slot {}: demand must be non-negative, got {v}",
                    i + 1
                )));
            }
        }
        Ok(LoadProfile { grid, kind, values })
    }

    pub fn flat(grid: TimeGrid, kind: ProfileKind, value: f64) -> Result<Self> {
        LoadProfile::new(grid, kind, vec![value; grid.slots])
    }

    /// Value at a 1-based slot.
    pub fn value(&self, slot: usize) -> f64 {
        self.values[slot - 1]
    }
}

/// One EV's charging need: a rectangular block of `duration` slots at the
/// fleet's common power, placed anywhere inside `[arrival, departure]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvSpec {
    pub id: usize,
    pub arrival: usize,
    pub departure: usize,
    pub duration: usize,
}

impl EvSpec {
    pub fn new(id: usize, arrival: usize, departure: usize, duration: usize) -> Result<Self> {
        let ev = EvSpec {
            id,
            arrival,
            departure,
            duration,
        };
        ev.check()?;
        Ok(ev)
    }

    fn check(&self) -> Result<()> {
        if self.arrival == 0 || self.departure < self.arrival {
            return Err(Error::Invalid(format!(
                "ev {}: need 1 <= arrival <= departure, got [{}, {}]",
                self.id, self.arrival, self.departure
            )));
        }
        if self.duration == 0 {
            return Err(Error::Invalid(format!(
                "ev {}: duration must be at least one slot",
                self.id
            )));
        }
        if self.departure - self.arrival + 1 < self.duration {
            return Err(Error::Invalid(format!(
                "ev {}: window [{}, {}] is shorter than duration {}",
                self.id, self.arrival, self.departure, self.duration
            )));
        }
        Ok(())
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        self.check()?;
        if self.departure > grid.slots {
            return Err(Error::Invalid(format!(
                "ev {}: departure {} is beyond the last slot {}",
                self.id, self.departure, grid.slots
            )));
        }
        Ok(())
    }

    /// Latest feasible start, `departure - duration + 1`.
    pub fn latest_start(&self) -> usize {
        self.departure - self.duration + 1
    }
}

/// Feasible start times for one EV: `arrival..=latest_start`.
pub fn action_set(ev: &EvSpec) -> Result<Vec<usize>> {
    ev.check()?;
    Ok((ev.arrival..=ev.latest_start()).collect())
}

/// The EV fleet. All EVs charge at the same power while active.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FleetSpec {
    pub evs: Vec<EvSpec>,
    pub power_kw: f64,
}

impl FleetSpec {
    /// Ids must be exactly 1..=I in order; the common power must be positive
    /// and finite. An empty fleet is allowed (no-EV baselines).
    pub fn new(evs: Vec<EvSpec>, power_kw: f64) -> Result<Self> {
        if !(power_kw.is_finite() && power_kw > 0.0) {
            return Err(Error::Invalid(format!(
                "charging power must be positive, got {power_kw}"
            )));
        }
        for (i, ev) in evs.iter().enumerate() {
            if ev.id != i + 1 {
                return Err(Error::Invalid(format!(
                    "ev ids must be contiguous from 1, position {} has id {}",
                    i + 1,
                    ev.id
                )));
            }
            ev.check()?;
        }
        Ok(FleetSpec { evs, power_kw })
    }

    pub fn len(&self) -> usize {
        self.evs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evs.is_empty()
    }

    pub fn validate(&self, grid: &TimeGrid) -> Result<()> {
        for ev in &self.evs {
            ev.validate(grid)?;
        }
        Ok(())
    }

    /// `count` identical EVs sharing the same window and duration.
    pub fn uniform(
        count: usize,
        arrival: usize,
        departure: usize,
        duration: usize,
        power_kw: f64,
    ) -> Result<Self> {
        let evs = (1..=count)
            .map(|id| EvSpec::new(id, arrival, departure, duration))
            .collect::<Result<Vec<_>>>()?;
        FleetSpec::new(evs, power_kw)
    }

    /// Fleet whose EVs can use the whole grid (arrival 1, departure T).
    pub fn full_window(count: usize, duration: usize, power_kw: f64, grid: &TimeGrid) -> Result<Self> {
        FleetSpec::uniform(count, 1, grid.slots, duration, power_kw)
    }

    /// Randomized commuter mobility: arrival, departure and duration are
    /// rounded Gaussian draws (means 4, 29, 5.99 and standard deviations
    /// 1.5, 0.75, 1.14 slots), clamped to the grid. Triples that violate
    /// feasibility (window shorter than duration) are redrawn, up to
    /// [`MOBILITY_MAX_REDRAWS`] times per EV before giving up.
    pub fn gaussian_mobility<R: Rng>(count: usize, power_kw: f64, grid: &TimeGrid, rng: &mut R) -> Result<Self> {
        let arr = Normal::new(MOBILITY_ARRIVAL_MEAN, MOBILITY_ARRIVAL_SD).unwrap();
        let dep = Normal::new(MOBILITY_DEPARTURE_MEAN, MOBILITY_DEPARTURE_SD).unwrap();
        let dur = Normal::new(MOBILITY_DURATION_MEAN, MOBILITY_DURATION_SD).unwrap();
        let t = grid.slots;
        let clamp_slot = |x: f64| -> usize { (x.round().max(1.0) as usize).min(t) };
        let mut evs = Vec::with_capacity(count);
        for id in 1..=count {
            let mut drawn = None;
            for _ in 0..=MOBILITY_MAX_REDRAWS {
                let a = clamp_slot(arr.sample(rng));
                let d = clamp_slot(dep.sample(rng));
                let c = (dur.sample(rng).round().max(1.0)) as usize;
                if a <= d && d - a + 1 >= c {
                    drawn = Some(EvSpec {
                        id,
                        arrival: a,
                        departure: d,
                        duration: c,
                    });
                    break;
                }
            }
            match drawn {
                Some(ev) => evs.push(ev),
                None => {
                    return Err(Error::Invalid(format!(
                        "ev {id}: no feasible mobility draw within {MOBILITY_MAX_REDRAWS} redraws"
                    )))
                }
            }
        }
        FleetSpec::new(evs, power_kw)
    }
}

pub const MOBILITY_ARRIVAL_MEAN: f64 = 4.0;
pub const MOBILITY_ARRIVAL_SD: f64 = 1.5;
pub const MOBILITY_DEPARTURE_MEAN: f64 = 29.0;
pub const MOBILITY_DEPARTURE_SD: f64 = 0.75;
pub const MOBILITY_DURATION_MEAN: f64 = 5.99;
pub const MOBILITY_DURATION_SD: f64 = 1.14;
pub const MOBILITY_MAX_REDRAWS: usize = 100;

/// Start times for the whole fleet, one per EV in id order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleVector {
    pub starts: Vec<usize>,
}

impl ScheduleVector {
    /// Checks one start per EV and `arrival <= s <= departure - duration + 1`.
    pub fn new(starts: Vec<usize>, fleet: &FleetSpec) -> Result<Self> {
        if starts.len() != fleet.len() {
            return Err(Error::Dimension {
                what: "schedule starts",
                expected: fleet.len(),
                got: starts.len(),
            });
        }
        for (s, ev) in starts.iter().zip(&fleet.evs) {
            if *s < ev.arrival || *s > ev.latest_start() {
                return Err(Error::Invalid(format!(
                    "ev {}: start {} outside feasible range [{}, {}]",
                    ev.id,
                    s,
                    ev.arrival,
                    ev.latest_start()
                )));
            }
        }
        Ok(ScheduleVector { starts })
    }

    /// Everyone plugs in on arrival.
    pub fn at_arrival(fleet: &FleetSpec) -> Self {
        ScheduleVector {
            starts: fleet.evs.iter().map(|ev| ev.arrival).collect(),
        }
    }
}

/// Number of EVs charging in each slot: `n_t = #{i : s_i <= t <= s_i+C_i-1}`.
/// The sum over slots equals the sum of durations.
pub fn occupancy(starts: &[usize], fleet: &FleetSpec, grid: &TimeGrid) -> Vec<usize> {
    let mut n = vec![0usize; grid.slots];
    occupancy_into(&mut n, starts, fleet);
    n
}

pub(crate) fn occupancy_into(n: &mut [usize], starts: &[usize], fleet: &FleetSpec) {
    n.fill(0);
    for (s, ev) in starts.iter().zip(&fleet.evs) {
        for slot in n.iter_mut().skip(s - 1).take(ev.duration) {
            *slot += 1;
        }
    }
}

/// Number of EVs *starting* in each slot.
pub fn start_counts(starts: &[usize], grid: &TimeGrid) -> Vec<usize> {
    let mut counts = vec![0usize; grid.slots];
    for s in starts {
        counts[s - 1] += 1;
    }
    counts
}

/// Total transformer load: exogenous demand plus the fleet's charging power,
/// `L_t = exo_t + P * n_t`.
pub fn total_load(exo: &LoadProfile, starts: &[usize], fleet: &FleetSpec) -> Result<Vec<f64>> {
    if exo.grid.slots < required_slots(starts, fleet) {
        return Err(Error::Invalid(
            "schedule extends beyond the exogenous profile".into(),
        ));
    }
    let mut load = exo.values.clone();
    add_fleet_load(&mut load, starts, fleet);
    Ok(load)
}

pub(crate) fn add_fleet_load(load: &mut [f64], starts: &[usize], fleet: &FleetSpec) {
    for (s, ev) in starts.iter().zip(&fleet.evs) {
        for slot in load.iter_mut().skip(s - 1).take(ev.duration) {
            *slot += fleet.power_kw;
        }
    }
}

fn required_slots(starts: &[usize], fleet: &FleetSpec) -> usize {
    starts
        .iter()
        .zip(&fleet.evs)
        .map(|(s, ev)| s + ev.duration - 1)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn action_set_spans_arrival_to_latest_start() {
        let ev = EvSpec::new(1, 1, 30, 16).unwrap();
        assert_eq!(action_set(&ev).unwrap(), (1..=15).collect::<Vec<_>>());

        let single = EvSpec::new(1, 3, 3, 1).unwrap();
        assert_eq!(action_set(&single).unwrap(), vec![3]);

        let ev = EvSpec::new(1, 4, 29, 6).unwrap();
        assert_eq!(action_set(&ev).unwrap(), (4..=24).collect::<Vec<_>>());
    }

    #[test]
    fn infeasible_ev_is_rejected() {
        assert!(EvSpec::new(1, 5, 4, 1).is_err());
        assert!(EvSpec::new(1, 1, 3, 4).is_err());
        assert!(EvSpec::new(1, 0, 3, 1).is_err());
        assert!(EvSpec::new(1, 1, 3, 0).is_err());
    }

    #[test]
    fn occupancy_counts_active_evs() {
        let grid = TimeGrid::new(5, 0.5).unwrap();
        let fleet = FleetSpec::uniform(3, 1, 5, 2, 1.0).unwrap();
        let n = occupancy(&[1, 1, 4], &fleet, &grid);
        assert_eq!(n, vec![2, 2, 0, 1, 1]);
        let total: usize = n.iter().sum();
        let durations: usize = fleet.evs.iter().map(|e| e.duration).sum();
        assert_eq!(total, durations);
    }

    #[test]
    fn start_counts_count_only_starts() {
        let grid = TimeGrid::new(5, 0.5).unwrap();
        assert_eq!(start_counts(&[1, 1, 4], &grid), vec![2, 0, 0, 1, 0]);
    }

    #[test]
    fn total_load_adds_power_per_active_ev() {
        let grid = TimeGrid::new(5, 0.5).unwrap();
        let exo = LoadProfile::new(grid, ProfileKind::PowerKw, vec![1.0, 2.0, 3.0, 2.0, 1.0]).unwrap();
        let fleet = FleetSpec::uniform(3, 1, 5, 2, 1.0).unwrap();
        let load = total_load(&exo, &[1, 1, 4], &fleet).unwrap();
        assert_eq!(load, vec![3.0, 4.0, 3.0, 3.0, 2.0]);
    }

    #[test]
    fn schedule_vector_enforces_feasible_starts() {
        let fleet = FleetSpec::uniform(2, 2, 6, 3, 1.0).unwrap();
        assert!(ScheduleVector::new(vec![2, 4], &fleet).is_ok());
        assert!(ScheduleVector::new(vec![1, 4], &fleet).is_err());
        assert!(ScheduleVector::new(vec![2, 5], &fleet).is_err());
        assert!(ScheduleVector::new(vec![2], &fleet).is_err());
    }

    #[test]
    fn demand_profile_rejects_negative_values() {
        let grid = TimeGrid::new(3, 0.5).unwrap();
        assert!(LoadProfile::new(grid, ProfileKind::PowerKw, vec![1.0, -0.1, 0.0]).is_err());
        // Temperatures may be negative.
        assert!(LoadProfile::new(grid, ProfileKind::TemperatureC, vec![-5.0, 0.0, 5.0]).is_ok());
    }

    #[test]
    fn fleet_ids_must_be_contiguous() {
        let evs = vec![
            EvSpec::new(1, 1, 5, 2).unwrap(),
            EvSpec::new(3, 1, 5, 2).unwrap(),
        ];
        assert!(FleetSpec::new(evs, 3.0).is_err());
    }

    #[test]
    fn gaussian_mobility_draws_feasible_fleets() {
        let grid = TimeGrid::overnight();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let fleet = FleetSpec::gaussian_mobility(50, 3.0, &grid, &mut rng).unwrap();
        assert_eq!(fleet.len(), 50);
        fleet.validate(&grid).unwrap();
        for ev in &fleet.evs {
            assert!(ev.arrival >= 1 && ev.departure <= 30);
            assert!(ev.departure - ev.arrival + 1 >= ev.duration);
        }
        // Draws should hug the configured means.
        let mean_arrival: f64 =
            fleet.evs.iter().map(|e| e.arrival as f64).sum::<f64>() / fleet.len() as f64;
        assert!((mean_arrival - MOBILITY_ARRIVAL_MEAN).abs() < 1.0);
    }

    #[test]
    fn gaussian_mobility_is_reproducible() {
        let grid = TimeGrid::overnight();
        let mut a = ChaCha12Rng::seed_from_u64(7);
        let mut b = ChaCha12Rng::seed_from_u64(7);
        let fa = FleetSpec::gaussian_mobility(10, 3.0, &grid, &mut a).unwrap();
        let fb = FleetSpec::gaussian_mobility(10, 3.0, &grid, &mut b).unwrap();
        assert_eq!(fa, fb);
    }
}
