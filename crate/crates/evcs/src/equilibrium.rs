//! Exhaustive equilibrium analysis for small instances: Nash checks over
//! the full joint schedule space, the efficiency gap between the best joint
//! outcome and the worst equilibrium, and the non-atomic (fluid) limit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{valley_fill_exact, ValleyFill};
use crate::cost::{CostConfig, GameContext, InertiaMode, WindowMode};
use crate::error::{Error, Result};
use crate::model::{action_set, FleetSpec, LoadProfile, ProfileKind, ScheduleVector, TimeGrid};

/// Joint schedules scanned before [`enumerate_equilibria`] refuses to run.
pub const DEFAULT_SEARCH_BUDGET: u128 = 100_000_000;

/// Relative slack under which two sum-payoffs count as tied.
const TIE_EPS: f64 = 1e-12;

/// True iff no EV has a strictly improving unilateral deviation. Exact
/// comparisons, no tolerance.
pub fn is_nash(ctx: &GameContext, starts: &[usize]) -> Result<bool> {
    let schedule = ScheduleVector::new(starts.to_vec(), ctx.fleet)?;
    is_nash_feasible(ctx, &schedule.starts)
}

/// Nash check for starts already known to be feasible.
fn is_nash_feasible(ctx: &GameContext, starts: &[usize]) -> Result<bool> {
    let mut candidate = starts.to_vec();
    for (i, ev) in ctx.fleet.evs.iter().enumerate() {
        let incumbent = ctx.payoff(i, starts)?;
        for s in ev.arrival..=ev.latest_start() {
            if s == starts[i] {
                continue;
            }
            candidate[i] = s;
            if ctx.payoff(i, &candidate)? > incumbent {
                return Ok(false);
            }
        }
        candidate[i] = starts[i];
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeReport {
    pub equilibria: Vec<ScheduleVector>,
    /// Highest sum of payoffs over every joint schedule.
    pub best_sum_payoff: f64,
    /// Every joint schedule attaining the best sum (ties kept).
    pub best_schedules: Vec<ScheduleVector>,
    /// Lowest sum of payoffs over the equilibria; NaN when none exist.
    pub worst_ne_sum_payoff: f64,
    /// `1 - best / worst_ne`, in `[0, 1)` for strictly negative payoffs;
    /// NaN when no equilibrium exists.
    pub pod: f64,
    pub search_space_size: u128,
}

struct Partition {
    equilibria: Vec<Vec<usize>>,
    best_w: f64,
    best: Vec<Vec<usize>>,
    worst_ne_w: f64,
}

fn tied(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= TIE_EPS * a.abs().max(b.abs())
}

/// Scans every joint schedule: collects all equilibria, the global optimum
/// of the payoff sum (all maximizers), and the efficiency ratio. Refuses
/// search spaces larger than `budget`, and insists every payoff sum is
/// strictly negative so that the ratio is meaningful.
pub fn enumerate_equilibria(ctx: &GameContext, budget: u128) -> Result<NeReport> {
    let n = ctx.fleet.len();
    if n == 0 {
        return Err(Error::Invalid(
            "equilibrium enumeration needs at least one EV".into(),
        ));
    }
    let sets: Vec<Vec<usize>> = ctx
        .fleet
        .evs
        .iter()
        .map(action_set)
        .collect::<Result<Vec<_>>>()?;
    let mut size: u128 = 1;
    for set in &sets {
        size = size.saturating_mul(set.len() as u128);
    }
    if size > budget {
        return Err(Error::SearchRefused { size, budget });
    }

    let partitions: Vec<Partition> = sets[0]
        .par_iter()
        .map(|&s0| scan_partition(ctx, &sets, s0))
        .collect::<Result<Vec<_>>>()?;

    let mut equilibria: Vec<Vec<usize>> = Vec::new();
    let mut best_w = f64::NEG_INFINITY;
    let mut best: Vec<Vec<usize>> = Vec::new();
    let mut worst_ne_w = f64::INFINITY;
    for part in partitions {
        equilibria.extend(part.equilibria);
        if tied(part.best_w, best_w) {
            best.extend(part.best);
        } else if part.best_w > best_w {
            best_w = part.best_w;
            best = part.best;
        }
        worst_ne_w = worst_ne_w.min(part.worst_ne_w);
    }

    let (worst_ne_sum_payoff, pod) = if equilibria.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (worst_ne_w, 1.0 - best_w / worst_ne_w)
    };
    Ok(NeReport {
        equilibria: equilibria
            .into_iter()
            .map(|starts| ScheduleVector { starts })
            .collect(),
        best_sum_payoff: best_w,
        best_schedules: best.into_iter().map(|starts| ScheduleVector { starts }).collect(),
        worst_ne_sum_payoff,
        pod,
        search_space_size: size,
    })
}

fn scan_partition(ctx: &GameContext, sets: &[Vec<usize>], s0: usize) -> Result<Partition> {
    let n = sets.len();
    let mut part = Partition {
        equilibria: Vec::new(),
        best_w: f64::NEG_INFINITY,
        best: Vec::new(),
        worst_ne_w: f64::INFINITY,
    };
    let mut idx = vec![0usize; n - 1];
    let mut starts = vec![0usize; n];
    starts[0] = s0;
    loop {
        for k in 1..n {
            starts[k] = sets[k][idx[k - 1]];
        }
        let w = ctx.sum_payoff(&starts)?;
        if w >= 0.0 {
            return Err(Error::SignConvention(format!(
                "payoff sum {w} at schedule {starts:?} is not strictly negative"
            )));
        }
        if tied(w, part.best_w) {
            part.best.push(starts.clone());
        } else if w > part.best_w {
            part.best_w = w;
            part.best.clear();
            part.best.push(starts.clone());
        }
        if is_nash_feasible(ctx, &starts)? {
            part.worst_ne_w = part.worst_ne_w.min(w);
            part.equilibria.push(starts.clone());
        }

        let mut k = n - 1;
        loop {
            if k == 0 {
                return Ok(part);
            }
            idx[k - 1] += 1;
            if idx[k - 1] < sets[k].len() {
                break;
            }
            idx[k - 1] = 0;
            k -= 1;
        }
    }
}

/// Fluid-limit valley filling: the fraction of an infinitesimal EV
/// continuum charging in each slot, found by water filling with per-slot
/// fractions in `[0, 1]` and total mass `duration`.
pub fn nonatomic_valley_fill(exo: &[f64], power: f64, duration: usize) -> Result<ValleyFill> {
    if duration == 0 || duration > exo.len() {
        return Err(Error::Invalid(format!(
            "duration {duration} must lie in [1, {}]",
            exo.len()
        )));
    }
    valley_fill_exact(exo, duration as f64, power, 0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PodRow {
    pub fleet_size: usize,
    pub pod: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PodTable {
    pub rows: Vec<PodRow>,
    /// True when the sequence is non-increasing or ends below 0.05.
    pub trend_ok: bool,
}

/// Efficiency loss of decentralization as the fleet grows, under the
/// assumptions that make the fluid limit lossless: no per-EV monetary
/// term, losses-only cost (alpha = 0) over a window shared by everyone,
/// all EVs free to charge anywhere, and an exogenous profile that is
/// non-increasing over the first `duration` slots and non-decreasing over
/// the last `duration` slots. Total fleet power is held fixed while the
/// fleet grows, so each EV charges at `power_total / I`.
pub fn pod_nonatomic_check(
    exo: &LoadProfile,
    power_total: f64,
    duration: usize,
    fleet_sizes: &[usize],
    budget: u128,
) -> Result<PodTable> {
    let t = exo.grid.slots;
    if duration == 0 || duration > t {
        return Err(Error::Invalid(format!(
            "hypothesis violated: duration {duration} must lie in [1, {t}]"
        )));
    }
    for k in 1..duration {
        if exo.values[k] > exo.values[k - 1] {
            return Err(Error::Invalid(format!(
                "hypothesis violated: exogenous profile must be non-increasing over \
                 the first {duration} slots, rises at slot {}",
                k + 1
            )));
        }
        let tail = t - duration;
        if exo.values[tail + k] < exo.values[tail + k - 1] {
            return Err(Error::Invalid(format!(
                "hypothesis violated: exogenous profile must be non-decreasing over \
                 the last {duration} slots, falls at slot {}",
                tail + k + 1
            )));
        }
    }
    if fleet_sizes.is_empty() {
        return Err(Error::Invalid("no fleet sizes given".into()));
    }

    let ambient = LoadProfile::flat(exo.grid, ProfileKind::TemperatureC, 20.0)?;
    let cost = CostConfig {
        alpha: 0.0,
        window_mode: WindowMode::Common((1..=t).collect()),
        inertia: InertiaMode::Memoryless,
        ..Default::default()
    };
    let transformer = crate::thermal::TransformerParams::default();

    let mut rows = Vec::with_capacity(fleet_sizes.len());
    for &count in fleet_sizes {
        if count == 0 {
            return Err(Error::Invalid("fleet sizes must be positive".into()));
        }
        let fleet = FleetSpec::uniform(count, 1, t, duration, power_total / count as f64)?;
        let ctx = GameContext::new(exo, &ambient, &fleet, &transformer, &cost)?;
        let report = enumerate_equilibria(&ctx, budget)?;
        rows.push(PodRow {
            fleet_size: count,
            pod: report.pod,
        });
    }

    let monotone = rows.windows(2).all(|w| w[1].pod <= w[0].pod + 1e-9);
    let trend_ok = monotone || rows.last().map(|r| r.pod < 0.05).unwrap_or(false);
    Ok(PodTable { rows, trend_ok })
}

/// Shared by tests and examples: the 5-slot hill instance with three
/// identical EVs where three starts-at-the-edges equilibria coexist.
pub fn hill_instance() -> (LoadProfile, LoadProfile, FleetSpec, CostConfig) {
    let grid = TimeGrid::new(5, 0.5).unwrap();
    let exo = LoadProfile::new(
        grid,
        ProfileKind::PowerKw,
        vec![1.0, 2.0, 3.0, 2.0, 1.0],
    )
    .unwrap();
    let ambient = LoadProfile::flat(grid, ProfileKind::TemperatureC, 20.0).unwrap();
    let fleet = FleetSpec::uniform(3, 1, 5, 2, 1.0).unwrap();
    let cost = CostConfig {
        alpha: 1.0,
        inertia: InertiaMode::Memoryless,
        ..Default::default()
    };
    (exo, ambient, fleet, cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{MonotoneTable, PricingMode};
    use crate::thermal::TransformerParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn losses_only(t: usize) -> CostConfig {
        CostConfig {
            alpha: 0.0,
            window_mode: WindowMode::Common((1..=t).collect()),
            inertia: InertiaMode::Memoryless,
            ..Default::default()
        }
    }

    fn grid_profile(values: Vec<f64>) -> (LoadProfile, LoadProfile) {
        let grid = TimeGrid::new(values.len(), 0.5).unwrap();
        let exo = LoadProfile::new(grid, ProfileKind::PowerKw, values).unwrap();
        let amb = LoadProfile::flat(grid, ProfileKind::TemperatureC, 20.0).unwrap();
        (exo, amb)
    }

    #[test]
    fn single_ev_equilibria_are_its_argmax_starts() {
        let (exo, amb) = grid_profile(vec![3.0, 1.0, 1.0, 3.0]);
        let fleet = FleetSpec::uniform(1, 1, 4, 2, 1.0).unwrap();
        let cost = losses_only(4);
        let transformer = TransformerParams::default();
        let ctx = GameContext::new(&exo, &amb, &fleet, &transformer, &cost).unwrap();
        let report = enumerate_equilibria(&ctx, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(report.search_space_size, 3);
        assert_eq!(report.equilibria.len(), 1);
        assert_eq!(report.equilibria[0].starts, vec![2]);
        assert!(report.pod.abs() < 1e-12);
        assert!(is_nash(&ctx, &[2]).unwrap());
        assert!(!is_nash(&ctx, &[1]).unwrap());
    }

    #[test]
    fn hill_instance_has_the_three_edge_equilibria() {
        let (exo, amb, fleet, cost) = hill_instance();
        let transformer = TransformerParams::low_inertia();
        let ctx = GameContext::new(&exo, &amb, &fleet, &transformer, &cost).unwrap();
        for starts in [[1, 1, 4], [1, 4, 1], [4, 1, 1]] {
            assert!(is_nash(&ctx, &starts).unwrap(), "{starts:?} should be an equilibrium");
        }
        assert!(!is_nash(&ctx, &[3, 3, 3]).unwrap());
        let report = enumerate_equilibria(&ctx, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(report.search_space_size, 64);
        let found: Vec<&[usize]> = report
            .equilibria
            .iter()
            .map(|s| s.starts.as_slice())
            .collect();
        for starts in [[1usize, 1, 4], [1, 4, 1], [4, 1, 1]] {
            assert!(found.contains(&starts.as_slice()));
        }
        assert!(report.pod >= 0.0 && report.pod < 1.0);
    }

    #[test]
    fn enumeration_matches_direct_deviation_scan() {
        // Independent path: recompute every payoff from raw loads and a
        // hand-rolled window sum, then compare equilibrium sets.
        let (exo, amb) = grid_profile(vec![2.0, 1.0, 0.5, 1.5, 2.5]);
        let fleet = FleetSpec::uniform(3, 1, 5, 2, 1.0).unwrap();
        let cost = losses_only(5);
        let transformer = TransformerParams::default();
        let ctx = GameContext::new(&exo, &amb, &fleet, &transformer, &cost).unwrap();
        let report = enumerate_equilibria(&ctx, DEFAULT_SEARCH_BUDGET).unwrap();

        let direct_payoff = |starts: &[usize]| -> f64 {
            let load = crate::model::total_load(&exo, starts, &fleet).unwrap();
            -load.iter().map(|l| 0.06 * l * l).sum::<f64>()
        };
        let mut direct = Vec::new();
        for a in 1..=4usize {
            for b in 1..=4usize {
                for c in 1..=4usize {
                    let starts = [a, b, c];
                    let mut ne = true;
                    'outer: for i in 0..3 {
                        let u = direct_payoff(&starts);
                        for s in 1..=4usize {
                            let mut dev = starts;
                            dev[i] = s;
                            if direct_payoff(&dev) > u {
                                ne = false;
                                break 'outer;
                            }
                        }
                    }
                    if ne {
                        direct.push(vec![a, b, c]);
                    }
                }
            }
        }
        let found: Vec<Vec<usize>> = report.equilibria.iter().map(|s| s.starts.clone()).collect();
        assert_eq!(found, direct);
    }

    #[test]
    fn oversized_search_space_is_refused() {
        let (exo, amb) = grid_profile(vec![1.0; 5]);
        let fleet = FleetSpec::uniform(3, 1, 5, 2, 1.0).unwrap();
        let cost = losses_only(5);
        let transformer = TransformerParams::default();
        let ctx = GameContext::new(&exo, &amb, &fleet, &transformer, &cost).unwrap();
        match enumerate_equilibria(&ctx, 10) {
            Err(Error::SearchRefused { size, budget }) => {
                assert_eq!(size, 64);
                assert_eq!(budget, 10);
            }
            other => panic!("expected a refusal, got {other:?}"),
        }
    }

    #[test]
    fn non_negative_payoff_sum_is_rejected() {
        let (exo, amb) = grid_profile(vec![0.1; 4]);
        let fleet = FleetSpec::uniform(1, 1, 4, 2, 0.1).unwrap();
        let mut cost = losses_only(4);
        // A monotone transform crossing zero makes some payoffs positive.
        cost.pricing = PricingMode::PerEv(vec![MonotoneTable::new(
            vec![0.0, 10.0],
            vec![-5.0, 5.0],
        )
        .unwrap()]);
        let transformer = TransformerParams::default();
        let ctx = GameContext::new(&exo, &amb, &fleet, &transformer, &cost).unwrap();
        assert!(matches!(
            enumerate_equilibria(&ctx, DEFAULT_SEARCH_BUDGET),
            Err(Error::SignConvention(_))
        ));
    }

    #[test]
    fn nonatomic_flat_profile_spreads_uniformly() {
        let vf = nonatomic_valley_fill(&[2.0; 6], 1.0, 3).unwrap();
        for x in &vf.x {
            assert!((x - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn nonatomic_hill_fills_edges() {
        let vf = nonatomic_valley_fill(&[1.0, 2.0, 3.0, 2.0, 1.0], 1.0, 2).unwrap();
        let expect = [1.0, 0.0, 0.0, 0.0, 1.0];
        for (x, e) in vf.x.iter().zip(expect) {
            assert!((x - e).abs() < 1e-6);
        }
    }

    #[test]
    fn nonatomic_solution_is_monotone_at_the_edges() {
        // Valley-shaped profiles: non-increasing over the first C slots and
        // non-decreasing over the last C. The filled fractions then rise at
        // the start and fall at the end, so rounding them to start-time
        // schedules stays feasible.
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..20 {
            let t = 8;
            let c = 3;
            let mut exo = vec![0.0; t];
            let mut head: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..5.0)).collect();
            head.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let mut tail: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..5.0)).collect();
            tail.sort_by(|a, b| a.partial_cmp(b).unwrap());
            exo[..c].copy_from_slice(&head);
            for k in c..t - c {
                exo[k] = rng.random_range(0.0..2.0);
            }
            exo[t - c..].copy_from_slice(&tail);

            let vf = nonatomic_valley_fill(&exo, 1.0, c).unwrap();
            for k in 1..c {
                assert!(
                    vf.x[k] >= vf.x[k - 1] - 1e-9,
                    "head not rising: {:?}",
                    vf.x
                );
                assert!(
                    vf.x[t - k] <= vf.x[t - k - 1] + 1e-9,
                    "tail not falling: {:?}",
                    vf.x
                );
            }
        }
    }

    #[test]
    fn pod_vanishes_with_slack_capacity() {
        let (exo, _) = grid_profile(vec![3.0, 1.0, 0.5, 0.5, 1.0, 3.0, 0.0, 0.0]);
        // Hypotheses: non-increasing over the first two slots, and the
        // profile ends on two equal slots.
        let table = pod_nonatomic_check(&exo, 2.0, 2, &[2, 3], DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(table.trend_ok);
        assert!(table.rows.last().unwrap().pod < 0.05);
    }

    #[test]
    fn pod_check_rejects_rising_head() {
        let (exo, _) = grid_profile(vec![0.0, 1.0, 0.5, 0.5, 0.5, 1.0]);
        let err = pod_nonatomic_check(&exo, 1.0, 2, &[2], DEFAULT_SEARCH_BUDGET).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("non-increasing"), "{message}");
    }
}
