//! Sequential best-response scheduling.
//!
//! EVs take turns choosing the start time that maximizes their own payoff
//! given everyone else's current choice. A round updates every EV once; the
//! dynamics stop when the schedule moves by at most `tolerance` between
//! rounds (sup-norm over start times) or when `max_rounds` is exhausted.
//!
//! Tie handling: [`best_response`] draws uniformly at random among all
//! payoff-maximizing starts. Inside [`run_brd`] an EV only *moves* when the
//! drawn start strictly improves its payoff; on a tie with the incumbent the
//! EV stays put. This is what makes equilibria exact fixed points of the
//! dynamics and, whenever an ordinal potential exists, guarantees
//! termination (every accepted move strictly increases the potential).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::cost::GameContext;
use crate::error::{Error, Result};
use crate::model::ScheduleVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateOrder {
    /// EVs update in id order every round.
    FixedRoundRobin,
    /// EVs update in ascending order of their previous-round start times
    /// (ties by id).
    StartTimeAscending,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum InitialSchedule {
    /// Everyone starts at arrival.
    Arrival,
    /// Uniform draw from each EV's feasible starts.
    Random,
    Given(ScheduleVector),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrdConfig {
    /// Largest per-EV start change (in slots) still counted as converged.
    pub tolerance: f64,
    pub max_rounds: usize,
    pub update_order: UpdateOrder,
    pub seed: u64,
    pub initial: InitialSchedule,
}

impl Default for BrdConfig {
    fn default() -> Self {
        BrdConfig {
            tolerance: 0.0,
            max_rounds: 100,
            update_order: UpdateOrder::FixedRoundRobin,
            seed: 0,
            initial: InitialSchedule::Arrival,
        }
    }
}

impl BrdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Invalid(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::Invalid("max_rounds must be at least one".into()));
        }
        Ok(())
    }
}

/// One accepted (or declined) turn of the inner loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrdUpdate {
    pub round: usize,
    pub ev: usize,
    pub start: usize,
    pub payoff: f64,
    pub potential: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrdResult {
    pub schedule: ScheduleVector,
    pub rounds_used: usize,
    pub converged: bool,
    /// Potential after the initial schedule and after every turn, when one
    /// of the closed-form potentials applies to the configuration.
    pub potential_trajectory: Option<Vec<f64>>,
    /// For each EV, its payoff right after each of its own turns.
    pub payoff_trajectories: Vec<Vec<f64>>,
    /// Turn-by-turn log, one entry per EV per round.
    pub updates: Vec<BrdUpdate>,
}

/// Sup-norm distance between two schedules, in slots.
pub fn schedule_change_norm(a: &[usize], b: &[usize]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.abs_diff(*y))
        .max()
        .unwrap_or(0) as f64
}

/// Best response of EV `i` to the other EVs' starts: the payoff-maximizing
/// start, drawn uniformly among maximizers when several starts tie.
/// Returns the chosen start and its payoff.
pub fn best_response<R: Rng>(
    ctx: &GameContext,
    starts: &[usize],
    i: usize,
    rng: &mut R,
) -> Result<(usize, f64)> {
    let ev = &ctx.fleet.evs[i];
    let mut candidate = starts.to_vec();
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<usize> = Vec::new();
    for s in ev.arrival..=ev.latest_start() {
        candidate[i] = s;
        let u = ctx.payoff(i, &candidate)?;
        if u > best {
            best = u;
            ties.clear();
            ties.push(s);
        } else if u == best {
            ties.push(s);
        }
    }
    let pick = ties[rng.random_range(0..ties.len())];
    Ok((pick, best))
}

/// Runs sequential best-response dynamics to a fixed point (or to the round
/// budget). Non-convergence is reported through `converged`, never as an
/// error.
pub fn run_brd(ctx: &GameContext, config: &BrdConfig) -> Result<BrdResult> {
    config.validate()?;
    let n = ctx.fleet.len();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);

    let mut starts = match &config.initial {
        InitialSchedule::Arrival => ScheduleVector::at_arrival(ctx.fleet).starts,
        InitialSchedule::Random => ctx
            .fleet
            .evs
            .iter()
            .map(|ev| rng.random_range(ev.arrival..=ev.latest_start()))
            .collect(),
        InitialSchedule::Given(s) => ScheduleVector::new(s.starts.clone(), ctx.fleet)?.starts,
    };

    let track_potential = ctx.potential_applies();
    let mut potential_trajectory = if track_potential {
        Some(vec![match ctx.potential(&starts) {
            Some(phi) => phi,
            None => return Err(Error::Mode("potential evaluation failed".into())),
        }])
    } else {
        None
    };
    let mut payoff_trajectories = vec![Vec::new(); n];
    let mut updates = Vec::new();

    let mut rounds_used = 0;
    let mut converged = n == 0;
    for round in 1..=config.max_rounds {
        rounds_used = round;
        let previous = starts.clone();

        let mut order: Vec<usize> = (0..n).collect();
        if config.update_order == UpdateOrder::StartTimeAscending {
            order.sort_by_key(|&i| (previous[i], i));
        }

        for &i in &order {
            let incumbent_payoff = ctx.payoff(i, &starts)?;
            let (choice, best) = best_response(ctx, &starts, i, &mut rng)?;
            // Move only on strict improvement; ties keep the incumbent.
            if best > incumbent_payoff {
                starts[i] = choice;
            }
            let payoff = ctx.payoff(i, &starts)?;
            payoff_trajectories[i].push(payoff);
            let potential = if track_potential {
                let phi = ctx.potential(&starts);
                if let (Some(traj), Some(value)) = (potential_trajectory.as_mut(), phi) {
                    traj.push(value);
                }
                phi
            } else {
                None
            };
            updates.push(BrdUpdate {
                round,
                ev: i + 1,
                start: starts[i],
                payoff,
                potential,
            });
        }

        if schedule_change_norm(&starts, &previous) <= config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(BrdResult {
        schedule: ScheduleVector { starts },
        rounds_used,
        converged,
        potential_trajectory,
        payoff_trajectories,
        updates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostConfig, InertiaMode, WindowMode};
    use crate::model::{FleetSpec, LoadProfile, ProfileKind, TimeGrid};
    use crate::thermal::TransformerParams;

    struct Fixture {
        exo: LoadProfile,
        amb: LoadProfile,
        fleet: FleetSpec,
        transformer: TransformerParams,
        cost: CostConfig,
    }

    impl Fixture {
        fn new(exo_values: Vec<f64>, fleet: FleetSpec, cost: CostConfig) -> Self {
            let grid = TimeGrid::new(exo_values.len(), 0.5).unwrap();
            Fixture {
                exo: LoadProfile::new(grid, ProfileKind::PowerKw, exo_values).unwrap(),
                amb: LoadProfile::flat(grid, ProfileKind::TemperatureC, 20.0).unwrap(),
                fleet,
                transformer: TransformerParams::default(),
                cost,
            }
        }

        fn ctx(&self) -> GameContext<'_> {
            GameContext::new(&self.exo, &self.amb, &self.fleet, &self.transformer, &self.cost)
                .unwrap()
        }
    }

    fn memoryless_losses() -> CostConfig {
        CostConfig {
            alpha: 0.0,
            inertia: InertiaMode::Memoryless,
            ..Default::default()
        }
    }

    #[test]
    fn single_ev_picks_the_valley() {
        let fleet = FleetSpec::uniform(1, 1, 4, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![3.0, 1.0, 1.0, 3.0], fleet, memoryless_losses());
        let ctx = fx.ctx();
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let (choice, _) = best_response(&ctx, &[1], 0, &mut rng).unwrap();
        assert_eq!(choice, 2);
    }

    #[test]
    fn tie_break_is_uniform_over_maximizers() {
        // Flat exogenous load, single EV: every feasible start ties, so the
        // draw must be uniform. Chi-square test against the uniform law at
        // the 1% level, 5 starts, 10^4 draws.
        let fleet = FleetSpec::uniform(1, 1, 6, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![2.0; 6], fleet, memoryless_losses());
        let ctx = fx.ctx();
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let k = 5usize; // starts 1..=5
        let draws = 10_000usize;
        let mut counts = vec![0usize; k];
        for _ in 0..draws {
            let (choice, _) = best_response(&ctx, &[1], 0, &mut rng).unwrap();
            counts[choice - 1] += 1;
        }
        let expected = draws as f64 / k as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 1% critical value of chi-square with 4 degrees of freedom.
        assert!(chi2 < 13.2767, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn brd_converges_and_potential_never_decreases() {
        let fleet = FleetSpec::uniform(4, 1, 8, 2, 1.0).unwrap();
        let fx = Fixture::new(
            vec![4.0, 3.0, 1.0, 0.5, 0.5, 1.0, 3.0, 4.0],
            fleet,
            memoryless_losses(),
        );
        let ctx = fx.ctx();
        let result = run_brd(&ctx, &BrdConfig::default()).unwrap();
        assert!(result.converged);
        let traj = result.potential_trajectory.as_ref().unwrap();
        for pair in traj.windows(2) {
            assert!(
                pair[1] >= pair[0] - 1e-12,
                "potential decreased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
        // A fixed point of the dynamics admits no strictly improving move.
        let starts = &result.schedule.starts;
        for i in 0..4 {
            let u = ctx.payoff(i, starts).unwrap();
            for s in 1..=7usize {
                let mut dev = starts.clone();
                dev[i] = s;
                assert!(ctx.payoff(i, &dev).unwrap() <= u + 1e-12);
            }
        }
    }

    #[test]
    fn brd_respects_given_initial_schedule() {
        let fleet = FleetSpec::uniform(2, 1, 5, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0, 2.0, 3.0, 2.0, 1.0], fleet, memoryless_losses());
        let ctx = fx.ctx();
        let config = BrdConfig {
            initial: InitialSchedule::Given(ScheduleVector {
                starts: vec![1, 4],
            }),
            ..Default::default()
        };
        let result = run_brd(&ctx, &config).unwrap();
        // (1,4) is already an equilibrium of this valley instance.
        assert!(result.converged);
        assert_eq!(result.schedule.starts, vec![1, 4]);
        assert_eq!(result.rounds_used, 1);
    }

    #[test]
    fn brd_rejects_infeasible_given_schedule() {
        let fleet = FleetSpec::uniform(2, 2, 5, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0; 5], fleet, memoryless_losses());
        let ctx = fx.ctx();
        let config = BrdConfig {
            initial: InitialSchedule::Given(ScheduleVector {
                starts: vec![1, 4],
            }),
            ..Default::default()
        };
        assert!(run_brd(&ctx, &config).is_err());
    }

    #[test]
    fn start_time_ascending_reorders_updates() {
        let fleet = FleetSpec::uniform(3, 1, 6, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0; 6], fleet, memoryless_losses());
        let ctx = fx.ctx();
        let config = BrdConfig {
            update_order: UpdateOrder::StartTimeAscending,
            initial: InitialSchedule::Given(ScheduleVector {
                starts: vec![5, 3, 1],
            }),
            ..Default::default()
        };
        let result = run_brd(&ctx, &config).unwrap();
        let first_round: Vec<usize> = result
            .updates
            .iter()
            .filter(|u| u.round == 1)
            .map(|u| u.ev)
            .collect();
        assert_eq!(first_round, vec![3, 2, 1]);
    }

    #[test]
    fn same_seed_reproduces_the_run() {
        let fleet = FleetSpec::uniform(5, 1, 10, 3, 1.0).unwrap();
        let fx = Fixture::new(vec![2.0; 10], fleet, memoryless_losses());
        let ctx = fx.ctx();
        let config = BrdConfig {
            seed: 99,
            initial: InitialSchedule::Random,
            ..Default::default()
        };
        let a = run_brd(&ctx, &config).unwrap();
        let b = run_brd(&ctx, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn no_potential_is_recorded_outside_guaranteed_scenarios() {
        // Own window, with inertia, alpha > 0: no closed-form potential.
        let fleet = FleetSpec::uniform(2, 1, 5, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0, 2.0, 3.0, 2.0, 1.0], fleet, CostConfig::default());
        let ctx = fx.ctx();
        let result = run_brd(&ctx, &BrdConfig::default()).unwrap();
        assert!(result.potential_trajectory.is_none());
        // Common window restores it, with inertia allowed.
        let common = CostConfig {
            window_mode: WindowMode::Common((1..=5).collect()),
            ..Default::default()
        };
        let fleet = FleetSpec::uniform(2, 1, 5, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0, 2.0, 3.0, 2.0, 1.0], fleet, common);
        let result = run_brd(&fx.ctx(), &BrdConfig::default()).unwrap();
        assert!(result.potential_trajectory.is_some());
    }

    #[test]
    fn empty_fleet_converges_immediately() {
        let fleet = FleetSpec::new(vec![], 1.0).unwrap();
        let fx = Fixture::new(vec![1.0; 4], fleet, memoryless_losses());
        let result = run_brd(&fx.ctx(), &BrdConfig::default()).unwrap();
        assert!(result.converged);
        assert!(result.schedule.starts.is_empty());
    }
}
