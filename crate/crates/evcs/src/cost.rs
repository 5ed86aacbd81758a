//! Cost structure of the charging game.
//!
//! Each EV pays a distribution-network term summed over an accounting window
//! (its own charging slots, or a fixed common set of slots) that blends
//! transformer aging and resistive energy losses with weight `alpha`, plus an
//! optional monetary term `beta * sum(prices over its charging slots)`. The
//! payoff is the negative of an increasing transformation of that total, so
//! best responses are cost minimizers.
//!
//! Two closed-form potentials certify convergence of sequential best
//! responses: one for a common accounting window under either thermal model,
//! one for own-window accounting without thermal memory (also valid with
//! inertia when `alpha` is zero, since losses carry no state).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{occupancy, FleetSpec, LoadProfile, ScheduleVector, TimeGrid};
use crate::thermal::{
    hotspot_memoryless, hotspot_with_inertia, hotspot_with_inertia_from, TransformerParams,
};

/// Which slots an EV is billed for in the network term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WindowMode {
    /// The EV's own charging slots, `s_i..s_i+C_i-1`.
    Own,
    /// A fixed set of slots shared by all EVs (1-based, strictly increasing).
    Common(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InertiaMode {
    WithInertia,
    Memoryless,
}

/// Strictly increasing piecewise-linear map, extended linearly beyond its
/// breakpoints. Used as a per-EV transformation of the total cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Dimension {
                what: "pricing table ordinates",
                expected: xs.len(),
                got: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::Invalid("pricing table needs at least two points".into()));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Invalid(
                    "pricing table abscissae must be strictly increasing".into(),
                ));
            }
        }
        for w in ys.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Invalid(
                    "pricing table must be strictly increasing".into(),
                ));
            }
        }
        Ok(MonotoneTable { xs, ys })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        // Locate the segment; clamp to the end slopes outside the table.
        let (i, j) = if x <= self.xs[0] {
            (0, 1)
        } else if x >= self.xs[n - 1] {
            (n - 2, n - 1)
        } else {
            let mut k = 1;
            while self.xs[k] < x {
                k += 1;
            }
            (k - 1, k)
        };
        let slope = (self.ys[j] - self.ys[i]) / (self.xs[j] - self.xs[i]);
        self.ys[i] + slope * (x - self.xs[i])
    }
}

/// Per-EV transformation of the billed cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PricingMode {
    Identity,
    /// One table per EV, or a single shared table.
    PerEv(Vec<MonotoneTable>),
}

/// The monetary component of the bill.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EvCostMode {
    Zero,
    /// Sum of per-slot prices over the EV's charging slots; one profile per
    /// EV, or a single shared profile.
    PriceSum(Vec<LoadProfile>),
}

/// Full cost configuration of the game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    /// Blend between aging (1) and losses (0) in the network term.
    pub alpha: f64,
    /// Weight of the monetary term.
    pub beta: f64,
    /// Transformer series resistance (ohm-scaled loss coefficient).
    pub r_transformer: f64,
    /// Line resistance.
    pub r_line: f64,
    pub window_mode: WindowMode,
    pub pricing: PricingMode,
    pub ev_cost: EvCostMode,
    pub inertia: InertiaMode,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            alpha: 1.0,
            beta: 0.0,
            r_transformer: 0.03,
            r_line: 0.03,
            window_mode: WindowMode::Own,
            pricing: PricingMode::Identity,
            ev_cost: EvCostMode::Zero,
            inertia: InertiaMode::WithInertia,
        }
    }
}

impl CostConfig {
    pub fn losses_only() -> Self {
        CostConfig {
            alpha: 0.0,
            ..Default::default()
        }
    }

    /// Combined loss resistance.
    pub fn r_total(&self) -> f64 {
        self.r_transformer + self.r_line
    }

    /// Resistive losses for a total load, `(r_transformer + r_line) * L^2`.
    pub fn joule_losses(&self, load_kw: f64) -> f64 {
        self.r_total() * load_kw * load_kw
    }

    pub fn validate(&self, fleet: &FleetSpec, grid: &TimeGrid) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) || !self.alpha.is_finite() {
            return Err(Error::Invalid(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Invalid(format!(
                "beta must be non-negative, got {}",
                self.beta
            )));
        }
        for (name, r) in [("r_transformer", self.r_transformer), ("r_line", self.r_line)] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::Invalid(format!(
                    "{name} must be non-negative, got {r}"
                )));
            }
        }
        if let WindowMode::Common(slots) = &self.window_mode {
            if slots.is_empty() {
                return Err(Error::Invalid("common window must not be empty".into()));
            }
            for w in slots.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::Invalid(
                        "common window slots must be strictly increasing".into(),
                    ));
                }
            }
            let last = *slots.last().unwrap();
            if slots[0] == 0 || last > grid.slots {
                return Err(Error::Invalid(format!(
                    "common window slots must lie in 1..={}, got range [{}, {last}]",
                    grid.slots, slots[0]
                )));
            }
        }
        if let PricingMode::PerEv(tables) = &self.pricing {
            if tables.len() != 1 && tables.len() != fleet.len() {
                return Err(Error::Dimension {
                    what: "pricing tables",
                    expected: fleet.len(),
                    got: tables.len(),
                });
            }
        }
        if let EvCostMode::PriceSum(prices) = &self.ev_cost {
            if prices.len() != 1 && prices.len() != fleet.len() {
                return Err(Error::Dimension {
                    what: "price profiles",
                    expected: fleet.len(),
                    got: prices.len(),
                });
            }
            for p in prices {
                if p.values.len() != grid.slots {
                    return Err(Error::Dimension {
                        what: "price profile slots",
                        expected: grid.slots,
                        got: p.values.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Everything needed to evaluate payoffs for one scheduling problem.
///
/// The context borrows its inputs; constructing one is cheap and it is the
/// unit handed to the scheduler, the equilibrium search and the experiments.
#[derive(Clone, Copy)]
pub struct GameContext<'a> {
    pub exo: &'a LoadProfile,
    pub ambient: &'a LoadProfile,
    pub fleet: &'a FleetSpec,
    pub transformer: &'a TransformerParams,
    pub cost: &'a CostConfig,
    /// Chained initial top-oil rise; `None` derives it from
    /// `transformer.initial_hotspot_c` and the first slot.
    pub initial_top_oil_rise_c: Option<f64>,
}

impl<'a> GameContext<'a> {
    pub fn new(
        exo: &'a LoadProfile,
        ambient: &'a LoadProfile,
        fleet: &'a FleetSpec,
        transformer: &'a TransformerParams,
        cost: &'a CostConfig,
    ) -> Result<Self> {
        fleet.validate(&exo.grid)?;
        cost.validate(fleet, &exo.grid)?;
        transformer.validate()?;
        if ambient.values.len() != exo.values.len() {
            return Err(Error::Dimension {
                what: "ambient profile",
                expected: exo.values.len(),
                got: ambient.values.len(),
            });
        }
        Ok(GameContext {
            exo,
            ambient,
            fleet,
            transformer,
            cost,
            initial_top_oil_rise_c: None,
        })
    }

    pub fn with_initial_top_oil(mut self, rise_c: f64) -> Self {
        self.initial_top_oil_rise_c = Some(rise_c);
        self
    }

    pub fn slots(&self) -> usize {
        self.exo.grid.slots
    }

    /// Total load under a schedule.
    pub fn total_load(&self, starts: &[usize]) -> Vec<f64> {
        let mut load = self.exo.values.clone();
        crate::model::add_fleet_load(&mut load, starts, self.fleet);
        load
    }

    fn trace_aging(&self, load: Vec<f64>) -> Result<Vec<f64>> {
        let profile = LoadProfile {
            grid: self.exo.grid,
            kind: self.exo.kind,
            values: load,
        };
        let trace = match self.cost.inertia {
            InertiaMode::Memoryless => {
                hotspot_memoryless(&profile, self.ambient, self.transformer)?
            }
            InertiaMode::WithInertia => match self.initial_top_oil_rise_c {
                Some(rise) => {
                    hotspot_with_inertia_from(&profile, self.ambient, self.transformer, rise)?
                }
                None => hotspot_with_inertia(&profile, self.ambient, self.transformer)?,
            },
        };
        Ok(trace.aging)
    }

    /// Per-slot network cost `alpha * aging + (1 - alpha) * losses` for an
    /// explicit total load. The full thermal trace is recomputed from the
    /// start of the horizon; there is no incremental caching, so a candidate
    /// deviation is always costed exactly like a fresh evaluation.
    fn slot_costs(&self, load: Vec<f64>) -> Result<Vec<f64>> {
        let alpha = self.cost.alpha;
        if alpha == 0.0 {
            return Ok(load
                .iter()
                .map(|l| self.cost.joule_losses(*l))
                .collect());
        }
        let losses: Vec<f64> = load.iter().map(|l| self.cost.joule_losses(*l)).collect();
        let aging = self.trace_aging(load)?;
        Ok(aging
            .iter()
            .zip(&losses)
            .map(|(a, j)| alpha * a + (1.0 - alpha) * j)
            .collect())
    }

    fn window_slots(&self, i: usize, start: usize) -> Result<Vec<usize>> {
        match &self.cost.window_mode {
            WindowMode::Own => {
                let end = start + self.fleet.evs[i].duration - 1;
                if start == 0 || end > self.slots() {
                    return Err(Error::Invalid(format!(
                        "ev {}: window [{start}, {end}] leaves the grid 1..={}",
                        i + 1,
                        self.slots()
                    )));
                }
                Ok((start..=end).collect())
            }
            WindowMode::Common(slots) => Ok(slots.clone()),
        }
    }

    /// Network cost billed to EV `i` under the joint schedule.
    pub fn dn_cost(&self, i: usize, starts: &[usize]) -> Result<f64> {
        let costs = self.slot_costs(self.total_load(starts))?;
        let window = self.window_slots(i, starts[i])?;
        Ok(window.iter().map(|t| costs[t - 1]).sum())
    }

    /// Monetary cost billed to EV `i` for starting at `start`.
    pub fn ev_cost(&self, i: usize, start: usize) -> f64 {
        match &self.cost.ev_cost {
            EvCostMode::Zero => 0.0,
            EvCostMode::PriceSum(prices) => {
                let profile = if prices.len() == 1 { &prices[0] } else { &prices[i] };
                let duration = self.fleet.evs[i].duration;
                let sum: f64 = profile.values[start - 1..start - 1 + duration].iter().sum();
                self.cost.beta * sum
            }
        }
    }

    fn transform(&self, i: usize, cost: f64) -> f64 {
        match &self.cost.pricing {
            PricingMode::Identity => cost,
            PricingMode::PerEv(tables) => {
                let table = if tables.len() == 1 { &tables[0] } else { &tables[i] };
                table.eval(cost)
            }
        }
    }

    /// Payoff of EV `i`: minus its transformed total bill.
    pub fn payoff(&self, i: usize, starts: &[usize]) -> Result<f64> {
        let total = self.dn_cost(i, starts)? + self.ev_cost(i, starts[i]);
        Ok(-self.transform(i, total))
    }

    /// Sum of payoffs (the welfare used by the efficiency metrics). The slot
    /// costs are computed once and shared across EVs.
    pub fn sum_payoff(&self, starts: &[usize]) -> Result<f64> {
        let costs = self.slot_costs(self.total_load(starts))?;
        let mut w = 0.0;
        for i in 0..self.fleet.len() {
            let window = self.window_slots(i, starts[i])?;
            let dn: f64 = window.iter().map(|t| costs[t - 1]).sum();
            w -= self.transform(i, dn + self.ev_cost(i, starts[i]));
        }
        Ok(w)
    }

    /// Whether one of the two closed-form potentials certifies this game.
    pub fn potential_applies(&self) -> bool {
        match self.cost.window_mode {
            WindowMode::Common(_) => true,
            WindowMode::Own => {
                self.cost.inertia == InertiaMode::Memoryless || self.cost.alpha == 0.0
            }
        }
    }

    /// Potential for whichever scenario applies, if any.
    pub fn potential(&self, starts: &[usize]) -> Option<f64> {
        match self.cost.window_mode {
            WindowMode::Common(_) => self.potential_common_window(starts).ok(),
            WindowMode::Own => self.potential_own_window_memoryless(starts).ok(),
        }
    }

    /// Potential for a common accounting window (any thermal model):
    /// minus the windowed network cost of the joint load, minus the sum of
    /// monetary terms. With identity pricing its differences equal the payoff
    /// differences of the deviating EV exactly.
    pub fn potential_common_window(&self, starts: &[usize]) -> Result<f64> {
        let slots = match &self.cost.window_mode {
            WindowMode::Common(slots) => slots,
            WindowMode::Own => {
                return Err(Error::Mode(
                    "common-window potential requires a common accounting window".into(),
                ))
            }
        };
        let costs = self.slot_costs(self.total_load(starts))?;
        let windowed: f64 = slots.iter().map(|t| costs[t - 1]).sum();
        let monetary: f64 = (0..self.fleet.len())
            .map(|i| self.ev_cost(i, starts[i]))
            .sum();
        Ok(-windowed - monetary)
    }

    /// Potential for own-window accounting without thermal memory: for each
    /// slot, sum the per-slot cost over occupancy levels `0..=n_t` evaluated
    /// at loads `exo_t + P*v`, then negate and subtract the monetary terms.
    ///
    /// Valid in the memoryless model, and with inertia only when `alpha` is
    /// zero (losses carry no thermal state); other inertial configurations
    /// are a mode error because unilateral deviations then couple slots
    /// through the oil temperature.
    pub fn potential_own_window_memoryless(&self, starts: &[usize]) -> Result<f64> {
        if self.cost.window_mode != WindowMode::Own {
            return Err(Error::Mode(
                "own-window potential requires own-window accounting".into(),
            ));
        }
        let alpha = self.cost.alpha;
        if self.cost.inertia == InertiaMode::WithInertia && alpha > 0.0 {
            return Err(Error::Mode(
                "own-window potential with aging requires the memoryless thermal model".into(),
            ));
        }
        let n = occupancy(starts, self.fleet, &self.exo.grid);
        let p = self.fleet.power_kw;
        let mut total = 0.0;
        for (t, &levels) in n.iter().enumerate() {
            let exo_t = self.exo.values[t];
            let amb_t = self.ambient.values[t];
            for v in 0..=levels {
                let load = exo_t + p * v as f64;
                let mut c = (1.0 - alpha) * self.cost.joule_losses(load);
                if alpha > 0.0 {
                    let k = load / self.transformer.rated_kw;
                    let theta = amb_t
                        + self.transformer.steady_top_oil_rise(k)
                        + self.transformer.hotspot_rise(k);
                    c += alpha * self.transformer.aging_at(theta);
                }
                total += c;
            }
        }
        let monetary: f64 = (0..self.fleet.len())
            .map(|i| self.ev_cost(i, starts[i]))
            .sum();
        Ok(-total - monetary)
    }

    /// Convenience wrapper accepting a validated schedule.
    pub fn payoff_of(&self, i: usize, schedule: &ScheduleVector) -> Result<f64> {
        self.payoff(i, &schedule.starts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EvSpec, ProfileKind, TimeGrid};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn profile(grid: TimeGrid, values: Vec<f64>) -> LoadProfile {
        LoadProfile::new(grid, ProfileKind::PowerKw, values).unwrap()
    }

    fn ambient(grid: TimeGrid) -> LoadProfile {
        LoadProfile::flat(grid, ProfileKind::TemperatureC, 20.0).unwrap()
    }

    struct Fixture {
        exo: LoadProfile,
        amb: LoadProfile,
        fleet: FleetSpec,
        transformer: TransformerParams,
    }

    impl Fixture {
        fn new(exo_values: Vec<f64>, fleet: FleetSpec) -> Self {
            let grid = TimeGrid::new(exo_values.len(), 0.5).unwrap();
            Fixture {
                exo: profile(grid, exo_values),
                amb: ambient(grid),
                fleet,
                transformer: TransformerParams::default(),
            }
        }

        fn ctx<'a>(&'a self, cost: &'a CostConfig) -> GameContext<'a> {
            GameContext::new(&self.exo, &self.amb, &self.fleet, &self.transformer, cost).unwrap()
        }
    }

    #[test]
    fn joule_losses_use_total_resistance() {
        let cfg = CostConfig::default();
        assert_relative_eq!(cfg.joule_losses(10.0), 6.0, epsilon = 1e-12);
        assert_relative_eq!(cfg.joule_losses(0.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn losses_only_payoff_matches_hand_sum() {
        // Single EV, duration 2, exo (3,1,1,3): starting at 2 yields load
        // (3,2,2,3) and own-window losses 0.06*(4+4) = 0.48.
        let fleet = FleetSpec::uniform(1, 1, 4, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![3.0, 1.0, 1.0, 3.0], fleet);
        let cfg = CostConfig {
            alpha: 0.0,
            inertia: InertiaMode::Memoryless,
            ..Default::default()
        };
        let ctx = fx.ctx(&cfg);
        assert_relative_eq!(ctx.payoff(0, &[2]).unwrap(), -0.48, epsilon = 1e-12);
        assert_relative_eq!(ctx.payoff(0, &[1]).unwrap(), -0.06 * (16.0 + 4.0), epsilon = 1e-12);
        assert_relative_eq!(ctx.payoff(0, &[3]).unwrap(), -0.06 * (4.0 + 16.0), epsilon = 1e-12);
    }

    #[test]
    fn monetary_term_sums_prices_over_charging_slots() {
        let grid = TimeGrid::new(4, 0.5).unwrap();
        let fleet = FleetSpec::uniform(1, 1, 4, 2, 1.0).unwrap();
        let prices =
            LoadProfile::new(grid, ProfileKind::PricePerKwh, vec![0.1, 0.2, 0.4, 0.8]).unwrap();
        let fx = Fixture::new(vec![0.0; 4], fleet);
        let cfg = CostConfig {
            alpha: 0.0,
            beta: 2.0,
            r_transformer: 0.0,
            r_line: 0.0,
            ev_cost: EvCostMode::PriceSum(vec![prices]),
            inertia: InertiaMode::Memoryless,
            ..Default::default()
        };
        let ctx = fx.ctx(&cfg);
        assert_relative_eq!(ctx.payoff(0, &[2]).unwrap(), -2.0 * 0.6, epsilon = 1e-12);
        assert_relative_eq!(ctx.payoff(0, &[3]).unwrap(), -2.0 * 1.2, epsilon = 1e-12);
    }

    #[test]
    fn common_window_potential_is_exact_for_identity_pricing() {
        let fleet = FleetSpec::uniform(3, 1, 6, 2, 1.5).unwrap();
        let fx = Fixture::new(vec![2.0, 4.0, 6.0, 5.0, 3.0, 1.0], fleet);
        let cfg = CostConfig {
            alpha: 0.6,
            window_mode: WindowMode::Common(vec![1, 2, 3, 4, 5, 6]),
            ..Default::default()
        };
        let ctx = fx.ctx(&cfg);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..40 {
            let s: Vec<usize> = (0..3).map(|_| rng.random_range(1..=5)).collect();
            let i = rng.random_range(0..3);
            let mut s2 = s.clone();
            s2[i] = rng.random_range(1..=5);
            let du = ctx.payoff(i, &s2).unwrap() - ctx.payoff(i, &s).unwrap();
            let dphi = ctx.potential_common_window(&s2).unwrap()
                - ctx.potential_common_window(&s).unwrap();
            assert_relative_eq!(du, dphi, epsilon = 1e-12, max_relative = 1e-9);
        }
    }

    #[test]
    fn own_window_potential_rejects_inertia_with_aging() {
        let fleet = FleetSpec::uniform(2, 1, 5, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0, 2.0, 3.0, 2.0, 1.0], fleet);
        let with_aging = CostConfig::default(); // alpha 1, inertia
        let ctx = fx.ctx(&with_aging);
        assert!(matches!(
            ctx.potential_own_window_memoryless(&[1, 1]),
            Err(Error::Mode(_))
        ));
        // alpha = 0 makes the losses-only potential valid under inertia.
        let losses = CostConfig::losses_only();
        let ctx = fx.ctx(&losses);
        assert!(ctx.potential_own_window_memoryless(&[1, 1]).is_ok());
        assert!(ctx.potential_applies());
    }

    #[test]
    fn own_window_potential_counts_occupancy_levels_inclusively() {
        // Empty fleet: the v=0 terms remain, so the potential equals minus
        // the exogenous-only cost over all slots.
        let fleet = FleetSpec::new(vec![], 1.0).unwrap();
        let fx = Fixture::new(vec![2.0, 3.0], fleet);
        let cfg = CostConfig {
            alpha: 0.0,
            inertia: InertiaMode::Memoryless,
            ..Default::default()
        };
        let ctx = fx.ctx(&cfg);
        let phi = ctx.potential_own_window_memoryless(&[]).unwrap();
        assert_relative_eq!(phi, -0.06 * (4.0 + 9.0), epsilon = 1e-12);
    }

    #[test]
    fn sum_payoff_matches_individual_payoffs() {
        let fleet = FleetSpec::uniform(3, 1, 5, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0, 2.0, 3.0, 2.0, 1.0], fleet);
        let cfg = CostConfig {
            alpha: 0.5,
            inertia: InertiaMode::Memoryless,
            ..Default::default()
        };
        let ctx = fx.ctx(&cfg);
        let starts = [1, 2, 4];
        let direct: f64 = (0..3).map(|i| ctx.payoff(i, &starts).unwrap()).sum();
        assert_relative_eq!(ctx.sum_payoff(&starts).unwrap(), direct, epsilon = 1e-12);
    }

    #[test]
    fn monotone_table_interpolates_and_extends() {
        let table = MonotoneTable::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(table.eval(0.5), 1.0, epsilon = 1e-12);
        assert_relative_eq!(table.eval(2.0), 3.0, epsilon = 1e-12);
        assert_relative_eq!(table.eval(-1.0), -2.0, epsilon = 1e-12);
        assert_relative_eq!(table.eval(5.0), 6.0, epsilon = 1e-12);
        assert!(MonotoneTable::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(MonotoneTable::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn strictly_increasing_pricing_preserves_best_responses() {
        let fleet = FleetSpec::uniform(2, 1, 5, 2, 1.0).unwrap();
        let fx = Fixture::new(vec![1.0, 2.0, 3.0, 2.0, 1.0], fleet);
        let plain = CostConfig {
            alpha: 0.3,
            inertia: InertiaMode::Memoryless,
            ..Default::default()
        };
        let table = MonotoneTable::new(vec![0.0, 0.5, 1.0, 10.0], vec![0.0, 2.0, 2.5, 30.0]).unwrap();
        let transformed = CostConfig {
            pricing: PricingMode::PerEv(vec![table]),
            ..plain.clone()
        };
        let ctx_a = fx.ctx(&plain);
        let ctx_b = fx.ctx(&transformed);
        for s0 in 1..=4usize {
            for s1 in 1..=4usize {
                for alt in 1..=4usize {
                    let base = [s0, s1];
                    let mut dev = base;
                    dev[0] = alt;
                    let da = ctx_a.payoff(0, &dev).unwrap() - ctx_a.payoff(0, &base).unwrap();
                    let db = ctx_b.payoff(0, &dev).unwrap() - ctx_b.payoff(0, &base).unwrap();
                    assert_eq!(da > 1e-15, db > 1e-15, "sign mismatch at {base:?} -> {alt}");
                    assert_eq!(da < -1e-15, db < -1e-15);
                }
            }
        }
    }

    #[test]
    fn common_window_rejects_slots_off_grid() {
        let grid = TimeGrid::new(4, 0.5).unwrap();
        let fleet = FleetSpec::uniform(1, 1, 4, 2, 1.0).unwrap();
        let cfg = CostConfig {
            window_mode: WindowMode::Common(vec![2, 5]),
            ..Default::default()
        };
        assert!(cfg.validate(&fleet, &grid).is_err());
        let cfg = CostConfig {
            window_mode: WindowMode::Common(vec![3, 2]),
            ..Default::default()
        };
        assert!(cfg.validate(&fleet, &grid).is_err());
    }

    #[test]
    fn chained_initial_state_shifts_inertial_costs() {
        let fleet = FleetSpec::uniform(1, 1, 4, 2, 10.0).unwrap();
        let fx = Fixture::new(vec![40.0, 40.0, 40.0, 40.0], fleet);
        let cfg = CostConfig::default();
        let cold = fx.ctx(&cfg).with_initial_top_oil(5.0);
        let hot = fx.ctx(&cfg).with_initial_top_oil(60.0);
        let cost_cold = cold.dn_cost(0, &[1]).unwrap();
        let cost_hot = hot.dn_cost(0, &[1]).unwrap();
        assert!(cost_hot > cost_cold);
    }

    #[test]
    fn ev_spec_window_error_surfaces_in_dn_cost() {
        // Hand-build a context whose schedule would run past the grid.
        let grid = TimeGrid::new(4, 0.5).unwrap();
        let exo = profile(grid, vec![0.0; 4]);
        let amb = ambient(grid);
        let fleet = FleetSpec {
            evs: vec![EvSpec {
                id: 1,
                arrival: 1,
                departure: 4,
                duration: 3,
            }],
            power_kw: 1.0,
        };
        let cfg = CostConfig::losses_only();
        let params = TransformerParams::default();
        let ctx = GameContext::new(&exo, &amb, &fleet, &params, &cfg).unwrap();
        // Start 3 puts the block on slots 3..5, beyond the 4-slot grid.
        assert!(ctx.dn_cost(0, &[3]).is_err());
    }
}
