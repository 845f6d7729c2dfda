//! Deterministic play generation and steady-state classification.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Monitor, Signal, Strategy};
use crate::error::{Error, Result};
use crate::stage::{Action, Payoff, StageGame};

/// Rounds the cycle search may look at before giving up on finite-state play.
pub const CYCLE_PROBE_ROUNDS: u32 = 20_000;

/// Lower bound on the constant run that must hold, past the horizon if
/// necessary, before play without a finite summary counts as absorbed.
pub const MIN_ABSORPTION_RUN: u32 = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SteadyState {
    /// Play repeats `profile` from round `since` on.
    Absorbed { profile: Vec<Action>, since: u32 },
    /// Play repeats `cycle` from round `entry` on. `entry` is the earliest
    /// such round and `cycle[0]` is the profile played at `entry`.
    Periodic { cycle: Vec<Vec<Action>>, entry: u32 },
    Undetermined,
}

impl SteadyState {
    pub fn is_determined(&self) -> bool {
        !matches!(self, SteadyState::Undetermined)
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            SteadyState::Absorbed { .. } => Some(1),
            SteadyState::Periodic { cycle, .. } => Some(cycle.len()),
            SteadyState::Undetermined => None,
        }
    }
}

/// The recorded play of one run. Rounds are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayTrace {
    players: usize,
    horizon: u32,
    initial_signals: Vec<Signal>,
    actions: Vec<Action>,
    signals: Vec<Signal>,
    payoffs: Vec<Payoff>,
    steady: SteadyState,
    /// Exact long-run averages, present when `steady` is determined.
    longrun: Option<Vec<Payoff>>,
}

impl PlayTrace {
    pub fn players(&self) -> usize {
        self.players
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn steady_state(&self) -> &SteadyState {
        &self.steady
    }

    pub fn exact_longrun(&self) -> Option<&[Payoff]> {
        self.longrun.as_deref()
    }

    pub fn initial_signal(&self, player: usize) -> Signal {
        self.initial_signals[player]
    }

    fn at(&self, round: u32) -> usize {
        assert!(round >= 1 && round <= self.horizon, "round {round} outside 1..={}", self.horizon);
        (round as usize - 1) * self.players
    }

    pub fn profile(&self, round: u32) -> &[Action] {
        let i = self.at(round);
        &self.actions[i..i + self.players]
    }

    pub fn action(&self, round: u32, player: usize) -> Action {
        self.actions[self.at(round) + player]
    }

    pub fn signal(&self, round: u32, player: usize) -> Signal {
        self.signals[self.at(round) + player]
    }

    pub fn payoff(&self, round: u32, player: usize) -> Payoff {
        self.payoffs[self.at(round) + player]
    }

    pub fn payoff_profile(&self, round: u32) -> &[Payoff] {
        let i = self.at(round);
        &self.payoffs[i..i + self.players]
    }

    /// All actions of `player`, rounds `1..=horizon`.
    pub fn actions_of(&self, player: usize) -> Vec<Action> {
        self.actions.iter().skip(player).step_by(self.players).copied().collect()
    }

    pub fn signals_of(&self, player: usize) -> Vec<Signal> {
        self.signals.iter().skip(player).step_by(self.players).copied().collect()
    }

    pub fn payoffs_of(&self, player: usize) -> Vec<Payoff> {
        self.iter_payoffs_of(player).collect()
    }

    pub fn iter_payoffs_of(&self, player: usize) -> impl Iterator<Item = Payoff> + '_ {
        self.payoffs.iter().skip(player).step_by(self.players).copied()
    }

    pub fn profiles(&self) -> impl Iterator<Item = &[Action]> {
        self.actions.chunks(self.players)
    }
}

struct Simulation<'a> {
    game: &'a dyn StageGame,
    monitor: &'a dyn Monitor,
    strategies: Vec<Box<dyn Strategy>>,
    players: usize,
    history: Vec<Action>,
    pending: Vec<Action>,
    played: u32,
    signals: Vec<Signal>,
    payoffs: Vec<Payoff>,
    /// From this round on signals depend on the current profile alone.
    stationary: u32,
    /// Signals and payoffs of profiles seen since `stationary`.
    outcomes: Vec<(Vec<Action>, Vec<Signal>, Vec<Payoff>)>,
}

/// Distinct profiles remembered per run; play rarely visits more.
const OUTCOME_CACHE: usize = 16;

/// Profile equality without a `memcmp` call for these short slices.
fn same(a: &[Action], b: &[Action]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

impl<'a> Simulation<'a> {
    fn new(
        game: &'a dyn StageGame,
        monitor: &'a dyn Monitor,
        mut strategies: Vec<Box<dyn Strategy>>,
        capacity: usize,
    ) -> Result<Self> {
        let players = game.players();
        if monitor.players() != players {
            return Err(Error::DimensionMismatch { expected: players, actual: monitor.players() });
        }
        if strategies.len() != players {
            return Err(Error::DimensionMismatch { expected: players, actual: strategies.len() });
        }
        let pending = strategies
            .iter_mut()
            .enumerate()
            .map(|(i, s)| s.start(monitor.initial_signal(i)))
            .collect();
        Ok(Simulation {
            game,
            monitor,
            strategies,
            players,
            history: Vec::with_capacity(capacity * players),
            pending,
            played: 0,
            signals: vec![Signal::Opaque("*"); players],
            payoffs: vec![Payoff::from_integer(0); players],
            stationary: monitor.memoryless_from().unwrap_or(u32::MAX),
            outcomes: Vec::new(),
        })
    }

    fn step(&mut self) -> Result<()> {
        let round = self.played + 1;
        for (i, &a) in self.pending.iter().enumerate() {
            if !self.game.is_action(i, a) {
                return Err(Error::ActionOutOfRange { round, player: i + 1, action: a });
            }
        }
        let start = self.history.len();
        self.history.extend_from_slice(&self.pending);
        let repeated = round > self.stationary && same(&self.history[start - self.players..start], &self.pending);
        if !repeated {
            self.settle(round);
        }
        for i in 0..self.players {
            self.pending[i] = self.strategies[i].next(self.signals[i], self.history[start + i]);
        }
        self.played = round;
        Ok(())
    }

    /// Fills in the signals and payoffs of the profile just played.
    fn settle(&mut self, round: u32) {
        let cacheable = round >= self.stationary;
        if cacheable {
            if let Some((_, signals, payoffs)) = self.outcomes.iter().find(|o| same(&o.0, &self.pending)) {
                self.signals.copy_from_slice(signals);
                self.payoffs.copy_from_slice(payoffs);
                return;
            }
        }
        for i in 0..self.players {
            self.signals[i] = self.monitor.signal(round, i, &self.history);
        }
        let start = self.history.len() - self.players;
        self.game.payoffs_into(&self.history[start..], &mut self.payoffs);
        if cacheable && self.outcomes.len() < OUTCOME_CACHE {
            self.outcomes.push((self.pending.clone(), self.signals.clone(), self.payoffs.clone()));
        }
    }

    fn profile(&self, round: u32) -> &[Action] {
        let i = (round as usize - 1) * self.players;
        &self.history[i..i + self.players]
    }

    fn joint_summary(&self) -> Option<Vec<u32>> {
        let mut key = Vec::new();
        for s in &self.strategies {
            let part = s.summary()?;
            key.push(part.len() as u32);
            key.extend(part);
        }
        Some(key)
    }

    /// Makes sure rounds up to `round` have been played.
    fn reach(&mut self, round: u32) -> Result<()> {
        while self.played < round {
            self.step()?;
        }
        Ok(())
    }
}

/// Plays `horizon` rounds and classifies the steady state.
///
/// Classification may keep simulating past the horizon; those extra rounds
/// are never stored in the trace. When every strategy is finite-state and the
/// monitor becomes memoryless, a repeated joint summary proves periodicity.
/// Otherwise play is declared absorbed only if the final recorded profile,
/// constant since round `s`, persists through round `2 * (s + L - 1)` with
/// `L = max(2 * |actions|, 50)`; rounds past the horizon are simulated for
/// the check but not recorded.
pub fn run(
    game: &dyn StageGame,
    monitor: &dyn Monitor,
    strategies: Vec<Box<dyn Strategy>>,
    horizon: u32,
) -> Result<PlayTrace> {
    run_with(game, monitor, strategies, horizon, None)
}

/// Same result as [`run`], but stops simulating once play provably rejoins
/// `reference` and copies the remaining rounds from it.
///
/// `reference` must be a run of the same strategies over the same horizon,
/// on a monitor that agrees with `monitor` from `monitor.memoryless_from()`
/// on. Play has rejoined at round `t` when every strategy has forgotten the
/// last round that differs from the reference. Splicing is used only when
/// the classification provably matches the one a full run would give;
/// otherwise this falls back to simulating everything.
pub fn run_rejoining(
    game: &dyn StageGame,
    monitor: &dyn Monitor,
    strategies: Vec<Box<dyn Strategy>>,
    horizon: u32,
    reference: &PlayTrace,
) -> Result<PlayTrace> {
    run_with(game, monitor, strategies, horizon, Some(reference))
}

fn run_with(
    game: &dyn StageGame,
    monitor: &dyn Monitor,
    strategies: Vec<Box<dyn Strategy>>,
    horizon: u32,
    reference: Option<&PlayTrace>,
) -> Result<PlayTrace> {
    if horizon == 0 {
        return Err(Error::InvalidHorizon(horizon));
    }
    let players = game.players();
    let finite = strategies.iter().all(|s| s.is_finite_state());
    let stationary = monitor.memoryless_from();
    let mut sim = Simulation::new(game, monitor, strategies, horizon as usize + 1)?;
    let initial_signals = (0..players).map(|i| monitor.initial_signal(i)).collect();

    let mut signals = Vec::with_capacity(horizon as usize * players);
    let mut payoffs = Vec::with_capacity(horizon as usize * players);

    let track = finite && stationary.is_some();
    let stationary = stationary.unwrap_or(u32::MAX);
    let mut seen: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut cycle: Option<(u32, u32)> = None;
    let note = |sim: &Simulation, seen: &mut HashMap<Vec<u32>, u32>, cycle: &mut Option<(u32, u32)>| {
        let before = sim.played + 1;
        if cycle.is_some() || before < stationary {
            return;
        }
        if let Some(key) = sim.joint_summary() {
            match seen.get(&key) {
                Some(&first) => *cycle = Some((first, before)),
                None => {
                    seen.insert(key, before);
                }
            }
        }
    };

    let mut rejoin = match (reference, monitor.memoryless_from()) {
        (Some(r), Some(faithful)) if !track => Rejoin::new(r, horizon, faithful),
        _ => None,
    };
    if track {
        note(&sim, &mut seen, &mut cycle);
    }
    for _ in 0..horizon {
        sim.step()?;
        signals.extend_from_slice(&sim.signals);
        payoffs.extend_from_slice(&sim.payoffs);
        if track {
            note(&sim, &mut seen, &mut cycle);
        }
        if let Some(r) = &mut rejoin {
            match r.observe(&sim) {
                Ok(Some(steady)) => return Ok(r.splice(&sim, initial_signals, signals, payoffs, steady)),
                Ok(None) => {}
                Err(()) => rejoin = None,
            }
        }
    }
    if track {
        let limit = horizon.max(CYCLE_PROBE_ROUNDS);
        while cycle.is_none() && sim.played < limit {
            if sim.step().is_err() {
                break;
            }
            note(&sim, &mut seen, &mut cycle);
        }
    }

    let steady = match cycle {
        Some((first, again)) => periodic_from(&sim, first, again - first),
        None => absorption_probe(&mut sim, horizon),
    };
    let longrun = cycle_average(game, &steady);

    let actions = sim.history[..horizon as usize * players].to_vec();
    Ok(PlayTrace {
        players,
        horizon,
        initial_signals,
        actions,
        signals,
        payoffs,
        steady,
        longrun,
    })
}

/// Tracks a run against a reference trace until play has merged with it.
struct Rejoin<'r> {
    reference: &'r PlayTrace,
    horizon: u32,
    /// Last round before which play or signals may differ from the reference.
    last_difference: u32,
    /// Start of the final constant stretch of the reference.
    since: u32,
}

impl<'r> Rejoin<'r> {
    fn new(reference: &'r PlayTrace, horizon: u32, faithful: u32) -> Option<Self> {
        if reference.horizon != horizon || matches!(reference.steady, SteadyState::Periodic { .. }) {
            return None;
        }
        let last = reference.profile(horizon);
        let mut since = horizon;
        while since > 1 && reference.profile(since - 1) == last {
            since -= 1;
        }
        Some(Rejoin { reference, horizon, last_difference: faithful.saturating_sub(1), since })
    }

    /// The steady state once merged, `Ok(None)` while not yet merged, and
    /// `Err(())` when merging cannot reproduce the full classification.
    fn observe(&mut self, sim: &Simulation) -> std::result::Result<Option<SteadyState>, ()> {
        let t = sim.played;
        if sim.profile(t) != self.reference.profile(t) {
            self.last_difference = t;
            return Ok(None);
        }
        if t >= self.horizon
            || t < self.last_difference
            || sim.strategies.iter().any(|s| s.memory_start() <= self.last_difference)
            || sim.pending.as_slice() != self.reference.profile(t + 1)
        {
            return Ok(None);
        }
        // From round t + 1 on both runs coincide; only the start of the final
        // constant stretch can differ, and it decides how far the probe looks.
        let last = self.reference.profile(self.horizon);
        let mut since = self.since;
        if since <= t + 1 {
            since = t + 1;
            while since > 1 && sim.profile(since - 1) == last {
                since -= 1;
            }
        }
        match &self.reference.steady {
            SteadyState::Absorbed { profile, .. } if since <= self.since => {
                Ok(Some(SteadyState::Absorbed { profile: profile.clone(), since }))
            }
            SteadyState::Undetermined if since >= self.since => Ok(Some(SteadyState::Undetermined)),
            _ => Err(()),
        }
    }

    fn splice(
        &self,
        sim: &Simulation,
        initial_signals: Vec<Signal>,
        mut signals: Vec<Signal>,
        mut payoffs: Vec<Payoff>,
        steady: SteadyState,
    ) -> PlayTrace {
        let r = self.reference;
        let done = sim.history.len();
        let mut actions = sim.history.clone();
        actions.extend_from_slice(&r.actions[done..]);
        signals.extend_from_slice(&r.signals[done..]);
        payoffs.extend_from_slice(&r.payoffs[done..]);
        let longrun = cycle_average(sim.game, &steady);
        PlayTrace { players: r.players, horizon: r.horizon, initial_signals, actions, signals, payoffs, steady, longrun }
    }
}

fn periodic_from(sim: &Simulation, first: u32, period: u32) -> SteadyState {
    // Joint states may cycle with a multiple of the period of the actions.
    let period = (1..=period)
        .filter(|&d| period.is_multiple_of(d))
        .find(|&d| (first..first + period).all(|t| sim.profile(t) == sim.profile(first + (t - first) % d)))
        .unwrap_or(period);
    let mut entry = first;
    while entry > 1 && sim.profile(entry - 1) == sim.profile(entry - 1 + period) {
        entry -= 1;
    }
    if period == 1 {
        SteadyState::Absorbed { profile: sim.profile(entry).to_vec(), since: entry }
    } else {
        let cycle = (entry..entry + period).map(|t| sim.profile(t).to_vec()).collect();
        SteadyState::Periodic { cycle, entry }
    }
}

/// The final recorded profile, constant since `since`, must persist through
/// `2 * (since + run - 1)`, simulating beyond the horizon where needed.
fn absorption_probe(sim: &mut Simulation, horizon: u32) -> SteadyState {
    let last = sim.profile(horizon).to_vec();
    let mut since = horizon;
    while since > 1 && sim.profile(since - 1) == last.as_slice() {
        since -= 1;
    }
    let alphabet = (0..sim.players).map(|i| sim.game.actions(i).len()).max().unwrap_or(1) as u32;
    let run = (2 * alphabet).max(MIN_ABSORPTION_RUN);
    let checkpoint = since + run - 1;
    let confirm_to = 2 * checkpoint;
    for t in horizon + 1..=confirm_to {
        if sim.reach(t).is_err() || sim.profile(t) != last.as_slice() {
            return SteadyState::Undetermined;
        }
    }
    SteadyState::Absorbed { profile: last, since }
}

fn cycle_average(game: &dyn StageGame, steady: &SteadyState) -> Option<Vec<Payoff>> {
    let cycle: Vec<&[Action]> = match steady {
        SteadyState::Absorbed { profile, .. } => vec![profile.as_slice()],
        SteadyState::Periodic { cycle, .. } => cycle.iter().map(|p| p.as_slice()).collect(),
        SteadyState::Undetermined => return None,
    };
    let mut total = vec![Payoff::from_integer(0); game.players()];
    for profile in &cycle {
        for (t, p) in total.iter_mut().zip(game.payoffs(profile)) {
            *t += p;
        }
    }
    let len = Payoff::from_integer(cycle.len() as i64);
    Some(total.into_iter().map(|t| t / len).collect())
}
