//! Learning-equilibrium checks over finite deviation families: plain,
//! robust to arbitrary finite prefixes, and robust to failure schedules.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::deviation::{DeviationFamily, DeviationOutcome, DEFAULT_BUDGET};
use super::scenario::{GameState, Scenario};
use crate::error::{Error, Result};
use crate::failures::{enumerate_lifted, validate_recovery, FailureSchedule, RecoveryVerdict};
use crate::repeated::longrun_payoff;
use crate::stage::Payoff;
use crate::strategies::StrategySpec;

const SCOPE: &str = "evidence over a finite deviation family; not a proof";

/// Extra rounds past recovery probed when validating a schedule.
const RECOVERY_PROBE: u32 = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub horizon: u32,
    /// Allowed gain when a payoff could only be estimated.
    pub tolerance: Payoff,
    /// Cap on the deviation family size per state.
    pub budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { horizon: 1000, tolerance: Payoff::new(1, 100), budget: DEFAULT_BUDGET }
    }
}

/// The profile under test, instantiated per state.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    /// Every player uses the same spec.
    Uniform(StrategySpec),
    PerPlayer(Vec<StrategySpec>),
}

impl ProfileSpec {
    pub fn for_state(&self, state: &GameState) -> Result<Vec<StrategySpec>> {
        match self {
            ProfileSpec::Uniform(s) => Ok(vec![s.clone(); state.players()]),
            ProfileSpec::PerPlayer(v) if v.len() == state.players() => Ok(v.clone()),
            ProfileSpec::PerPlayer(v) => {
                Err(Error::DimensionMismatch { expected: state.players(), actual: v.len() })
            }
        }
    }
}

/// Prefix profiles `g` played before the profile under test takes over.
#[derive(Debug, Clone, PartialEq)]
pub enum PrefixProfiles {
    /// Every profile of constant actions.
    ConstantAll,
    Explicit(Vec<Vec<StrategySpec>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixFamily {
    pub profiles: PrefixProfiles,
    /// Prefix lengths `T`.
    pub rounds: Vec<u32>,
}

impl PrefixFamily {
    fn instantiate(&self, state: &GameState) -> Result<Vec<(u32, Vec<StrategySpec>)>> {
        let profiles = match &self.profiles {
            PrefixProfiles::ConstantAll => {
                let mut all = vec![Vec::new()];
                for _ in 0..state.players() {
                    all = all
                        .into_iter()
                        .flat_map(|p: Vec<StrategySpec>| {
                            state.actions().into_iter().map(move |a| {
                                let mut p = p.clone();
                                p.push(StrategySpec::Constant(a));
                                p
                            })
                        })
                        .collect();
                }
                all
            }
            PrefixProfiles::Explicit(list) => {
                for g in list {
                    if g.len() != state.players() {
                        return Err(Error::DimensionMismatch { expected: state.players(), actual: g.len() });
                    }
                }
                list.clone()
            }
        };
        Ok(self.rounds.iter().flat_map(|&t| profiles.iter().map(move |g| (t, g.clone()))).collect())
    }
}

/// Best deviation found for one player in one context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictRow {
    pub state: String,
    pub schedule: String,
    pub prefix: String,
    /// Numbered from 1.
    pub player: usize,
    pub deviation: String,
    #[serde(flatten)]
    pub outcome: DeviationOutcome,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub scope: String,
    /// Simulated deviations, after caching.
    pub deviation_runs: u64,
    pub rows: Vec<VerdictRow>,
}

impl Verdict {
    pub fn violations(&self) -> impl Iterator<Item = &VerdictRow> {
        self.rows.iter().filter(|r| r.violation)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

pub fn le_test(
    profile: &ProfileSpec,
    states: &[GameState],
    family: &DeviationFamily,
    opts: &CheckOptions,
) -> Result<Verdict> {
    let mut cells = Vec::new();
    for (si, state) in states.iter().enumerate() {
        cells.push(Cell { state: si, prefix: "none".into(), strategies: profile.for_state(state)? });
    }
    check(states, &[FailureSchedule::identity()], cells, family, opts)
}

pub fn robust_le_test(
    profile: &ProfileSpec,
    states: &[GameState],
    prefixes: &PrefixFamily,
    family: &DeviationFamily,
    opts: &CheckOptions,
) -> Result<Verdict> {
    let cells = prefixed_cells(profile, states, prefixes)?;
    check(states, &[FailureSchedule::identity()], cells, family, opts)
}

/// Robust check over every (state, schedule) pair. Schedules are validated
/// against every state's monitor before anything is simulated.
pub fn f_robust_test(
    profile: &ProfileSpec,
    states: &[GameState],
    schedules: &[FailureSchedule],
    prefixes: &PrefixFamily,
    family: &DeviationFamily,
    opts: &CheckOptions,
) -> Result<Verdict> {
    for schedule in schedules {
        schedule.validate()?;
        for state in states {
            let base = state.monitor();
            let probe = schedule.recovery_round() + RECOVERY_PROBE;
            if let RecoveryVerdict::Fail { round, player } = validate_recovery(schedule, base.as_ref(), probe) {
                return Err(Error::InvalidSchedule(format!(
                    "`{schedule}` still alters player {}'s signal at round {round} in state {state}",
                    player + 1
                )));
            }
        }
    }
    let all: Vec<FailureSchedule> = enumerate_lifted(&[()], schedules).into_iter().map(|l| l.schedule).collect();
    let cells = prefixed_cells(profile, states, prefixes)?;
    check(states, &all, cells, family, opts)
}

/// Index of the best family member and its (payoff, exact) result.
type Best = (usize, (Payoff, bool));

/// One profile at one state; checked under every schedule.
struct Cell {
    state: usize,
    prefix: String,
    strategies: Vec<StrategySpec>,
}

fn prefixed_cells(profile: &ProfileSpec, states: &[GameState], prefixes: &PrefixFamily) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for (si, state) in states.iter().enumerate() {
        let f = profile.for_state(state)?;
        for (t, g) in prefixes.instantiate(state)? {
            let label = format!(
                "T={t} g=({})",
                g.iter().map(|s| s.render(state.style())).collect::<Vec<_>>().join(", ")
            );
            let strategies = g.into_iter().zip(&f).map(|(g, f)| StrategySpec::compose(g, f.clone(), t)).collect();
            cells.push(Cell { state: si, prefix: label, strategies });
        }
    }
    Ok(cells)
}

/// Deviated runs depend only on the other players' strategies.
#[derive(Clone, PartialEq, Eq, Hash)]
struct DeviationKey {
    state: usize,
    player: usize,
    others: Vec<StrategySpec>,
}

/// Long-run payoffs `[schedule][player]` of one profile. A schedule whose
/// overrides match what the identity run delivered anyway cannot change
/// deterministic play, so that run is reused.
fn payoffs_under(
    state: &GameState,
    schedules: &[FailureSchedule],
    strategies: &[StrategySpec],
    horizon: u32,
) -> Result<Vec<Vec<(Payoff, bool)>>> {
    let all = |trace: &crate::repeated::PlayTrace| (0..strategies.len()).map(|i| longrun_payoff(trace, i)).collect();
    let scenario = Scenario::new(state.clone(), strategies.to_vec(), horizon)?;
    let identity = match schedules.iter().position(FailureSchedule::is_identity) {
        Some(_) => Some(scenario.run()?),
        None => None,
    };
    schedules
        .iter()
        .map(|schedule| {
            if let Some(trace) = &identity {
                let delivered = |r: u32, p: usize| (r <= trace.horizon()).then(|| trace.signal(r, p));
                if schedule.is_inert_on(delivered) {
                    return Ok(all(trace));
                }
            }
            let faulty = scenario.clone().with_schedule(schedule.clone());
            match &identity {
                Some(trace) => Ok(all(&faulty.run_rejoining(trace)?)),
                None => Ok(all(&faulty.run()?)),
            }
        })
        .collect()
}

fn check(
    states: &[GameState],
    schedules: &[FailureSchedule],
    cells: Vec<Cell>,
    family: &DeviationFamily,
    opts: &CheckOptions,
) -> Result<Verdict> {
    let members: Vec<Vec<StrategySpec>> =
        states.iter().map(|s| family.enumerate(s, opts.budget)).collect::<Result<_>>()?;

    let baselines: Vec<Vec<Vec<(Payoff, bool)>>> = cells
        .par_iter()
        .map(|c| payoffs_under(&states[c.state], schedules, &c.strategies, opts.horizon))
        .collect::<Result<_>>()?;

    let mut index: HashMap<DeviationKey, usize> = HashMap::new();
    let mut keys: Vec<DeviationKey> = Vec::new();
    let mut cell_keys: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
    for c in &cells {
        let row = (0..c.strategies.len())
            .map(|player| {
                let mut others = c.strategies.clone();
                others.remove(player);
                let key = DeviationKey { state: c.state, player, others };
                *index.entry(key.clone()).or_insert_with(|| {
                    keys.push(key);
                    keys.len() - 1
                })
            })
            .collect();
        cell_keys.push(row);
    }

    // Per key and schedule: best member (earliest on ties) and its payoff.
    let best: Vec<Vec<Option<Best>>> = keys
        .par_iter()
        .map(|k| {
            let mut found: Vec<Option<Best>> = vec![None; schedules.len()];
            for (mi, spec) in members[k.state].iter().enumerate() {
                let mut strategies = k.others.clone();
                strategies.insert(k.player, spec.clone());
                let payoffs = payoffs_under(&states[k.state], schedules, &strategies, opts.horizon)?;
                for (slot, p) in found.iter_mut().zip(payoffs) {
                    let p = p[k.player];
                    if slot.is_none_or(|(_, b)| p.0 > b.0) {
                        *slot = Some((mi, p));
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (si, state) in states.iter().enumerate() {
        for (j, schedule) in schedules.iter().enumerate() {
            for (ci, c) in cells.iter().enumerate().filter(|(_, c)| c.state == si) {
                for (player, &ki) in cell_keys[ci].iter().enumerate() {
                    let base = baselines[ci][j][player];
                    let (deviation, outcome) = match best[ki][j] {
                        Some((mi, dev)) => (members[si][mi].render(state.style()), DeviationOutcome::new(base, dev)),
                        None => ("none".to_string(), DeviationOutcome::new(base, base)),
                    };
                    let violation = outcome.is_violation(opts.tolerance);
                    rows.push(VerdictRow {
                        state: state.to_string(),
                        schedule: schedule.to_string(),
                        prefix: c.prefix.clone(),
                        player: player + 1,
                        deviation,
                        outcome,
                        violation,
                    });
                }
            }
        }
    }
    let deviation_runs = keys.iter().map(|k| members[k.state].len() as u64).sum();
    Ok(Verdict { pass: rows.iter().all(|r| !r.violation), scope: SCOPE.into(), deviation_runs, rows })
}
