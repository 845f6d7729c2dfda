//! Finite deviation families and deviation gains.

use std::collections::HashSet;

use serde::Serialize;

use super::scenario::{GameState, Scenario};
use crate::error::{Error, Result};
use crate::repeated::longrun_payoff;
use crate::stage::{Action, Payoff, ACTION_B};
use crate::strategies::StrategySpec;

/// Default cap on the number of deviations tried per player and state.
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeviationFamily {
    /// Hand-picked deviations known to matter for the shipped examples.
    Witnesses,
    /// Every constant action.
    ConstantAll,
    /// Every signal-blind `prefix · cycle^∞` with bounded lengths.
    PeriodicExhaustive { max_prefix: usize, max_period: usize },
    Union(Vec<DeviationFamily>),
}

impl DeviationFamily {
    /// Upper bound on the family size before duplicates are removed.
    pub fn size(&self, state: &GameState) -> u64 {
        let k = state.actions().len() as u64;
        match self {
            DeviationFamily::Witnesses => witnesses(state).len() as u64,
            DeviationFamily::ConstantAll => k,
            DeviationFamily::PeriodicExhaustive { max_prefix, max_period } => {
                let mut total = 0u64;
                for p in 0..=*max_prefix {
                    for q in 1..=*max_period {
                        total = total.saturating_add(k.saturating_pow((p + q) as u32));
                    }
                }
                total
            }
            DeviationFamily::Union(parts) => parts.iter().map(|f| f.size(state)).fold(0, u64::saturating_add),
        }
    }

    /// Members in enumeration order (prefix length, then period, then
    /// lexicographic), with behaviourally identical duplicates dropped.
    pub fn enumerate(&self, state: &GameState, budget: u64) -> Result<Vec<StrategySpec>> {
        let size = self.size(state);
        if size > budget {
            return Err(Error::BudgetExceeded { size, budget });
        }
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.push_members(state, &mut out, &mut seen);
        Ok(out)
    }

    fn push_members(&self, state: &GameState, out: &mut Vec<StrategySpec>, seen: &mut HashSet<StrategySpec>) {
        let mut push = |spec: StrategySpec| {
            if seen.insert(canonical(&spec)) {
                out.push(spec);
            }
        };
        let actions = state.actions();
        match self {
            DeviationFamily::Witnesses => witnesses(state).into_iter().for_each(push),
            DeviationFamily::ConstantAll => actions.iter().for_each(|&a| push(StrategySpec::Constant(a))),
            DeviationFamily::PeriodicExhaustive { max_prefix, max_period } => {
                for p in 0..=*max_prefix {
                    for q in 1..=*max_period {
                        for word in words(&actions, p + q) {
                            let (prefix, cycle) = word.split_at(p);
                            push(StrategySpec::periodic(prefix.to_vec(), cycle.to_vec()));
                        }
                    }
                }
            }
            DeviationFamily::Union(parts) => {
                for part in parts {
                    part.push_members(state, out, seen);
                }
            }
        }
    }
}

/// Deviations that realize the known profitable deviations in the examples.
pub fn witnesses(state: &GameState) -> Vec<StrategySpec> {
    match state {
        GameState::Auction(v) => {
            let mut out = Vec::new();
            if v.max_value() >= 3 {
                out.push(StrategySpec::periodic(vec![], vec![1, 1, 3]));
            }
            if v.max_value() >= 5 {
                out.push(StrategySpec::Constant(5));
            }
            out
        }
        GameState::Matrix(_) => vec![StrategySpec::Constant(ACTION_B)],
    }
}

/// All words of length `len` over `alphabet`, lexicographically.
fn words(alphabet: &[Action], len: usize) -> Vec<Vec<Action>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

/// Normal form of a signal-blind action sequence: primitive cycle, shortest
/// prefix. Other specs are their own normal form.
pub fn canonical(spec: &StrategySpec) -> StrategySpec {
    let (mut prefix, mut cycle) = match spec {
        StrategySpec::Constant(a) => (Vec::new(), vec![*a]),
        StrategySpec::Periodic { prefix, cycle } => (prefix.clone(), cycle.clone()),
        other => return other.clone(),
    };
    let n = cycle.len();
    if let Some(d) = (1..=n).find(|&d| n % d == 0 && (0..n).all(|i| cycle[i] == cycle[i % d])) {
        cycle.truncate(d);
    }
    while prefix.last().is_some_and(|&a| Some(&a) == cycle.last()) {
        prefix.pop();
        cycle.rotate_right(1);
    }
    StrategySpec::periodic(prefix, cycle)
}

/// Long-run payoffs of the baseline and of one deviation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviationOutcome {
    #[serde(serialize_with = "crate::repeated::export::ser_payoff")]
    pub baseline: Payoff,
    #[serde(serialize_with = "crate::repeated::export::ser_payoff")]
    pub deviated: Payoff,
    #[serde(serialize_with = "crate::repeated::export::ser_payoff")]
    pub gain: Payoff,
    /// Both payoffs are exact cycle averages.
    pub exact: bool,
}

impl DeviationOutcome {
    pub fn new((baseline, b_exact): (Payoff, bool), (deviated, d_exact): (Payoff, bool)) -> Self {
        DeviationOutcome { baseline, deviated, gain: deviated - baseline, exact: b_exact && d_exact }
    }

    /// Profitable beyond `tolerance`; exact gains are held to zero.
    pub fn is_violation(&self, tolerance: Payoff) -> bool {
        if self.exact {
            self.gain > Payoff::from_integer(0)
        } else {
            self.gain > tolerance
        }
    }
}

pub fn deviation_gain(scenario: &Scenario, player: usize, deviation: &StrategySpec) -> Result<DeviationOutcome> {
    check_player(scenario, player)?;
    let base = longrun_payoff(&scenario.run()?, player);
    let dev = longrun_payoff(&scenario.deviate(player, deviation).run()?, player);
    Ok(DeviationOutcome::new(base, dev))
}

/// Most profitable member of `family`; ties go to the earliest member.
pub fn best_deviation(
    scenario: &Scenario,
    player: usize,
    family: &DeviationFamily,
    budget: u64,
) -> Result<Option<(StrategySpec, DeviationOutcome)>> {
    check_player(scenario, player)?;
    let members = family.enumerate(&scenario.state, budget)?;
    let base = longrun_payoff(&scenario.run()?, player);
    let mut best: Option<(StrategySpec, DeviationOutcome)> = None;
    for spec in members {
        let dev = longrun_payoff(&scenario.deviate(player, &spec).run()?, player);
        let outcome = DeviationOutcome::new(base, dev);
        if best.as_ref().is_none_or(|(_, b)| outcome.deviated > b.deviated) {
            best = Some((spec, outcome));
        }
    }
    Ok(best)
}

fn check_player(scenario: &Scenario, player: usize) -> Result<()> {
    if player >= scenario.state.players() {
        return Err(Error::InvalidProfile(format!("no player {}", player + 1)));
    }
    Ok(())
}
