//! Monitoring failures that heal after a finite number of rounds.
//!
//! A [`FailureSchedule`] lists per-(round, player) signal overrides and a
//! recovery round; from the recovery round on the faulty device coincides
//! with the true one. Initial information is never corrupted.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::repeated::{Monitor, Signal};
use crate::stage::Action;

type MapFn = dyn Fn(Signal) -> Signal + Send + Sync;

/// A named corruption of the true signal.
#[derive(Clone)]
pub struct SignalMap {
    label: String,
    map: Arc<MapFn>,
}

impl SignalMap {
    pub fn new(label: impl Into<String>, map: impl Fn(Signal) -> Signal + Send + Sync + 'static) -> Self {
        SignalMap { label: label.into(), map: Arc::new(map) }
    }

    /// Reports every auction round as won by a single bidder.
    pub fn conceal_ties() -> Self {
        SignalMap::new("conceal_ties", |s| match s {
            Signal::Auction { max_bid, .. } => Signal::auction(max_bid, 1),
            other => other,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, signal: Signal) -> Signal {
        (self.map)(signal)
    }
}

impl fmt::Debug for SignalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignalMap({})", self.label)
    }
}

#[derive(Debug, Clone)]
pub enum OverrideRule {
    Fixed(Signal),
    Map(SignalMap),
}

impl OverrideRule {
    pub fn apply(&self, base: Signal) -> Signal {
        match self {
            OverrideRule::Fixed(s) => *s,
            OverrideRule::Map(m) => m.apply(base),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SignalOverride {
    pub round: u32,
    /// Zero-based.
    pub player: usize,
    pub rule: OverrideRule,
}

impl SignalOverride {
    pub fn fixed(round: u32, player: usize, signal: Signal) -> Self {
        SignalOverride { round, player, rule: OverrideRule::Fixed(signal) }
    }

    pub fn map(round: u32, player: usize, map: SignalMap) -> Self {
        SignalOverride { round, player, rule: OverrideRule::Map(map) }
    }
}

#[derive(Debug, Clone)]
pub struct FailureSchedule {
    overrides: Vec<SignalOverride>,
    recovery: u32,
}

impl Default for FailureSchedule {
    fn default() -> Self {
        FailureSchedule::identity()
    }
}

impl FailureSchedule {
    /// No failures; recovery is immediate.
    pub fn identity() -> Self {
        FailureSchedule { overrides: Vec::new(), recovery: 1 }
    }

    pub fn new(overrides: Vec<SignalOverride>, recovery: u32) -> Result<Self> {
        let schedule = FailureSchedule { overrides, recovery };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Skips validation; only useful to probe malformed schedules.
    pub fn unchecked(overrides: Vec<SignalOverride>, recovery: u32) -> Self {
        FailureSchedule { overrides, recovery }
    }

    pub fn validate(&self) -> Result<()> {
        if self.recovery < 1 {
            return Err(Error::InvalidSchedule("recovery round must be at least 1".into()));
        }
        for (i, o) in self.overrides.iter().enumerate() {
            if o.round < 1 {
                return Err(Error::InvalidSchedule("override rounds start at 1".into()));
            }
            if o.round >= self.recovery {
                return Err(Error::InvalidSchedule(format!(
                    "override at round {} is not before recovery round {}",
                    o.round, self.recovery
                )));
            }
            if self.overrides[..i].iter().any(|p| p.round == o.round && p.player == o.player) {
                return Err(Error::InvalidSchedule(format!(
                    "duplicate override for round {}, player {}",
                    o.round,
                    o.player + 1
                )));
            }
        }
        Ok(())
    }

    pub fn overrides(&self) -> &[SignalOverride] {
        &self.overrides
    }

    pub fn recovery_round(&self) -> u32 {
        self.recovery
    }

    pub fn is_identity(&self) -> bool {
        self.overrides.is_empty()
    }

    fn lookup(&self, round: u32, player: usize) -> Option<&OverrideRule> {
        self.overrides.iter().find(|o| o.round == round && o.player == player).map(|o| &o.rule)
    }

    fn last_override_round(&self) -> u32 {
        self.overrides.iter().map(|o| o.round).max().unwrap_or(0)
    }

    /// Whether every override leaves the signal actually delivered in its
    /// slot unchanged, so that a deterministic play is not affected at all.
    /// `delivered` returns `None` for slots it cannot vouch for.
    pub fn is_inert_on(&self, delivered: impl Fn(u32, usize) -> Option<Signal>) -> bool {
        self.overrides.iter().all(|o| delivered(o.round, o.player).is_some_and(|s| o.rule.apply(s) == s))
    }

    /// Config syntax: `fail(round=R, player=P, signal=(M,K)), ..., recover=T`.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .overrides
            .iter()
            .map(|o| {
                let what = match &o.rule {
                    OverrideRule::Fixed(Signal::Auction { max_bid, winner_count }) => {
                        format!("signal=({max_bid},{winner_count})")
                    }
                    OverrideRule::Fixed(other) => format!("signal={other}"),
                    OverrideRule::Map(m) => format!("map={}", m.label()),
                };
                format!("fail(round={}, player={}, {what})", o.round, o.player + 1)
            })
            .collect();
        parts.push(format!("recover={}", self.recovery));
        parts.join(", ")
    }

    /// Parses the config syntax. Supports fixed auction signals and the
    /// built-in `conceal_ties` map.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidSchedule(m);
        let mut overrides = Vec::new();
        let mut recovery = None;
        for item in crate::strategies::spec_split_top(text, ',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            if let Some(value) = item.strip_prefix("recover") {
                let value = value.trim().strip_prefix('=').ok_or_else(|| bad(format!("bad item `{item}`")))?;
                recovery = Some(value.trim().parse().map_err(|_| bad(format!("bad recovery `{value}`")))?);
                continue;
            }
            let inner = item
                .strip_prefix("fail(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| bad(format!("expected fail(...) or recover=T, got `{item}`")))?;
            let (mut round, mut player, mut rule) = (None, None, None);
            for kv in crate::strategies::spec_split_top(inner, ',') {
                let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value in `{kv}`")))?;
                let v = v.trim();
                match k.trim() {
                    "round" => round = Some(v.parse::<u32>().map_err(|_| bad(format!("bad round `{v}`")))?),
                    "player" => {
                        let p: usize = v.parse().map_err(|_| bad(format!("bad player `{v}`")))?;
                        if p == 0 {
                            return Err(bad("players are numbered from 1".into()));
                        }
                        player = Some(p - 1);
                    }
                    "signal" => {
                        let pair = v
                            .strip_prefix('(')
                            .and_then(|s| s.strip_suffix(')'))
                            .and_then(|s| s.split_once(','))
                            .ok_or_else(|| bad(format!("signal must be (M,K), got `{v}`")))?;
                        let m = pair.0.trim().parse().map_err(|_| bad(format!("bad signal `{v}`")))?;
                        let k = pair.1.trim().parse().map_err(|_| bad(format!("bad signal `{v}`")))?;
                        rule = Some(OverrideRule::Fixed(Signal::auction(m, k)));
                    }
                    "map" => match v {
                        "conceal_ties" => rule = Some(OverrideRule::Map(SignalMap::conceal_ties())),
                        other => return Err(bad(format!("unknown signal map `{other}`"))),
                    },
                    other => return Err(bad(format!("unknown key `{other}`"))),
                }
            }
            let round = round.ok_or_else(|| bad("fail(...) needs round=".into()))?;
            let player = player.ok_or_else(|| bad("fail(...) needs player=".into()))?;
            let rule = rule.ok_or_else(|| bad("fail(...) needs signal= or map=".into()))?;
            overrides.push(SignalOverride { round, player, rule });
        }
        let recovery = match recovery {
            Some(r) => r,
            None if overrides.is_empty() => 1,
            None => return Err(bad("schedule with failures needs recover=T".into())),
        };
        FailureSchedule::new(overrides, recovery)
    }

    /// Overrides equal as rendered text; signal maps compare by label.
    pub fn same_as(&self, other: &FailureSchedule) -> bool {
        self.render() == other.render()
    }
}

impl fmt::Display for FailureSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            f.write_str("identity")
        } else {
            f.write_str(&self.render())
        }
    }
}

/// The base device with the schedule's overrides applied.
pub struct FaultyMonitor<'a> {
    base: &'a dyn Monitor,
    schedule: FailureSchedule,
}

/// Rejects schedules whose overrides reach the recovery round.
pub fn apply_failures<'a>(base: &'a dyn Monitor, schedule: &FailureSchedule) -> Result<FaultyMonitor<'a>> {
    schedule.validate()?;
    for o in schedule.overrides() {
        if o.player >= base.players() {
            return Err(Error::InvalidSchedule(format!("no player {}", o.player + 1)));
        }
    }
    Ok(FaultyMonitor { base, schedule: schedule.clone() })
}

impl FaultyMonitor<'_> {
    pub fn schedule(&self) -> &FailureSchedule {
        &self.schedule
    }
}

impl Monitor for FaultyMonitor<'_> {
    fn players(&self) -> usize {
        self.base.players()
    }

    fn actions(&self) -> &[Action] {
        self.base.actions()
    }

    fn initial_signal(&self, player: usize) -> Signal {
        self.base.initial_signal(player)
    }

    fn signal(&self, round: u32, player: usize, history: &[Action]) -> Signal {
        if round > self.schedule.last_override_round() {
            return self.base.signal(round, player, history);
        }
        match self.schedule.lookup(round, player) {
            None => self.base.signal(round, player, history),
            Some(OverrideRule::Fixed(s)) => *s,
            Some(rule) => rule.apply(self.base.signal(round, player, history)),
        }
    }

    fn memoryless_from(&self) -> Option<u32> {
        let healed = self.schedule.recovery.max(self.schedule.last_override_round() + 1);
        self.base.memoryless_from().map(|b| b.max(healed))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecoveryVerdict {
    Pass { recovery: u32 },
    /// Earliest round at or after the declared recovery where the faulty
    /// device disagreed with the base device.
    Fail { round: u32, player: usize },
}

impl RecoveryVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, RecoveryVerdict::Pass { .. })
    }
}

const PROBE_HISTORIES: usize = 64;
const PROBE_SEED: u64 = 0x5eed_f417;

/// Probes random action histories and compares the faulty and base devices
/// on every round from the declared recovery round to `probe_horizon`.
pub fn validate_recovery(schedule: &FailureSchedule, base: &dyn Monitor, probe_horizon: u32) -> RecoveryVerdict {
    let faulty = FaultyMonitor { base, schedule: schedule.clone() };
    let players = base.players();
    let actions = base.actions();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut worst: Option<(u32, usize)> = None;
    let mut history = Vec::with_capacity(probe_horizon as usize * players);
    for _ in 0..PROBE_HISTORIES {
        history.clear();
        for round in 1..=probe_horizon {
            for _ in 0..players {
                history.push(actions[rng.gen_range(0..actions.len())]);
            }
            if round < schedule.recovery {
                continue;
            }
            for player in 0..players {
                if faulty.signal(round, player, &history) != base.signal(round, player, &history) {
                    if worst.is_none_or(|(r, _)| round < r) {
                        worst = Some((round, player));
                    }
                    break;
                }
            }
        }
    }
    match worst {
        None => RecoveryVerdict::Pass { recovery: schedule.recovery },
        Some((round, player)) => RecoveryVerdict::Fail { round, player },
    }
}

/// A base state paired with one admissible failure pattern.
#[derive(Debug, Clone)]
pub struct LiftedState<S> {
    pub state: S,
    pub schedule: FailureSchedule,
}

/// Every (state, schedule) pair; the identity schedule is always included,
/// first if it had to be added.
pub fn enumerate_lifted<S: Clone>(states: &[S], schedules: &[FailureSchedule]) -> Vec<LiftedState<S>> {
    let mut all: Vec<FailureSchedule> = Vec::with_capacity(schedules.len() + 1);
    if !schedules.iter().any(FailureSchedule::is_identity) {
        all.push(FailureSchedule::identity());
    }
    all.extend(schedules.iter().cloned());
    states
        .iter()
        .flat_map(|s| all.iter().map(move |j| LiftedState { state: s.clone(), schedule: j.clone() }))
        .collect()
}
