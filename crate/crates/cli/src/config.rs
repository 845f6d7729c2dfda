//! Flat `key = value` scenario files.
//!
//! ```text
//! # comments start with '#'
//! game = auction
//! state = 7,5
//! max_value = 7
//! player.1 = maxbid(window=full)
//! player.2 = periodic(;1,1,3)
//! horizon = 200
//! ```
//!
//! Keys and defaults:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `game` | `auction` or `matrix` | required |
//! | `state` | one state: bidder values `7,5`, or `A` / `B` | |
//! | `states` | `;`-separated states, or `all(n=2, m=2..5)` (auction states with second-highest value at least 2) | |
//! | `max_value` | bid range `1..=m` for `state`/`states` lists | largest value in each state |
//! | `player.N` | strategy of player `N` | |
//! | `players` | one strategy for every player | |
//! | `horizon` | rounds recorded | 10000 |
//! | `floor` | floor for `maxbid` specs that omit it | 2 |
//! | `tolerance` | allowed gain for estimated payoffs, `P/Q` | 1/100 |
//! | `schedule` | failure schedule for `run`/`sweep`, or `identity` | identity |
//! | `schedules` | `\|`-separated schedules for `check = f_robust` | identity |
//! | `check` | `le`, `robust` or `f_robust` | |
//! | `family` | `+`-joined `witnesses`, `constants`, `periodic(P,Q)` | witnesses+constants |
//! | `prefixes` | `constants`, or `;`-separated `(spec, spec, ...)` profiles | |
//! | `prefix_rounds` | prefix lengths `T` | 1 |
//! | `budget` | cap on deviations per state | 100000 |
//! | `out` | output directory | `.` |
//! | `jobs` | worker threads | all cores |

use std::collections::BTreeMap;
use std::path::PathBuf;

use maxbid_core::failures::FailureSchedule;
use maxbid_core::stage::{MatrixState, Payoff, ValuationState};
use maxbid_core::strategies::{ActionStyle, StrategySpec, DEFAULT_FLOOR};
use maxbid_core::verify::{DeviationFamily, GameState, PrefixProfiles, ProfileSpec, DEFAULT_BUDGET};
use thiserror::Error;

pub const DEFAULT_HORIZON: u32 = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    Auction,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Le,
    Robust,
    FRobust,
}

impl CheckKind {
    fn label(self) -> &'static str {
        match self {
            CheckKind::Le => "le",
            CheckKind::Robust => "robust",
            CheckKind::FRobust => "f_robust",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateSpec {
    List { states: Vec<GameState>, max_value: Option<u32> },
    /// Every auction state with `players` bidders, bid range `m` in `range`,
    /// and second-highest value at least 2.
    Sweep { players: usize, min_m: u32, max_m: u32 },
}

impl StateSpec {
    pub fn expand(&self) -> Vec<GameState> {
        match self {
            StateSpec::List { states, .. } => states.clone(),
            StateSpec::Sweep { players, min_m, max_m } => (*min_m..=*max_m)
                .flat_map(|m| ValuationState::enumerate(*players, m))
                .filter(|v| v.second_highest() >= 2)
                .map(GameState::Auction)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyPart {
    Witnesses,
    Constants,
    Periodic(usize, usize),
}

#[derive(Debug, Clone)]
pub struct Config {
    pub game: GameKind,
    pub states: StateSpec,
    pub profile: ProfileSpec,
    pub horizon: u32,
    pub floor: u32,
    pub tolerance: Payoff,
    pub schedules: Vec<FailureSchedule>,
    pub check: Option<CheckKind>,
    pub family: Vec<FamilyPart>,
    pub prefixes: Option<PrefixProfiles>,
    pub prefix_rounds: Vec<u32>,
    pub budget: u64,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl PartialEq for Config {
    fn eq(&self, other: &Config) -> bool {
        self.game == other.game
            && self.states == other.states
            && self.profile == other.profile
            && self.horizon == other.horizon
            && self.floor == other.floor
            && self.tolerance == other.tolerance
            && self.schedules.len() == other.schedules.len()
            && self.schedules.iter().zip(&other.schedules).all(|(a, b)| a.same_as(b))
            && self.check == other.check
            && self.family == other.family
            && self.prefixes == other.prefixes
            && self.prefix_rounds == other.prefix_rounds
            && self.budget == other.budget
            && self.out == other.out
            && self.jobs == other.jobs
    }
}

const KEYS: &[&str] = &[
    "game",
    "state",
    "states",
    "max_value",
    "players",
    "horizon",
    "floor",
    "tolerance",
    "schedule",
    "schedules",
    "check",
    "family",
    "prefixes",
    "prefix_rounds",
    "budget",
    "out",
    "jobs",
];

/// A raw value with the position of its first character.
struct Entry {
    value: String,
    line: usize,
    column: usize,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.0.remove(key)
    }
}

impl Entry {
    fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.line, column: self.column, message: message.into() }
    }

    fn parse<T>(&self, what: &str, f: impl FnOnce(&str) -> Option<T>) -> Result<T, ConfigError> {
        f(&self.value).ok_or_else(|| self.error(format!("invalid {what} `{}`", self.value)))
    }
}

fn lex(text: &str) -> Result<Entries, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let column = content.len() - content.trim_start().len() + 1;
            return Err(ConfigError { line, column, message: "expected `key = value`".into() });
        };
        let key = content[..eq].trim();
        let key_column = content.len() - content.trim_start().len() + 1;
        let known = KEYS.contains(&key)
            || key.strip_prefix("player.").is_some_and(|n| n.parse::<usize>().is_ok_and(|n| n >= 1));
        if !known {
            return Err(ConfigError { line, column: key_column, message: format!("unknown key `{key}`") });
        }
        let rest = &content[eq + 1..];
        let value = rest.trim();
        let column = eq + 2 + (rest.len() - rest.trim_start().len());
        if entries.contains_key(key) {
            return Err(ConfigError { line, column: key_column, message: format!("duplicate key `{key}`") });
        }
        entries.insert(key.to_string(), Entry { value: value.to_string(), line, column });
    }
    Ok(Entries(entries))
}

fn missing(key: &str) -> ConfigError {
    ConfigError { line: 0, column: 0, message: format!("missing required key `{key}`") }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut e = lex(text)?;
        let game_entry = e.take("game").ok_or_else(|| missing("game"))?;
        let game = game_entry.parse("game", |v| match v {
            "auction" => Some(GameKind::Auction),
            "matrix" => Some(GameKind::Matrix),
            _ => None,
        })?;
        let style = match game {
            GameKind::Auction => ActionStyle::Numeric,
            GameKind::Matrix => ActionStyle::Matrix,
        };

        let floor = match e.take("floor") {
            Some(f) => f.parse("floor", |v| v.parse().ok().filter(|f| (1..=2).contains(f)))?,
            None => DEFAULT_FLOOR,
        };
        let max_value = match e.take("max_value") {
            Some(m) => Some(m.parse("max_value", |v| v.parse().ok())?),
            None => None,
        };
        let states = match (e.take("state"), e.take("states")) {
            (Some(a), Some(_)) => return Err(a.error("use either `state` or `states`, not both")),
            (Some(s), None) => {
                StateSpec::List { states: vec![parse_state(&s, &s.value, game, max_value)?], max_value }
            }
            (None, Some(s)) => parse_states(&s, game, max_value)?,
            (None, None) => return Err(missing("state")),
        };

        let player_keys: Vec<String> = e.0.keys().filter(|k| k.starts_with("player.")).cloned().collect();
        let profile = match (e.take("players"), player_keys.is_empty()) {
            (Some(p), true) => ProfileSpec::Uniform(parse_spec(&p, &p.value, style, floor)?),
            (Some(p), false) => return Err(p.error("use either `players` or `player.N`, not both")),
            (None, true) => return Err(missing("players")),
            (None, false) => {
                let mut numbered: Vec<(usize, Entry)> = player_keys
                    .iter()
                    .map(|k| (k["player.".len()..].parse().unwrap(), e.take(k).unwrap()))
                    .collect();
                numbered.sort_by_key(|(n, _)| *n);
                let mut specs = Vec::new();
                for (i, (n, entry)) in numbered.iter().enumerate() {
                    if *n != i + 1 {
                        return Err(entry.error(format!("players must be numbered 1..; missing player.{}", i + 1)));
                    }
                    specs.push(parse_spec(entry, &entry.value, style, floor)?);
                }
                ProfileSpec::PerPlayer(specs)
            }
        };
        for state in states.expand() {
            if let ProfileSpec::PerPlayer(p) = &profile {
                if p.len() != state.players() {
                    return Err(ConfigError {
                        line: 0,
                        column: 0,
                        message: format!("state {state} has {} players but {} strategies are given", state.players(), p.len()),
                    });
                }
            }
        }

        let horizon = match e.take("horizon") {
            Some(h) => h.parse("horizon", |v| v.parse().ok().filter(|&h: &u32| h >= 1))?,
            None => DEFAULT_HORIZON,
        };
        let tolerance = match e.take("tolerance") {
            Some(t) => t.parse("tolerance", parse_ratio)?,
            None => Payoff::new(1, 100),
        };
        let schedules = match (e.take("schedule"), e.take("schedules")) {
            (Some(a), Some(_)) => return Err(a.error("use either `schedule` or `schedules`, not both")),
            (Some(s), None) => vec![parse_schedule(&s, &s.value)?],
            (None, Some(s)) => s.value.split('|').map(|part| parse_schedule(&s, part)).collect::<Result<_, _>>()?,
            (None, None) => vec![FailureSchedule::identity()],
        };
        let check = match e.take("check") {
            Some(c) => Some(c.parse("check", |v| match v {
                "le" => Some(CheckKind::Le),
                "robust" => Some(CheckKind::Robust),
                "f_robust" => Some(CheckKind::FRobust),
                _ => None,
            })?),
            None => None,
        };
        let family = match e.take("family") {
            Some(f) => f.value.split('+').map(|p| parse_family_part(&f, p)).collect::<Result<_, _>>()?,
            None => vec![FamilyPart::Witnesses, FamilyPart::Constants],
        };
        let prefixes = match e.take("prefixes") {
            Some(p) => Some(parse_prefixes(&p, style, floor)?),
            None => None,
        };
        let prefix_rounds = match e.take("prefix_rounds") {
            Some(r) => r.parse("prefix_rounds", |v| v.split(',').map(|t| t.trim().parse().ok()).collect())?,
            None => vec![1],
        };
        let budget = match e.take("budget") {
            Some(b) => b.parse("budget", |v| v.parse().ok())?,
            None => DEFAULT_BUDGET,
        };
        let out = e.take("out").map_or_else(|| PathBuf::from("."), |o| PathBuf::from(o.value));
        let jobs = match e.take("jobs") {
            Some(j) => Some(j.parse("jobs", |v| v.parse().ok().filter(|&j: &usize| j >= 1))?),
            None => None,
        };
        debug_assert!(e.0.is_empty());

        Ok(Config {
            game,
            states,
            profile,
            horizon,
            floor,
            tolerance,
            schedules,
            check,
            family,
            prefixes,
            prefix_rounds,
            budget,
            out,
            jobs,
        })
    }

    pub fn style(&self) -> ActionStyle {
        match self.game {
            GameKind::Auction => ActionStyle::Numeric,
            GameKind::Matrix => ActionStyle::Matrix,
        }
    }

    pub fn deviation_family(&self) -> DeviationFamily {
        let parts: Vec<DeviationFamily> = self
            .family
            .iter()
            .map(|p| match p {
                FamilyPart::Witnesses => DeviationFamily::Witnesses,
                FamilyPart::Constants => DeviationFamily::ConstantAll,
                FamilyPart::Periodic(p, q) => DeviationFamily::PeriodicExhaustive { max_prefix: *p, max_period: *q },
            })
            .collect();
        match <[DeviationFamily; 1]>::try_from(parts) {
            Ok([one]) => one,
            Err(parts) => DeviationFamily::Union(parts),
        }
    }

    /// Canonical text; parsing it yields an equal config.
    pub fn render(&self) -> String {
        let style = self.style();
        let mut lines = Vec::new();
        let game = match self.game {
            GameKind::Auction => "auction",
            GameKind::Matrix => "matrix",
        };
        lines.push(format!("game = {game}"));
        match &self.states {
            StateSpec::List { states, max_value } => {
                let list: Vec<String> = states.iter().map(render_state).collect();
                lines.push(format!("states = {}", list.join("; ")));
                if let Some(m) = max_value {
                    lines.push(format!("max_value = {m}"));
                }
            }
            StateSpec::Sweep { players, min_m, max_m } => {
                lines.push(format!("states = all(n={players}, m={min_m}..{max_m})"));
            }
        }
        match &self.profile {
            ProfileSpec::Uniform(s) => lines.push(format!("players = {}", s.render(style))),
            ProfileSpec::PerPlayer(specs) => {
                for (i, s) in specs.iter().enumerate() {
                    lines.push(format!("player.{} = {}", i + 1, s.render(style)));
                }
            }
        }
        lines.push(format!("horizon = {}", self.horizon));
        lines.push(format!("floor = {}", self.floor));
        lines.push(format!("tolerance = {}/{}", self.tolerance.numer(), self.tolerance.denom()));
        let schedules: Vec<String> = self.schedules.iter().map(|s| s.to_string()).collect();
        lines.push(format!("schedules = {}", schedules.join(" | ")));
        if let Some(c) = self.check {
            lines.push(format!("check = {}", c.label()));
        }
        let family: Vec<String> = self
            .family
            .iter()
            .map(|p| match p {
                FamilyPart::Witnesses => "witnesses".to_string(),
                FamilyPart::Constants => "constants".to_string(),
                FamilyPart::Periodic(p, q) => format!("periodic({p},{q})"),
            })
            .collect();
        lines.push(format!("family = {}", family.join("+")));
        match &self.prefixes {
            Some(PrefixProfiles::ConstantAll) => lines.push("prefixes = constants".into()),
            Some(PrefixProfiles::Explicit(list)) => {
                let profiles: Vec<String> = list
                    .iter()
                    .map(|g| format!("({})", g.iter().map(|s| s.render(style)).collect::<Vec<_>>().join(", ")))
                    .collect();
                lines.push(format!("prefixes = {}", profiles.join("; ")));
            }
            None => {}
        }
        let rounds: Vec<String> = self.prefix_rounds.iter().map(u32::to_string).collect();
        lines.push(format!("prefix_rounds = {}", rounds.join(",")));
        lines.push(format!("budget = {}", self.budget));
        lines.push(format!("out = {}", self.out.display()));
        if let Some(j) = self.jobs {
            lines.push(format!("jobs = {j}"));
        }
        lines.join("\n") + "\n"
    }
}

fn parse_ratio(text: &str) -> Option<Payoff> {
    let (p, q) = text.split_once('/').unwrap_or((text, "1"));
    let (p, q): (i64, i64) = (p.trim().parse().ok()?, q.trim().parse().ok()?);
    (q > 0 && p >= 0).then(|| Payoff::new(p, q))
}

pub fn parse_tolerance(text: &str) -> Option<Payoff> {
    parse_ratio(text)
}

fn render_state(state: &GameState) -> String {
    match state {
        GameState::Auction(v) => v.values().iter().map(u32::to_string).collect::<Vec<_>>().join(","),
        GameState::Matrix(s) => s.to_string(),
    }
}

fn parse_state(entry: &Entry, text: &str, game: GameKind, max_value: Option<u32>) -> Result<GameState, ConfigError> {
    let text = text.trim().trim_start_matches('(').trim_end_matches(')');
    match game {
        GameKind::Matrix => text
            .parse::<MatrixState>()
            .map(GameState::Matrix)
            .map_err(|_| entry.error(format!("matrix state must be A or B, got `{text}`"))),
        GameKind::Auction => {
            let values: Vec<u32> = text
                .split(',')
                .map(|v| v.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| entry.error(format!("invalid valuation list `{text}`")))?;
            let m = max_value.unwrap_or_else(|| values.iter().copied().max().unwrap_or(1));
            ValuationState::new(values, m).map(GameState::Auction).map_err(|err| entry.error(err.to_string()))
        }
    }
}

fn parse_states(entry: &Entry, game: GameKind, max_value: Option<u32>) -> Result<StateSpec, ConfigError> {
    let value = entry.value.trim();
    if let Some(args) = value.strip_prefix("all(").and_then(|v| v.strip_suffix(')')) {
        if game != GameKind::Auction {
            return Err(entry.error("`all(...)` sweeps are only defined for auctions"));
        }
        let bad = || entry.error(format!("expected all(n=N, m=A..B), got `{value}`"));
        let (mut n, mut range) = (None, None);
        for part in args.split(", ").flat_map(|p| p.split(',')) {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "n" => n = Some(v.trim().parse::<usize>().map_err(|_| bad())?),
                "m" => {
                    let (a, b) = v.trim().split_once("..").unwrap_or((v.trim(), v.trim()));
                    range = Some((a.parse::<u32>().map_err(|_| bad())?, b.parse::<u32>().map_err(|_| bad())?));
                }
                _ => return Err(bad()),
            }
        }
        let (players, (min_m, max_m)) = (n.ok_or_else(bad)?, range.ok_or_else(bad)?);
        if players < 2 || min_m < 2 || min_m > max_m {
            return Err(bad());
        }
        return Ok(StateSpec::Sweep { players, min_m, max_m });
    }
    let states = value
        .split(';')
        .map(|s| parse_state(entry, s, game, max_value))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StateSpec::List { states, max_value })
}

fn parse_spec(entry: &Entry, text: &str, style: ActionStyle, floor: u32) -> Result<StrategySpec, ConfigError> {
    StrategySpec::parse(text, style, floor).map_err(|err| entry.error(err.to_string()))
}

fn parse_schedule(entry: &Entry, text: &str) -> Result<FailureSchedule, ConfigError> {
    match text.trim() {
        "identity" => Ok(FailureSchedule::identity()),
        other => FailureSchedule::parse(other).map_err(|err| entry.error(err.to_string())),
    }
}

fn parse_family_part(entry: &Entry, text: &str) -> Result<FamilyPart, ConfigError> {
    let text = text.trim();
    match text {
        "witnesses" => return Ok(FamilyPart::Witnesses),
        "constants" => return Ok(FamilyPart::Constants),
        _ => {}
    }
    let bounds = text
        .strip_prefix("periodic(")
        .and_then(|v| v.strip_suffix(')'))
        .and_then(|v| v.split_once(','))
        .and_then(|(p, q)| Some((p.trim().parse().ok()?, q.trim().parse().ok()?)))
        .filter(|&(_, q)| q >= 1);
    bounds
        .map(|(p, q)| FamilyPart::Periodic(p, q))
        .ok_or_else(|| entry.error(format!("unknown deviation family `{text}`")))
}

fn parse_prefixes(entry: &Entry, style: ActionStyle, floor: u32) -> Result<PrefixProfiles, ConfigError> {
    let value = entry.value.trim();
    if value == "constants" {
        return Ok(PrefixProfiles::ConstantAll);
    }
    let mut profiles = Vec::new();
    for group in value.split(';') {
        let inner = group
            .trim()
            .strip_prefix('(')
            .and_then(|g| g.strip_suffix(')'))
            .ok_or_else(|| entry.error(format!("prefix profiles are `(spec, spec, ...)`, got `{}`", group.trim())))?;
        let specs = split_top_level(inner)
            .into_iter()
            .map(|s| parse_spec(entry, s, style, floor))
            .collect::<Result<Vec<_>, _>>()?;
        profiles.push(specs);
    }
    Ok(PrefixProfiles::Explicit(profiles))
}

/// Splits on commas outside parentheses.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}
