//! Textual strategy specifications:
//! `maxbid(window=..., floor=...)`, `constant(b)`, `periodic(prefix;cycle)`,
//! `ex21`, `compose(g, f, T)`.

use serde::{Deserialize, Serialize};

use super::{constant_strategy, ex21_strategy, periodic_strategy, MaxBid, MaxBidConfig, WindowFunction};
use crate::error::{Error, Result};
use crate::repeated::{prefix_compose, Strategy};
use crate::stage::{matrix_action_label, parse_matrix_action, Action};

/// How actions are spelled in specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionStyle {
    /// Bids as integers.
    Numeric,
    /// `a`, `b`, `n`.
    Matrix,
}

impl ActionStyle {
    pub fn parse(self, token: &str) -> Result<Action> {
        let token = token.trim();
        match self {
            ActionStyle::Numeric => token.parse().map_err(|_| Error::UnknownAction(token.to_string())),
            ActionStyle::Matrix => parse_matrix_action(token),
        }
    }

    pub fn render(self, action: Action) -> String {
        match self {
            ActionStyle::Numeric => action.to_string(),
            ActionStyle::Matrix => matrix_action_label(action).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategySpec {
    MaxBid(MaxBidConfig),
    Constant(Action),
    Periodic { prefix: Vec<Action>, cycle: Vec<Action> },
    Ex21,
    Compose { prefix: Box<StrategySpec>, suffix: Box<StrategySpec>, rounds: u32 },
}

impl StrategySpec {
    pub fn compose(prefix: StrategySpec, suffix: StrategySpec, rounds: u32) -> Self {
        StrategySpec::Compose { prefix: Box::new(prefix), suffix: Box::new(suffix), rounds }
    }

    pub fn periodic(prefix: Vec<Action>, cycle: Vec<Action>) -> Self {
        StrategySpec::Periodic { prefix, cycle }
    }

    pub fn build(&self) -> Box<dyn Strategy> {
        match self {
            StrategySpec::MaxBid(config) => Box::new(MaxBid::new(config.clone())),
            StrategySpec::Constant(a) => Box::new(constant_strategy(*a)),
            StrategySpec::Periodic { prefix, cycle } => Box::new(periodic_strategy(prefix.clone(), cycle.clone())),
            StrategySpec::Ex21 => Box::new(ex21_strategy()),
            StrategySpec::Compose { prefix, suffix, rounds } => {
                Box::new(prefix_compose(prefix.build(), suffix.build(), *rounds))
            }
        }
    }

    /// Every action this spec can emit directly (MaxBid is unconstrained).
    pub fn literal_actions(&self) -> Vec<Action> {
        match self {
            StrategySpec::Constant(a) => vec![*a],
            StrategySpec::Periodic { prefix, cycle } => prefix.iter().chain(cycle).copied().collect(),
            StrategySpec::Compose { prefix, suffix, .. } => {
                let mut v = prefix.literal_actions();
                v.extend(suffix.literal_actions());
                v
            }
            _ => Vec::new(),
        }
    }

    pub fn render(&self, style: ActionStyle) -> String {
        let list = |v: &[Action]| v.iter().map(|&a| style.render(a)).collect::<Vec<_>>().join(",");
        match self {
            StrategySpec::MaxBid(c) => format!("maxbid(window={}, floor={})", c.window, c.floor),
            StrategySpec::Constant(a) => format!("constant({})", style.render(*a)),
            StrategySpec::Periodic { prefix, cycle } => format!("periodic({};{})", list(prefix), list(cycle)),
            StrategySpec::Ex21 => "ex21".into(),
            StrategySpec::Compose { prefix, suffix, rounds } => {
                format!("compose({}, {}, {})", prefix.render(style), suffix.render(style), rounds)
            }
        }
    }

    /// Parses a spec. MaxBid specs without `floor=` get `default_floor`.
    pub fn parse(text: &str, style: ActionStyle, default_floor: u32) -> Result<Self> {
        let (name, args) = split_call(text)?;
        let bad = |msg: String| Error::InvalidStrategy(msg);
        match (name, args) {
            ("ex21", None) => Ok(StrategySpec::Ex21),
            ("constant", Some(arg)) => Ok(StrategySpec::Constant(style.parse(arg)?)),
            ("periodic", Some(arg)) => {
                let (prefix, cycle) = arg
                    .split_once(';')
                    .ok_or_else(|| bad("periodic needs `prefix;cycle`".into()))?;
                let prefix = parse_list(prefix, style)?;
                let cycle = parse_list(cycle, style)?;
                if cycle.is_empty() {
                    return Err(bad("periodic cycle must be non-empty".into()));
                }
                Ok(StrategySpec::Periodic { prefix, cycle })
            }
            ("compose", Some(arg)) => {
                let parts = split_top(arg, ',');
                if parts.len() != 3 {
                    return Err(bad(format!("compose takes 3 arguments, got {}", parts.len())));
                }
                let rounds = parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad prefix length `{}`", parts[2].trim())))?;
                Ok(StrategySpec::compose(
                    StrategySpec::parse(parts[0], style, default_floor)?,
                    StrategySpec::parse(parts[1], style, default_floor)?,
                    rounds,
                ))
            }
            ("maxbid", args) => {
                let mut window = None;
                let mut floor = default_floor;
                for part in args.map(|a| split_top(a, ',')).unwrap_or_default() {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    let (key, value) =
                        part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{part}`")))?;
                    match key.trim() {
                        "window" => window = Some(parse_window(value.trim())?),
                        "floor" => {
                            floor = value.trim().parse().map_err(|_| bad(format!("bad floor `{}`", value.trim())))?
                        }
                        other => return Err(bad(format!("unknown maxbid key `{other}`"))),
                    }
                }
                let window = window.ok_or_else(|| bad("maxbid needs window=".into()))?;
                Ok(StrategySpec::MaxBid(MaxBidConfig::new(window, floor)?))
            }
            (name, _) => Err(bad(format!("unknown strategy `{name}`"))),
        }
    }
}

pub fn parse_window(text: &str) -> Result<WindowFunction> {
    let (name, args) = split_call(text)?;
    let bad = || Error::InvalidWindow(format!("unknown window `{text}`"));
    match (name, args) {
        ("full", None) => Ok(WindowFunction::FullHistory),
        ("half", None) => Ok(WindowFunction::HalfSliding),
        ("const", Some(k)) => WindowFunction::constant(k.trim().parse().map_err(|_| bad())?),
        ("table", Some(values)) => {
            let values = values
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| bad()))
                .collect::<Result<Vec<u32>>>()?;
            WindowFunction::table(values)
        }
        _ => Err(bad()),
    }
}

fn parse_list(text: &str, style: ActionStyle) -> Result<Vec<Action>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|t| style.parse(t)).collect()
}

/// `name(args)` or bare `name`.
pub(crate) fn split_call(text: &str) -> Result<(&str, Option<&str>)> {
    let text = text.trim();
    match text.find('(') {
        None => Ok((text, None)),
        Some(open) => {
            if !text.ends_with(')') {
                return Err(Error::InvalidStrategy(format!("unbalanced parentheses in `{text}`")));
            }
            Ok((text[..open].trim(), Some(&text[open + 1..text.len() - 1])))
        }
    }
}

/// Splits on `sep` outside parentheses.
pub(crate) fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}
