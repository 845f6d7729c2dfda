//! The MaxBid learning rule for repeated first-price auctions.
//!
//! At round `t >= 2` a bidder with value `v > 1` looks at the rounds
//! `t - phi(t) ..= t - 1`. A round *qualifies* when the bidder either lost it
//! or tied for it; the qualifying winning bids are what the rivals showed.
//! With some qualifying round the bidder bids one above the largest
//! qualifying winning bid, capped at `v - 1`. When no round qualifies (the
//! bidder alone won every round in the window) it probes downward by one,
//! never below `floor`, again capped at `v - 1`. Round 1 is always a bid of 1.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::WindowFunction;
use crate::error::{Error, Result};
use crate::repeated::{Signal, Strategy};
use crate::stage::Action;

pub const DEFAULT_FLOOR: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MaxBidConfig {
    pub window: WindowFunction,
    /// Lowest bid the downward probe may reach; 1 or 2.
    pub floor: u32,
}

impl MaxBidConfig {
    pub fn new(window: WindowFunction, floor: u32) -> Result<Self> {
        let config = MaxBidConfig { window, floor };
        config.validate()?;
        Ok(config)
    }

    pub fn with_window(window: WindowFunction) -> Self {
        MaxBidConfig { window, floor: DEFAULT_FLOOR }
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if !(1..=2).contains(&self.floor) {
            return Err(Error::InvalidStrategy(format!("floor must be 1 or 2, got {}", self.floor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservedMax {
    /// No round in the window qualified.
    SoleWinnerThroughout,
    Value(u32),
}

fn qualifies(own: Action, signal: Signal) -> Option<u32> {
    match signal {
        Signal::Auction { max_bid, winner_count } if own < max_bid || winner_count > 1 => Some(max_bid),
        _ => None,
    }
}

/// Largest qualifying winning bid over aligned window slices.
pub fn observed_max(own_bids: &[Action], signals: &[Signal]) -> ObservedMax {
    debug_assert_eq!(own_bids.len(), signals.len());
    own_bids
        .iter()
        .zip(signals)
        .filter_map(|(&own, &s)| qualifies(own, s))
        .max()
        .map_or(ObservedMax::SoleWinnerThroughout, ObservedMax::Value)
}

/// The bid for round `t >= 2`.
pub fn maxbid_next(value: u32, config: &MaxBidConfig, _t: u32, previous: Action, observed: ObservedMax) -> Action {
    if value <= 1 {
        return 1;
    }
    match observed {
        ObservedMax::Value(m) => (m + 1).min(value - 1),
        ObservedMax::SoleWinnerThroughout => previous.saturating_sub(1).max(config.floor).min(value - 1),
    }
}

/// A MaxBid bidder.
///
/// Keeps, for every winning bid `M`, the last round in which a qualifying
/// round showed `M`, so the window maximum is a scan over bid levels.
#[derive(Debug, Clone)]
pub struct MaxBid {
    config: MaxBidConfig,
    pinned: Option<u32>,
    value: u32,
    played: u32,
    last_seen: Vec<u32>,
    recent: VecDeque<[u32; 3]>,
}

impl MaxBid {
    /// Reads its valuation from the initial signal.
    pub fn new(config: MaxBidConfig) -> Self {
        MaxBid { config, pinned: None, value: 1, played: 0, last_seen: Vec::new(), recent: VecDeque::new() }
    }

    pub fn config(&self) -> &MaxBidConfig {
        &self.config
    }

    fn window_cap(&self) -> Option<usize> {
        match self.config.window {
            WindowFunction::Constant(k) => Some(k as usize),
            _ => None,
        }
    }

    fn observed(&self, t: u32) -> ObservedMax {
        let start = self.config.window.start(t).max(1);
        for m in (1..self.last_seen.len()).rev() {
            if self.last_seen[m] >= start {
                return ObservedMax::Value(m as u32);
            }
        }
        ObservedMax::SoleWinnerThroughout
    }
}

/// A MaxBid bidder with a fixed valuation, ignoring initial information.
pub fn maxbid_strategy(value: u32, config: MaxBidConfig) -> MaxBid {
    let mut s = MaxBid::new(config);
    s.pinned = Some(value);
    s
}

impl Strategy for MaxBid {
    fn start(&mut self, initial: Signal) -> Action {
        self.value = match (self.pinned, initial) {
            (Some(v), _) => v,
            (None, Signal::Valuation(v)) => v,
            _ => 1,
        };
        self.played = 0;
        self.last_seen.clear();
        self.recent.clear();
        1
    }

    fn next(&mut self, signal: Signal, own_action: Action) -> Action {
        self.played += 1;
        if let Some(m) = qualifies(own_action, signal) {
            let m = m as usize;
            if self.last_seen.len() <= m {
                self.last_seen.resize(m + 1, 0);
            }
            self.last_seen[m] = self.played;
        }
        if let Some(cap) = self.window_cap() {
            let record = match signal {
                Signal::Auction { max_bid, winner_count } => [own_action, max_bid, winner_count],
                _ => [own_action, 0, 0],
            };
            self.recent.push_back(record);
            if self.recent.len() > cap {
                self.recent.pop_front();
            }
        }
        let t = self.played + 1;
        maxbid_next(self.value, &self.config, t, own_action, self.observed(t))
    }

    fn is_finite_state(&self) -> bool {
        self.window_cap().is_some()
    }

    fn summary(&self) -> Option<Vec<u32>> {
        self.window_cap()?;
        let mut key = Vec::with_capacity(2 + 3 * self.recent.len());
        key.push(self.value);
        key.push(self.recent.len() as u32);
        for r in &self.recent {
            key.extend_from_slice(r);
        }
        Some(key)
    }

    /// The next bid depends on the value, the latest own bid and the
    /// qualifying rounds inside the window.
    fn memory_start(&self) -> u32 {
        match self.played {
            _ if self.value <= 1 => u32::MAX,
            0 => 1,
            n => self.config.window.earliest_start(n + 1).max(1),
        }
    }

    fn describe(&self) -> String {
        format!("maxbid(window={}, floor={})", self.config.window, self.config.floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(m: u32, k: u32) -> Signal {
        Signal::auction(m, k)
    }

    #[test]
    fn observed_max_examples() {
        assert_eq!(observed_max(&[1], &[s(1, 2)]), ObservedMax::Value(1));
        assert_eq!(observed_max(&[2], &[s(2, 1)]), ObservedMax::SoleWinnerThroughout);
        assert_eq!(observed_max(&[4, 5], &[s(4, 2), s(5, 1)]), ObservedMax::Value(4));
        assert_eq!(observed_max(&[3, 2], &[s(6, 1), s(2, 1)]), ObservedMax::Value(6));
    }

    #[test]
    fn next_bid_examples() {
        let c = MaxBidConfig::with_window(WindowFunction::FullHistory);
        assert_eq!(maxbid_next(7, &c, 5, 4, ObservedMax::Value(4)), 5);
        assert_eq!(maxbid_next(5, &c, 5, 4, ObservedMax::Value(5)), 4);
        assert_eq!(maxbid_next(7, &c, 5, 4, ObservedMax::SoleWinnerThroughout), 3);
        assert_eq!(maxbid_next(3, &c, 2, 5, ObservedMax::SoleWinnerThroughout), 2);
        assert_eq!(maxbid_next(1, &c, 2, 1, ObservedMax::Value(6)), 1);
    }

    #[test]
    fn floor_controls_the_probe_bottom() {
        let two = MaxBidConfig::with_window(WindowFunction::Constant(1));
        let one = MaxBidConfig::new(WindowFunction::Constant(1), 1).unwrap();
        assert_eq!(maxbid_next(7, &two, 3, 2, ObservedMax::SoleWinnerThroughout), 2);
        assert_eq!(maxbid_next(7, &one, 3, 2, ObservedMax::SoleWinnerThroughout), 1);
        assert!(MaxBidConfig::new(WindowFunction::HalfSliding, 3).is_err());
    }

    #[test]
    fn first_bid_is_one_and_value_comes_from_initial_signal() {
        let mut b = MaxBid::new(MaxBidConfig::with_window(WindowFunction::FullHistory));
        assert_eq!(b.start(Signal::Valuation(7)), 1);
        assert_eq!(b.next(s(1, 2), 1), 2);
        assert_eq!(b.next(s(2, 2), 2), 3);
        let mut pinned = maxbid_strategy(3, MaxBidConfig::with_window(WindowFunction::FullHistory));
        pinned.start(Signal::Valuation(7));
        assert_eq!(pinned.next(s(6, 1), 1), 2);
    }

    #[test]
    fn constant_window_summary_tracks_the_window() {
        let mut b = MaxBid::new(MaxBidConfig::with_window(WindowFunction::Constant(2)));
        b.start(Signal::Valuation(7));
        b.next(s(1, 2), 1);
        b.next(s(2, 2), 2);
        let a = b.summary().unwrap();
        b.next(s(3, 2), 3);
        let c = b.summary().unwrap();
        assert_eq!(a, vec![7, 2, 1, 1, 2, 2, 2, 2]);
        assert_eq!(c, vec![7, 2, 2, 2, 2, 3, 3, 2]);
        let full = MaxBid::new(MaxBidConfig::with_window(WindowFunction::HalfSliding));
        assert!(!full.is_finite_state());
        assert_eq!(full.summary(), None);
    }
}
