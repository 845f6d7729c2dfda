//! Signals and monitoring devices.

use std::fmt;

use crate::error::{Error, Result};
use crate::stage::{winning_bid, Action, BidProfile, MatrixGame, MatrixState, Payoff, StageGame, ValuationState};

/// What a player observes: either before play (initial information) or after
/// each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    /// Winning bid and how many bidders submitted it.
    Auction { max_bid: u32, winner_count: u32 },
    /// The player's own stage payoff.
    Payoff(Payoff),
    /// A private valuation, used as initial information in auctions.
    Valuation(u32),
    /// An uninformative or purely symbolic signal such as `*`.
    Opaque(&'static str),
}

impl Signal {
    pub fn auction(max_bid: u32, winner_count: u32) -> Self {
        Signal::Auction { max_bid, winner_count }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signal::Auction { max_bid, winner_count } => write!(f, "({max_bid},{winner_count})"),
            Signal::Payoff(p) => write!(f, "{p}"),
            Signal::Valuation(v) => write!(f, "v={v}"),
            Signal::Opaque(s) => f.write_str(s),
        }
    }
}

/// A profile of monitoring devices, one per player, plus the device that
/// hands out initial information.
///
/// `history` is the flattened sequence of action profiles for rounds
/// `1..=round`, `players()` entries per round. A device may only look at
/// that prefix.
pub trait Monitor: Send + Sync {
    fn players(&self) -> usize;

    /// Action alphabet shared by all players; used to probe devices.
    fn actions(&self) -> &[Action];

    fn initial_signal(&self, player: usize) -> Signal;

    fn signal(&self, round: u32, player: usize, history: &[Action]) -> Signal;

    /// First round from which every signal is a function of the latest
    /// action profile alone. `None` if there is no such round.
    fn memoryless_from(&self) -> Option<u32> {
        Some(1)
    }
}

fn last_profile(history: &[Action], players: usize) -> &[Action] {
    &history[history.len() - players..]
}

/// Announces the winning bid and the number of winners to every bidder.
pub fn auction_monitor(history: &[BidProfile]) -> Result<Signal> {
    let last = history.last().ok_or(Error::EmptyHistory)?;
    let w = winning_bid(last.bids())?;
    Ok(Signal::auction(w.max_bid, w.winner_count as u32))
}

#[derive(Debug, Clone)]
pub struct AuctionMonitor {
    state: ValuationState,
    bids: Vec<Action>,
}

impl AuctionMonitor {
    pub fn new(state: ValuationState) -> Self {
        let bids = (1..=state.max_value()).collect();
        AuctionMonitor { state, bids }
    }
}

impl Monitor for AuctionMonitor {
    fn players(&self) -> usize {
        self.state.players()
    }

    fn actions(&self) -> &[Action] {
        &self.bids
    }

    fn initial_signal(&self, player: usize) -> Signal {
        Signal::Valuation(self.state.value(player))
    }

    fn signal(&self, _round: u32, _player: usize, history: &[Action]) -> Signal {
        let last = last_profile(history, self.state.players());
        let max_bid = last.iter().copied().max().unwrap_or(0);
        let count = last.iter().filter(|&&b| b == max_bid).count() as u32;
        Signal::auction(max_bid, count)
    }
}

/// Reveals each player's own stage payoff. The column player is told the
/// state up front; the row player learns nothing before play.
#[derive(Debug, Clone)]
pub struct PayoffMonitor {
    game: MatrixGame,
}

impl PayoffMonitor {
    pub fn new(state: MatrixState) -> Self {
        PayoffMonitor { game: MatrixGame::new(state) }
    }
}

impl Monitor for PayoffMonitor {
    fn players(&self) -> usize {
        2
    }

    fn actions(&self) -> &[Action] {
        self.game.actions(0)
    }

    fn initial_signal(&self, player: usize) -> Signal {
        if player == 0 {
            Signal::Opaque("*")
        } else {
            Signal::Opaque(self.game.spec().state.label())
        }
    }

    fn signal(&self, _round: u32, player: usize, history: &[Action]) -> Signal {
        let last = last_profile(history, 2);
        let mut out = [Payoff::from_integer(0); 2];
        self.game.payoffs_into(last, &mut out);
        Signal::Payoff(out[player])
    }
}

/// Every player sees `*` after every round.
#[derive(Debug, Clone)]
pub struct TrivialMonitor {
    players: usize,
    actions: Vec<Action>,
}

impl TrivialMonitor {
    pub fn new(players: usize, actions: Vec<Action>) -> Self {
        TrivialMonitor { players, actions }
    }
}

impl Monitor for TrivialMonitor {
    fn players(&self) -> usize {
        self.players
    }

    fn actions(&self) -> &[Action] {
        &self.actions
    }

    fn initial_signal(&self, _player: usize) -> Signal {
        Signal::Opaque("*")
    }

    fn signal(&self, _round: u32, _player: usize, _history: &[Action]) -> Signal {
        Signal::Opaque("*")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auction_monitor_examples() {
        let h = |bids: Vec<Vec<u32>>| bids.into_iter().map(BidProfile).collect::<Vec<_>>();
        assert_eq!(auction_monitor(&h(vec![vec![5, 4]])).unwrap(), Signal::auction(5, 1));
        assert_eq!(auction_monitor(&h(vec![vec![1, 1], vec![4, 4]])).unwrap(), Signal::auction(4, 2));
        assert_eq!(auction_monitor(&h(vec![vec![2, 5]])).unwrap(), Signal::auction(5, 1));
        assert_eq!(auction_monitor(&[]), Err(Error::EmptyHistory));
    }

    #[test]
    fn device_reads_only_the_last_profile() {
        let m = AuctionMonitor::new(ValuationState::new(vec![7, 5], 7).unwrap());
        assert_eq!(m.signal(2, 0, &[7, 7, 3, 2]), Signal::auction(3, 1));
        assert_eq!(m.signal(2, 1, &[7, 7, 3, 2]), Signal::auction(3, 1));
        assert_eq!(m.initial_signal(1), Signal::Valuation(5));
    }

    #[test]
    fn payoff_monitor_reports_own_payoff() {
        let m = PayoffMonitor::new(MatrixState::A);
        assert_eq!(m.signal(1, 0, &[1, 2]), Signal::Payoff(Payoff::from_integer(1)));
        assert_eq!(m.signal(1, 1, &[1, 2]), Signal::Payoff(Payoff::from_integer(0)));
        assert_eq!(m.initial_signal(0), Signal::Opaque("*"));
        assert_eq!(m.initial_signal(1), Signal::Opaque("A"));
    }
}
