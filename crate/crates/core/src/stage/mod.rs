//! One-shot stage games.
//!
//! The repeated-game engine only needs three things from a stage game: the
//! number of players, each player's finite action alphabet, and the exact
//! payoff vector of a joint action. Actions are plain `u32` codes; for the
//! auction they are bids, for the matrix game they index `a`, `b`, `n`.

mod auction;
mod matrix;
mod nash;

pub use auction::{
    one_stage_equilibrium, stage_payoffs, winning_bid, Auction, BidProfile, PayoffVector,
    ValuationState, WinningBid,
};
pub use matrix::{
    matrix_action_label, matrix_stage_payoffs, parse_matrix_action, MatrixGame, MatrixGameSpec,
    MatrixState, ACTION_A, ACTION_B, ACTION_N,
};
pub use nash::{verify_game_nash, verify_one_stage_nash, NashVerdict};

use num_rational::Rational64;

pub type Action = u32;

/// Exact payoff in valuation units.
pub type Payoff = Rational64;

pub trait StageGame: Send + Sync {
    fn players(&self) -> usize;

    /// The finite action alphabet of `player`, in ascending order.
    fn actions(&self, player: usize) -> &[Action];

    fn is_action(&self, player: usize, action: Action) -> bool {
        self.actions(player).contains(&action)
    }

    /// Writes the payoff of every player for `profile` into `out`.
    fn payoffs_into(&self, profile: &[Action], out: &mut [Payoff]);

    fn payoffs(&self, profile: &[Action]) -> Vec<Payoff> {
        let mut out = vec![Payoff::from_integer(0); self.players()];
        self.payoffs_into(profile, &mut out);
        out
    }

    /// Human readable label of an action.
    fn action_label(&self, action: Action) -> String {
        action.to_string()
    }
}
