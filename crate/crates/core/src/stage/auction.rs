//! First-price sealed-bid auction with fair tie-breaking in expectation.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Action, Payoff, StageGame};
use crate::error::{Error, Result};

/// Private valuations of all bidders, each in `1..=max_value`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValuationState {
    values: Vec<u32>,
    max_value: u32,
}

impl ValuationState {
    pub fn new(values: Vec<u32>, max_value: u32) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidState(format!(
                "need at least two bidders, got {}",
                values.len()
            )));
        }
        if max_value < 1 {
            return Err(Error::InvalidState("maximum valuation must be at least 1".into()));
        }
        if let Some(v) = values.iter().find(|&&v| v < 1 || v > max_value) {
            return Err(Error::InvalidState(format!(
                "valuation {v} outside 1..={max_value}"
            )));
        }
        Ok(ValuationState { values, max_value })
    }

    pub fn players(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> u32 {
        self.max_value
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, player: usize) -> u32 {
        self.values[player]
    }

    /// The `j`-th largest valuation, 1-based.
    pub fn order_statistic(&self, j: usize) -> u32 {
        let mut sorted = self.values.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted[j - 1]
    }

    pub fn second_highest(&self) -> u32 {
        self.order_statistic(2)
    }

    /// Every state in `{1..=m}^n`, in lexicographic order.
    pub fn enumerate(players: usize, max_value: u32) -> Vec<ValuationState> {
        let mut out = Vec::new();
        let mut values = vec![1u32; players];
        loop {
            out.push(ValuationState { values: values.clone(), max_value });
            let mut i = players;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if values[i] < max_value {
                    values[i] += 1;
                    break;
                }
                values[i] = 1;
            }
        }
    }
}

impl fmt::Display for ValuationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BidProfile(pub Vec<u32>);

impl BidProfile {
    /// Checks length and range against `state`.
    pub fn checked(bids: Vec<u32>, state: &ValuationState) -> Result<Self> {
        validate_bids(&bids, state.players(), state.max_value())?;
        Ok(BidProfile(bids))
    }

    pub fn bids(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for BidProfile {
    fn from(bids: Vec<u32>) -> Self {
        BidProfile(bids)
    }
}

fn validate_bids(bids: &[u32], players: usize, max_value: u32) -> Result<()> {
    if bids.len() != players {
        return Err(Error::DimensionMismatch { expected: players, actual: bids.len() });
    }
    if let Some(b) = bids.iter().find(|&&b| b < 1 || b > max_value) {
        return Err(Error::InvalidProfile(format!("bid {b} outside 1..={max_value}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PayoffVector(pub Vec<Payoff>);

impl PayoffVector {
    pub fn get(&self, player: usize) -> Payoff {
        self.0[player]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinningBid {
    pub max_bid: u32,
    pub winner_count: usize,
    /// Zero-based ids of the highest bidders, ascending.
    pub winners: Vec<usize>,
}

/// Highest bid, number of highest bidders, and who they are.
pub fn winning_bid(bids: &[u32]) -> Result<WinningBid> {
    if bids.is_empty() {
        return Err(Error::InvalidProfile("empty bid profile".into()));
    }
    if bids.contains(&0) {
        return Err(Error::InvalidProfile("bids start at 1".into()));
    }
    let max_bid = *bids.iter().max().expect("non-empty");
    let winners: Vec<usize> =
        bids.iter().enumerate().filter(|(_, &b)| b == max_bid).map(|(i, _)| i).collect();
    Ok(WinningBid { max_bid, winner_count: winners.len(), winners })
}

/// `(v_i - M) / |N|` for every highest bidder, zero for everyone else.
pub fn stage_payoffs(state: &ValuationState, bids: &[u32]) -> Result<PayoffVector> {
    validate_bids(bids, state.players(), state.max_value())?;
    let mut out = vec![Payoff::from_integer(0); bids.len()];
    auction_payoffs_into(state.values(), bids, &mut out);
    Ok(PayoffVector(out))
}

fn auction_payoffs_into(values: &[u32], bids: &[u32], out: &mut [Payoff]) {
    let max_bid = bids.iter().copied().max().unwrap_or(0);
    let count = bids.iter().filter(|&&b| b == max_bid).count() as i64;
    for ((o, &v), &b) in out.iter_mut().zip(values).zip(bids) {
        *o = if b == max_bid && count == 1 {
            Payoff::from_integer(v as i64 - max_bid as i64)
        } else if b == max_bid {
            Payoff::new(v as i64 - max_bid as i64, count)
        } else {
            Payoff::from_integer(0)
        };
    }
}

/// The symmetric one-shot equilibrium: bidders with value 1 bid 1, everyone
/// else bids value minus one, except a unique highest-value bidder who bids
/// the second-highest valuation.
pub fn one_stage_equilibrium(state: &ValuationState) -> BidProfile {
    let top = state.order_statistic(1);
    let top_count = state.values().iter().filter(|&&v| v == top).count();
    let second = state.second_highest();
    let bids = state
        .values()
        .iter()
        .map(|&v| {
            if v == 1 {
                1
            } else if v == top && top_count == 1 {
                second
            } else {
                v - 1
            }
        })
        .collect();
    BidProfile(bids)
}

/// A first-price auction at a fixed valuation state.
#[derive(Debug, Clone)]
pub struct Auction {
    state: ValuationState,
    bids: Vec<Action>,
}

impl Auction {
    pub fn new(state: ValuationState) -> Self {
        let bids = (1..=state.max_value()).collect();
        Auction { state, bids }
    }

    pub fn state(&self) -> &ValuationState {
        &self.state
    }
}

impl StageGame for Auction {
    fn players(&self) -> usize {
        self.state.players()
    }

    fn actions(&self, _player: usize) -> &[Action] {
        &self.bids
    }

    fn is_action(&self, _player: usize, action: Action) -> bool {
        action >= 1 && action <= self.state.max_value()
    }

    fn payoffs_into(&self, profile: &[Action], out: &mut [Payoff]) {
        auction_payoffs_into(self.state.values(), profile, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(values: &[u32], m: u32) -> ValuationState {
        ValuationState::new(values.to_vec(), m).unwrap()
    }

    fn r(n: i64, d: i64) -> Payoff {
        Payoff::new(n, d)
    }

    #[test]
    fn winning_bid_examples() {
        let w = winning_bid(&[5, 4]).unwrap();
        assert_eq!((w.max_bid, w.winner_count, w.winners), (5, 1, vec![0]));
        let w = winning_bid(&[4, 4]).unwrap();
        assert_eq!((w.max_bid, w.winner_count, w.winners), (4, 2, vec![0, 1]));
        let w = winning_bid(&[1, 1, 1]).unwrap();
        assert_eq!((w.max_bid, w.winner_count, w.winners), (1, 3, vec![0, 1, 2]));
    }

    #[test]
    fn winning_bid_rejects_malformed() {
        assert!(winning_bid(&[]).is_err());
        assert!(winning_bid(&[0, 3]).is_err());
    }

    #[test]
    fn payoff_examples() {
        let v = st(&[7, 5], 7);
        assert_eq!(stage_payoffs(&v, &[5, 4]).unwrap().0, vec![r(2, 1), r(0, 1)]);
        assert_eq!(stage_payoffs(&v, &[3, 3]).unwrap().0, vec![r(2, 1), r(1, 1)]);
        assert_eq!(stage_payoffs(&v, &[1, 4]).unwrap().0, vec![r(0, 1), r(1, 1)]);
    }

    #[test]
    fn overbidding_winner_loses_money() {
        let v = st(&[2, 1], 5);
        assert_eq!(stage_payoffs(&v, &[5, 1]).unwrap().0, vec![r(-3, 1), r(0, 1)]);
        assert_eq!(stage_payoffs(&v, &[3, 3]).unwrap().0, vec![r(-1, 2), r(-1, 1)]);
    }

    #[test]
    fn payoffs_reject_bad_dimensions() {
        let v = st(&[7, 5], 7);
        assert_eq!(
            stage_payoffs(&v, &[1, 2, 3]),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        );
        assert!(stage_payoffs(&v, &[8, 1]).is_err());
        assert!(stage_payoffs(&v, &[0, 1]).is_err());
    }

    #[test]
    fn equilibrium_examples() {
        assert_eq!(one_stage_equilibrium(&st(&[7, 5], 7)).0, vec![5, 4]);
        assert_eq!(one_stage_equilibrium(&st(&[4, 4], 4)).0, vec![3, 3]);
        assert_eq!(one_stage_equilibrium(&st(&[1, 1], 3)).0, vec![1, 1]);
        assert_eq!(one_stage_equilibrium(&st(&[6, 5, 3], 6)).0, vec![5, 4, 2]);
        assert_eq!(one_stage_equilibrium(&st(&[7, 1], 7)).0, vec![1, 1]);
    }

    #[test]
    fn state_validation() {
        assert!(ValuationState::new(vec![3], 5).is_err());
        assert!(ValuationState::new(vec![3, 6], 5).is_err());
        assert!(ValuationState::new(vec![0, 1], 5).is_err());
    }

    #[test]
    fn enumerate_covers_the_grid() {
        let all = ValuationState::enumerate(3, 4);
        assert_eq!(all.len(), 64);
        assert_eq!(all[0].values(), &[1, 1, 1]);
        assert_eq!(all[63].values(), &[4, 4, 4]);
    }

    use proptest::prelude::*;

    fn state_and_bids() -> impl Strategy<Value = (ValuationState, Vec<u32>)> {
        (2usize..5, 1u32..9).prop_flat_map(|(n, m)| {
            (
                proptest::collection::vec(1..=m, n),
                proptest::collection::vec(1..=m, n),
                Just(m),
            )
                .prop_map(|(v, x, m)| (ValuationState::new(v, m).unwrap(), x))
        })
    }

    proptest! {
        #[test]
        fn winners_split_surplus_exactly((state, bids) in state_and_bids()) {
            let pay = stage_payoffs(&state, &bids).unwrap();
            let w = winning_bid(&bids).unwrap();
            for i in 0..bids.len() {
                if w.winners.contains(&i) {
                    let scaled = pay.get(i) * Payoff::from_integer(w.winner_count as i64);
                    prop_assert_eq!(scaled, Payoff::from_integer(state.value(i) as i64 - w.max_bid as i64));
                } else {
                    prop_assert_eq!(pay.get(i), Payoff::from_integer(0));
                }
            }
        }

        #[test]
        fn equilibrium_bids_stay_in_bounds((state, _) in state_and_bids()) {
            let eq = one_stage_equilibrium(&state);
            for (i, &b) in eq.bids().iter().enumerate() {
                let v = state.value(i);
                if v == 1 {
                    prop_assert_eq!(b, 1);
                } else {
                    prop_assert!(b >= 1 && b <= (v - 1).max(1));
                }
            }
        }

        #[test]
        fn winner_set_is_permutation_equivariant(
            bids in proptest::collection::vec(1u32..8, 2..6),
            seed in any::<u64>(),
        ) {
            let n = bids.len();
            let mut perm: Vec<usize> = (0..n).collect();
            // Fisher-Yates driven by the seed
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let permuted: Vec<u32> = perm.iter().map(|&p| bids[p]).collect();
            let a = winning_bid(&bids).unwrap();
            let b = winning_bid(&permuted).unwrap();
            prop_assert_eq!(a.max_bid, b.max_bid);
            let mut mapped: Vec<usize> = b.winners.iter().map(|&j| perm[j]).collect();
            mapped.sort_unstable();
            prop_assert_eq!(mapped, a.winners);
        }
    }
}
