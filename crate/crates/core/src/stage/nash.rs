//! Brute-force check that no player gains from a unilateral deviation.

use super::{Action, Payoff, StageGame};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NashVerdict {
    Pass,
    /// The most profitable unilateral deviation. Ties go to the lowest action,
    /// then the lowest player id.
    Fail { player: usize, action: Action, gain: Payoff },
}

impl NashVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, NashVerdict::Pass)
    }
}

pub fn verify_one_stage_nash<F>(
    action_sets: &[Vec<Action>],
    payoff: F,
    profile: &[Action],
) -> NashVerdict
where
    F: Fn(&[Action]) -> Vec<Payoff>,
{
    let base = payoff(profile);
    let mut best: Option<(usize, Action, Payoff)> = None;
    let mut probe = profile.to_vec();
    for (player, actions) in action_sets.iter().enumerate() {
        for &action in actions {
            if action == profile[player] {
                continue;
            }
            probe[player] = action;
            let gain = payoff(&probe)[player] - base[player];
            probe[player] = profile[player];
            if gain <= Payoff::from_integer(0) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((_, best_action, best_gain)) => {
                    gain > *best_gain || (gain == *best_gain && action < *best_action)
                }
            };
            if better {
                best = Some((player, action, gain));
            }
        }
    }
    match best {
        None => NashVerdict::Pass,
        Some((player, action, gain)) => NashVerdict::Fail { player, action, gain },
    }
}

pub fn verify_game_nash(game: &dyn StageGame, profile: &[Action]) -> NashVerdict {
    let sets: Vec<Vec<Action>> = (0..game.players()).map(|p| game.actions(p).to_vec()).collect();
    verify_one_stage_nash(&sets, |x| game.payoffs(x), profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stage::{one_stage_equilibrium, Auction, MatrixGame, MatrixState, ValuationState};

    /// Independent enumeration in integer arithmetic: payoff times the
    /// number of winners, compared by cross-multiplication.
    fn brute_force_best_gain(values: &[i64], bids: &[i64], m: i64) -> Option<(usize, i64, i64, i64)> {
        fn scaled(values: &[i64], bids: &[i64], i: usize) -> (i64, i64) {
            let top = *bids.iter().max().unwrap();
            let k = bids.iter().filter(|&&b| b == top).count() as i64;
            if bids[i] == top {
                (values[i] - top, k)
            } else {
                (0, 1)
            }
        }
        let mut best: Option<(usize, i64, i64, i64)> = None;
        for i in 0..bids.len() {
            let (bn, bd) = scaled(values, bids, i);
            for b in 1..=m {
                let mut x = bids.to_vec();
                x[i] = b;
                let (dn, dd) = scaled(values, &x, i);
                // gain = dn/dd - bn/bd
                let gn = dn * bd - bn * dd;
                let gd = dd * bd;
                if gn <= 0 {
                    continue;
                }
                let replace = match best {
                    None => true,
                    Some((_, bb, n, d)) => gn * d > n * gd || (gn * d == n * gd && b < bb),
                };
                if replace {
                    best = Some((i, b, gn, gd));
                }
            }
        }
        best
    }

    fn auction_sets(n: usize, m: u32) -> Vec<Vec<Action>> {
        vec![(1..=m).collect(); n]
    }

    #[test]
    fn equilibrium_profiles_pass() {
        for (values, m) in [(vec![7, 5], 7), (vec![4, 4], 4)] {
            let state = ValuationState::new(values, m).unwrap();
            let game = Auction::new(state.clone());
            let eq = one_stage_equilibrium(&state);
            assert!(verify_game_nash(&game, eq.bids()).is_pass());
        }
    }

    #[test]
    fn degenerate_second_value_fails_with_witness() {
        let state = ValuationState::new(vec![7, 1], 7).unwrap();
        let game = Auction::new(state);
        assert_eq!(
            verify_game_nash(&game, &[1, 1]),
            NashVerdict::Fail { player: 0, action: 2, gain: Payoff::from_integer(2) }
        );
        assert_eq!(brute_force_best_gain(&[7, 1], &[1, 1], 7), Some((0, 2, 4, 2)));
    }

    #[test]
    fn agrees_with_integer_enumeration() {
        for n in 2..=3 {
            for m in 1..=5u32 {
                for state in ValuationState::enumerate(n, m) {
                    let values: Vec<i64> = state.values().iter().map(|&v| v as i64).collect();
                    let eq = one_stage_equilibrium(&state);
                    let bids: Vec<i64> = eq.bids().iter().map(|&b| b as i64).collect();
                    let game = Auction::new(state.clone());
                    let verdict = verify_game_nash(&game, eq.bids());
                    match brute_force_best_gain(&values, &bids, m as i64) {
                        None => assert!(verdict.is_pass(), "{state}"),
                        Some((p, b, gn, gd)) => assert_eq!(
                            verdict,
                            NashVerdict::Fail { player: p, action: b as u32, gain: Payoff::new(gn, gd) },
                            "{state}"
                        ),
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_game_pure_equilibria() {
        let a = MatrixGame::new(MatrixState::A);
        // (b,b) pays (5,5) but a deviation to a pays 6.
        assert_eq!(
            verify_game_nash(&a, &[1, 1]),
            NashVerdict::Fail { player: 0, action: 0, gain: Payoff::from_integer(1) }
        );
        assert!(verify_game_nash(&a, &[0, 0]).is_pass());
    }

    #[test]
    fn custom_payoff_function() {
        // matching pennies has no pure equilibrium
        let sets = auction_sets(2, 2);
        let pay = |x: &[Action]| {
            let same = x[0] == x[1];
            let one = Payoff::from_integer(1);
            if same { vec![one, -one] } else { vec![-one, one] }
        };
        assert!(!verify_one_stage_nash(&sets, pay, &[1, 1]).is_pass());
    }
}
