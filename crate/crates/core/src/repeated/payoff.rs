//! Limit-of-means evaluation of a recorded play.

use num_integer::Integer;
use serde::Serialize;

use super::PlayTrace;
use crate::error::{Error, Result};
use crate::stage::Payoff;

/// `(1/T) * sum_{t=1..T} u_i(x(t))`, exactly.
pub fn average_payoff(trace: &PlayTrace, player: usize, through_round: u32) -> Result<Payoff> {
    if through_round == 0 || through_round > trace.horizon() {
        return Err(Error::InvalidHorizon(through_round));
    }
    let (num, den) = exact_sum(trace.iter_payoffs_of(player).take(through_round as usize));
    let den = den * through_round as i128;
    let g = num.gcd(&den);
    let narrow = |x: i128| i64::try_from(x / g).expect("average fits in 64 bits");
    Ok(Payoff::new(narrow(num), narrow(den)))
}

/// Sum over a common denominator, one term per distinct value.
fn exact_sum(values: impl Iterator<Item = Payoff>) -> (i128, i128) {
    // Ratios are kept reduced, so equal parts mean equal values.
    let mut tally: Vec<((i64, i64), i128)> = Vec::new();
    for p in values {
        let key = (*p.numer(), *p.denom());
        match tally.iter_mut().find(|(k, _)| *k == key) {
            Some((_, count)) => *count += 1,
            None => tally.push((key, 1)),
        }
    }
    let (mut num, mut den) = (0i128, 1i128);
    for ((n, d), count) in tally {
        let d = d as i128;
        if den % d != 0 {
            let scale = d / den.gcd(&d);
            num *= scale;
            den *= scale;
        }
        num += n as i128 * (den / d) * count;
    }
    (num, den)
}

/// The long-run average payoff and whether it is exact.
///
/// Exact when the steady state was classified: the average over one cycle
/// equals the limit inferior of the running averages. Otherwise this is the
/// horizon average.
pub fn longrun_payoff(trace: &PlayTrace, player: usize) -> (Payoff, bool) {
    match trace.exact_longrun() {
        Some(values) => (values[player], true),
        None => (
            average_payoff(trace, player, trace.horizon()).expect("horizon is at least 1"),
            false,
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlayerPayoff {
    pub player: usize,
    #[serde(serialize_with = "crate::repeated::export::ser_payoff")]
    pub horizon_average: Payoff,
    #[serde(serialize_with = "crate::repeated::export::ser_payoff")]
    pub longrun: Payoff,
    pub exact_longrun: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PayoffSummary {
    pub players: Vec<PlayerPayoff>,
}

impl PayoffSummary {
    pub fn of(trace: &PlayTrace) -> Self {
        let players = (0..trace.players())
            .map(|i| {
                let (longrun, exact_longrun) = longrun_payoff(trace, i);
                PlayerPayoff {
                    player: i + 1,
                    horizon_average: average_payoff(trace, i, trace.horizon()).expect("horizon >= 1"),
                    longrun,
                    exact_longrun,
                }
            })
            .collect();
        PayoffSummary { players }
    }
}
