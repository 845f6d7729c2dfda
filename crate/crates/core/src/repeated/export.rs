//! Trace and summary export: delimited rows plus a JSON summary document.

use std::io::{self, Write};

use serde::{Serialize, Serializer};

use super::{PayoffSummary, PlayTrace, PlayerPayoff, SteadyState};
use crate::stage::{Payoff, StageGame};

pub(crate) fn ser_payoff<S: Serializer>(p: &Payoff, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_payoff(p))
}

pub fn format_payoff(p: &Payoff) -> String {
    if *p.denom() == 1 {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

/// Column names: `round, bid_1..bid_n, winning_bid, winner_count, payoff_1..payoff_n`.
pub fn trace_header(players: usize) -> Vec<String> {
    let mut header = vec!["round".to_string()];
    header.extend((1..=players).map(|i| format!("bid_{i}")));
    header.push("winning_bid".into());
    header.push("winner_count".into());
    header.extend((1..=players).map(|i| format!("payoff_{i}")));
    header
}

/// Writes one record per round. For non-auction games the action columns
/// carry action labels and the winning-bid columns are left empty.
pub fn write_trace_csv<W: Write>(
    trace: &PlayTrace,
    game: &dyn StageGame,
    auction: bool,
    out: W,
) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trace_header(trace.players()))?;
    for t in 1..=trace.horizon() {
        let profile = trace.profile(t);
        let mut row = vec![t.to_string()];
        row.extend(profile.iter().map(|&a| game.action_label(a)));
        if auction {
            let top = profile.iter().copied().max().unwrap_or(0);
            let count = profile.iter().filter(|&&b| b == top).count();
            row.push(top.to_string());
            row.push(count.to_string());
        } else {
            row.push(String::new());
            row.push(String::new());
        }
        row.extend(trace.payoff_profile(t).iter().map(format_payoff));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary {
    pub state: String,
    pub horizon: u32,
    pub classification: SteadyState,
    pub players: Vec<PlayerPayoff>,
}

impl TraceSummary {
    pub fn of(state: impl Into<String>, trace: &PlayTrace) -> Self {
        TraceSummary {
            state: state.into(),
            horizon: trace.horizon(),
            classification: trace.steady_state().clone(),
            players: PayoffSummary::of(trace).players,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is serializable")
    }
}
