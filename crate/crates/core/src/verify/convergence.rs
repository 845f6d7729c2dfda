use serde::Serialize;

use crate::repeated::{PlayTrace, SteadyState};
use crate::stage::{one_stage_equilibrium, ValuationState};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Convergence {
    /// Play sits at the one-shot equilibrium from this round on.
    ConvergedAt { round: u32 },
    /// Play was absorbed at some other profile.
    NotConverged { absorbed: Vec<u32> },
    /// Share of rounds in the trailing half of the horizon spent at the
    /// one-shot equilibrium.
    Density { fraction: f64 },
}

pub fn convergence_round(trace: &PlayTrace, state: &ValuationState) -> Convergence {
    let target = one_stage_equilibrium(state).0;
    if let SteadyState::Absorbed { profile, since } = trace.steady_state() {
        if *profile == target && *since <= trace.horizon() {
            return Convergence::ConvergedAt { round: *since };
        }
        if *profile != target {
            return Convergence::NotConverged { absorbed: profile.clone() };
        }
    }
    Convergence::Density { fraction: equilibrium_density(trace, state) }
}

/// Fraction of rounds `(H/2, H]` at the one-shot equilibrium profile.
pub fn equilibrium_density(trace: &PlayTrace, state: &ValuationState) -> f64 {
    let target = one_stage_equilibrium(state).0;
    let h = trace.horizon();
    let from = h / 2 + 1;
    let hits = (from..=h).filter(|&t| trace.profile(t) == target.as_slice()).count();
    hits as f64 / (h - from + 1) as f64
}
