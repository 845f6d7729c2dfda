//! Scenarios, convergence detection and equilibrium checks.

mod convergence;
mod deviation;
mod equilibrium;
mod scenario;

pub use convergence::{convergence_round, equilibrium_density, Convergence};
pub use deviation::{best_deviation, canonical, deviation_gain, witnesses, DeviationFamily, DeviationOutcome, DEFAULT_BUDGET};
pub use equilibrium::{
    f_robust_test, le_test, robust_le_test, CheckOptions, PrefixFamily, PrefixProfiles, ProfileSpec, Verdict,
    VerdictRow,
};
pub use scenario::{GameState, Scenario};
