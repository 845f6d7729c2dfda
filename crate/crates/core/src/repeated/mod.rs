//! Repeated play with partial monitoring: signals, devices, strategies, the
//! play generator, and payoff evaluation.

mod compose;
mod engine;
pub mod export;
mod monitor;
mod payoff;
mod strategy;

pub use compose::{prefix_compose, PrefixComposed};
pub use engine::{run, run_rejoining, PlayTrace, SteadyState, CYCLE_PROBE_ROUNDS, MIN_ABSORPTION_RUN};
pub use monitor::{auction_monitor, AuctionMonitor, Monitor, PayoffMonitor, Signal, TrivialMonitor};
pub use payoff::{average_payoff, longrun_payoff, PayoffSummary, PlayerPayoff};
pub use strategy::Strategy;
