//! Repeated first-price auctions with partial monitoring: stage games,
//! a deterministic play engine, MaxBid learners, failure schedules and
//! finite-family equilibrium checks.

pub mod error;
pub mod failures;
pub mod repeated;
pub mod stage;
pub mod strategies;
pub mod verify;

pub use error::{Error, Result};
