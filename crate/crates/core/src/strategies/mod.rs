//! Concrete strategies: MaxBid and its window functions, the two-state
//! alternation machine, and signal-blind deviators.

mod ex21;
mod maxbid;
mod simple;
mod spec;
mod window;

pub use ex21::{ex21_strategy, Ex21Machine, Ex21Strategy};
pub use maxbid::{maxbid_next, maxbid_strategy, observed_max, MaxBid, MaxBidConfig, ObservedMax, DEFAULT_FLOOR};
pub use simple::{constant_strategy, periodic_strategy, ConstantStrategy, PeriodicStrategy};
pub use spec::{parse_window, ActionStyle, StrategySpec};
pub use window::WindowFunction;
pub(crate) use spec::split_top as spec_split_top;
