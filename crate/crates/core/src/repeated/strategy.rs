use super::Signal;
use crate::stage::Action;

/// A deterministic transducer from a player's own information to actions.
///
/// The engine calls [`Strategy::start`] once with the initial signal and then
/// [`Strategy::next`] after every round with the signal of that round and
/// the action the player actually took. `start` must reset all state so an
/// instance can be replayed.
pub trait Strategy: Send {
    fn start(&mut self, initial: Signal) -> Action;

    fn next(&mut self, signal: Signal, own_action: Action) -> Action;

    /// True if the strategy can always (eventually) summarize itself with
    /// [`Strategy::summary`].
    fn is_finite_state(&self) -> bool {
        false
    }

    /// A key that fully determines future behavior given future signals.
    /// `None` while no such finite summary is available.
    fn summary(&self) -> Option<Vec<u32>> {
        None
    }

    /// Earliest round whose signal or own action can still influence the
    /// actions chosen from the next round on. `u32::MAX` if none can.
    fn memory_start(&self) -> u32 {
        1
    }

    fn describe(&self) -> String;
}

impl Strategy for Box<dyn Strategy> {
    fn start(&mut self, initial: Signal) -> Action {
        (**self).start(initial)
    }

    fn next(&mut self, signal: Signal, own_action: Action) -> Action {
        (**self).next(signal, own_action)
    }

    fn is_finite_state(&self) -> bool {
        (**self).is_finite_state()
    }

    fn summary(&self) -> Option<Vec<u32>> {
        (**self).summary()
    }

    fn memory_start(&self) -> u32 {
        (**self).memory_start()
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}
