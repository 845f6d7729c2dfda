use super::{Signal, Strategy};
use crate::stage::Action;

/// Plays `prefix` for the first `switch_after` rounds and `suffix` afterwards.
///
/// Both parts see every signal and every action actually taken, so the
/// suffix starts with the full history, including the prefix rounds.
pub struct PrefixComposed {
    prefix: Box<dyn Strategy>,
    suffix: Box<dyn Strategy>,
    switch_after: u32,
    played: u32,
}

pub fn prefix_compose(
    prefix: Box<dyn Strategy>,
    suffix: Box<dyn Strategy>,
    switch_after: u32,
) -> PrefixComposed {
    PrefixComposed { prefix, suffix, switch_after, played: 0 }
}

impl PrefixComposed {
    fn pick(&self, from_prefix: Action, from_suffix: Action) -> Action {
        if self.played < self.switch_after {
            from_prefix
        } else {
            from_suffix
        }
    }
}

impl Strategy for PrefixComposed {
    fn start(&mut self, initial: Signal) -> Action {
        self.played = 0;
        let g = self.prefix.start(initial);
        let f = self.suffix.start(initial);
        self.pick(g, f)
    }

    fn next(&mut self, signal: Signal, own_action: Action) -> Action {
        self.played += 1;
        let g = self.prefix.next(signal, own_action);
        let f = self.suffix.next(signal, own_action);
        self.pick(g, f)
    }

    fn is_finite_state(&self) -> bool {
        self.suffix.is_finite_state()
    }

    fn summary(&self) -> Option<Vec<u32>> {
        if self.played >= self.switch_after {
            self.suffix.summary()
        } else {
            None
        }
    }

    fn memory_start(&self) -> u32 {
        if self.played < self.switch_after {
            self.prefix.memory_start().min(self.suffix.memory_start())
        } else {
            self.suffix.memory_start()
        }
    }

    fn describe(&self) -> String {
        format!(
            "compose({}, {}, {})",
            self.prefix.describe(),
            self.suffix.describe(),
            self.switch_after
        )
    }
}
