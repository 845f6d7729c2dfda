//! Signal-blind strategies used as prefixes and deviations.

use crate::repeated::{Signal, Strategy};
use crate::stage::Action;

#[derive(Debug, Clone)]
pub struct ConstantStrategy {
    action: Action,
}

pub fn constant_strategy(action: Action) -> ConstantStrategy {
    ConstantStrategy { action }
}

impl Strategy for ConstantStrategy {
    fn start(&mut self, _initial: Signal) -> Action {
        self.action
    }

    fn next(&mut self, _signal: Signal, _own_action: Action) -> Action {
        self.action
    }

    fn is_finite_state(&self) -> bool {
        true
    }

    fn summary(&self) -> Option<Vec<u32>> {
        Some(Vec::new())
    }

    fn memory_start(&self) -> u32 {
        u32::MAX
    }

    fn describe(&self) -> String {
        format!("constant({})", self.action)
    }
}

/// Plays `prefix` once, then repeats `cycle` forever.
#[derive(Debug, Clone)]
pub struct PeriodicStrategy {
    prefix: Vec<Action>,
    cycle: Vec<Action>,
    position: usize,
}

/// # Panics
/// If `cycle` is empty.
pub fn periodic_strategy(prefix: Vec<Action>, cycle: Vec<Action>) -> PeriodicStrategy {
    assert!(!cycle.is_empty(), "periodic strategy needs a non-empty cycle");
    PeriodicStrategy { prefix, cycle, position: 0 }
}

impl PeriodicStrategy {
    fn current(&self) -> Action {
        if self.position < self.prefix.len() {
            self.prefix[self.position]
        } else {
            self.cycle[(self.position - self.prefix.len()) % self.cycle.len()]
        }
    }
}

impl Strategy for PeriodicStrategy {
    fn start(&mut self, _initial: Signal) -> Action {
        self.position = 0;
        self.current()
    }

    fn next(&mut self, _signal: Signal, _own_action: Action) -> Action {
        self.position += 1;
        if self.position >= self.prefix.len() + self.cycle.len() {
            self.position = self.prefix.len() + (self.position - self.prefix.len()) % self.cycle.len();
        }
        self.current()
    }

    fn is_finite_state(&self) -> bool {
        true
    }

    fn summary(&self) -> Option<Vec<u32>> {
        Some(vec![self.position as u32])
    }

    fn memory_start(&self) -> u32 {
        u32::MAX
    }

    fn describe(&self) -> String {
        let join = |v: &[Action]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        format!("periodic({};{})", join(&self.prefix), join(&self.cycle))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn take(s: &mut dyn Strategy, n: usize) -> Vec<Action> {
        let mut out = vec![s.start(Signal::Opaque("*"))];
        while out.len() < n {
            let last = *out.last().unwrap();
            out.push(s.next(Signal::Opaque("*"), last));
        }
        out
    }

    #[test]
    fn periodic_sequences() {
        assert_eq!(take(&mut periodic_strategy(vec![], vec![1, 1, 3]), 9), vec![1, 1, 3, 1, 1, 3, 1, 1, 3]);
        assert_eq!(take(&mut periodic_strategy(vec![2], vec![4]), 5), vec![2, 4, 4, 4, 4]);
        assert_eq!(
            take(&mut periodic_strategy(vec![], vec![6]), 20),
            take(&mut constant_strategy(6), 20)
        );
    }

    #[test]
    fn constant_emits_forever() {
        assert_eq!(take(&mut constant_strategy(5), 4), vec![5, 5, 5, 5]);
    }

    #[test]
    fn restart_resets_position() {
        let mut p = periodic_strategy(vec![7], vec![1, 2]);
        take(&mut p, 6);
        assert_eq!(take(&mut p, 4), vec![7, 1, 2, 1]);
    }
}
