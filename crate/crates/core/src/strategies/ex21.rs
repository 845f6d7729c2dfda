//! Alternation machine for the two-state coordination game.
//!
//! Starts with `a`. While the own payoff history reads `1,5,1,5,...` it
//! answers a trailing 1 with `b` and a trailing 5 with `a`; while it reads
//! `5,1,5,1,...` it answers a trailing 1 with `a` and a trailing 5 with `b`.
//! Anything else breaks the machine, which then plays `n` forever.

use crate::repeated::{Signal, Strategy};
use crate::stage::{Action, Payoff, ACTION_A, ACTION_B, ACTION_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ex21Machine {
    Start,
    OneFiveLastOne,
    OneFiveLastFive,
    FiveOneLastOne,
    FiveOneLastFive,
    Broken,
}

impl Ex21Machine {
    pub fn action(self) -> Action {
        match self {
            Ex21Machine::Start => ACTION_A,
            Ex21Machine::OneFiveLastOne => ACTION_B,
            Ex21Machine::OneFiveLastFive => ACTION_A,
            Ex21Machine::FiveOneLastOne => ACTION_A,
            Ex21Machine::FiveOneLastFive => ACTION_B,
            Ex21Machine::Broken => ACTION_N,
        }
    }

    pub fn observe(self, payoff: Option<Payoff>) -> Self {
        use Ex21Machine::*;
        let one = Payoff::from_integer(1);
        let five = Payoff::from_integer(5);
        match (self, payoff) {
            (Start, Some(p)) if p == one => OneFiveLastOne,
            (Start, Some(p)) if p == five => FiveOneLastFive,
            (OneFiveLastOne, Some(p)) if p == five => OneFiveLastFive,
            (OneFiveLastFive, Some(p)) if p == one => OneFiveLastOne,
            (FiveOneLastFive, Some(p)) if p == one => FiveOneLastOne,
            (FiveOneLastOne, Some(p)) if p == five => FiveOneLastFive,
            _ => Broken,
        }
    }

    fn code(self) -> u32 {
        self as u32
    }
}

#[derive(Debug, Clone)]
pub struct Ex21Strategy {
    state: Ex21Machine,
}

pub fn ex21_strategy() -> Ex21Strategy {
    Ex21Strategy { state: Ex21Machine::Start }
}

impl Ex21Strategy {
    pub fn machine(&self) -> Ex21Machine {
        self.state
    }
}

impl Strategy for Ex21Strategy {
    fn start(&mut self, _initial: Signal) -> Action {
        self.state = Ex21Machine::Start;
        self.state.action()
    }

    fn next(&mut self, signal: Signal, _own_action: Action) -> Action {
        let payoff = match signal {
            Signal::Payoff(p) => Some(p),
            _ => None,
        };
        self.state = self.state.observe(payoff);
        self.state.action()
    }

    fn is_finite_state(&self) -> bool {
        true
    }

    fn summary(&self) -> Option<Vec<u32>> {
        Some(vec![self.state.code()])
    }

    fn describe(&self) -> String {
        "ex21".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(payoffs: &[i64]) -> Vec<Action> {
        let mut s = ex21_strategy();
        let mut out = vec![s.start(Signal::Opaque("*"))];
        for &p in payoffs {
            let last = *out.last().unwrap();
            out.push(s.next(Signal::Payoff(Payoff::from_integer(p)), last));
        }
        out
    }

    #[test]
    fn follows_both_patterns() {
        assert_eq!(feed(&[1, 5, 1, 5]), vec![ACTION_A, ACTION_B, ACTION_A, ACTION_B, ACTION_A]);
        assert_eq!(feed(&[5, 1, 5, 1]), vec![ACTION_A, ACTION_B, ACTION_A, ACTION_B, ACTION_A]);
    }

    #[test]
    fn off_pattern_breaks_forever() {
        assert_eq!(feed(&[1, 1, 5, 1]), vec![ACTION_A, ACTION_B, ACTION_N, ACTION_N, ACTION_N]);
        assert_eq!(feed(&[0, 1, 5]), vec![ACTION_A, ACTION_N, ACTION_N, ACTION_N]);
        assert_eq!(feed(&[6]), vec![ACTION_A, ACTION_N]);
    }
}
