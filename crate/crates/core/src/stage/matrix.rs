//! The two-state 3x3 coordination game used to show that a learning
//! equilibrium need not survive a shared opening mistake.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Action, Payoff, StageGame};
use crate::error::{Error, Result};

pub const ACTION_A: Action = 0;
pub const ACTION_B: Action = 1;
pub const ACTION_N: Action = 2;

const LABELS: [&str; 3] = ["a", "b", "n"];

pub fn parse_matrix_action(label: &str) -> Result<Action> {
    match label.trim() {
        "a" => Ok(ACTION_A),
        "b" => Ok(ACTION_B),
        "n" => Ok(ACTION_N),
        other => Err(Error::UnknownAction(other.to_string())),
    }
}

pub fn matrix_action_label(action: Action) -> &'static str {
    LABELS.get(action as usize).copied().unwrap_or("?")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatrixState {
    A,
    B,
}

impl MatrixState {
    pub fn label(self) -> &'static str {
        match self {
            MatrixState::A => "A",
            MatrixState::B => "B",
        }
    }
}

impl fmt::Display for MatrixState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MatrixState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" => Ok(MatrixState::A),
            "B" => Ok(MatrixState::B),
            other => Err(Error::InvalidState(format!("unknown matrix state `{other}`"))),
        }
    }
}

/// Payoff table of one state: `table[row][col] = (row payoff, column payoff)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGameSpec {
    pub state: MatrixState,
    pub table: [[(i64, i64); 3]; 3],
}

impl MatrixGameSpec {
    pub fn for_state(state: MatrixState) -> Self {
        let table = match state {
            MatrixState::A => [[(1, 1), (6, 0), (0, 0)], [(0, 6), (5, 5), (1, 0)], [(0, 0); 3]],
            MatrixState::B => [[(5, 5), (0, 6), (0, 0)], [(6, 0), (1, 1), (0, 0)], [(0, 0); 3]],
        };
        MatrixGameSpec { state, table }
    }

    fn lookup(&self, row: Action, col: Action) -> (i64, i64) {
        self.table[row as usize][col as usize]
    }
}

pub fn matrix_stage_payoffs(spec: &MatrixGameSpec, actions: (&str, &str)) -> Result<(i64, i64)> {
    let row = parse_matrix_action(actions.0)?;
    let col = parse_matrix_action(actions.1)?;
    Ok(spec.lookup(row, col))
}

#[derive(Debug, Clone)]
pub struct MatrixGame {
    spec: MatrixGameSpec,
}

const ALPHABET: [Action; 3] = [ACTION_A, ACTION_B, ACTION_N];

impl MatrixGame {
    pub fn new(state: MatrixState) -> Self {
        MatrixGame { spec: MatrixGameSpec::for_state(state) }
    }

    pub fn spec(&self) -> &MatrixGameSpec {
        &self.spec
    }
}

impl StageGame for MatrixGame {
    fn players(&self) -> usize {
        2
    }

    fn actions(&self, _player: usize) -> &[Action] {
        &ALPHABET
    }

    fn payoffs_into(&self, profile: &[Action], out: &mut [Payoff]) {
        let (r, c) = self.spec.lookup(profile[0], profile[1]);
        out[0] = Payoff::from_integer(r);
        out[1] = Payoff::from_integer(c);
    }

    fn action_label(&self, action: Action) -> String {
        matrix_action_label(action).to_string()
    }
}
