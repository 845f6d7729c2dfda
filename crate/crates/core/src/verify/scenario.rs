use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::failures::{apply_failures, FailureSchedule};
use crate::repeated::{run, run_rejoining, AuctionMonitor, Monitor, PayoffMonitor, PlayTrace};
use crate::stage::{Action, Auction, MatrixGame, MatrixState, StageGame, ValuationState};
use crate::strategies::{ActionStyle, StrategySpec};

/// One state of a game with incomplete information.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameState {
    Auction(ValuationState),
    Matrix(MatrixState),
}

impl GameState {
    pub fn players(&self) -> usize {
        match self {
            GameState::Auction(v) => v.players(),
            GameState::Matrix(_) => 2,
        }
    }

    pub fn actions(&self) -> Vec<Action> {
        match self {
            GameState::Auction(v) => (1..=v.max_value()).collect(),
            GameState::Matrix(_) => vec![0, 1, 2],
        }
    }

    pub fn style(&self) -> ActionStyle {
        match self {
            GameState::Auction(_) => ActionStyle::Numeric,
            GameState::Matrix(_) => ActionStyle::Matrix,
        }
    }

    pub fn is_auction(&self) -> bool {
        matches!(self, GameState::Auction(_))
    }

    pub fn game(&self) -> Box<dyn StageGame> {
        match self {
            GameState::Auction(v) => Box::new(Auction::new(v.clone())),
            GameState::Matrix(s) => Box::new(MatrixGame::new(*s)),
        }
    }

    /// The true monitoring devices of this state.
    pub fn monitor(&self) -> Box<dyn Monitor> {
        match self {
            GameState::Auction(v) => Box::new(AuctionMonitor::new(v.clone())),
            GameState::Matrix(s) => Box::new(PayoffMonitor::new(*s)),
        }
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameState::Auction(v) => write!(f, "{v}"),
            GameState::Matrix(s) => write!(f, "{s}"),
        }
    }
}

/// A runnable configuration: state, possibly faulty monitoring, one
/// strategy per player, and a horizon.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub state: GameState,
    pub schedule: FailureSchedule,
    pub strategies: Vec<StrategySpec>,
    pub horizon: u32,
}

impl Scenario {
    pub fn new(state: GameState, strategies: Vec<StrategySpec>, horizon: u32) -> Result<Self> {
        if strategies.len() != state.players() {
            return Err(Error::DimensionMismatch { expected: state.players(), actual: strategies.len() });
        }
        if horizon == 0 {
            return Err(Error::InvalidHorizon(0));
        }
        Ok(Scenario { state, schedule: FailureSchedule::identity(), strategies, horizon })
    }

    pub fn with_schedule(mut self, schedule: FailureSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn run(&self) -> Result<PlayTrace> {
        let game = self.state.game();
        let base = self.state.monitor();
        let strategies = self.strategies.iter().map(StrategySpec::build).collect();
        if self.schedule.is_identity() {
            run(game.as_ref(), base.as_ref(), strategies, self.horizon)
        } else {
            let faulty = apply_failures(base.as_ref(), &self.schedule)?;
            run(game.as_ref(), &faulty, strategies, self.horizon)
        }
    }

    /// Same result as [`Scenario::run`]; once play under the schedule merges
    /// with `identity`, the run of this scenario without failures, the rest
    /// is copied from it.
    pub fn run_rejoining(&self, identity: &PlayTrace) -> Result<PlayTrace> {
        let game = self.state.game();
        let base = self.state.monitor();
        let strategies = self.strategies.iter().map(StrategySpec::build).collect();
        let faulty = apply_failures(base.as_ref(), &self.schedule)?;
        run_rejoining(game.as_ref(), &faulty, strategies, self.horizon, identity)
    }

    /// The same scenario with `player` switched to `deviation`.
    pub fn deviate(&self, player: usize, deviation: &StrategySpec) -> Scenario {
        let mut s = self.clone();
        s.strategies[player] = deviation.clone();
        s
    }
}
