use thiserror::Error;

use crate::board::{Edge, Player};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("invalid board: K_{0} (need 3 <= n <= 128)")]
    InvalidBoard(usize),
    #[error("invalid bias: {0}")]
    InvalidBias(String),
    #[error("invalid edge ({u},{v}) on K_{n}")]
    InvalidEdge { u: usize, v: usize, n: usize },
    #[error("wrong turn: {expected} to move, {got} tried to play")]
    WrongTurn { expected: Player, got: Player },
    #[error("illegal structure: {0}")]
    IllegalStructure(String),
    #[error("edge {0} already claimed")]
    EdgeAlreadyClaimed(Edge),
    #[error("exact search refused: n = {n} exceeds the cap of {cap}")]
    ExceedsExactCap { n: usize, cap: usize },
}

impl GameError {
    /// Short machine-readable reason, used by the play service.
    pub fn reason(&self) -> &'static str {
        match self {
            GameError::InvalidBoard(_) => "invalid-board",
            GameError::InvalidBias(_) => "invalid-bias",
            GameError::InvalidEdge { .. } => "invalid-edge",
            GameError::WrongTurn { .. } => "wrong-turn",
            GameError::IllegalStructure(_) => "wrong-structure",
            GameError::EdgeAlreadyClaimed(_) => "claimed-edge",
            GameError::ExceedsExactCap { .. } => "exceeds-exact-cap",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("exact search refused: n = {n} exceeds the cap of {cap}")]
    ExceedsExactCap { n: usize, cap: usize },
    #[error("search budget exceeded: {needed} subsets > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("invalid order {0}: {1}")]
    InvalidOrder(usize, &'static str),
}

impl From<GraphError> for GameError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::ExceedsExactCap { n, cap } => GameError::ExceedsExactCap { n, cap },
            other => GameError::IllegalStructure(other.to_string()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("illegal replay at move {index}: {source}")]
    IllegalReplay { index: usize, source: GameError },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuxError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("strategy `{id}` plays {actual}, not {wanted}")]
    WrongRole { id: String, wanted: Player, actual: Player },
    #[error("strategy `{id}` does not support this game: {reason}")]
    Incompatible { id: String, reason: String },
}
