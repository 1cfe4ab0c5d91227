use thiserror::Error;

use crate::games::GameId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("illegal action `{action}` for {game}")]
    IllegalAction { game: GameId, action: String },

    #[error("{0} state is terminal")]
    TerminalState(GameId),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("corrupt batch: {0}")]
    Corrupt(String),

    #[error("non-finite gradient at step {step}")]
    NonFiniteGradient { step: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
