//! Turn-level multi-agent self-play for two-player text games.
//!
//! The crate is organised the way a training run flows:
//!
//! * [`games`] holds the six rule engines and their text action grammar,
//! * [`rewards`] shapes per-turn training rewards,
//! * [`rollout`] plays self-play episodes and assembles groups,
//! * [`advantage`] turns group rewards into per-turn advantages,
//! * [`optimize`] owns the tabular policy, the clipped surrogate and the update,
//! * [`opponents`] provides MCTS, Kuhn equilibria, CFR and exploitability,
//! * [`harness`] wires everything into configurable runs.

pub mod advantage;
pub mod error;
pub mod games;
pub mod harness;
pub mod opponents;
pub mod optimize;
pub mod rewards;
pub mod rollout;

pub use error::{Error, Result};
pub use games::{Action, GameId, GameState, PlayerId, TerminalReason, TurnOutcome};
