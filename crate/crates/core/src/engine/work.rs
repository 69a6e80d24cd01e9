//! The engine's continuation model.
//!
//! Everything that happens after an action is accepted runs as a [`Task`]
//! on a LIFO work stack stored in the state. A task that needs a player
//! decision returns a prompt and its own resumable copy; the driver parks
//! both in [`Pending`] until `choose_card` supplies the picks. Because the
//! stack lives in [`crate::state::GameState`], a suspended state serializes
//! and resumes like any other.

use serde::{Deserialize, Serialize};

use crate::effect::EffectOp;
use crate::state::{CandidateRef, CardUid, ChoicePrompt, PlayerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// A Trainer card (Item, Supporter, Stadium).
    Card(CardUid),
    /// A Pokemon in play, by its controller's field index.
    Pokemon(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EffectCtx {
    pub frame: u32,
    pub controller: PlayerId,
    pub source: Source,
    /// Cards picked by the last `require_choice` or `discard`.
    pub stash: Vec<CardUid>,
    /// Set while a Tool's program runs.
    pub tool: Option<CardUid>,
    pub is_attack: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Task {
    Program {
        ops: Vec<EffectOp>,
        pc: u32,
        /// Sub-step inside a multi-prompt op.
        stage: u8,
        /// Picks carried between stages of one op.
        scratch: Vec<CandidateRef>,
        ctx: EffectCtx,
    },
    AttackDamage,
    ResolveKnockouts,
    TakePrizes { player: PlayerId, count: u32 },
    Promote { player: PlayerId },
    CheckWin,
    Retreat { player: PlayerId, stage: u8 },
    EndTurn,
    StartTurn { player: PlayerId },
}

/// A prompt waiting for `choose_card`, plus the task that resumes with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pending {
    pub prompt: ChoicePrompt,
    pub task: Task,
}

pub(crate) enum Step {
    Done,
    Ask(ChoicePrompt, Task),
}
