//! Tool-call actions.
//!
//! Agents speak [`ActionRequest`]s: a tool name plus a JSON argument map.
//! The engine parses a request into a typed [`Action`] for the acting player
//! and checks it against the typed legal set. Hand cards are referred to by
//! name (copies are interchangeable); Pokemon in play by name plus field
//! index; prompt candidates by their labels.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::card::CardIdx;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRequest {
    pub tool: String,
    #[serde(default)]
    pub arguments: Map<String, Value>,
}

impl ActionRequest {
    pub fn new(tool: &str) -> Self {
        ActionRequest {
            tool: tool.to_string(),
            arguments: Map::new(),
        }
    }

    pub fn arg(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.arguments.insert(key.to_string(), value.into());
        self
    }

    pub fn pass_turn() -> Self {
        ActionRequest::new(tools::PASS_TURN)
    }
}

pub mod tools {
    pub const ATTACK: &str = "attack";
    pub const PLAY_POKEMON: &str = "play_pokemon";
    pub const EVOLVE_POKEMON: &str = "evolve_pokemon";
    pub const ATTACH_ENERGY: &str = "attach_energy";
    pub const USE_SUPPORTER: &str = "use_supporter";
    pub const USE_ITEM: &str = "use_item";
    pub const USE_TOOL: &str = "use_tool";
    pub const PUT_STADIUM: &str = "put_stadium";
    pub const DISCARD_STADIUM: &str = "discard_stadium";
    pub const USE_STADIUM: &str = "use_stadium";
    pub const USE_ABILITY: &str = "use_ability";
    pub const RETREAT: &str = "retreat";
    pub const CHOOSE_CARD: &str = "choose_card";
    pub const PASS_TURN: &str = "pass_turn";

    pub const QUERY_CARD: &str = "query_card";
    pub const QUERY_DISCARD: &str = "query_discard";
    pub const ACTIVATE_SKILL: &str = "activate_skill";

    pub const GAME_ACTIONS: [&str; 14] = [
        ATTACK,
        PLAY_POKEMON,
        EVOLVE_POKEMON,
        ATTACH_ENERGY,
        USE_SUPPORTER,
        USE_ITEM,
        USE_TOOL,
        PUT_STADIUM,
        DISCARD_STADIUM,
        USE_STADIUM,
        USE_ABILITY,
        RETREAT,
        CHOOSE_CARD,
        PASS_TURN,
    ];

    pub const QUERIES: [&str; 3] = [QUERY_CARD, QUERY_DISCARD, ACTIVATE_SKILL];

    /// (required, optional) argument names per game-action tool.
    pub fn schema(tool: &str) -> Option<(&'static [&'static str], &'static [&'static str])> {
        Some(match tool {
            ATTACK => (&["source_card", "attack_name"], &["source_index"]),
            PLAY_POKEMON => (&["source_card", "position"], &[]),
            EVOLVE_POKEMON | ATTACH_ENERGY | USE_TOOL => {
                (&["source_card", "target_card"], &["target_index"])
            }
            USE_SUPPORTER | USE_ITEM | PUT_STADIUM | DISCARD_STADIUM | USE_STADIUM => {
                (&["source_card"], &[])
            }
            USE_ABILITY => (&["source_card"], &["source_index", "ability_name"]),
            RETREAT => (&["source_card"], &["source_index"]),
            CHOOSE_CARD => (&["chosen_cards"], &[]),
            PASS_TURN => (&[], &[]),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Active,
    Bench,
}

impl Position {
    pub fn as_str(self) -> &'static str {
        match self {
            Position::Active => "active",
            Position::Bench => "bench",
        }
    }
}

/// A parsed action. Targets in play are field indices of the actor's
/// Pokemon.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    Attack { attack: u8 },
    PlayPokemon { card: CardIdx, position: Position },
    Evolve { card: CardIdx, target: u32 },
    AttachEnergy { card: CardIdx, target: u32 },
    UseSupporter { card: CardIdx },
    UseItem { card: CardIdx },
    UseTool { card: CardIdx, target: u32 },
    PutStadium { card: CardIdx },
    DiscardStadium,
    UseStadium,
    UseAbility { source: u32 },
    Retreat,
    /// Count picked from each prompt candidate, in candidate order.
    Choose { picks: Vec<u8> },
    PassTurn,
}

impl Action {
    pub fn tool(&self) -> &'static str {
        match self {
            Action::Attack { .. } => tools::ATTACK,
            Action::PlayPokemon { .. } => tools::PLAY_POKEMON,
            Action::Evolve { .. } => tools::EVOLVE_POKEMON,
            Action::AttachEnergy { .. } => tools::ATTACH_ENERGY,
            Action::UseSupporter { .. } => tools::USE_SUPPORTER,
            Action::UseItem { .. } => tools::USE_ITEM,
            Action::UseTool { .. } => tools::USE_TOOL,
            Action::PutStadium { .. } => tools::PUT_STADIUM,
            Action::DiscardStadium => tools::DISCARD_STADIUM,
            Action::UseStadium => tools::USE_STADIUM,
            Action::UseAbility { .. } => tools::USE_ABILITY,
            Action::Retreat => tools::RETREAT,
            Action::Choose { .. } => tools::CHOOSE_CARD,
            Action::PassTurn => tools::PASS_TURN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectKind {
    /// The game is over.
    Finished,
    UnknownTool,
    /// Missing, extra or mistyped argument.
    BadArguments,
    /// A card, Pokemon or label the actor cannot see.
    UnknownCard,
    /// A named rule forbids the action.
    RuleViolation,
    /// Well-formed, but not a member of the legal set.
    NotLegal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{kind:?}: {message}")]
pub struct Rejection {
    pub kind: RejectKind,
    pub message: String,
}

impl Rejection {
    pub fn new(kind: RejectKind, message: impl Into<String>) -> Self {
        Rejection {
            kind,
            message: message.into(),
        }
    }
}
