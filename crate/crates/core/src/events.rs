//! Engine events. Every event is safe to show to both players: card names
//! only appear when the cards move between public zones.

use serde::{Deserialize, Serialize};

use crate::effect::Condition;
use crate::state::{PlayerId, WinReason};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    FirstPlayer {
        player: PlayerId,
    },
    Mulligan {
        player: PlayerId,
    },
    BonusDraw {
        player: PlayerId,
        count: u32,
    },
    PrizesSet {
        player: PlayerId,
        count: u32,
    },
    SetupRevealed,
    TurnStart {
        player: PlayerId,
        turn: u32,
    },
    Draw {
        player: PlayerId,
        count: u32,
    },
    Shuffle {
        player: PlayerId,
    },
    CoinFlip {
        player: PlayerId,
        heads: bool,
    },
    Damage {
        player: PlayerId,
        field_index: u32,
        name: String,
        amount: u32,
    },
    Heal {
        player: PlayerId,
        field_index: u32,
        name: String,
        amount: u32,
    },
    KnockOut {
        player: PlayerId,
        field_index: u32,
        name: String,
    },
    PrizesTaken {
        player: PlayerId,
        count: u32,
    },
    ConditionApplied {
        player: PlayerId,
        field_index: u32,
        condition: Condition,
    },
    ConditionRemoved {
        player: PlayerId,
        field_index: u32,
        condition: Condition,
    },
    CardsMoved {
        player: PlayerId,
        from: String,
        to: String,
        count: u32,
        /// Names, only when both zones are public.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cards: Option<Vec<String>>,
    },
    EnergyAttached {
        player: PlayerId,
        field_index: u32,
        energy: String,
    },
    PokemonPlaced {
        player: PlayerId,
        field_index: u32,
        name: String,
    },
    Switched {
        player: PlayerId,
        field_index: u32,
        name: String,
    },
    Evolved {
        player: PlayerId,
        field_index: u32,
        from: String,
        to: String,
    },
    GameOver {
        winner: Option<PlayerId>,
        reason: WinReason,
    },
}

impl Event {
    pub fn summary(&self) -> String {
        match self {
            Event::FirstPlayer { player } => format!("player {player} goes first"),
            Event::Mulligan { player } => format!("player {player} took a mulligan"),
            Event::BonusDraw { player, count } => {
                format!("player {player} drew {count} bonus card(s)")
            }
            Event::PrizesSet { player, count } => format!("player {player} set {count} prizes"),
            Event::SetupRevealed => "setup complete; Pokemon revealed".into(),
            Event::TurnStart { player, turn } => format!("turn {turn}: player {player}"),
            Event::Draw { player, count } => format!("player {player} drew {count} card(s)"),
            Event::Shuffle { player } => format!("player {player} shuffled their deck"),
            Event::CoinFlip { player, heads } => format!(
                "player {player} flipped {}",
                if *heads { "heads" } else { "tails" }
            ),
            Event::Damage {
                player,
                field_index,
                name,
                amount,
            } => format!("{name} #{field_index} (player {player}) took {amount} damage"),
            Event::Heal {
                player,
                field_index,
                name,
                amount,
            } => format!("{name} #{field_index} (player {player}) healed {amount}"),
            Event::KnockOut {
                player,
                field_index,
                name,
            } => format!("{name} #{field_index} (player {player}) was Knocked Out"),
            Event::PrizesTaken { player, count } => {
                format!("player {player} took {count} prize card(s)")
            }
            Event::ConditionApplied {
                player,
                field_index,
                condition,
            } => format!(
                "#{field_index} (player {player}) is now {}",
                condition.as_str()
            ),
            Event::ConditionRemoved {
                player,
                field_index,
                condition,
            } => format!(
                "#{field_index} (player {player}) is no longer {}",
                condition.as_str()
            ),
            Event::CardsMoved {
                player,
                from,
                to,
                count,
                cards,
            } => match cards {
                Some(names) => format!(
                    "player {player} moved {} from {from} to {to}",
                    names.join(", ")
                ),
                None => format!("player {player} moved {count} card(s) from {from} to {to}"),
            },
            Event::EnergyAttached {
                player,
                field_index,
                energy,
            } => format!("player {player} attached {energy} to #{field_index}"),
            Event::PokemonPlaced {
                player,
                field_index,
                name,
            } => format!("player {player} put {name} #{field_index} into play"),
            Event::Switched {
                player,
                field_index,
                name,
            } => format!("player {player} switched {name} #{field_index} into the Active spot"),
            Event::Evolved {
                player,
                field_index,
                from,
                to,
            } => format!("player {player} evolved {from} #{field_index} into {to}"),
            Event::GameOver { winner, reason } => match winner {
                Some(w) => format!("player {w} wins ({reason:?})"),
                None => format!("draw ({reason:?})"),
            },
        }
    }
}
