//! Declarative card definitions.
//!
//! A [`CardDef`] is immutable data loaded from a card-pool file. Games refer
//! to definitions through [`CardIdx`] handles into a [`crate::pool::CardPool`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::effect::EffectProgram;

/// Index of a definition inside a card pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CardIdx(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyType {
    Grass,
    Fire,
    Water,
    Lightning,
    Psychic,
    Fighting,
    Darkness,
    Metal,
    Colorless,
}

impl EnergyType {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyType::Grass => "grass",
            EnergyType::Fire => "fire",
            EnergyType::Water => "water",
            EnergyType::Lightning => "lightning",
            EnergyType::Psychic => "psychic",
            EnergyType::Fighting => "fighting",
            EnergyType::Darkness => "darkness",
            EnergyType::Metal => "metal",
            EnergyType::Colorless => "colorless",
        }
    }
}

impl fmt::Display for EnergyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardKind {
    Pokemon,
    Energy,
    Trainer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subkind {
    Basic,
    Stage1,
    Stage2,
    BasicEnergy,
    SpecialEnergy,
    Item,
    Supporter,
    Tool,
    Stadium,
}

impl Subkind {
    pub fn kind(self) -> CardKind {
        match self {
            Subkind::Basic | Subkind::Stage1 | Subkind::Stage2 => CardKind::Pokemon,
            Subkind::BasicEnergy | Subkind::SpecialEnergy => CardKind::Energy,
            Subkind::Item | Subkind::Supporter | Subkind::Tool | Subkind::Stadium => {
                CardKind::Trainer
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Subkind::Basic => "basic",
            Subkind::Stage1 => "stage1",
            Subkind::Stage2 => "stage2",
            Subkind::BasicEnergy => "basic_energy",
            Subkind::SpecialEnergy => "special_energy",
            Subkind::Item => "item",
            Subkind::Supporter => "supporter",
            Subkind::Tool => "tool",
            Subkind::Stadium => "stadium",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackDef {
    pub name: String,
    /// Energy cost; `Colorless` entries accept any energy unit.
    #[serde(default)]
    pub cost: Vec<EnergyType>,
    #[serde(default)]
    pub base_damage: u32,
    #[serde(default)]
    pub effect: Option<EffectProgram>,
    #[serde(default)]
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbilityDef {
    pub name: String,
    pub effect: EffectProgram,
    #[serde(default = "default_true")]
    pub once_per_turn: bool,
    /// Only usable while the Pokemon is in the Active spot.
    #[serde(default)]
    pub active_only: bool,
    #[serde(default)]
    pub text: String,
}

fn default_true() -> bool {
    true
}

fn default_prize_value() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardDef {
    pub card_id: String,
    pub name: String,
    pub kind: CardKind,
    pub subkind: Subkind,
    #[serde(default)]
    pub evolves_from: Option<String>,
    #[serde(default)]
    pub hp: u32,
    /// Pokemon type(s); for Energy cards, one entry per energy unit provided.
    #[serde(default)]
    pub types: Vec<EnergyType>,
    #[serde(default)]
    pub weakness: Option<EnergyType>,
    #[serde(default)]
    pub resistance: Option<EnergyType>,
    #[serde(default)]
    pub retreat_cost: u32,
    #[serde(default)]
    pub attacks: Vec<AttackDef>,
    #[serde(default)]
    pub ability: Option<AbilityDef>,
    /// Trainer effect: Item/Supporter on play, Tool on attach, Stadium on use.
    #[serde(default)]
    pub effect: Option<EffectProgram>,
    /// Prize cards the opponent takes when this Pokemon is Knocked Out.
    #[serde(default = "default_prize_value")]
    pub prize_value: u32,
    /// Stadium only: its owner may discard it from play during their turn.
    #[serde(default)]
    pub stadium_discardable: bool,
    #[serde(default)]
    pub rules_text: String,
}

impl CardDef {
    pub fn is_pokemon(&self) -> bool {
        self.kind == CardKind::Pokemon
    }

    pub fn is_basic_pokemon(&self) -> bool {
        self.subkind == Subkind::Basic
    }

    pub fn is_energy(&self) -> bool {
        self.kind == CardKind::Energy
    }

    /// Energy units this card provides when attached.
    pub fn energy_units(&self) -> u32 {
        if self.is_energy() {
            self.types.len() as u32
        } else {
            0
        }
    }

    pub fn attack(&self, name: &str) -> Option<(usize, &AttackDef)> {
        self.attacks.iter().enumerate().find(|(_, a)| a.name == name)
    }
}

/// True when the attached energy units cover `cost`.
///
/// Typed slots are matched first; `Colorless` slots take any leftover unit.
pub fn cost_satisfied(cost: &[EnergyType], provided: &[EnergyType]) -> bool {
    let mut pool: Vec<EnergyType> = provided.to_vec();
    let mut colorless = 0usize;
    for &slot in cost {
        if slot == EnergyType::Colorless {
            colorless += 1;
            continue;
        }
        match pool.iter().position(|&e| e == slot) {
            Some(i) => {
                pool.swap_remove(i);
            }
            None => return false,
        }
    }
    pool.len() >= colorless
}
