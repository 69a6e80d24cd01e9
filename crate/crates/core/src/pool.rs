//! Card-pool and decklist files.
//!
//! Both are TOML documents carrying a `pool_version` header. The pool holds
//! `[[cards]]` entries deserialized into [`CardDef`]; the decklist file holds
//! `[[decks]]` entries deserialized into [`DeckList`]. See `docs/formats.md`
//! for the full schema.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::card::{CardDef, CardIdx, CardKind, Subkind};
use crate::effect::{validate_program, ProgramContext};

/// Pool format understood by this build.
pub const POOL_FORMAT_VERSION: &str = "1";

/// The shipped desk-scale pool and decks.
pub const DEFAULT_POOL_TOML: &str = include_str!("../data/pool.toml");
pub const DEFAULT_DECKS_TOML: &str = include_str!("../data/decks.toml");

pub const DECK_SIZE: usize = 60;
pub const MAX_COPIES: u32 = 4;

#[derive(Debug, Error, PartialEq)]
pub enum PoolError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported pool_version {found:?} (expected {expected:?})")]
    Version { found: String, expected: String },
    #[error("card {card_id}: {rule}")]
    Semantic { card_id: String, rule: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum DeckError {
    #[error("deck {deck_id}: unknown card_id {card_id}")]
    UnknownCard { deck_id: String, card_id: String },
    #[error("deck {deck_id}: {name} appears {count} times (limit {MAX_COPIES})")]
    CountViolation {
        deck_id: String,
        name: String,
        count: u32,
    },
    #[error("deck {deck_id}: total {total} != {DECK_SIZE}")]
    Total { deck_id: String, total: u32 },
    #[error("deck {deck_id}: no Basic Pokemon")]
    NoBasic { deck_id: String },
    #[error("deck {deck_id} not found")]
    NotFound { deck_id: String },
    #[error("decklist file: {0}")]
    File(#[from] PoolError),
    #[error("deck file pool_version {found:?} does not match pool {pool:?}")]
    PoolMismatch { found: String, pool: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoolFile {
    pool_version: String,
    #[serde(default)]
    cards: Vec<CardDef>,
}

#[derive(Debug, Clone)]
pub struct CardPool {
    pool_version: String,
    cards: Vec<CardDef>,
    by_id: HashMap<String, CardIdx>,
    by_name: HashMap<String, CardIdx>,
}

impl CardPool {
    pub fn pool_version(&self) -> &str {
        &self.pool_version
    }

    pub fn cards(&self) -> &[CardDef] {
        &self.cards
    }

    pub fn len(&self) -> usize {
        self.cards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cards.is_empty()
    }

    pub fn get(&self, idx: CardIdx) -> &CardDef {
        &self.cards[idx.0 as usize]
    }

    pub fn by_id(&self, card_id: &str) -> Option<CardIdx> {
        self.by_id.get(card_id).copied()
    }

    pub fn by_name(&self, name: &str) -> Option<CardIdx> {
        self.by_name.get(name).copied()
    }

    /// Looks a card up by card_id first, then by display name.
    pub fn lookup(&self, key: &str) -> Option<CardIdx> {
        self.by_id(key).or_else(|| self.by_name(key))
    }

    /// The shipped desk pool.
    pub fn builtin() -> CardPool {
        parse_card_pool(DEFAULT_POOL_TOML).expect("shipped pool is valid")
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn syntax_error(src: &str, err: toml::de::Error) -> PoolError {
    let (line, column) = err.span().map_or((0, 0), |s| line_col(src, s.start));
    PoolError::Syntax {
        line,
        column,
        message: err.message().to_string(),
    }
}

/// Parses and validates a card-pool document.
pub fn parse_card_pool(document: &str) -> Result<CardPool, PoolError> {
    let file: PoolFile = toml::from_str(document).map_err(|e| syntax_error(document, e))?;
    if file.pool_version != POOL_FORMAT_VERSION {
        return Err(PoolError::Version {
            found: file.pool_version,
            expected: POOL_FORMAT_VERSION.into(),
        });
    }
    let mut by_id = HashMap::new();
    let mut by_name = HashMap::new();
    for (i, card) in file.cards.iter().enumerate() {
        let semantic = |rule: String| PoolError::Semantic {
            card_id: card.card_id.clone(),
            rule,
        };
        if by_id.insert(card.card_id.clone(), CardIdx(i as u16)).is_some() {
            return Err(semantic("duplicate card_id".into()));
        }
        if by_name.insert(card.name.clone(), CardIdx(i as u16)).is_some() {
            return Err(semantic(format!("duplicate card name {:?}", card.name)));
        }
        validate_card(card).map_err(semantic)?;
    }
    for card in &file.cards {
        if let Some(base) = &card.evolves_from {
            let Some(&b) = by_name.get(base) else {
                return Err(PoolError::Semantic {
                    card_id: card.card_id.clone(),
                    rule: format!("evolves_from {base:?} is not in the pool"),
                });
            };
            let base_def = &file.cards[b.0 as usize];
            let ok = match card.subkind {
                Subkind::Stage1 => base_def.subkind == Subkind::Basic,
                Subkind::Stage2 => base_def.subkind == Subkind::Stage1,
                _ => false,
            };
            if !ok {
                return Err(PoolError::Semantic {
                    card_id: card.card_id.clone(),
                    rule: format!("cannot evolve from {base:?} ({})", base_def.subkind.as_str()),
                });
            }
        }
    }
    Ok(CardPool {
        pool_version: file.pool_version,
        cards: file.cards,
        by_id,
        by_name,
    })
}

fn validate_card(card: &CardDef) -> Result<(), String> {
    if card.card_id.is_empty() || card.name.is_empty() {
        return Err("card_id and name must be non-empty".into());
    }
    if card.name.contains('#') {
        return Err("name must not contain '#'".into());
    }
    if card.subkind.kind() != card.kind {
        return Err(format!(
            "subkind {} does not belong to kind {:?}",
            card.subkind.as_str(),
            card.kind
        ));
    }
    if card.prize_value == 0 {
        return Err("prize_value must be at least 1".into());
    }
    match card.kind {
        CardKind::Pokemon => {
            match card.subkind {
                Subkind::Basic if card.evolves_from.is_some() => {
                    return Err("Basic Pokemon cannot have evolves_from".into())
                }
                Subkind::Stage1 | Subkind::Stage2 if card.evolves_from.is_none() => {
                    return Err(format!("{} without evolves_from", card.subkind.as_str()))
                }
                _ => {}
            }
            if card.hp == 0 || !card.hp.is_multiple_of(10) {
                return Err(format!("hp {} must be a positive multiple of 10", card.hp));
            }
            if card.types.is_empty() {
                return Err("Pokemon needs at least one type".into());
            }
            if card.attacks.is_empty() && card.ability.is_none() {
                return Err("Pokemon needs an attack or an Ability".into());
            }
            if card.effect.is_some() {
                return Err("Pokemon cards carry effects on attacks or Abilities".into());
            }
            for (i, a) in card.attacks.iter().enumerate() {
                if card.attacks[..i].iter().any(|b| b.name == a.name) {
                    return Err(format!("duplicate attack name {:?}", a.name));
                }
                if a.base_damage % 10 != 0 {
                    return Err(format!("attack {:?}: damage not a multiple of 10", a.name));
                }
                if let Some(p) = &a.effect {
                    validate_program(p, ProgramContext::Attack)
                        .map_err(|e| format!("attack {:?}: {e}", a.name))?;
                }
            }
            if let Some(ab) = &card.ability {
                validate_program(&ab.effect, ProgramContext::Ability)
                    .map_err(|e| format!("ability {:?}: {e}", ab.name))?;
            }
        }
        CardKind::Energy => {
            if card.types.is_empty() {
                return Err("Energy must provide at least one unit".into());
            }
            if card.subkind == Subkind::BasicEnergy && card.types.len() != 1 {
                return Err("Basic Energy provides exactly one unit".into());
            }
            if !card.attacks.is_empty() || card.ability.is_some() || card.effect.is_some() {
                return Err("Energy cards carry no attacks or effects".into());
            }
        }
        CardKind::Trainer => {
            if !card.attacks.is_empty() || card.ability.is_some() {
                return Err("Trainer cards carry no attacks or Abilities".into());
            }
            let ctx = match card.subkind {
                Subkind::Item => ProgramContext::Item,
                Subkind::Supporter => ProgramContext::Supporter,
                Subkind::Tool => ProgramContext::Tool,
                _ => ProgramContext::Stadium,
            };
            match &card.effect {
                Some(p) => validate_program(p, ctx)?,
                None if matches!(card.subkind, Subkind::Item | Subkind::Supporter) => {
                    return Err("Item and Supporter cards need an effect".into())
                }
                None => {}
            }
            if card.stadium_discardable && card.subkind != Subkind::Stadium {
                return Err("stadium_discardable only applies to Stadiums".into());
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archetype {
    CharizardLike,
    GardevoirLike,
    MiraidonLike,
    GholdengoLike,
    LugiaLike,
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Archetype::CharizardLike => "charizard_like",
            Archetype::GardevoirLike => "gardevoir_like",
            Archetype::MiraidonLike => "miraidon_like",
            Archetype::GholdengoLike => "gholdengo_like",
            Archetype::LugiaLike => "lugia_like",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeckEntry {
    pub card: String,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeckList {
    pub deck_id: String,
    pub archetype: Archetype,
    #[serde(default)]
    pub plan: String,
    pub entries: Vec<DeckEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeckFile {
    pool_version: String,
    decks: Vec<DeckList>,
}

/// Parses a decklist file. Decks are validated later by [`load_deck`].
pub fn parse_decklists(document: &str) -> Result<(String, Vec<DeckList>), PoolError> {
    let file: DeckFile = toml::from_str(document).map_err(|e| syntax_error(document, e))?;
    Ok((file.pool_version, file.decks))
}

/// A validated 60-card deck in decklist order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deck {
    pub deck_id: String,
    pub archetype: Archetype,
    pub cards: Vec<CardIdx>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KindCounts {
    pub pokemon: u32,
    pub trainer: u32,
    pub energy: u32,
}

impl Deck {
    pub fn kind_counts(&self, pool: &CardPool) -> KindCounts {
        let mut k = KindCounts::default();
        for &c in &self.cards {
            match pool.get(c).kind {
                CardKind::Pokemon => k.pokemon += 1,
                CardKind::Trainer => k.trainer += 1,
                CardKind::Energy => k.energy += 1,
            }
        }
        k
    }
}

pub fn load_deck(decklist: &DeckList, pool: &CardPool) -> Result<Deck, DeckError> {
    let deck_id = || decklist.deck_id.clone();
    let mut per_name: HashMap<&str, u32> = HashMap::new();
    let mut cards = Vec::with_capacity(DECK_SIZE);
    let mut total = 0u32;
    for entry in &decklist.entries {
        let idx = pool.by_id(&entry.card).ok_or_else(|| DeckError::UnknownCard {
            deck_id: deck_id(),
            card_id: entry.card.clone(),
        })?;
        let def = pool.get(idx);
        total += entry.count;
        let n = per_name.entry(def.name.as_str()).or_default();
        *n += entry.count;
        if def.subkind != Subkind::BasicEnergy && *n > MAX_COPIES {
            return Err(DeckError::CountViolation {
                deck_id: deck_id(),
                name: def.name.clone(),
                count: *n,
            });
        }
        cards.extend(std::iter::repeat_n(idx, entry.count as usize));
    }
    if total as usize != DECK_SIZE {
        return Err(DeckError::Total {
            deck_id: deck_id(),
            total,
        });
    }
    if !cards.iter().any(|&c| pool.get(c).is_basic_pokemon()) {
        return Err(DeckError::NoBasic { deck_id: deck_id() });
    }
    Ok(Deck {
        deck_id: decklist.deck_id.clone(),
        archetype: decklist.archetype,
        cards,
    })
}

/// A pool plus its validated decks, keyed by deck_id.
#[derive(Debug, Clone)]
pub struct DeckLibrary {
    pub pool: CardPool,
    pub decks: Vec<Deck>,
}

impl DeckLibrary {
    pub fn load(pool_doc: &str, decks_doc: &str) -> Result<DeckLibrary, DeckError> {
        let pool = parse_card_pool(pool_doc)?;
        let (version, lists) = parse_decklists(decks_doc)?;
        if version != pool.pool_version() {
            return Err(DeckError::PoolMismatch {
                found: version,
                pool: pool.pool_version().into(),
            });
        }
        let decks = lists
            .iter()
            .map(|l| load_deck(l, &pool))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DeckLibrary { pool, decks })
    }

    pub fn builtin() -> DeckLibrary {
        DeckLibrary::load(DEFAULT_POOL_TOML, DEFAULT_DECKS_TOML).expect("shipped decks are valid")
    }

    pub fn deck(&self, deck_id: &str) -> Result<&Deck, DeckError> {
        self.decks
            .iter()
            .find(|d| d.deck_id == deck_id)
            .ok_or_else(|| DeckError::NotFound {
                deck_id: deck_id.into(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_BASIC: &str = r#"
pool_version = "1"

[[cards]]
card_id = "p-sprout"
name = "Sprout"
kind = "pokemon"
subkind = "basic"
hp = 60
types = ["grass"]
attacks = [ { name = "Tackle", cost = ["colorless"], base_damage = 20 } ]

[[cards]]
card_id = "e-grass"
name = "Grass Energy"
kind = "energy"
subkind = "basic_energy"
types = ["grass"]
"#;

    #[test]
    fn single_basic_attacker_parses() {
        let pool = parse_card_pool(ONE_BASIC).unwrap();
        let def = pool.get(pool.by_id("p-sprout").unwrap());
        assert_eq!(def.kind, CardKind::Pokemon);
        assert_eq!(def.subkind, Subkind::Basic);
        assert_eq!(def.hp, 60);
    }

    #[test]
    fn stage2_without_evolves_from_is_semantic_error() {
        let doc = format!(
            "{ONE_BASIC}\n[[cards]]\ncard_id = \"p-tree\"\nname = \"Tree\"\nkind = \"pokemon\"\nsubkind = \"stage2\"\nhp = 150\ntypes = [\"grass\"]\nattacks = [ {{ name = \"Slam\", base_damage = 90 }} ]\n"
        );
        match parse_card_pool(&doc) {
            Err(PoolError::Semantic { card_id, rule }) => {
                assert_eq!(card_id, "p-tree");
                assert!(rule.contains("evolves_from"), "{rule}");
            }
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        let doc = "pool_version = \"1\"\n[[cards]\n";
        match parse_card_pool(doc) {
            Err(PoolError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_field_rejected() {
        let doc = ONE_BASIC.replace("hp = 60", "hp = 60\nhit_points = 60");
        assert!(matches!(parse_card_pool(&doc), Err(PoolError::Syntax { .. })));
    }

    #[test]
    fn deck_total_must_be_sixty() {
        let pool = parse_card_pool(ONE_BASIC).unwrap();
        let list = DeckList {
            deck_id: "short".into(),
            archetype: Archetype::MiraidonLike,
            plan: String::new(),
            entries: vec![
                DeckEntry {
                    card: "p-sprout".into(),
                    count: 4,
                },
                DeckEntry {
                    card: "e-grass".into(),
                    count: 55,
                },
            ],
        };
        assert_eq!(
            load_deck(&list, &pool),
            Err(DeckError::Total {
                deck_id: "short".into(),
                total: 59
            })
        );
    }

    #[test]
    fn copy_limit_skips_basic_energy() {
        let pool = parse_card_pool(ONE_BASIC).unwrap();
        let mut list = DeckList {
            deck_id: "d".into(),
            archetype: Archetype::MiraidonLike,
            plan: String::new(),
            entries: vec![
                DeckEntry {
                    card: "p-sprout".into(),
                    count: 4,
                },
                DeckEntry {
                    card: "e-grass".into(),
                    count: 56,
                },
            ],
        };
        assert!(load_deck(&list, &pool).is_ok());
        list.entries[0].count = 5;
        list.entries[1].count = 55;
        assert!(matches!(
            load_deck(&list, &pool),
            Err(DeckError::CountViolation { count: 5, .. })
        ));
    }

    #[test]
    fn unknown_card_in_deck() {
        let pool = parse_card_pool(ONE_BASIC).unwrap();
        let list = DeckList {
            deck_id: "d".into(),
            archetype: Archetype::LugiaLike,
            plan: String::new(),
            entries: vec![DeckEntry {
                card: "nope".into(),
                count: 60,
            }],
        };
        assert!(matches!(
            load_deck(&list, &pool),
            Err(DeckError::UnknownCard { .. })
        ));
    }
}
