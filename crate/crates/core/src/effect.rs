//! Effect programs: the executable form of attack, Ability and Trainer text.
//!
//! A program is a finite, loop-free list of [`EffectOp`]s. Branching only
//! happens through [`EffectOp::CoinFlip`], whose arms are themselves finite
//! sub-programs. Any op that needs a player decision suspends on a choice
//! prompt; see `engine::interp` for the runtime.

use serde::{Deserialize, Serialize};

use crate::card::{CardDef, CardKind, EnergyType, Subkind};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EffectProgram(pub Vec<EffectOp>);

impl EffectProgram {
    pub fn ops(&self) -> &[EffectOp] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Deck,
    Hand,
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Destination {
    Hand,
    Bench,
    Deck,
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardClass {
    #[default]
    Any,
    Pokemon,
    BasicPokemon,
    EvolutionPokemon,
    Energy,
    BasicEnergy,
    SpecialEnergy,
    Trainer,
    Item,
    Supporter,
    Tool,
    Stadium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardFilter {
    #[serde(default)]
    pub class: CardClass,
    /// Pokemon type, or provided energy type for Energy cards.
    #[serde(default)]
    pub energy_type: Option<EnergyType>,
}

impl CardFilter {
    pub fn matches(&self, card: &CardDef) -> bool {
        let class_ok = match self.class {
            CardClass::Any => true,
            CardClass::Pokemon => card.kind == CardKind::Pokemon,
            CardClass::BasicPokemon => card.subkind == Subkind::Basic,
            CardClass::EvolutionPokemon => {
                matches!(card.subkind, Subkind::Stage1 | Subkind::Stage2)
            }
            CardClass::Energy => card.kind == CardKind::Energy,
            CardClass::BasicEnergy => card.subkind == Subkind::BasicEnergy,
            CardClass::SpecialEnergy => card.subkind == Subkind::SpecialEnergy,
            CardClass::Trainer => card.kind == CardKind::Trainer,
            CardClass::Item => card.subkind == Subkind::Item,
            CardClass::Supporter => card.subkind == Subkind::Supporter,
            CardClass::Tool => card.subkind == Subkind::Tool,
            CardClass::Stadium => card.subkind == Subkind::Stadium,
        };
        class_ok
            && self
                .energy_type
                .is_none_or(|t| card.types.contains(&t))
    }

    fn is_energy_class(&self) -> bool {
        matches!(
            self.class,
            CardClass::Energy | CardClass::BasicEnergy | CardClass::SpecialEnergy
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Selector {
    All {
        #[serde(default)]
        filter: CardFilter,
    },
    Choose {
        min: u32,
        max: u32,
        #[serde(default)]
        filter: CardFilter,
    },
    /// The cards picked by the most recent `require_choice` or `discard`.
    Stashed,
    /// Top cards of the deck.
    Top { count: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardFrom {
    Hand,
    /// Energy attached to the source Pokemon.
    SelfEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The Pokemon using the attack or Ability, or holding the Tool.
    SelfPokemon,
    OwnActive,
    OppActive,
    ChooseOwn,
    ChooseOwnBench,
    ChooseOpp,
    ChooseOppBench,
    AllOwn,
    AllOppBench,
}

impl Target {
    fn is_own_side(self) -> bool {
        matches!(
            self,
            Target::SelfPokemon
                | Target::OwnActive
                | Target::ChooseOwn
                | Target::ChooseOwnBench
                | Target::AllOwn
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Asleep,
    Paralyzed,
    Confused,
    Poisoned,
    Burned,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Asleep => "asleep",
            Condition::Paralyzed => "paralyzed",
            Condition::Confused => "confused",
            Condition::Poisoned => "poisoned",
            Condition::Burned => "burned",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Own,
    Opponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModifyMode {
    Dealt,
    Taken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Duration {
    ThisTurn,
    UntilEndOfOpponentTurn,
    WhileAttached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountExpr {
    EnergyOnSelf,
    EnergyOnDefender,
    DamageCountersOnSelf,
    DamageCountersOnDefender,
    OpponentPrizesTaken,
    OwnPrizesTaken,
    OwnBench,
    OpponentBench,
    HandSize,
    Stashed,
    Heads { flips: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum EffectOp {
    Draw {
        count: u32,
    },
    DrawTo {
        hand_size: u32,
    },
    SearchZone {
        zone: Zone,
        #[serde(default)]
        filter: CardFilter,
        count: u32,
        destination: Destination,
        #[serde(default)]
        reveal: bool,
    },
    MoveCards {
        from: Zone,
        to: Destination,
        selector: Selector,
    },
    AttachEnergyFrom {
        zone: Zone,
        #[serde(default)]
        filter: CardFilter,
        count: u32,
        target: Target,
    },
    Damage {
        amount: u32,
        target: Target,
    },
    /// Adds `unit × count` to the damage of the attack being resolved.
    DamagePerCount {
        unit: u32,
        count: CountExpr,
    },
    Heal {
        amount: u32,
        target: Target,
    },
    Discard {
        from: DiscardFrom,
        selector: Selector,
    },
    ApplyCondition {
        condition: Condition,
        target: Target,
    },
    SwitchActive {
        side: Side,
    },
    Shuffle {
        zone: Zone,
    },
    CoinFlip {
        #[serde(default)]
        then: Vec<EffectOp>,
        #[serde(default, rename = "else")]
        otherwise: Vec<EffectOp>,
    },
    ModifyDamage {
        mode: ModifyMode,
        delta: i32,
        duration: Duration,
        target: Target,
    },
    /// Ask the controller to pick cards; the pick is stashed for later ops.
    RequireChoice {
        zone: Zone,
        #[serde(default)]
        filter: CardFilter,
        min: u32,
        max: u32,
        #[serde(default)]
        reason: String,
    },
    /// Stops the program. An attack stopped this way deals no damage.
    EndEffect,
}

impl EffectOp {
    /// Stable snake_case tag, matching the `op` key in pool files.
    pub fn tag(&self) -> &'static str {
        match self {
            EffectOp::Draw { .. } => "draw",
            EffectOp::DrawTo { .. } => "draw_to",
            EffectOp::SearchZone { .. } => "search_zone",
            EffectOp::MoveCards { .. } => "move_cards",
            EffectOp::AttachEnergyFrom { .. } => "attach_energy_from",
            EffectOp::Damage { .. } => "damage",
            EffectOp::DamagePerCount { .. } => "damage_per_count",
            EffectOp::Heal { .. } => "heal",
            EffectOp::Discard { .. } => "discard",
            EffectOp::ApplyCondition { .. } => "apply_condition",
            EffectOp::SwitchActive { .. } => "switch_active",
            EffectOp::Shuffle { .. } => "shuffle",
            EffectOp::CoinFlip { .. } => "coin_flip",
            EffectOp::ModifyDamage { .. } => "modify_damage",
            EffectOp::RequireChoice { .. } => "require_choice",
            EffectOp::EndEffect => "end_effect",
        }
    }

    pub const ALL_TAGS: [&'static str; 16] = [
        "draw",
        "draw_to",
        "search_zone",
        "move_cards",
        "attach_energy_from",
        "damage",
        "damage_per_count",
        "heal",
        "discard",
        "apply_condition",
        "switch_active",
        "shuffle",
        "coin_flip",
        "modify_damage",
        "require_choice",
        "end_effect",
    ];
}

/// Where a program runs; decides which ops and targets make sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramContext {
    Attack,
    Ability,
    Item,
    Supporter,
    Tool,
    Stadium,
}

impl ProgramContext {
    fn has_pokemon_source(self) -> bool {
        matches!(
            self,
            ProgramContext::Attack | ProgramContext::Ability | ProgramContext::Tool
        )
    }
}

const MAX_BRANCH_DEPTH: usize = 4;

/// Structural validation of a program. Returns a description of the first
/// problem found.
pub fn validate_program(program: &EffectProgram, ctx: ProgramContext) -> Result<(), String> {
    validate_ops(program.ops(), ctx, 0, false)
}

fn validate_ops(
    ops: &[EffectOp],
    ctx: ProgramContext,
    depth: usize,
    stash_available: bool,
) -> Result<(), String> {
    if depth > MAX_BRANCH_DEPTH {
        return Err(format!("coin_flip nesting deeper than {MAX_BRANCH_DEPTH}"));
    }
    let mut stash = stash_available;
    for (i, op) in ops.iter().enumerate() {
        let at = |msg: String| format!("op {i} ({}): {msg}", op.tag());
        let check_target = |t: Target| -> Result<(), String> {
            if t == Target::SelfPokemon && !ctx.has_pokemon_source() {
                return Err(at("self_pokemon target needs a Pokemon source".into()));
            }
            Ok(())
        };
        let check_selector = |s: &Selector, stash: bool| -> Result<(), String> {
            match *s {
                Selector::Choose { min, max, .. } if min > max => {
                    Err(at(format!("selector min {min} exceeds max {max}")))
                }
                Selector::Stashed if !stash => {
                    Err(at("stashed selector without a preceding choice".into()))
                }
                _ => Ok(()),
            }
        };
        match op {
            EffectOp::Draw { .. } | EffectOp::DrawTo { .. } => {}
            EffectOp::SearchZone {
                zone,
                filter,
                destination,
                ..
            } => {
                if !matches!(zone, Zone::Deck | Zone::Discard) {
                    return Err(at("search_zone reads the deck or discard pile".into()));
                }
                match destination {
                    Destination::Hand => {}
                    Destination::Bench => {
                        if filter.class != CardClass::BasicPokemon {
                            return Err(at("bench destination needs a basic_pokemon filter".into()));
                        }
                    }
                    _ => return Err(at("search_zone destination must be hand or bench".into())),
                }
            }
            EffectOp::MoveCards { from, to, selector } => {
                check_selector(selector, stash)?;
                if *to == Destination::Bench {
                    return Err(at("move_cards cannot place cards on the bench".into()));
                }
                if matches!(selector, Selector::Top { .. }) && *from != Zone::Deck {
                    return Err(at("top selector only applies to the deck".into()));
                }
                if matches!(
                    (from, to),
                    (Zone::Deck, Destination::Deck)
                        | (Zone::Hand, Destination::Hand)
                        | (Zone::Discard, Destination::Discard)
                ) {
                    return Err(at("move_cards source and destination are the same zone".into()));
                }
            }
            EffectOp::AttachEnergyFrom { filter, target, .. } => {
                if !filter.is_energy_class() {
                    return Err(at("attach_energy_from needs an energy filter".into()));
                }
                if !target.is_own_side() || *target == Target::AllOwn {
                    return Err(at("energy attaches to one of your own Pokemon".into()));
                }
                check_target(*target)?;
            }
            EffectOp::Damage { amount, target } | EffectOp::Heal { amount, target } => {
                if amount % 10 != 0 {
                    return Err(at(format!("amount {amount} is not a multiple of 10")));
                }
                check_target(*target)?;
            }
            EffectOp::DamagePerCount { unit, .. } => {
                if ctx != ProgramContext::Attack {
                    return Err(at("damage_per_count only applies inside attacks".into()));
                }
                if unit % 10 != 0 {
                    return Err(at(format!("unit {unit} is not a multiple of 10")));
                }
            }
            EffectOp::Discard { from, selector } => {
                check_selector(selector, stash)?;
                if *from == DiscardFrom::SelfEnergy && !ctx.has_pokemon_source() {
                    return Err(at("self_energy needs a Pokemon source".into()));
                }
                if matches!(selector, Selector::Top { .. }) {
                    return Err(at("top selector only applies to the deck".into()));
                }
                stash = true;
            }
            EffectOp::ApplyCondition { target, .. } => {
                check_target(*target)?;
            }
            EffectOp::SwitchActive { .. } => {}
            EffectOp::Shuffle { zone } => {
                if *zone != Zone::Deck {
                    return Err(at("only the deck can be shuffled".into()));
                }
            }
            EffectOp::CoinFlip { then, otherwise } => {
                validate_ops(then, ctx, depth + 1, stash)?;
                validate_ops(otherwise, ctx, depth + 1, stash)?;
            }
            EffectOp::ModifyDamage {
                delta,
                duration,
                target,
                ..
            } => {
                if delta % 10 != 0 {
                    return Err(at(format!("delta {delta} is not a multiple of 10")));
                }
                if (*duration == Duration::WhileAttached) != (ctx == ProgramContext::Tool) {
                    return Err(at("while_attached is exactly the Tool duration".into()));
                }
                check_target(*target)?;
            }
            EffectOp::RequireChoice { zone, min, max, .. } => {
                if min > max {
                    return Err(at(format!("min {min} exceeds max {max}")));
                }
                if *zone == Zone::Deck {
                    return Err(at("require_choice reads the hand or discard pile".into()));
                }
                stash = true;
            }
            EffectOp::EndEffect => {}
        }
    }
    Ok(())
}

/// Visits every op, descending into coin-flip arms.
pub fn walk_ops<'a>(ops: &'a [EffectOp], f: &mut impl FnMut(&'a EffectOp)) {
    for op in ops {
        f(op);
        if let EffectOp::CoinFlip { then, otherwise } = op {
            walk_ops(then, f);
            walk_ops(otherwise, f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(ops: Vec<EffectOp>) -> EffectProgram {
        EffectProgram(ops)
    }

    #[test]
    fn stashed_needs_prior_choice() {
        let p = prog(vec![EffectOp::MoveCards {
            from: Zone::Hand,
            to: Destination::Deck,
            selector: Selector::Stashed,
        }]);
        assert!(validate_program(&p, ProgramContext::Item).is_err());
        let p = prog(vec![
            EffectOp::RequireChoice {
                zone: Zone::Hand,
                filter: CardFilter::default(),
                min: 1,
                max: 1,
                reason: "discard".into(),
            },
            EffectOp::MoveCards {
                from: Zone::Hand,
                to: Destination::Discard,
                selector: Selector::Stashed,
            },
        ]);
        assert!(validate_program(&p, ProgramContext::Item).is_ok());
    }

    #[test]
    fn self_target_rejected_for_items() {
        let p = prog(vec![EffectOp::Heal {
            amount: 30,
            target: Target::SelfPokemon,
        }]);
        assert!(validate_program(&p, ProgramContext::Item).is_err());
        assert!(validate_program(&p, ProgramContext::Ability).is_ok());
    }

    #[test]
    fn nesting_depth_is_bounded() {
        let mut op = EffectOp::Draw { count: 1 };
        for _ in 0..6 {
            op = EffectOp::CoinFlip {
                then: vec![op],
                otherwise: vec![],
            };
        }
        assert!(validate_program(&prog(vec![op]), ProgramContext::Item).is_err());
    }

    #[test]
    fn toml_round_trip_of_tagged_ops() {
        #[derive(Deserialize)]
        struct W {
            effect: EffectProgram,
        }
        let src = r#"
effect = [
  { op = "search_zone", zone = "deck", filter = { class = "basic_pokemon" }, count = 1, destination = "bench" },
  { op = "coin_flip", then = [ { op = "draw", count = 2 } ], else = [ { op = "end_effect" } ] },
  { op = "damage_per_count", unit = 20, count = { heads = { flips = 3 } } },
  { op = "discard", from = "self_energy", selector = { mode = "choose", min = 1, max = 1 } },
]
"#;
        let w: W = toml::from_str(src).unwrap();
        assert_eq!(w.effect.ops().len(), 4);
        assert_eq!(
            w.effect.ops()[2],
            EffectOp::DamagePerCount {
                unit: 20,
                count: CountExpr::Heads { flips: 3 }
            }
        );
    }
}
