//! Per-player partial observations.
//!
//! An [`Observation`] carries the viewer's private zone contents, the public
//! board, and global turn information. Hidden zones appear as counts only.
//! Prompt candidates carry labels and card data, never internal card uids.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::action::ActionRequest;
use crate::card::{CardDef, CardIdx, CardKind};
use crate::engine::legal_requests;
use crate::pool::CardPool;
use crate::state::{
    opponent, ChoicePrompt, GameResult, GameState, LogEntry, Phase, PlayerId, PokemonInPlay,
    SelectionConstraint,
};

pub const OBSERVATION_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackView {
    pub name: String,
    pub cost: Vec<String>,
    pub damage: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbilityView {
    pub name: String,
    pub text: String,
}

/// Printed card data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardView {
    pub card_id: String,
    pub name: String,
    pub kind: String,
    pub subkind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hp: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub types: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolves_from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retreat_cost: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attacks: Vec<AttackView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ability: Option<AbilityView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prize_value: Option<u32>,
    pub text: String,
}

impl CardView {
    pub fn of(def: &CardDef) -> CardView {
        let pokemon = def.kind == CardKind::Pokemon;
        CardView {
            card_id: def.card_id.clone(),
            name: def.name.clone(),
            kind: format!("{:?}", def.kind).to_lowercase(),
            subkind: def.subkind.as_str().to_string(),
            hp: pokemon.then_some(def.hp),
            types: def.types.iter().map(|t| t.to_string()).collect(),
            evolves_from: def.evolves_from.clone(),
            weakness: def.weakness.map(|t| t.to_string()),
            retreat_cost: pokemon.then_some(def.retreat_cost),
            attacks: def
                .attacks
                .iter()
                .map(|a| AttackView {
                    name: a.name.clone(),
                    cost: a.cost.iter().map(|t| t.to_string()).collect(),
                    damage: a.base_damage,
                    text: a.text.clone(),
                })
                .collect(),
            ability: def.ability.as_ref().map(|a| AbilityView {
                name: a.name.clone(),
                text: a.text.clone(),
            }),
            prize_value: pokemon.then_some(def.prize_value),
            text: def.rules_text.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PokemonView {
    pub label: String,
    pub field_index: u32,
    pub card: CardView,
    /// Lower stages, bottom first.
    pub evolved_from: Vec<String>,
    pub hp: u32,
    pub remaining_hp: u32,
    pub damage_counters: u32,
    pub energy: Vec<String>,
    pub tool: Option<String>,
    pub conditions: Vec<String>,
    pub entered_play_turn: u32,
    pub ability_used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivateView {
    pub hand: Vec<CardView>,
    pub deck_count: u32,
    pub prize_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoardView {
    pub player: PlayerId,
    pub active: Option<PokemonView>,
    pub bench: Vec<PokemonView>,
    /// Pokemon placed face down during setup, not yet revealed.
    pub face_down_pokemon: u32,
    pub discard: Vec<String>,
    pub hand_count: u32,
    pub deck_count: u32,
    pub prize_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StadiumView {
    pub card: CardView,
    pub owner: PlayerId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicView {
    /// Indexed by player.
    pub boards: Vec<BoardView>,
    pub stadium: Option<StadiumView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateView {
    pub label: String,
    pub count: u32,
    pub card: Option<CardView>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub energy_units: u32,
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptView {
    pub reason: String,
    pub min_count: u32,
    pub max_count: u32,
    pub candidates: Vec<CandidateView>,
    /// Energy units the selection must cover exactly, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_energy_units: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalView {
    pub turn_number: u32,
    pub active_player: PlayerId,
    pub phase: Phase,
    pub acting_player: Option<PlayerId>,
    pub choosing_card: bool,
    pub prompt: Option<PromptView>,
    pub result: Option<GameResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub version: u32,
    pub viewer: PlayerId,
    pub private: PrivateView,
    pub public: PublicView,
    pub global: GlobalView,
    pub opponent_last_turn_actions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub available_actions: Option<Vec<ActionRequest>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMode {
    Structured,
    Raw,
}

fn card_view(pool: &CardPool, idx: CardIdx) -> CardView {
    CardView::of(pool.get(idx))
}

fn pokemon_view(pool: &CardPool, st: &GameState, mon: &PokemonInPlay) -> PokemonView {
    let top = st.def(pool, mon.top());
    PokemonView {
        label: crate::engine::prompt::pokemon_label(&top.name, mon.field_index),
        field_index: mon.field_index,
        card: CardView::of(top),
        evolved_from: mon.stack[..mon.stack.len() - 1]
            .iter()
            .map(|&u| st.def(pool, u).name.clone())
            .collect(),
        hp: st.hp(pool, mon),
        remaining_hp: st.remaining_hp(pool, mon),
        damage_counters: mon.damage_counters,
        energy: mon
            .attached_energy
            .iter()
            .map(|&u| st.def(pool, u).name.clone())
            .collect(),
        tool: mon.attached_tool.map(|u| st.def(pool, u).name.clone()),
        conditions: mon
            .conditions
            .list()
            .iter()
            .map(|c| format!("{c:?}").to_lowercase())
            .collect(),
        entered_play_turn: mon.entered_play_turn,
        ability_used: mon.ability_used,
    }
}

fn board_view(pool: &CardPool, st: &GameState, player: PlayerId, viewer: PlayerId) -> BoardView {
    let ps = &st.players[player];
    let hidden = st.phase == Phase::Setup && player != viewer;
    let placed = ps.active.iter().count() + ps.bench.len();
    BoardView {
        player,
        active: if hidden {
            None
        } else {
            ps.active.as_ref().map(|m| pokemon_view(pool, st, m))
        },
        bench: if hidden {
            Vec::new()
        } else {
            ps.bench.iter().map(|m| pokemon_view(pool, st, m)).collect()
        },
        face_down_pokemon: if hidden { placed as u32 } else { 0 },
        discard: ps
            .discard
            .iter()
            .map(|&u| st.def(pool, u).name.clone())
            .collect(),
        hand_count: ps.hand.len() as u32,
        deck_count: ps.deck.len() as u32,
        prize_count: ps.prizes.len() as u32,
    }
}

fn prompt_view(pool: &CardPool, p: &ChoicePrompt) -> PromptView {
    PromptView {
        reason: p.reason.clone(),
        min_count: p.min_count,
        max_count: p.max_count,
        candidates: p
            .candidates
            .iter()
            .map(|c| CandidateView {
                label: c.label.clone(),
                count: c.refs.len() as u32,
                card: c.card.map(|i| card_view(pool, i)),
                energy_units: if p.constraint.is_some() { c.units } else { 0 },
            })
            .collect(),
        exact_energy_units: p.constraint.map(|c| match c {
            SelectionConstraint::ExactCover { units } => units,
        }),
    }
}

/// Public summaries of everything logged during the opponent's most recent
/// turn (or the opponent's setup, before turn 1).
fn opponent_last_turn(st: &GameState, viewer: PlayerId) -> Vec<String> {
    let opp = opponent(viewer);
    let turn = if st.phase == Phase::Setup {
        0
    } else if st.active_player == opp {
        st.turn_number
    } else {
        st.turn_number.saturating_sub(1)
    };
    let mut out = Vec::new();
    for entry in st.action_log.iter().rev() {
        let t = match entry {
            LogEntry::Action { turn, .. } | LogEntry::Event { turn, .. } => *turn,
        };
        if t < turn {
            break;
        }
        if t > turn {
            continue;
        }
        match entry {
            LogEntry::Action { actor, public, .. } if *actor == opp => out.push(public.clone()),
            LogEntry::Action { .. } => {}
            LogEntry::Event { event, .. } => out.push(event.summary()),
        }
    }
    out.reverse();
    out
}

/// Builds `viewer`'s observation. `with_actions` controls legal-action
/// masking: when false, `available_actions` is absent.
pub fn build_observation(
    pool: &CardPool,
    st: &GameState,
    viewer: PlayerId,
    with_actions: bool,
) -> Observation {
    let me = &st.players[viewer];
    let acting = st.acting_player();
    let prompt = st
        .pending_prompt()
        .filter(|p| p.chooser == viewer)
        .map(|p| prompt_view(pool, p));
    let available_actions = (with_actions && acting == Some(viewer)).then(|| legal_requests(pool, st));
    Observation {
        version: OBSERVATION_VERSION,
        viewer,
        private: PrivateView {
            hand: me.hand.iter().map(|&u| CardView::of(st.def(pool, u))).collect(),
            deck_count: me.deck.len() as u32,
            prize_count: me.prizes.len() as u32,
        },
        public: PublicView {
            boards: (0..2).map(|p| board_view(pool, st, p, viewer)).collect(),
            stadium: st.stadium.map(|(u, owner)| StadiumView {
                card: CardView::of(st.def(pool, u)),
                owner,
            }),
        },
        global: GlobalView {
            turn_number: st.turn_number,
            active_player: st.active_player,
            phase: st.phase,
            acting_player: acting,
            choosing_card: prompt.is_some(),
            prompt,
            result: st.result,
        },
        opponent_last_turn_actions: opponent_last_turn(st, viewer),
        available_actions,
    }
}

pub fn render_observation(obs: &Observation, mode: RenderMode) -> String {
    match mode {
        RenderMode::Structured => {
            serde_json::to_string_pretty(obs).expect("observation serializes")
        }
        RenderMode::Raw => {
            let value = serde_json::to_value(obs).expect("observation serializes");
            let mut lines = Vec::new();
            flatten(&value, String::new(), &mut lines);
            lines.join("\n")
        }
    }
}

/// `path = value` lines; empty containers are kept as `[]` / `{}`.
fn flatten(v: &Value, path: String, out: &mut Vec<String>) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                flatten(child, join(k), out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, format!("{path}[{i}]"), out);
            }
        }
        leaf => out.push(format!("{path} = {leaf}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::setup_game;
    use crate::pool::DeckLibrary;
    use crate::state::EngineConfig;

    fn game() -> (DeckLibrary, GameState) {
        let lib = DeckLibrary::builtin();
        let d = lib.deck("charizard-like").unwrap();
        let st = setup_game(&lib.pool, [d, d], 11, EngineConfig::default()).unwrap();
        (lib, st)
    }

    #[test]
    fn hides_opponent_hand() {
        let (lib, st) = game();
        let obs = build_observation(&lib.pool, &st, 0, true);
        assert_eq!(obs.private.hand.len(), st.players[0].hand.len());
        assert_eq!(obs.public.boards[1].hand_count, st.players[1].hand.len() as u32);
    }

    #[test]
    fn masking_drops_actions() {
        let (lib, st) = game();
        let p = st.acting_player().unwrap();
        let on = build_observation(&lib.pool, &st, p, true);
        let off = build_observation(&lib.pool, &st, p, false);
        assert!(on.available_actions.is_some());
        assert!(!render_observation(&off, RenderMode::Structured).contains("available_actions"));
        assert!(!render_observation(&off, RenderMode::Raw).contains("available_actions"));
    }

    #[test]
    fn raw_keeps_empty_bench() {
        let (lib, st) = game();
        let raw = render_observation(&build_observation(&lib.pool, &st, 0, false), RenderMode::Raw);
        assert!(raw.lines().any(|l| l == "public.boards[0].bench = []"));
    }

    #[test]
    fn structured_is_stable() {
        let (lib, st) = game();
        let a = render_observation(&build_observation(&lib.pool, &st, 1, true), RenderMode::Structured);
        let b = render_observation(&build_observation(&lib.pool, &st.clone(), 1, true), RenderMode::Structured);
        assert_eq!(a, b);
    }
}
