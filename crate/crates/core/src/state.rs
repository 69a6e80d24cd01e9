//! Authoritative match state.
//!
//! Every physical card in a match has a [`CardUid`]; player 0 owns uids
//! `0..60`, player 1 owns `60..120`. Zones hold uids, never definitions, so
//! conservation is a set-equality check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::action::ActionRequest;
use crate::card::{CardDef, CardIdx, EnergyType};
use crate::effect::{Condition, ModifyMode};
use crate::engine::work::{Pending, Task};
use crate::events::Event;
use crate::pool::{CardPool, DECK_SIZE};

pub type PlayerId = usize;

pub const BENCH_SIZE: usize = 5;
pub const PRIZE_COUNT: usize = 6;
pub const OPENING_HAND: usize = 7;

pub fn opponent(p: PlayerId) -> PlayerId {
    1 - p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CardUid(pub u16);

impl CardUid {
    pub fn owner(self) -> PlayerId {
        self.0 as usize / DECK_SIZE
    }
}

/// Asleep, Paralyzed and Confused replace each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rotation {
    Asleep,
    Paralyzed,
    Confused,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Conditions {
    pub rotation: Option<Rotation>,
    pub poisoned: bool,
    pub burned: bool,
}

impl Conditions {
    pub fn apply(&mut self, c: Condition) {
        match c {
            Condition::Asleep => self.rotation = Some(Rotation::Asleep),
            Condition::Paralyzed => self.rotation = Some(Rotation::Paralyzed),
            Condition::Confused => self.rotation = Some(Rotation::Confused),
            Condition::Poisoned => self.poisoned = true,
            Condition::Burned => self.burned = true,
        }
    }

    pub fn has(&self, c: Condition) -> bool {
        match c {
            Condition::Asleep => self.rotation == Some(Rotation::Asleep),
            Condition::Paralyzed => self.rotation == Some(Rotation::Paralyzed),
            Condition::Confused => self.rotation == Some(Rotation::Confused),
            Condition::Poisoned => self.poisoned,
            Condition::Burned => self.burned,
        }
    }

    pub fn list(&self) -> Vec<Condition> {
        [
            Condition::Asleep,
            Condition::Paralyzed,
            Condition::Confused,
            Condition::Poisoned,
            Condition::Burned,
        ]
        .into_iter()
        .filter(|&c| self.has(c))
        .collect()
    }

    pub fn blocks_attack_and_retreat(&self) -> bool {
        matches!(self.rotation, Some(Rotation::Asleep | Rotation::Paralyzed))
    }

    pub fn is_empty(&self) -> bool {
        *self == Conditions::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expiry {
    /// Removed when this turn number ends.
    EndOfTurn(u32),
    /// Removed when this Tool leaves the Pokemon.
    WhileAttached(CardUid),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modifier {
    pub mode: ModifyMode,
    pub delta: i32,
    pub expires: Expiry,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PokemonInPlay {
    /// Evolution stack, bottom first; the last card is the current stage.
    pub stack: Vec<CardUid>,
    /// Damage in counters of 10 HP.
    pub damage_counters: u32,
    pub attached_energy: Vec<CardUid>,
    pub attached_tool: Option<CardUid>,
    pub conditions: Conditions,
    pub entered_play_turn: u32,
    pub evolved_this_turn: bool,
    pub ability_used: bool,
    pub field_index: u32,
    pub modifiers: Vec<Modifier>,
}

impl PokemonInPlay {
    pub fn new(card: CardUid, turn: u32, field_index: u32) -> Self {
        PokemonInPlay {
            stack: vec![card],
            damage_counters: 0,
            attached_energy: Vec::new(),
            attached_tool: None,
            conditions: Conditions::default(),
            entered_play_turn: turn,
            evolved_this_turn: false,
            ability_used: false,
            field_index,
            modifiers: Vec::new(),
        }
    }

    pub fn top(&self) -> CardUid {
        *self.stack.last().expect("evolution stack is never empty")
    }

    /// All cards that leave play with this Pokemon.
    pub fn all_cards(&self) -> impl Iterator<Item = CardUid> + '_ {
        self.stack
            .iter()
            .chain(self.attached_energy.iter())
            .chain(self.attached_tool.iter())
            .copied()
    }

    pub fn modifier_total(&self, mode: ModifyMode) -> i32 {
        self.modifiers
            .iter()
            .filter(|m| m.mode == mode)
            .map(|m| m.delta)
            .sum()
    }

    /// Drops effects that do not survive leaving the Active spot.
    pub fn clear_on_bench(&mut self) {
        self.conditions = Conditions::default();
        self.modifiers
            .retain(|m| matches!(m.expires, Expiry::WhileAttached(_)));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct TurnFlags {
    pub energy_attached: bool,
    pub supporter_played: bool,
    pub stadium_played: bool,
    pub retreated: bool,
    pub stadium_used: bool,
    pub stadium_discarded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayerState {
    pub deck_id: String,
    /// Registered decklist, in decklist order.
    pub registered: Vec<CardIdx>,
    /// Top of deck is the last element.
    pub deck: Vec<CardUid>,
    pub hand: Vec<CardUid>,
    pub discard: Vec<CardUid>,
    /// Face-down prizes; positions are what a prompt exposes.
    pub prizes: Vec<CardUid>,
    pub active: Option<PokemonInPlay>,
    pub bench: Vec<PokemonInPlay>,
    pub flags: TurnFlags,
    pub mulligans: u32,
    pub setup_done: bool,
    pub next_field_index: u32,
}

impl PlayerState {
    pub fn in_play(&self) -> impl Iterator<Item = &PokemonInPlay> {
        self.active.iter().chain(self.bench.iter())
    }

    pub fn in_play_mut(&mut self) -> impl Iterator<Item = &mut PokemonInPlay> {
        self.active.iter_mut().chain(self.bench.iter_mut())
    }

    pub fn pokemon(&self, field_index: u32) -> Option<&PokemonInPlay> {
        self.in_play().find(|p| p.field_index == field_index)
    }

    pub fn pokemon_mut(&mut self, field_index: u32) -> Option<&mut PokemonInPlay> {
        self.in_play_mut().find(|p| p.field_index == field_index)
    }

    pub fn has_pokemon_in_play(&self) -> bool {
        self.active.is_some() || !self.bench.is_empty()
    }

    pub fn take_field_index(&mut self) -> u32 {
        self.next_field_index += 1;
        self.next_field_index
    }

    pub fn prizes_taken(&self) -> u32 {
        (PRIZE_COUNT - self.prizes.len().min(PRIZE_COUNT)) as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Setup,
    TurnMain,
    BetweenTurns,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WinReason {
    AllPrizes,
    NoPokemon,
    DeckOut,
    TurnCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameResult {
    /// `None` is a draw.
    pub winner: Option<PlayerId>,
    pub reason: WinReason,
}

impl GameResult {
    /// Score for `player`: 1 for a win, 0.5 for a draw, 0 for a loss.
    pub fn score(&self, player: PlayerId) -> f64 {
        match self.winner {
            None => 0.5,
            Some(w) if w == player => 1.0,
            Some(_) => 0.0,
        }
    }
}

/// Which candidates a prompt shows to everyone once answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Public,
    Private,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateRef {
    Card(CardUid),
    Pokemon { player: PlayerId, field_index: u32 },
}

/// A group of interchangeable choices: identical cards in one zone, one
/// Pokemon in play, or one face-down prize position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Candidate {
    pub label: String,
    pub refs: Vec<CandidateRef>,
    /// Definition shown to the chooser; `None` for face-down cards.
    pub card: Option<CardIdx>,
    /// Energy units, used by the retreat-cost constraint.
    #[serde(default)]
    pub units: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionConstraint {
    /// Picked units must reach this total, and no picked card may be spare.
    ExactCover { units: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChoicePrompt {
    pub chooser: PlayerId,
    pub reason: String,
    pub candidates: Vec<Candidate>,
    pub min_count: u32,
    pub max_count: u32,
    pub constraint: Option<SelectionConstraint>,
    pub visibility: Visibility,
}

impl ChoicePrompt {
    pub fn total_items(&self) -> u32 {
        self.candidates.iter().map(|c| c.refs.len() as u32).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct FirstTurnRules {
    pub first_player_may_attack: bool,
    pub first_player_may_play_supporter: bool,
    /// Allow evolving on a player's first turn.
    pub evolve_on_first_turn: bool,
}


#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    pub turn_cap: u32,
    pub first_turn: FirstTurnRules,
    pub weakness_multiplier: u32,
    pub resistance_reduction: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            turn_cap: 200,
            first_turn: FirstTurnRules::default(),
            weakness_multiplier: 2,
            resistance_reduction: 30,
        }
    }
}

/// The attack currently resolving.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttackInProgress {
    pub frame: u32,
    pub attacker: PlayerId,
    pub attacker_field_index: u32,
    pub attacker_types: Vec<EnergyType>,
    pub damage: u32,
    pub cancelled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogEntry {
    Action {
        turn: u32,
        actor: PlayerId,
        request: ActionRequest,
        public: String,
    },
    Event {
        turn: u32,
        event: Event,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    pub config: EngineConfig,
    /// Definition of every card uid.
    pub cards: Vec<CardIdx>,
    pub players: [PlayerState; 2],
    pub stadium: Option<(CardUid, PlayerId)>,
    pub turn_number: u32,
    /// Whose turn it is; during setup, whose placement step it is.
    pub active_player: PlayerId,
    pub first_player: PlayerId,
    pub phase: Phase,
    pub pending: Option<Pending>,
    pub work: Vec<Task>,
    pub attack: Option<AttackInProgress>,
    pub result: Option<GameResult>,
    pub next_frame: u32,
    pub rng: ChaCha8Rng,
    #[serde(default)]
    pub action_log: Vec<LogEntry>,
}

impl GameState {
    /// Empty two-player state; used by setup and by tests that build
    /// positions by hand.
    pub fn blank(decks: [(&str, &[CardIdx]); 2], seed: u64, config: EngineConfig) -> Self {
        let mut cards = Vec::with_capacity(2 * DECK_SIZE);
        let players = [0usize, 1].map(|p| {
            let (deck_id, list) = decks[p];
            assert_eq!(list.len(), DECK_SIZE, "decks hold {DECK_SIZE} cards");
            let base = cards.len() as u16;
            cards.extend_from_slice(list);
            PlayerState {
                deck_id: deck_id.to_string(),
                registered: list.to_vec(),
                deck: (0..DECK_SIZE as u16).map(|i| CardUid(base + i)).collect(),
                hand: Vec::new(),
                discard: Vec::new(),
                prizes: Vec::new(),
                active: None,
                bench: Vec::new(),
                flags: TurnFlags::default(),
                mulligans: 0,
                setup_done: false,
                next_field_index: 0,
            }
        });
        GameState {
            config,
            cards,
            players,
            stadium: None,
            turn_number: 0,
            active_player: 0,
            first_player: 0,
            phase: Phase::Setup,
            pending: None,
            work: Vec::new(),
            attack: None,
            result: None,
            next_frame: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            action_log: Vec::new(),
        }
    }

    pub fn def<'p>(&self, pool: &'p CardPool, uid: CardUid) -> &'p CardDef {
        pool.get(self.cards[uid.0 as usize])
    }

    pub fn idx(&self, uid: CardUid) -> CardIdx {
        self.cards[uid.0 as usize]
    }

    pub fn player(&self, p: PlayerId) -> &PlayerState {
        &self.players[p]
    }

    pub fn player_mut(&mut self, p: PlayerId) -> &mut PlayerState {
        &mut self.players[p]
    }

    pub fn is_finished(&self) -> bool {
        self.phase == Phase::Finished
    }

    /// The player who must act next, if any.
    pub fn acting_player(&self) -> Option<PlayerId> {
        if self.phase == Phase::Finished {
            return None;
        }
        match &self.pending {
            Some(p) => Some(p.prompt.chooser),
            None => Some(self.active_player),
        }
    }

    pub fn pending_prompt(&self) -> Option<&ChoicePrompt> {
        self.pending.as_ref().map(|p| &p.prompt)
    }

    pub fn hp(&self, pool: &CardPool, mon: &PokemonInPlay) -> u32 {
        self.def(pool, mon.top()).hp
    }

    pub fn remaining_hp(&self, pool: &CardPool, mon: &PokemonInPlay) -> u32 {
        self.hp(pool, mon).saturating_sub(mon.damage_counters * 10)
    }

    /// Energy units attached to a Pokemon.
    pub fn energy_provided(&self, pool: &CardPool, mon: &PokemonInPlay) -> Vec<EnergyType> {
        mon.attached_energy
            .iter()
            .flat_map(|&e| self.def(pool, e).types.iter().copied())
            .collect()
    }

    pub(crate) fn log_event(&mut self, event: Event) {
        self.action_log.push(LogEntry::Event {
            turn: self.turn_number,
            event,
        });
    }
}

/// 64-bit digest of every state field except the action log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateDigest(pub u64);

impl std::fmt::Display for StateDigest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl std::str::FromStr for StateDigest {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        u64::from_str_radix(s, 16).map(StateDigest)
    }
}

#[derive(Serialize)]
struct HashView<'a> {
    config: &'a EngineConfig,
    cards: &'a [CardIdx],
    players: &'a [PlayerState; 2],
    stadium: &'a Option<(CardUid, PlayerId)>,
    turn_number: u32,
    active_player: PlayerId,
    first_player: PlayerId,
    phase: Phase,
    pending: &'a Option<Pending>,
    work: &'a [Task],
    attack: &'a Option<AttackInProgress>,
    result: &'a Option<GameResult>,
    next_frame: u32,
    rng: &'a ChaCha8Rng,
}

pub fn state_hash(state: &GameState) -> StateDigest {
    let view = HashView {
        config: &state.config,
        cards: &state.cards,
        players: &state.players,
        stadium: &state.stadium,
        turn_number: state.turn_number,
        active_player: state.active_player,
        first_player: state.first_player,
        phase: state.phase,
        pending: &state.pending,
        work: &state.work,
        attack: &state.attack,
        result: &state.result,
        next_frame: state.next_frame,
        rng: &state.rng,
    };
    let bytes = serde_json::to_vec(&view).expect("state serializes");
    let digest = Sha256::digest(&bytes);
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    StateDigest(u64::from_be_bytes(head))
}

/// Canonical snapshot text: JSON with struct-declaration field order.
pub fn snapshot_to_string(state: &GameState) -> String {
    serde_json::to_string(state).expect("state serializes")
}

pub fn snapshot_from_str(text: &str) -> Result<GameState, serde_json::Error> {
    serde_json::from_str(text)
}

/// Every uid a player owns appears exactly once across their zones, and the
/// definitions match the registered decklist.
pub fn card_conservation_check(state: &GameState) -> bool {
    for p in 0..2 {
        let ps = &state.players[p];
        let mut seen = [false; DECK_SIZE];
        let mut mark = |uid: CardUid| -> bool {
            if uid.owner() != p || uid.0 as usize >= state.cards.len() {
                return false;
            }
            let slot = uid.0 as usize - p * DECK_SIZE;
            !std::mem::replace(&mut seen[slot], true)
        };
        let zones = ps
            .deck
            .iter()
            .chain(&ps.hand)
            .chain(&ps.discard)
            .chain(&ps.prizes)
            .copied();
        for uid in zones {
            if !mark(uid) {
                return false;
            }
        }
        for mon in ps.in_play() {
            for uid in mon.all_cards() {
                if !mark(uid) {
                    return false;
                }
            }
        }
        if let Some((uid, owner)) = state.stadium {
            if owner == p && !mark(uid) {
                return false;
            }
        }
        if !seen.iter().all(|&s| s) {
            return false;
        }
        if ps.registered.len() != DECK_SIZE {
            return false;
        }
        let owned = &state.cards[p * DECK_SIZE..(p + 1) * DECK_SIZE];
        let mut a = owned.to_vec();
        let mut b = ps.registered.clone();
        a.sort();
        b.sort();
        if a != b {
            return false;
        }
    }
    true
}

/// Structural invariants beyond conservation: bench and prize bounds,
/// KO'd Pokemon never lingering, the phase/result pairing.
pub fn structural_violations(pool: &CardPool, state: &GameState) -> Vec<String> {
    let mut out = Vec::new();
    if state.result.is_some() != (state.phase == Phase::Finished) {
        out.push("result is set iff phase is finished".into());
    }
    if state.turn_number > state.config.turn_cap {
        out.push(format!("turn {} beyond cap", state.turn_number));
    }
    for (p, ps) in state.players.iter().enumerate() {
        if ps.bench.len() > BENCH_SIZE {
            out.push(format!("player {p} bench has {}", ps.bench.len()));
        }
        if ps.prizes.len() > PRIZE_COUNT {
            out.push(format!("player {p} has {} prizes", ps.prizes.len()));
        }
        if state.pending.is_none() && state.work.is_empty() {
            for mon in ps.in_play() {
                if mon.damage_counters * 10 >= state.hp(pool, mon) {
                    out.push(format!("player {p} Pokemon #{} should be knocked out", mon.field_index));
                }
            }
        }
        for mon in &ps.bench {
            if !mon.conditions.is_empty() {
                out.push(format!("benched #{} has special conditions", mon.field_index));
            }
        }
        for mon in ps.in_play() {
            for w in mon.stack.windows(2) {
                let lower = state.def(pool, w[0]);
                let upper = state.def(pool, w[1]);
                if upper.evolves_from.as_deref() != Some(lower.name.as_str()) {
                    out.push(format!("#{} stack breaks evolution chain", mon.field_index));
                }
            }
        }
    }
    if let Some(prompt) = &state.pending {
        let p = &prompt.prompt;
        if p.min_count > p.max_count || p.max_count > p.total_items() {
            out.push("prompt bounds are inconsistent".into());
        }
    }
    out
}
