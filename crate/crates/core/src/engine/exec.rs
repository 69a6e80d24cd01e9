//! Executes accepted actions and dispatches work-stack tasks.

use crate::action::{Action, Position};
use crate::effect::EffectOp;
use crate::events::Event;
use crate::pool::CardPool;
use crate::state::{
    AttackInProgress, ChoicePrompt, Expiry, GameState, Phase, PlayerId, PokemonInPlay,
};

use super::interp::{place_damage, run_program};
use super::setup::finish_placement;
use super::turn;
use super::work::{EffectCtx, Source, Step, Task};
use super::zones::{flip, names, take_from_hand};

type Answer<'a> = Option<(&'a ChoicePrompt, &'a [u8])>;

/// Runs one task, optionally with the answer to the prompt it raised.
pub(crate) fn step(pool: &CardPool, st: &mut GameState, task: Task, answer: Answer<'_>) -> Step {
    match task {
        Task::Program {
            ops,
            pc,
            stage,
            scratch,
            ctx,
        } => run_program(pool, st, ops, pc, stage, scratch, ctx, answer),
        Task::AttackDamage => turn::attack_damage_task(pool, st),
        Task::ResolveKnockouts => turn::resolve_knockouts(pool, st),
        Task::TakePrizes { player, count } => turn::take_prizes(st, player, count, answer),
        Task::Promote { player } => turn::promote(pool, st, player, answer),
        Task::CheckWin => turn::check_win_task(st),
        Task::Retreat { player, stage } => turn::retreat(pool, st, player, stage, answer),
        Task::EndTurn => turn::end_turn(pool, st),
        Task::StartTurn { player } => turn::start_turn(st, player),
    }
}

fn new_frame(st: &mut GameState) -> u32 {
    st.next_frame += 1;
    st.next_frame
}

fn push_program(
    st: &mut GameState,
    ops: &[EffectOp],
    controller: PlayerId,
    source: Source,
    tool: Option<crate::state::CardUid>,
    is_attack: bool,
) -> u32 {
    let frame = new_frame(st);
    if !ops.is_empty() {
        st.work.push(Task::Program {
            ops: ops.to_vec(),
            pc: 0,
            stage: 0,
            scratch: Vec::new(),
            ctx: EffectCtx {
                frame,
                controller,
                source,
                stash: Vec::new(),
                tool,
                is_attack,
            },
        });
    }
    frame
}

/// Applies a legal, non-choice action for the active player. The driver
/// runs the scheduled work afterwards.
pub(crate) fn execute(pool: &CardPool, st: &mut GameState, a: &Action) {
    let p = st.active_player;
    match *a {
        Action::PlayPokemon { card, position } => {
            let uid = take_from_hand(st, p, card);
            let turn = st.turn_number;
            let ps = &mut st.players[p];
            let fi = ps.take_field_index();
            let mon = PokemonInPlay::new(uid, turn, fi);
            match position {
                Position::Active => ps.active = Some(mon),
                Position::Bench => ps.bench.push(mon),
            }
            if st.phase != Phase::Setup {
                let name = pool.get(card).name.clone();
                st.log_event(Event::PokemonPlaced {
                    player: p,
                    field_index: fi,
                    name,
                });
            }
        }
        Action::Evolve { card, target } => {
            let uid = take_from_hand(st, p, card);
            let below = st.players[p].pokemon(target).expect("legal target").top();
            let from = st.def(pool, below).name.clone();
            let mon = st.players[p].pokemon_mut(target).expect("legal target");
            mon.stack.push(uid);
            mon.evolved_this_turn = true;
            mon.ability_used = false;
            mon.conditions = Default::default();
            mon.modifiers
                .retain(|m| matches!(m.expires, Expiry::WhileAttached(_)));
            st.log_event(Event::Evolved {
                player: p,
                field_index: target,
                from,
                to: pool.get(card).name.clone(),
            });
        }
        Action::AttachEnergy { card, target } => {
            let uid = take_from_hand(st, p, card);
            let ps = &mut st.players[p];
            ps.flags.energy_attached = true;
            ps.pokemon_mut(target)
                .expect("legal target")
                .attached_energy
                .push(uid);
            st.log_event(Event::EnergyAttached {
                player: p,
                field_index: target,
                energy: pool.get(card).name.clone(),
            });
        }
        Action::UseSupporter { card } | Action::UseItem { card } => {
            let uid = take_from_hand(st, p, card);
            st.players[p].discard.push(uid);
            if matches!(a, Action::UseSupporter { .. }) {
                st.players[p].flags.supporter_played = true;
            }
            st.work.push(Task::ResolveKnockouts);
            if let Some(e) = &pool.get(card).effect {
                push_program(st, e.ops(), p, Source::Card(uid), None, false);
            }
        }
        Action::UseTool { card, target } => {
            let uid = take_from_hand(st, p, card);
            st.players[p]
                .pokemon_mut(target)
                .expect("legal target")
                .attached_tool = Some(uid);
            st.log_event(Event::CardsMoved {
                player: p,
                from: "hand".into(),
                to: "in_play".into(),
                count: 1,
                cards: Some(vec![pool.get(card).name.clone()]),
            });
            if let Some(e) = &pool.get(card).effect {
                push_program(st, e.ops(), p, Source::Pokemon(target), Some(uid), false);
            }
        }
        Action::PutStadium { card } => {
            let uid = take_from_hand(st, p, card);
            discard_stadium(pool, st);
            st.stadium = Some((uid, p));
            st.players[p].flags.stadium_played = true;
            st.log_event(Event::CardsMoved {
                player: p,
                from: "hand".into(),
                to: "stadium".into(),
                count: 1,
                cards: Some(vec![pool.get(card).name.clone()]),
            });
        }
        Action::DiscardStadium => {
            st.players[p].flags.stadium_discarded = true;
            discard_stadium(pool, st);
        }
        Action::UseStadium => {
            let (uid, _) = st.stadium.expect("legal stadium use");
            st.players[p].flags.stadium_used = true;
            st.work.push(Task::ResolveKnockouts);
            if let Some(e) = &st.def(pool, uid).effect {
                push_program(st, e.ops(), p, Source::Card(uid), None, false);
            }
        }
        Action::UseAbility { source } => {
            let mon = st.players[p].pokemon_mut(source).expect("legal source");
            mon.ability_used = true;
            let top = mon.top();
            st.work.push(Task::ResolveKnockouts);
            if let Some(ab) = &st.def(pool, top).ability {
                push_program(st, ab.effect.ops(), p, Source::Pokemon(source), None, false);
            }
        }
        Action::Retreat => {
            st.players[p].flags.retreated = true;
            st.work.push(Task::Retreat {
                player: p,
                stage: 0,
            });
        }
        Action::Attack { attack } => attack_with(pool, st, p, attack as usize),
        Action::PassTurn if st.phase == Phase::Setup => finish_placement(pool, st),
        Action::PassTurn => st.work.push(Task::EndTurn),
        Action::Choose { .. } => unreachable!("choices resume the pending task"),
    }
}

fn discard_stadium(pool: &CardPool, st: &mut GameState) {
    if let Some((uid, owner)) = st.stadium.take() {
        st.players[owner].discard.push(uid);
        let cards = Some(names(pool, st, &[uid]));
        st.log_event(Event::CardsMoved {
            player: owner,
            from: "stadium".into(),
            to: "discard".into(),
            count: 1,
            cards,
        });
    }
}

fn attack_with(pool: &CardPool, st: &mut GameState, p: PlayerId, attack: usize) {
    let active = st.players[p].active.as_ref().expect("legal attack");
    let fi = active.field_index;
    let confused = active.conditions.rotation == Some(crate::state::Rotation::Confused);
    let def = st.def(pool, active.top());
    let atk = &def.attacks[attack];
    st.work.push(Task::EndTurn);
    st.work.push(Task::ResolveKnockouts);
    if confused && !flip(st, p) {
        place_damage(pool, st, p, fi, 30);
        return;
    }
    let frame = new_frame(st);
    st.attack = Some(AttackInProgress {
        frame,
        attacker: p,
        attacker_field_index: fi,
        attacker_types: def.types.clone(),
        damage: atk.base_damage,
        cancelled: false,
    });
    st.work.push(Task::AttackDamage);
    if let Some(e) = &atk.effect {
        st.work.push(Task::Program {
            ops: e.ops().to_vec(),
            pc: 0,
            stage: 0,
            scratch: Vec::new(),
            ctx: EffectCtx {
                frame,
                controller: p,
                source: Source::Pokemon(fi),
                stash: Vec::new(),
                tool: None,
                is_attack: true,
            },
        });
    }
}
