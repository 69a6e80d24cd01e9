//! Attack damage, Knock Outs, prizes, win checks and the turn cycle.

use crate::effect::ModifyMode;
use crate::events::Event;
use crate::pool::CardPool;
use crate::state::{
    opponent, CandidateRef, ChoicePrompt, Expiry, GameResult, GameState, Phase, PlayerId,
    Rotation, SelectionConstraint, Visibility, WinReason,
};

use super::interp::{place_damage, switch_in};
use super::prompt::{card_candidates, picked_cards, picked_refs, pokemon_candidate, prize_candidates, prompt};
use super::work::{Step, Task};
use super::zones::{draw, finish, flip};

type Answer<'a> = Option<(&'a ChoicePrompt, &'a [u8])>;

/// Final damage an attack deals to the defending Active.
pub fn attack_damage(pool: &CardPool, st: &GameState) -> Option<u32> {
    let atk = st.attack.as_ref()?;
    if atk.cancelled || atk.damage == 0 {
        return None;
    }
    let defender = st.players[opponent(atk.attacker)].active.as_ref()?;
    let def = st.def(pool, defender.top());
    let dealt = st.players[atk.attacker]
        .pokemon(atk.attacker_field_index)
        .map_or(0, |m| m.modifier_total(ModifyMode::Dealt));
    let mut dmg = (atk.damage as i64 + dealt as i64).max(0);
    if def.weakness.is_some_and(|w| atk.attacker_types.contains(&w)) {
        dmg *= st.config.weakness_multiplier as i64;
    }
    if def.resistance.is_some_and(|r| atk.attacker_types.contains(&r)) {
        dmg -= st.config.resistance_reduction as i64;
    }
    dmg += defender.modifier_total(ModifyMode::Taken) as i64;
    Some(dmg.max(0) as u32)
}

pub(crate) fn attack_damage_task(pool: &CardPool, st: &mut GameState) -> Step {
    if let Some(dmg) = attack_damage(pool, st) {
        let o = opponent(st.attack.as_ref().expect("checked").attacker);
        let fi = st.players[o].active.as_ref().expect("checked").field_index;
        place_damage(pool, st, o, fi, dmg);
    }
    Step::Done
}

/// Removes every Pokemon whose damage reaches its HP and schedules prize
/// taking, the win check and promotions, in that order.
pub(crate) fn resolve_knockouts(pool: &CardPool, st: &mut GameState) -> Step {
    let cur = st.active_player;
    let mut prizes = [0u32; 2];
    let mut any = false;
    for p in [cur, opponent(cur)] {
        let knocked: Vec<u32> = st.players[p]
            .in_play()
            .filter(|m| m.damage_counters * 10 >= st.hp(pool, m))
            .map(|m| m.field_index)
            .collect();
        for fi in knocked {
            any = true;
            let ps = &mut st.players[p];
            let mon = if ps.active.as_ref().is_some_and(|m| m.field_index == fi) {
                ps.active.take().expect("checked")
            } else {
                let i = ps
                    .bench
                    .iter()
                    .position(|m| m.field_index == fi)
                    .expect("listed");
                ps.bench.remove(i)
            };
            let top = st.def(pool, mon.top());
            let name = top.name.clone();
            prizes[opponent(p)] += top.prize_value;
            st.players[p].discard.extend(mon.all_cards());
            st.log_event(Event::KnockOut {
                player: p,
                field_index: fi,
                name,
            });
        }
    }
    if !any {
        return Step::Done;
    }
    st.work.push(Task::Promote { player: cur });
    st.work.push(Task::Promote {
        player: opponent(cur),
    });
    st.work.push(Task::CheckWin);
    for p in [opponent(cur), cur] {
        if prizes[p] > 0 {
            st.work.push(Task::TakePrizes {
                player: p,
                count: prizes[p],
            });
        }
    }
    Step::Done
}

pub(crate) fn take_prizes(
    st: &mut GameState,
    player: PlayerId,
    count: u32,
    answer: Answer<'_>,
) -> Step {
    let n = (count as usize).min(st.players[player].prizes.len()) as u32;
    if n == 0 {
        return Step::Done;
    }
    let Some((p, picks)) = answer else {
        let cands = prize_candidates(st, player);
        return Step::Ask(
            prompt(player, "prize-take", cands, n, n, Visibility::Private),
            Task::TakePrizes { player, count },
        );
    };
    let taken = picked_cards(p, picks);
    let ps = &mut st.players[player];
    ps.prizes.retain(|u| !taken.contains(u));
    ps.hand.extend(taken.iter().copied());
    st.log_event(Event::PrizesTaken {
        player,
        count: taken.len() as u32,
    });
    Step::Done
}

pub(crate) fn promote(pool: &CardPool, st: &mut GameState, player: PlayerId, answer: Answer<'_>) -> Step {
    let ps = &st.players[player];
    if ps.active.is_some() || ps.bench.is_empty() {
        return Step::Done;
    }
    let Some((p, picks)) = answer else {
        let cands = ps
            .bench
            .iter()
            .map(|m| pokemon_candidate(pool, st, player, m))
            .collect();
        return Step::Ask(
            prompt(player, "promote", cands, 1, 1, Visibility::Public),
            Task::Promote { player },
        );
    };
    if let Some(CandidateRef::Pokemon { field_index, .. }) = picked_refs(p, picks).first().copied() {
        switch_in(pool, st, player, field_index);
    }
    Step::Done
}

/// The game result implied by the board: all prizes taken, or a player
/// with no Pokemon in play. Both at once is a draw. Deck-out and the turn
/// cap are decided at turn start and are returned once recorded.
pub fn check_win(st: &GameState) -> Option<GameResult> {
    if st.result.is_some() {
        return st.result;
    }
    if st.phase == Phase::Setup {
        return None;
    }
    let prizes_done = |p: PlayerId| st.players[p].prizes.is_empty();
    let wiped = |p: PlayerId| !st.players[p].has_pokemon_in_play();
    let wins = [0, 1].map(|p| prizes_done(p) || wiped(opponent(p)));
    let reason = |p: PlayerId| {
        if prizes_done(p) {
            WinReason::AllPrizes
        } else {
            WinReason::NoPokemon
        }
    };
    match wins {
        [true, true] => Some(GameResult {
            winner: None,
            reason: if prizes_done(0) || prizes_done(1) {
                WinReason::AllPrizes
            } else {
                WinReason::NoPokemon
            },
        }),
        [true, false] => Some(GameResult {
            winner: Some(0),
            reason: reason(0),
        }),
        [false, true] => Some(GameResult {
            winner: Some(1),
            reason: reason(1),
        }),
        [false, false] => None,
    }
}

pub(crate) fn check_win_task(st: &mut GameState) -> Step {
    if let Some(r) = check_win(st) {
        finish(st, r.winner, r.reason);
    }
    Step::Done
}

pub(crate) fn retreat(pool: &CardPool, st: &mut GameState, player: PlayerId, stage: u8, answer: Answer<'_>) -> Step {
    let mut answer = answer;
    if stage == 0 {
        let Some(active) = st.players[player].active.as_ref() else {
            return Step::Done;
        };
        let cost = st.def(pool, active.top()).retreat_cost;
        if cost > 0 {
            match answer.take() {
                None => {
                    let cands = card_candidates(pool, st, &active.attached_energy);
                    let mut p = prompt(
                        player,
                        "retreat-energy",
                        cands,
                        1,
                        active.attached_energy.len() as u32,
                        Visibility::Public,
                    );
                    p.constraint = Some(SelectionConstraint::ExactCover { units: cost });
                    return Step::Ask(p, Task::Retreat { player, stage });
                }
                Some((p, picks)) => {
                    let paid = picked_cards(p, picks);
                    let ps = &mut st.players[player];
                    let active = ps.active.as_mut().expect("checked");
                    active.attached_energy.retain(|u| !paid.contains(u));
                    ps.discard.extend(paid.iter().copied());
                    let names = super::zones::names(pool, st, &paid);
                    st.log_event(Event::CardsMoved {
                        player,
                        from: "in_play".into(),
                        to: "discard".into(),
                        count: paid.len() as u32,
                        cards: Some(names),
                    });
                }
            }
        }
    }
    match answer {
        None => {
            let ps = &st.players[player];
            let cands: Vec<_> = ps
                .bench
                .iter()
                .map(|m| pokemon_candidate(pool, st, player, m))
                .collect();
            if cands.is_empty() {
                return Step::Done;
            }
            Step::Ask(
                prompt(player, "retreat-switch", cands, 1, 1, Visibility::Public),
                Task::Retreat { player, stage: 1 },
            )
        }
        Some((p, picks)) => {
            if let Some(CandidateRef::Pokemon { field_index, .. }) = picked_refs(p, picks).first().copied() {
                switch_in(pool, st, player, field_index);
            }
            Step::Done
        }
    }
}

/// Special-condition upkeep between turns: Poison, Burn and Sleep checks
/// on both Active Pokemon, then Paralysis ends for the player whose turn
/// just ended.
pub fn between_turns_upkeep(pool: &CardPool, st: &mut GameState) {
    let cur = st.active_player;
    for p in [cur, opponent(cur)] {
        let Some(active) = st.players[p].active.as_ref() else {
            continue;
        };
        let fi = active.field_index;
        let cond = active.conditions;
        if cond.poisoned {
            add_counters(pool, st, p, fi, 1);
        }
        if cond.burned {
            add_counters(pool, st, p, fi, 2);
            if flip(st, p) {
                remove_condition(st, p, crate::effect::Condition::Burned);
            }
        }
        if cond.rotation == Some(Rotation::Asleep) && flip(st, p) {
            remove_condition(st, p, crate::effect::Condition::Asleep);
        }
    }
    if st.players[cur]
        .active
        .as_ref()
        .is_some_and(|m| m.conditions.rotation == Some(Rotation::Paralyzed))
    {
        remove_condition(st, cur, crate::effect::Condition::Paralyzed);
    }
}

fn add_counters(pool: &CardPool, st: &mut GameState, p: PlayerId, fi: u32, n: u32) {
    place_damage(pool, st, p, fi, n * 10);
}

fn remove_condition(st: &mut GameState, p: PlayerId, c: crate::effect::Condition) {
    let active = st.players[p].active.as_mut().expect("active present");
    let fi = active.field_index;
    match c {
        crate::effect::Condition::Poisoned => active.conditions.poisoned = false,
        crate::effect::Condition::Burned => active.conditions.burned = false,
        _ => active.conditions.rotation = None,
    }
    st.log_event(Event::ConditionRemoved {
        player: p,
        field_index: fi,
        condition: c,
    });
}

pub(crate) fn end_turn(pool: &CardPool, st: &mut GameState) -> Step {
    st.attack = None;
    st.phase = Phase::BetweenTurns;
    between_turns_upkeep(pool, st);
    let t = st.turn_number;
    for ps in st.players.iter_mut() {
        for m in ps.in_play_mut() {
            m.modifiers
                .retain(|x| !matches!(x.expires, Expiry::EndOfTurn(e) if e <= t));
        }
    }
    let next = opponent(st.active_player);
    st.work.push(Task::StartTurn { player: next });
    st.work.push(Task::ResolveKnockouts);
    Step::Done
}

pub(crate) fn start_turn(st: &mut GameState, player: PlayerId) -> Step {
    if st.turn_number >= st.config.turn_cap {
        finish(st, None, WinReason::TurnCap);
        return Step::Done;
    }
    st.turn_number += 1;
    st.active_player = player;
    st.phase = Phase::TurnMain;
    for ps in st.players.iter_mut() {
        ps.flags = Default::default();
        for m in ps.in_play_mut() {
            m.evolved_this_turn = false;
            m.ability_used = false;
        }
    }
    st.log_event(Event::TurnStart {
        player,
        turn: st.turn_number,
    });
    if st.players[player].deck.is_empty() {
        super::zones::deck_out(st, player);
        return Step::Done;
    }
    draw(st, player, 1);
    Step::Done
}
