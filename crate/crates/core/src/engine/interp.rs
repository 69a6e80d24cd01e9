//! Effect-program interpreter.
//!
//! A program runs op by op from a program counter. An op that needs a
//! decision returns a prompt; the whole program task is parked with the same
//! counter and re-entered with the picks. Multi-prompt ops keep their
//! intermediate picks in the task's `scratch` and sub-step in `stage`.

use crate::effect::{
    CardFilter, CountExpr, DiscardFrom, Duration, EffectOp, Selector, Side, Target, Zone,
};
use crate::events::Event;
use crate::pool::CardPool;
use crate::state::{
    opponent, Candidate, CandidateRef, CardUid, ChoicePrompt, Expiry, GameState, Modifier,
    PlayerId, PokemonInPlay, Visibility, BENCH_SIZE,
};

use super::prompt::{card_candidates, picked_cards, picked_refs, pokemon_candidate, prompt};
use super::work::{EffectCtx, Source, Step, Task};
use super::zones::{self, draw, flip, remove_from, shuffle_deck, zone, zone_mut, zone_name};

type Answer<'a> = Option<(&'a ChoicePrompt, &'a [u8])>;

enum Flow {
    Next,
    Ask(ChoicePrompt),
    Branch(Vec<EffectOp>),
    Stop,
}

struct OpState<'a> {
    ctx: &'a mut EffectCtx,
    stage: &'a mut u8,
    scratch: &'a mut Vec<CandidateRef>,
}

pub(crate) fn run_program(
    pool: &CardPool,
    st: &mut GameState,
    ops: Vec<EffectOp>,
    mut pc: u32,
    mut stage: u8,
    mut scratch: Vec<CandidateRef>,
    mut ctx: EffectCtx,
    mut answer: Answer<'_>,
) -> Step {
    while (pc as usize) < ops.len() {
        let op = &ops[pc as usize];
        let flow = {
            let mut os = OpState {
                ctx: &mut ctx,
                stage: &mut stage,
                scratch: &mut scratch,
            };
            exec_op(pool, st, op, &mut os, answer.take())
        };
        match flow {
            Flow::Next => {
                pc += 1;
                stage = 0;
                scratch.clear();
            }
            Flow::Ask(p) => {
                return Step::Ask(
                    p,
                    Task::Program {
                        ops,
                        pc,
                        stage,
                        scratch,
                        ctx,
                    },
                );
            }
            Flow::Branch(branch) => {
                let frame_ctx = ctx.clone();
                st.work.push(Task::Program {
                    ops,
                    pc: pc + 1,
                    stage: 0,
                    scratch: Vec::new(),
                    ctx,
                });
                if !branch.is_empty() {
                    st.work.push(Task::Program {
                        ops: branch,
                        pc: 0,
                        stage: 0,
                        scratch: Vec::new(),
                        ctx: frame_ctx,
                    });
                }
                return Step::Done;
            }
            Flow::Stop => {
                let frame = ctx.frame;
                while let Some(Task::Program { ctx: c, .. }) = st.work.last() {
                    if c.frame != frame {
                        break;
                    }
                    st.work.pop();
                }
                if ctx.is_attack {
                    if let Some(a) = st.attack.as_mut() {
                        if a.frame == frame {
                            a.cancelled = true;
                        }
                    }
                }
                return Step::Done;
            }
        }
    }
    Step::Done
}

fn source_pokemon<'s>(st: &'s GameState, ctx: &EffectCtx) -> Option<&'s PokemonInPlay> {
    match ctx.source {
        Source::Pokemon(fi) => st.players[ctx.controller].pokemon(fi),
        Source::Card(_) => None,
    }
}

fn matching(pool: &CardPool, st: &GameState, uids: &[CardUid], f: &CardFilter) -> Vec<CardUid> {
    uids.iter()
        .copied()
        .filter(|&u| f.matches(st.def(pool, u)))
        .collect()
}

/// Candidates drawn from a zone. Deck candidates are sorted by definition so
/// the prompt reveals nothing about deck order.
fn zone_candidates(
    pool: &CardPool,
    st: &GameState,
    p: PlayerId,
    z: Zone,
    f: &CardFilter,
) -> Vec<Candidate> {
    let mut uids = matching(pool, st, zone(st, p, z), f);
    if z == Zone::Deck {
        uids.sort_by_key(|&u| (st.idx(u), u));
    }
    card_candidates(pool, st, &uids)
}

enum Targets {
    Fixed(Vec<(PlayerId, u32)>),
    Choose(Vec<Candidate>),
}

fn targets(pool: &CardPool, st: &GameState, ctx: &EffectCtx, t: Target) -> Targets {
    let c = ctx.controller;
    let o = opponent(c);
    let all = |p: PlayerId| -> Vec<(PlayerId, u32)> {
        st.players[p].in_play().map(|m| (p, m.field_index)).collect()
    };
    let cands = |p: PlayerId, bench_only: bool| -> Vec<Candidate> {
        let ps = &st.players[p];
        let mons: Vec<&PokemonInPlay> = if bench_only {
            ps.bench.iter().collect()
        } else {
            ps.in_play().collect()
        };
        mons.into_iter()
            .map(|m| pokemon_candidate(pool, st, p, m))
            .collect()
    };
    match t {
        Target::SelfPokemon => Targets::Fixed(
            source_pokemon(st, ctx)
                .map(|m| vec![(c, m.field_index)])
                .unwrap_or_default(),
        ),
        Target::OwnActive => Targets::Fixed(
            st.players[c]
                .active
                .iter()
                .map(|m| (c, m.field_index))
                .collect(),
        ),
        Target::OppActive => Targets::Fixed(
            st.players[o]
                .active
                .iter()
                .map(|m| (o, m.field_index))
                .collect(),
        ),
        Target::AllOwn => Targets::Fixed(all(c)),
        Target::AllOppBench => Targets::Fixed(
            st.players[o]
                .bench
                .iter()
                .map(|m| (o, m.field_index))
                .collect(),
        ),
        Target::ChooseOwn => Targets::Choose(cands(c, false)),
        Target::ChooseOwnBench => Targets::Choose(cands(c, true)),
        Target::ChooseOpp => Targets::Choose(cands(o, false)),
        Target::ChooseOppBench => Targets::Choose(cands(o, true)),
    }
}

fn refs_to_pokemon(refs: &[CandidateRef]) -> Vec<(PlayerId, u32)> {
    refs.iter()
        .filter_map(|r| match *r {
            CandidateRef::Pokemon {
                player,
                field_index,
            } => Some((player, field_index)),
            CandidateRef::Card(_) => None,
        })
        .collect()
}

/// Resolves a target, prompting the controller when it is a choice.
fn resolve_targets(
    pool: &CardPool,
    st: &GameState,
    ctx: &EffectCtx,
    t: Target,
    answer: Answer<'_>,
) -> Result<Vec<(PlayerId, u32)>, ChoicePrompt> {
    match targets(pool, st, ctx, t) {
        Targets::Fixed(v) => Ok(v),
        Targets::Choose(cands) => match answer {
            Some((p, picks)) => Ok(refs_to_pokemon(&picked_refs(p, picks))),
            None if cands.is_empty() => Ok(Vec::new()),
            None => Err(prompt(
                ctx.controller,
                "choose-target",
                cands,
                1,
                1,
                Visibility::Public,
            )),
        },
    }
}

fn mon_name(pool: &CardPool, st: &GameState, m: &PokemonInPlay) -> String {
    st.def(pool, m.top()).name.clone()
}

pub(crate) fn place_damage(
    pool: &CardPool,
    st: &mut GameState,
    p: PlayerId,
    fi: u32,
    amount: u32,
) {
    let counters = amount / 10;
    if counters == 0 {
        return;
    }
    let Some(m) = st.players[p].pokemon(fi) else {
        return;
    };
    let name = mon_name(pool, st, m);
    st.players[p].pokemon_mut(fi).expect("present").damage_counters += counters;
    st.log_event(Event::Damage {
        player: p,
        field_index: fi,
        name,
        amount: counters * 10,
    });
}

fn move_cards(
    pool: &CardPool,
    st: &mut GameState,
    p: PlayerId,
    from: Zone,
    to: crate::effect::Destination,
    uids: &[CardUid],
) -> Vec<CardUid> {
    use crate::effect::Destination;
    let mut moved = Vec::new();
    for &u in uids {
        if !remove_from(zone_mut(st, p, from), u) {
            continue;
        }
        match to {
            Destination::Hand => st.players[p].hand.push(u),
            Destination::Deck => st.players[p].deck.insert(0, u),
            Destination::Discard => st.players[p].discard.push(u),
            Destination::Bench => {
                let fi = st.players[p].take_field_index();
                let turn = st.turn_number;
                st.players[p].bench.push(PokemonInPlay::new(u, turn, fi));
                let name = st.def(pool, u).name.clone();
                st.log_event(Event::PokemonPlaced {
                    player: p,
                    field_index: fi,
                    name,
                });
            }
        }
        moved.push(u);
    }
    if !moved.is_empty() {
        let to_name = match to {
            Destination::Hand => "hand",
            Destination::Deck => "deck",
            Destination::Discard => "discard",
            Destination::Bench => "bench",
        };
        let public = from == Zone::Discard
            || matches!(to, Destination::Discard | Destination::Bench);
        st.log_event(Event::CardsMoved {
            player: p,
            from: zone_name(from).into(),
            to: to_name.into(),
            count: moved.len() as u32,
            cards: public.then(|| zones::names(pool, st, &moved)),
        });
    }
    moved
}

fn count_expr(pool: &CardPool, st: &mut GameState, ctx: &EffectCtx, e: CountExpr) -> u32 {
    let c = ctx.controller;
    let o = opponent(c);
    let units = |st: &GameState, m: Option<&PokemonInPlay>| -> u32 {
        m.map_or(0, |m| st.energy_provided(pool, m).len() as u32)
    };
    match e {
        CountExpr::EnergyOnSelf => units(st, source_pokemon(st, ctx)),
        CountExpr::EnergyOnDefender => units(st, st.players[o].active.as_ref()),
        CountExpr::DamageCountersOnSelf => {
            source_pokemon(st, ctx).map_or(0, |m| m.damage_counters)
        }
        CountExpr::DamageCountersOnDefender => st.players[o]
            .active
            .as_ref()
            .map_or(0, |m| m.damage_counters),
        CountExpr::OpponentPrizesTaken => st.players[o].prizes_taken(),
        CountExpr::OwnPrizesTaken => st.players[c].prizes_taken(),
        CountExpr::OwnBench => st.players[c].bench.len() as u32,
        CountExpr::OpponentBench => st.players[o].bench.len() as u32,
        CountExpr::HandSize => st.players[c].hand.len() as u32,
        CountExpr::Stashed => ctx.stash.len() as u32,
        CountExpr::Heads { flips } => (0..flips).filter(|_| flip(st, c)).count() as u32,
    }
}

/// Cards a selector picks from `pool_uids`, or the prompt to ask for them.
fn select_cards(
    pool: &CardPool,
    st: &GameState,
    ctx: &EffectCtx,
    pool_uids: &[CardUid],
    sel: &Selector,
    reason: &str,
    visibility: Visibility,
    sort_for_privacy: bool,
    answer: Answer<'_>,
) -> Result<Vec<CardUid>, ChoicePrompt> {
    match sel {
        Selector::All { filter } => Ok(matching(pool, st, pool_uids, filter)),
        Selector::Top { count } => Ok(pool_uids
            .iter()
            .rev()
            .take(*count as usize)
            .copied()
            .collect()),
        Selector::Stashed => Ok(ctx
            .stash
            .iter()
            .copied()
            .filter(|u| pool_uids.contains(u))
            .collect()),
        Selector::Choose { min, max, filter } => {
            if let Some((p, picks)) = answer {
                return Ok(picked_cards(p, picks));
            }
            let mut uids = matching(pool, st, pool_uids, filter);
            if uids.is_empty() {
                return Ok(Vec::new());
            }
            if sort_for_privacy {
                uids.sort_by_key(|&u| (st.idx(u), u));
            }
            let cands = card_candidates(pool, st, &uids);
            Err(prompt(ctx.controller, reason, cands, *min, *max, visibility))
        }
    }
}

fn exec_op(
    pool: &CardPool,
    st: &mut GameState,
    op: &EffectOp,
    os: &mut OpState<'_>,
    answer: Answer<'_>,
) -> Flow {
    let c = os.ctx.controller;
    let o = opponent(c);
    match op {
        EffectOp::Draw { count } => {
            draw(st, c, *count);
            Flow::Next
        }
        EffectOp::DrawTo { hand_size } => {
            let have = st.players[c].hand.len() as u32;
            draw(st, c, hand_size.saturating_sub(have));
            Flow::Next
        }
        EffectOp::SearchZone {
            zone: z,
            filter,
            count,
            destination,
            reveal,
        } => {
            use crate::effect::Destination;
            let public = *z == Zone::Discard || *reveal || *destination == Destination::Bench;
            let picked = match answer {
                Some((p, picks)) => picked_cards(p, picks),
                None => {
                    let mut max = *count;
                    if *destination == Destination::Bench {
                        max = max.min((BENCH_SIZE - st.players[c].bench.len()) as u32);
                    }
                    let cands = zone_candidates(pool, st, c, *z, filter);
                    if cands.is_empty() || max == 0 {
                        Vec::new()
                    } else {
                        let reason = if *z == Zone::Deck {
                            "search-deck"
                        } else {
                            "search-discard"
                        };
                        let vis = if public {
                            Visibility::Public
                        } else {
                            Visibility::Private
                        };
                        return Flow::Ask(prompt(c, reason, cands, 0, max, vis));
                    }
                }
            };
            move_cards(pool, st, c, *z, *destination, &picked);
            if *z == Zone::Deck {
                shuffle_deck(st, c);
            }
            Flow::Next
        }
        EffectOp::MoveCards { from, to, selector } => {
            use crate::effect::Destination;
            let public = *from == Zone::Discard || *to == Destination::Discard;
            let vis = if public {
                Visibility::Public
            } else {
                Visibility::Private
            };
            let uids = zone(st, c, *from).clone();
            match select_cards(
                pool,
                st,
                os.ctx,
                &uids,
                selector,
                "move-cards",
                vis,
                *from == Zone::Deck,
                answer,
            ) {
                Ok(picked) => {
                    move_cards(pool, st, c, *from, *to, &picked);
                    Flow::Next
                }
                Err(p) => Flow::Ask(p),
            }
        }
        EffectOp::AttachEnergyFrom {
            zone: z,
            filter,
            count,
            target,
        } => {
            let mut answer = answer;
            if *os.stage == 0 {
                if zone_candidates(pool, st, c, *z, filter).is_empty() {
                    if *z == Zone::Deck {
                        shuffle_deck(st, c);
                    }
                    return Flow::Next;
                }
                match resolve_targets(pool, st, os.ctx, *target, answer.take()) {
                    Err(p) => return Flow::Ask(p),
                    Ok(ts) => {
                        let Some(&(p, fi)) = ts.first() else {
                            return Flow::Next;
                        };
                        os.scratch.clear();
                        os.scratch.push(CandidateRef::Pokemon {
                            player: p,
                            field_index: fi,
                        });
                        *os.stage = 1;
                    }
                }
            }
            let picked = match answer {
                Some((p, picks)) => picked_cards(p, picks),
                None => {
                    let cands = zone_candidates(pool, st, c, *z, filter);
                    let vis = if *z == Zone::Deck {
                        Visibility::Private
                    } else {
                        Visibility::Public
                    };
                    return Flow::Ask(prompt(c, "attach-energy", cands, 0, *count, vis));
                }
            };
            let Some(CandidateRef::Pokemon {
                player: tp,
                field_index: fi,
            }) = os.scratch.first().copied()
            else {
                return Flow::Next;
            };
            if st.players[tp].pokemon(fi).is_some() {
                for u in picked {
                    if remove_from(zone_mut(st, c, *z), u) {
                        let energy = st.def(pool, u).name.clone();
                        st.players[tp]
                            .pokemon_mut(fi)
                            .expect("checked")
                            .attached_energy
                            .push(u);
                        st.log_event(Event::EnergyAttached {
                            player: tp,
                            field_index: fi,
                            energy,
                        });
                    }
                }
            }
            if *z == Zone::Deck {
                shuffle_deck(st, c);
            }
            Flow::Next
        }
        EffectOp::Damage { amount, target } => {
            match resolve_targets(pool, st, os.ctx, *target, answer) {
                Err(p) => Flow::Ask(p),
                Ok(ts) => {
                    for (p, fi) in ts {
                        place_damage(pool, st, p, fi, *amount);
                    }
                    Flow::Next
                }
            }
        }
        EffectOp::DamagePerCount { unit, count } => {
            let n = count_expr(pool, st, os.ctx, *count);
            if let Some(a) = st.attack.as_mut() {
                a.damage += unit * n;
            }
            Flow::Next
        }
        EffectOp::Heal { amount, target } => {
            match resolve_targets(pool, st, os.ctx, *target, answer) {
                Err(p) => Flow::Ask(p),
                Ok(ts) => {
                    for (p, fi) in ts {
                        let Some(m) = st.players[p].pokemon(fi) else {
                            continue;
                        };
                        let healed = m.damage_counters.min(amount / 10);
                        if healed == 0 {
                            continue;
                        }
                        let name = mon_name(pool, st, m);
                        st.players[p].pokemon_mut(fi).expect("present").damage_counters -= healed;
                        st.log_event(Event::Heal {
                            player: p,
                            field_index: fi,
                            name,
                            amount: healed * 10,
                        });
                    }
                    Flow::Next
                }
            }
        }
        EffectOp::Discard { from, selector } => match from {
            DiscardFrom::Hand => {
                let hand = st.players[c].hand.clone();
                match select_cards(
                    pool,
                    st,
                    os.ctx,
                    &hand,
                    selector,
                    "discard-from-hand",
                    Visibility::Public,
                    false,
                    answer,
                ) {
                    Err(p) => Flow::Ask(p),
                    Ok(picked) => {
                        let moved = move_cards(
                            pool,
                            st,
                            c,
                            Zone::Hand,
                            crate::effect::Destination::Discard,
                            &picked,
                        );
                        os.ctx.stash = moved;
                        Flow::Next
                    }
                }
            }
            DiscardFrom::SelfEnergy => {
                let Some(m) = source_pokemon(st, os.ctx) else {
                    os.ctx.stash.clear();
                    return Flow::Next;
                };
                let fi = m.field_index;
                let energy = m.attached_energy.clone();
                match select_cards(
                    pool,
                    st,
                    os.ctx,
                    &energy,
                    selector,
                    "discard-energy",
                    Visibility::Public,
                    false,
                    answer,
                ) {
                    Err(p) => Flow::Ask(p),
                    Ok(picked) => {
                        let mut moved = Vec::new();
                        for u in picked {
                            let mon = st.players[c].pokemon_mut(fi).expect("present");
                            if remove_from(&mut mon.attached_energy, u) {
                                st.players[c].discard.push(u);
                                moved.push(u);
                            }
                        }
                        if !moved.is_empty() {
                            st.log_event(Event::CardsMoved {
                                player: c,
                                from: "in_play".into(),
                                to: "discard".into(),
                                count: moved.len() as u32,
                                cards: Some(zones::names(pool, st, &moved)),
                            });
                        }
                        os.ctx.stash = moved;
                        Flow::Next
                    }
                }
            }
        },
        EffectOp::ApplyCondition { condition, target } => {
            match resolve_targets(pool, st, os.ctx, *target, answer) {
                Err(p) => Flow::Ask(p),
                Ok(ts) => {
                    for (p, fi) in ts {
                        let ps = &mut st.players[p];
                        let Some(active) = ps.active.as_mut() else {
                            continue;
                        };
                        if active.field_index != fi {
                            continue;
                        }
                        active.conditions.apply(*condition);
                        st.log_event(Event::ConditionApplied {
                            player: p,
                            field_index: fi,
                            condition: *condition,
                        });
                    }
                    Flow::Next
                }
            }
        }
        EffectOp::SwitchActive { side } => {
            let s = match side {
                Side::Own => c,
                Side::Opponent => o,
            };
            let fi = match answer {
                Some((p, picks)) => match refs_to_pokemon(&picked_refs(p, picks)).first() {
                    Some(&(_, fi)) => fi,
                    None => return Flow::Next,
                },
                None => {
                    let cands: Vec<Candidate> = st.players[s]
                        .bench
                        .iter()
                        .map(|m| pokemon_candidate(pool, st, s, m))
                        .collect();
                    if cands.is_empty() {
                        return Flow::Next;
                    }
                    return Flow::Ask(prompt(c, "switch-active", cands, 1, 1, Visibility::Public));
                }
            };
            switch_in(pool, st, s, fi);
            Flow::Next
        }
        EffectOp::Shuffle { zone: z } => {
            if *z == Zone::Deck {
                shuffle_deck(st, c);
            }
            Flow::Next
        }
        EffectOp::CoinFlip { then, otherwise } => {
            if flip(st, c) {
                Flow::Branch(then.clone())
            } else {
                Flow::Branch(otherwise.clone())
            }
        }
        EffectOp::ModifyDamage {
            mode,
            delta,
            duration,
            target,
        } => {
            let expires = match duration {
                Duration::ThisTurn => Expiry::EndOfTurn(st.turn_number),
                Duration::UntilEndOfOpponentTurn => Expiry::EndOfTurn(st.turn_number + 1),
                Duration::WhileAttached => match os.ctx.tool {
                    Some(t) => Expiry::WhileAttached(t),
                    None => return Flow::Next,
                },
            };
            match resolve_targets(pool, st, os.ctx, *target, answer) {
                Err(p) => Flow::Ask(p),
                Ok(ts) => {
                    for (p, fi) in ts {
                        if let Some(m) = st.players[p].pokemon_mut(fi) {
                            m.modifiers.push(Modifier {
                                mode: *mode,
                                delta: *delta,
                                expires,
                            });
                        }
                    }
                    Flow::Next
                }
            }
        }
        EffectOp::RequireChoice {
            zone: z,
            filter,
            min,
            max,
            reason,
        } => match answer {
            Some((p, picks)) => {
                os.ctx.stash = picked_cards(p, picks);
                Flow::Next
            }
            None => {
                let cands = zone_candidates(pool, st, c, *z, filter);
                if cands.is_empty() {
                    os.ctx.stash.clear();
                    return Flow::Next;
                }
                let vis = if *z == Zone::Discard {
                    Visibility::Public
                } else {
                    Visibility::Private
                };
                let reason = if reason.is_empty() {
                    "require-choice"
                } else {
                    reason.as_str()
                };
                Flow::Ask(prompt(c, reason, cands, *min, *max, vis))
            }
        },
        EffectOp::EndEffect => Flow::Stop,
    }
}

/// Moves benched Pokemon `fi` of player `s` into the Active spot.
pub(crate) fn switch_in(pool: &CardPool, st: &mut GameState, s: PlayerId, fi: u32) {
    let ps = &mut st.players[s];
    let Some(i) = ps.bench.iter().position(|m| m.field_index == fi) else {
        return;
    };
    let incoming = ps.bench.remove(i);
    if let Some(mut old) = ps.active.take() {
        old.clear_on_bench();
        ps.bench.insert(i, old);
    }
    ps.active = Some(incoming);
    let name = mon_name(pool, st, st.players[s].active.as_ref().expect("set"));
    st.log_event(Event::Switched {
        player: s,
        field_index: fi,
        name,
    });
}

/// Whether playing a Trainer or using an Ability would do anything: choice
/// costs must be payable and switch targets must exist. `leaving` is the
/// card that goes to the discard pile before the effect runs.
pub(crate) fn program_playable(
    pool: &CardPool,
    st: &GameState,
    p: PlayerId,
    ops: &[EffectOp],
    leaving: Option<CardUid>,
) -> bool {
    let o = opponent(p);
    let hand: Vec<CardUid> = st.players[p]
        .hand
        .iter()
        .copied()
        .filter(|&u| Some(u) != leaving)
        .collect();
    let count_in = |uids: &[CardUid], f: &CardFilter| matching(pool, st, uids, f).len() as u32;
    for op in ops {
        let ok = match op {
            EffectOp::RequireChoice {
                zone: z,
                filter,
                min,
                ..
            } => {
                let uids = if *z == Zone::Hand {
                    hand.clone()
                } else {
                    zone(st, p, *z).clone()
                };
                count_in(&uids, filter) >= *min
            }
            EffectOp::Discard {
                from: DiscardFrom::Hand,
                selector: Selector::Choose { min, filter, .. },
            } => count_in(&hand, filter) >= *min,
            EffectOp::SwitchActive { side } => {
                let s = if *side == Side::Own { p } else { o };
                !st.players[s].bench.is_empty()
            }
            EffectOp::SearchZone {
                zone: Zone::Discard,
                filter,
                ..
            }
            | EffectOp::AttachEnergyFrom {
                zone: Zone::Discard,
                filter,
                ..
            } => count_in(&st.players[p].discard, filter) > 0,
            EffectOp::SearchZone {
                destination: crate::effect::Destination::Bench,
                ..
            } => st.players[p].bench.len() < BENCH_SIZE,
            _ => true,
        };
        if !ok {
            return false;
        }
    }
    true
}
