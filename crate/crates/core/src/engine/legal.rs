//! Legal-action generation, request parsing and rule explanations.

use serde_json::Value;

use crate::action::{tools, Action, ActionRequest, Position, RejectKind, Rejection};
use crate::card::{cost_satisfied, CardIdx, Subkind};
use crate::pool::CardPool;
use crate::state::{GameState, Phase, PlayerId, PokemonInPlay, BENCH_SIZE};

use super::interp::program_playable;
use super::prompt::{enumerate_selections, is_valid_selection, selection_labels};
use super::zones::hand_copy;

/// Distinct definitions in a hand, in order of first appearance.
fn distinct_hand(st: &GameState, p: PlayerId) -> Vec<CardIdx> {
    let mut out: Vec<CardIdx> = Vec::new();
    for &u in &st.players[p].hand {
        let i = st.idx(u);
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

fn field_indices(st: &GameState, p: PlayerId) -> Vec<u32> {
    st.players[p].in_play().map(|m| m.field_index).collect()
}

/// Every instantiation worth checking for the acting player.
fn candidates(pool: &CardPool, st: &GameState) -> Vec<Action> {
    let mut out = Vec::new();
    if let Some(p) = st.pending_prompt() {
        return enumerate_selections(p, None)
            .into_iter()
            .map(|picks| Action::Choose { picks })
            .collect();
    }
    let p = st.active_player;
    let hand = distinct_hand(st, p);
    if st.phase == Phase::Setup {
        for &c in &hand {
            out.push(Action::PlayPokemon {
                card: c,
                position: Position::Active,
            });
            out.push(Action::PlayPokemon {
                card: c,
                position: Position::Bench,
            });
        }
        out.push(Action::PassTurn);
        return out;
    }
    let fields = field_indices(st, p);
    for &c in &hand {
        match pool.get(c).subkind {
            Subkind::Basic => out.push(Action::PlayPokemon {
                card: c,
                position: Position::Bench,
            }),
            Subkind::Stage1 | Subkind::Stage2 => {
                out.extend(fields.iter().map(|&t| Action::Evolve { card: c, target: t }))
            }
            Subkind::BasicEnergy | Subkind::SpecialEnergy => out.extend(
                fields
                    .iter()
                    .map(|&t| Action::AttachEnergy { card: c, target: t }),
            ),
            Subkind::Supporter => out.push(Action::UseSupporter { card: c }),
            Subkind::Item => out.push(Action::UseItem { card: c }),
            Subkind::Tool => {
                out.extend(fields.iter().map(|&t| Action::UseTool { card: c, target: t }))
            }
            Subkind::Stadium => out.push(Action::PutStadium { card: c }),
        }
    }
    out.push(Action::DiscardStadium);
    out.push(Action::UseStadium);
    out.extend(fields.iter().map(|&s| Action::UseAbility { source: s }));
    out.push(Action::Retreat);
    if let Some(a) = &st.players[p].active {
        let n = st.def(pool, a.top()).attacks.len();
        out.extend((0..n).map(|i| Action::Attack { attack: i as u8 }));
    }
    out.push(Action::PassTurn);
    out
}

/// The typed legal set for the acting player.
pub fn legal_actions(pool: &CardPool, st: &GameState) -> Vec<Action> {
    if st.phase == Phase::Finished || st.phase == Phase::BetweenTurns && st.pending.is_none() {
        return Vec::new();
    }
    candidates(pool, st)
        .into_iter()
        .filter(|a| check(pool, st, a).is_ok())
        .collect()
}

/// The legal set as fully instantiated tool calls.
pub fn legal_requests(pool: &CardPool, st: &GameState) -> Vec<ActionRequest> {
    legal_actions(pool, st)
        .iter()
        .map(|a| describe(pool, st, a))
        .collect()
}

fn is_first_turn_of_first_player(st: &GameState) -> bool {
    st.turn_number == 1 && st.active_player == st.first_player
}

/// Whether `a` is allowed now; the error names the violated rule.
pub(crate) fn check(pool: &CardPool, st: &GameState, a: &Action) -> Result<(), String> {
    if st.phase == Phase::Finished {
        return Err("the game is over".into());
    }
    if let Some(prompt) = st.pending_prompt() {
        return match a {
            Action::Choose { picks } if is_valid_selection(prompt, picks) => Ok(()),
            Action::Choose { .. } => Err(format!(
                "choose between {} and {} card(s) from the listed candidates",
                prompt.min_count, prompt.max_count
            )),
            _ => Err("a card choice is pending; answer it with choose_card".into()),
        };
    }
    if matches!(a, Action::Choose { .. }) {
        return Err("no card choice is pending".into());
    }
    let p = st.active_player;
    let ps = &st.players[p];
    let in_hand = |c: CardIdx| -> Result<(), String> {
        if hand_copy(st, p, c).is_some() {
            Ok(())
        } else {
            Err(format!("{} is not in your hand", pool.get(c).name))
        }
    };
    let target = |fi: u32| -> Result<&PokemonInPlay, String> {
        ps.pokemon(fi)
            .ok_or_else(|| format!("no Pokemon #{fi} in play"))
    };
    if st.phase == Phase::Setup {
        return match a {
            Action::PlayPokemon { card, position } => {
                in_hand(*card)?;
                if !pool.get(*card).is_basic_pokemon() {
                    return Err("only Basic Pokemon can be placed during setup".into());
                }
                match position {
                    Position::Active if ps.active.is_some() => {
                        Err("the Active spot is already filled".into())
                    }
                    Position::Bench if ps.active.is_none() => {
                        Err("choose an Active Pokemon first".into())
                    }
                    Position::Bench if ps.bench.len() >= BENCH_SIZE => {
                        Err("the Bench is full".into())
                    }
                    _ => Ok(()),
                }
            }
            Action::PassTurn if ps.active.is_none() => Err("choose an Active Pokemon first".into()),
            Action::PassTurn => Ok(()),
            _ => Err("only play_pokemon and pass_turn are allowed during setup".into()),
        };
    }
    match a {
        Action::PlayPokemon { card, position } => {
            in_hand(*card)?;
            if !pool.get(*card).is_basic_pokemon() {
                return Err("only Basic Pokemon can be played".into());
            }
            if *position == Position::Active {
                return Err("Basic Pokemon go to the Bench during a turn".into());
            }
            if ps.bench.len() >= BENCH_SIZE {
                return Err("the Bench is full".into());
            }
            Ok(())
        }
        Action::Evolve { card, target: t } => {
            in_hand(*card)?;
            let def = pool.get(*card);
            if !matches!(def.subkind, Subkind::Stage1 | Subkind::Stage2) {
                return Err(format!("{} is not an Evolution card", def.name));
            }
            let mon = target(*t)?;
            let top = st.def(pool, mon.top());
            if def.evolves_from.as_deref() != Some(top.name.as_str()) {
                return Err(format!("{} does not evolve from {}", def.name, top.name));
            }
            if st.turn_number <= 2 && !st.config.first_turn.evolve_on_first_turn {
                return Err("cannot evolve on a player's first turn".into());
            }
            if mon.entered_play_turn >= st.turn_number {
                return Err("cannot evolve a Pokemon the turn it entered play".into());
            }
            if mon.evolved_this_turn {
                return Err("this Pokemon already evolved this turn".into());
            }
            Ok(())
        }
        Action::AttachEnergy { card, target: t } => {
            in_hand(*card)?;
            if !pool.get(*card).is_energy() {
                return Err(format!("{} is not an Energy card", pool.get(*card).name));
            }
            target(*t)?;
            if ps.flags.energy_attached {
                return Err("energy already attached this turn".into());
            }
            Ok(())
        }
        Action::UseSupporter { card } => {
            in_hand(*card)?;
            let def = pool.get(*card);
            if def.subkind != Subkind::Supporter {
                return Err(format!("{} is not a Supporter", def.name));
            }
            if ps.flags.supporter_played {
                return Err("supporter already played this turn".into());
            }
            if is_first_turn_of_first_player(st)
                && !st.config.first_turn.first_player_may_play_supporter
            {
                return Err("the first player cannot play a Supporter on turn 1".into());
            }
            playable(pool, st, p, *card)
        }
        Action::UseItem { card } => {
            in_hand(*card)?;
            let def = pool.get(*card);
            if def.subkind != Subkind::Item {
                return Err(format!("{} is not an Item", def.name));
            }
            playable(pool, st, p, *card)
        }
        Action::UseTool { card, target: t } => {
            in_hand(*card)?;
            let def = pool.get(*card);
            if def.subkind != Subkind::Tool {
                return Err(format!("{} is not a Pokemon Tool", def.name));
            }
            if target(*t)?.attached_tool.is_some() {
                return Err("that Pokemon already has a Tool attached".into());
            }
            Ok(())
        }
        Action::PutStadium { card } => {
            in_hand(*card)?;
            let def = pool.get(*card);
            if def.subkind != Subkind::Stadium {
                return Err(format!("{} is not a Stadium", def.name));
            }
            if ps.flags.stadium_played {
                return Err("stadium already played this turn".into());
            }
            if let Some((s, _)) = st.stadium {
                if st.def(pool, s).name == def.name {
                    return Err("a Stadium with the same name is already in play".into());
                }
            }
            Ok(())
        }
        Action::DiscardStadium => {
            let Some((s, owner)) = st.stadium else {
                return Err("no Stadium in play".into());
            };
            if !st.def(pool, s).stadium_discardable {
                return Err("this Stadium cannot be discarded".into());
            }
            if owner != p {
                return Err("only the Stadium's owner may discard it".into());
            }
            if ps.flags.stadium_discarded {
                return Err("stadium already discarded this turn".into());
            }
            Ok(())
        }
        Action::UseStadium => {
            let Some((s, _)) = st.stadium else {
                return Err("no Stadium in play".into());
            };
            let Some(effect) = &st.def(pool, s).effect else {
                return Err("this Stadium has no effect to use".into());
            };
            if ps.flags.stadium_used {
                return Err("stadium already used this turn".into());
            }
            if !program_playable(pool, st, p, effect.ops(), None) {
                return Err("the Stadium's effect would do nothing".into());
            }
            Ok(())
        }
        Action::UseAbility { source } => {
            let mon = target(*source)?;
            let def = st.def(pool, mon.top());
            let Some(ab) = &def.ability else {
                return Err(format!("{} has no Ability", def.name));
            };
            if ab.active_only && ps.active.as_ref().map(|m| m.field_index) != Some(*source) {
                return Err("this Ability works only from the Active spot".into());
            }
            if ab.once_per_turn && mon.ability_used {
                return Err("ability already used this turn".into());
            }
            if !program_playable(pool, st, p, ab.effect.ops(), None) {
                return Err("the Ability would do nothing".into());
            }
            Ok(())
        }
        Action::Retreat => {
            let Some(active) = &ps.active else {
                return Err("no Active Pokemon".into());
            };
            if ps.flags.retreated {
                return Err("already retreated this turn".into());
            }
            if ps.bench.is_empty() {
                return Err("no Benched Pokemon to switch in".into());
            }
            if active.conditions.blocks_attack_and_retreat() {
                return Err("the Active Pokemon is Asleep or Paralyzed".into());
            }
            let cost = st.def(pool, active.top()).retreat_cost as usize;
            if st.energy_provided(pool, active).len() < cost {
                return Err("cannot pay the retreat cost".into());
            }
            Ok(())
        }
        Action::Attack { attack } => {
            let Some(active) = &ps.active else {
                return Err("no Active Pokemon".into());
            };
            let def = st.def(pool, active.top());
            let Some(atk) = def.attacks.get(*attack as usize) else {
                return Err(format!("{} has no such attack", def.name));
            };
            if is_first_turn_of_first_player(st) && !st.config.first_turn.first_player_may_attack {
                return Err("the first player cannot attack on turn 1".into());
            }
            if active.conditions.blocks_attack_and_retreat() {
                return Err("the Active Pokemon is Asleep or Paralyzed".into());
            }
            if !cost_satisfied(&atk.cost, &st.energy_provided(pool, active)) {
                return Err(format!("attack cost of {} not satisfied", atk.name));
            }
            Ok(())
        }
        Action::PassTurn => Ok(()),
        Action::Choose { .. } => unreachable!("handled above"),
    }
}

fn playable(pool: &CardPool, st: &GameState, p: PlayerId, card: CardIdx) -> Result<(), String> {
    let leaving = hand_copy(st, p, card);
    let ok = pool
        .get(card)
        .effect
        .as_ref()
        .is_none_or(|e| program_playable(pool, st, p, e.ops(), leaving));
    if ok {
        Ok(())
    } else {
        Err(format!("{} would have no effect now", pool.get(card).name))
    }
}

fn mon_name(pool: &CardPool, st: &GameState, p: PlayerId, fi: u32) -> String {
    st.players[p]
        .pokemon(fi)
        .map(|m| st.def(pool, m.top()).name.clone())
        .unwrap_or_default()
}

/// Canonical tool call for a typed action of the acting player.
pub fn describe(pool: &CardPool, st: &GameState, a: &Action) -> ActionRequest {
    let p = st.acting_player().unwrap_or(st.active_player);
    let name = |c: &CardIdx| pool.get(*c).name.clone();
    let active_name = || {
        st.players[p]
            .active
            .as_ref()
            .map(|m| st.def(pool, m.top()).name.clone())
            .unwrap_or_default()
    };
    let stadium_name = || {
        st.stadium
            .map(|(s, _)| st.def(pool, s).name.clone())
            .unwrap_or_default()
    };
    let req = ActionRequest::new(a.tool());
    match a {
        Action::Attack { attack } => {
            let atk = st.players[p]
                .active
                .as_ref()
                .and_then(|m| st.def(pool, m.top()).attacks.get(*attack as usize))
                .map(|x| x.name.clone())
                .unwrap_or_default();
            req.arg("source_card", active_name()).arg("attack_name", atk)
        }
        Action::PlayPokemon { card, position } => req
            .arg("source_card", name(card))
            .arg("position", position.as_str()),
        Action::Evolve { card, target }
        | Action::AttachEnergy { card, target }
        | Action::UseTool { card, target } => req
            .arg("source_card", name(card))
            .arg("target_card", mon_name(pool, st, p, *target))
            .arg("target_index", *target),
        Action::UseSupporter { card } | Action::UseItem { card } | Action::PutStadium { card } => {
            req.arg("source_card", name(card))
        }
        Action::DiscardStadium | Action::UseStadium => req.arg("source_card", stadium_name()),
        Action::UseAbility { source } => {
            let ability = st.players[p]
                .pokemon(*source)
                .and_then(|m| st.def(pool, m.top()).ability.as_ref())
                .map(|x| x.name.clone())
                .unwrap_or_default();
            req.arg("source_card", mon_name(pool, st, p, *source))
                .arg("source_index", *source)
                .arg("ability_name", ability)
        }
        Action::Retreat => req.arg("source_card", active_name()),
        Action::Choose { picks } => {
            let labels = st
                .pending_prompt()
                .map(|pr| selection_labels(pr, picks))
                .unwrap_or_default();
            req.arg("chosen_cards", labels)
        }
        Action::PassTurn => req,
    }
}

fn bad(msg: impl Into<String>) -> Rejection {
    Rejection::new(RejectKind::BadArguments, msg)
}

fn unknown(msg: impl Into<String>) -> Rejection {
    Rejection::new(RejectKind::UnknownCard, msg)
}

fn str_arg<'r>(req: &'r ActionRequest, key: &str) -> Result<Option<&'r str>, Rejection> {
    match req.arguments.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.as_str())),
        Some(_) => Err(bad(format!("{key} must be a string"))),
    }
}

fn index_arg(req: &ActionRequest, key: &str) -> Result<Option<u32>, Rejection> {
    match req.arguments.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => n
            .as_u64()
            .and_then(|v| u32::try_from(v).ok())
            .map(Some)
            .ok_or_else(|| bad(format!("{key} must be a non-negative integer"))),
        Some(Value::String(s)) => s
            .trim_start_matches('#')
            .parse::<u32>()
            .map(Some)
            .map_err(|_| bad(format!("{key} must be a non-negative integer"))),
        Some(_) => Err(bad(format!("{key} must be a non-negative integer"))),
    }
}

fn required<'r>(req: &'r ActionRequest, key: &str) -> Result<&'r str, Rejection> {
    str_arg(req, key)?.ok_or_else(|| bad(format!("missing argument {key}")))
}

/// Splits `"Name #3"` into its name and index.
fn split_label(s: &str) -> (&str, Option<u32>) {
    if let Some((name, idx)) = s.rsplit_once(" #") {
        if let Ok(i) = idx.parse() {
            return (name, Some(i));
        }
    }
    (s, None)
}

fn hand_card(pool: &CardPool, name: &str) -> Result<CardIdx, Rejection> {
    pool.lookup(name)
        .ok_or_else(|| unknown(format!("unknown card {name:?}")))
}

/// Finds one of `p`'s Pokemon by name (or card_id) and optional index.
fn find_pokemon(
    pool: &CardPool,
    st: &GameState,
    p: PlayerId,
    raw: &str,
    index: Option<u32>,
) -> Result<u32, Rejection> {
    let (name, label_idx) = split_label(raw);
    let index = index.or(label_idx);
    let hits: Vec<u32> = st.players[p]
        .in_play()
        .filter(|m| {
            let d = st.def(pool, m.top());
            d.name == name || d.card_id == name
        })
        .filter(|m| index.is_none_or(|i| m.field_index == i))
        .map(|m| m.field_index)
        .collect();
    match hits.as_slice() {
        [] => Err(unknown(match index {
            Some(i) => format!("no Pokemon {name} #{i} in play"),
            None => format!("no Pokemon {name} in play"),
        })),
        [one] => Ok(*one),
        _ => Err(bad(format!(
            "{name} is ambiguous; add an index to pick one"
        ))),
    }
}

/// Parses a request into a typed action for the acting player.
pub fn parse_action(pool: &CardPool, st: &GameState, req: &ActionRequest) -> Result<Action, Rejection> {
    let Some(p) = st.acting_player() else {
        return Err(Rejection::new(RejectKind::Finished, "the game is over"));
    };
    let tool = req.tool.as_str();
    let Some((req_keys, opt_keys)) = tools::schema(tool) else {
        let msg = if tools::QUERIES.contains(&tool) {
            format!("{tool} is an information tool, not a game action")
        } else {
            format!("unknown tool {tool:?}")
        };
        return Err(Rejection::new(RejectKind::UnknownTool, msg));
    };
    for k in req_keys {
        if !req.arguments.contains_key(*k) {
            return Err(bad(format!("missing argument {k}")));
        }
    }
    for k in req.arguments.keys() {
        if !req_keys.contains(&k.as_str()) && !opt_keys.contains(&k.as_str()) {
            return Err(bad(format!("unexpected argument {k}")));
        }
    }
    let active_fi = st.players[p].active.as_ref().map(|m| m.field_index);
    let require_active = |raw: &str, idx: Option<u32>| -> Result<(), Rejection> {
        let (name, label_idx) = split_label(raw);
        if idx.or(label_idx).is_none() {
            let active_matches = st.players[p].active.as_ref().is_some_and(|m| {
                let d = st.def(pool, m.top());
                d.name == name || d.card_id == name
            });
            if active_matches {
                return Ok(());
            }
        }
        let fi = find_pokemon(pool, st, p, raw, idx)?;
        if Some(fi) != active_fi {
            return Err(Rejection::new(
                RejectKind::RuleViolation,
                format!("{raw} is not your Active Pokemon"),
            ));
        }
        Ok(())
    };
    Ok(match tool {
        tools::ATTACK => {
            let src = required(req, "source_card")?;
            require_active(src, index_arg(req, "source_index")?)?;
            let atk_name = required(req, "attack_name")?;
            let active = st.players[p].active.as_ref().expect("found above");
            let def = st.def(pool, active.top());
            let (i, _) = def
                .attack(atk_name)
                .ok_or_else(|| unknown(format!("{} has no attack {atk_name:?}", def.name)))?;
            Action::Attack { attack: i as u8 }
        }
        tools::PLAY_POKEMON => {
            let card = hand_card(pool, required(req, "source_card")?)?;
            let position = match required(req, "position")?.to_ascii_lowercase().as_str() {
                "active" => Position::Active,
                "bench" => Position::Bench,
                other => return Err(bad(format!("position must be active or bench, got {other:?}"))),
            };
            Action::PlayPokemon { card, position }
        }
        tools::EVOLVE_POKEMON | tools::ATTACH_ENERGY | tools::USE_TOOL => {
            let card = hand_card(pool, required(req, "source_card")?)?;
            let target = find_pokemon(
                pool,
                st,
                p,
                required(req, "target_card")?,
                index_arg(req, "target_index")?,
            )?;
            match tool {
                tools::EVOLVE_POKEMON => Action::Evolve { card, target },
                tools::ATTACH_ENERGY => Action::AttachEnergy { card, target },
                _ => Action::UseTool { card, target },
            }
        }
        tools::USE_SUPPORTER => Action::UseSupporter {
            card: hand_card(pool, required(req, "source_card")?)?,
        },
        tools::USE_ITEM => Action::UseItem {
            card: hand_card(pool, required(req, "source_card")?)?,
        },
        tools::PUT_STADIUM => Action::PutStadium {
            card: hand_card(pool, required(req, "source_card")?)?,
        },
        tools::DISCARD_STADIUM | tools::USE_STADIUM => {
            let name = required(req, "source_card")?;
            let Some((s, _)) = st.stadium else {
                return Err(Rejection::new(RejectKind::RuleViolation, "no Stadium in play"));
            };
            let d = st.def(pool, s);
            if d.name != name && d.card_id != name {
                return Err(unknown(format!("{name} is not the Stadium in play")));
            }
            if tool == tools::DISCARD_STADIUM {
                Action::DiscardStadium
            } else {
                Action::UseStadium
            }
        }
        tools::USE_ABILITY => {
            let source = find_pokemon(
                pool,
                st,
                p,
                required(req, "source_card")?,
                index_arg(req, "source_index")?,
            )?;
            if let Some(n) = str_arg(req, "ability_name")? {
                let m = st.players[p].pokemon(source).expect("found");
                let has = st
                    .def(pool, m.top())
                    .ability
                    .as_ref()
                    .is_some_and(|a| a.name == n);
                if !has {
                    return Err(unknown(format!("no Ability named {n:?} on that Pokemon")));
                }
            }
            Action::UseAbility { source }
        }
        tools::RETREAT => {
            require_active(required(req, "source_card")?, index_arg(req, "source_index")?)?;
            Action::Retreat
        }
        tools::CHOOSE_CARD => {
            let Some(prompt) = st.pending_prompt() else {
                return Err(Rejection::new(
                    RejectKind::RuleViolation,
                    "no card choice is pending",
                ));
            };
            let Some(Value::Array(items)) = req.arguments.get("chosen_cards") else {
                return Err(bad("chosen_cards must be a list of candidate labels"));
            };
            let mut picks = vec![0u8; prompt.candidates.len()];
            for item in items {
                let Value::String(label) = item else {
                    return Err(bad("chosen_cards must be a list of candidate labels"));
                };
                let i = prompt
                    .candidates
                    .iter()
                    .position(|c| &c.label == label)
                    .ok_or_else(|| unknown(format!("{label:?} is not a listed candidate")))?;
                picks[i] = picks[i].saturating_add(1);
            }
            Action::Choose { picks }
        }
        tools::PASS_TURN => Action::PassTurn,
        _ => unreachable!("schema covers every game tool"),
    })
}

/// Rejection for a parsed action that is not in the legal set.
pub(crate) fn explain(pool: &CardPool, st: &GameState, a: &Action) -> Rejection {
    match check(pool, st, a) {
        Err(msg) => Rejection::new(RejectKind::RuleViolation, msg),
        Ok(()) => Rejection::new(RejectKind::NotLegal, "action is not in the legal set"),
    }
}

/// One-line summary of an action that is safe to show the opponent.
pub(crate) fn public_summary(pool: &CardPool, st: &GameState, actor: PlayerId, a: &Action) -> String {
    let name = |c: &CardIdx| pool.get(*c).name.clone();
    let mon = |fi: u32| format!("{} #{fi}", mon_name(pool, st, actor, fi));
    let body = match a {
        Action::Attack { attack } => {
            let active = st.players[actor].active.as_ref().expect("legal attack");
            let def = st.def(pool, active.top());
            format!(
                "{} #{} used {}",
                def.name, active.field_index, def.attacks[*attack as usize].name
            )
        }
        Action::PlayPokemon { .. } if st.phase == Phase::Setup => {
            "placed a Pokemon face down".to_string()
        }
        Action::PlayPokemon { card, .. } => format!("played {} to the Bench", name(card)),
        Action::Evolve { card, target } => format!("evolved {} into {}", mon(*target), name(card)),
        Action::AttachEnergy { card, target } => {
            format!("attached {} to {}", name(card), mon(*target))
        }
        Action::UseSupporter { card } | Action::UseItem { card } => {
            format!("played {}", name(card))
        }
        Action::UseTool { card, target } => format!("attached {} to {}", name(card), mon(*target)),
        Action::PutStadium { card } => format!("put {} into play", name(card)),
        Action::DiscardStadium => "discarded the Stadium in play".to_string(),
        Action::UseStadium => "used the Stadium in play".to_string(),
        Action::UseAbility { source } => {
            let m = st.players[actor].pokemon(*source).expect("legal ability");
            let ab = st.def(pool, m.top()).ability.as_ref().expect("legal ability");
            format!("used {} ({})", ab.name, mon(*source))
        }
        Action::Retreat => {
            let fi = st.players[actor].active.as_ref().map_or(0, |m| m.field_index);
            format!("retreated {}", mon(fi))
        }
        Action::Choose { picks } => {
            let prompt = st.pending_prompt().expect("legal choice");
            let n: u32 = picks.iter().map(|&k| k as u32).sum();
            match prompt.visibility {
                crate::state::Visibility::Public => format!(
                    "chose [{}] for {}",
                    selection_labels(prompt, picks).join(", "),
                    prompt.reason
                ),
                crate::state::Visibility::Private => {
                    format!("chose {n} card(s) for {}", prompt.reason)
                }
            }
        }
        Action::PassTurn if st.phase == Phase::Setup => "finished setup".to_string(),
        Action::PassTurn => "passed the turn".to_string(),
    };
    format!("player {actor} {body}")
}
