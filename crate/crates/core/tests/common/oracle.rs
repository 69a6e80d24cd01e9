//! Test-side legality oracle and request generator for the completeness
//! check.

use duelkit::action::{tools, ActionRequest};
use duelkit::card::{CardDef, EnergyType, Subkind};
use duelkit::engine::{apply_action, legal_requests};
use duelkit::pool::CardPool;
use duelkit::state::{ChoicePrompt, GameState, Phase, PokemonInPlay, Rotation, SelectionConstraint};
use serde_json::{json, Value};

fn name_of(pool: &CardPool, st: &GameState, m: &PokemonInPlay) -> String {
    st.def(pool, m.top()).name.clone()
}

/// Whether the attached energy pays `cost`: typed symbols first, then
/// colorless from whatever is left.
pub fn pays(cost: &[EnergyType], provided: &[EnergyType]) -> bool {
    let mut left = provided.to_vec();
    let mut colorless = 0;
    for t in cost {
        if *t == EnergyType::Colorless {
            colorless += 1;
            continue;
        }
        match left.iter().position(|x| x == t) {
            Some(i) => {
                left.remove(i);
            }
            None => return false,
        }
    }
    left.len() >= colorless
}

fn provided(pool: &CardPool, st: &GameState, m: &PokemonInPlay) -> Vec<EnergyType> {
    m.attached_energy
        .iter()
        .flat_map(|&u| st.def(pool, u).types.clone())
        .collect()
}

/// Every pick vector of a small prompt, with the oracle's verdict.
fn selections(p: &ChoicePrompt) -> Vec<(Vec<u8>, bool)> {
    let sizes: Vec<usize> = p.candidates.iter().map(|c| c.refs.len()).collect();
    let total: usize = sizes.iter().map(|s| s + 1).product();
    if total > 4096 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let picks: Vec<u8> = sizes
            .iter()
            .map(|&s| {
                let k = code % (s + 1);
                code /= s + 1;
                k as u8
            })
            .collect();
        let count: u32 = picks.iter().map(|&k| k as u32).sum();
        let mut ok = count >= p.min_count && count <= p.max_count;
        if let Some(SelectionConstraint::ExactCover { units }) = p.constraint {
            let chosen: Vec<u32> = p
                .candidates
                .iter()
                .zip(&picks)
                .flat_map(|(c, &k)| std::iter::repeat_n(c.units, k as usize))
                .collect();
            let sum: u32 = chosen.iter().sum();
            ok &= sum >= units && chosen.iter().all(|&u| sum - u < units);
        }
        out.push((picks, ok));
    }
    out
}

fn choose_request(p: &ChoicePrompt, picks: &[u8]) -> ActionRequest {
    let labels: Vec<String> = p
        .candidates
        .iter()
        .zip(picks)
        .flat_map(|(c, &k)| std::iter::repeat_n(c.label.clone(), k as usize))
        .collect();
    ActionRequest::new(tools::CHOOSE_CARD).arg("chosen_cards", labels)
}

fn with(tool: &str, args: &[(&str, Value)]) -> ActionRequest {
    args.iter()
        .fold(ActionRequest::new(tool), |r, (k, v)| r.arg(k, v.clone()))
}

/// Plausible requests for the acting player, each with the oracle's verdict
/// when the rule is simple enough to decide here.
pub fn generate(pool: &CardPool, st: &GameState) -> Vec<(ActionRequest, Option<bool>)> {
    let mut out = Vec::new();
    if let Some(p) = st.pending_prompt() {
        for (picks, ok) in selections(p) {
            out.push((choose_request(p, &picks), Some(ok)));
        }
        out.push((ActionRequest::pass_turn(), Some(false)));
        return out;
    }
    let me = st.active_player;
    let ps = &st.players[me];
    let opp = &st.players[1 - me];
    let setup = st.phase == Phase::Setup;
    let main = st.phase == Phase::TurnMain;
    let first_turn = st.turn_number == 1 && me == st.first_player;

    let mut hand: Vec<&CardDef> = Vec::new();
    for &u in &ps.hand {
        let d = st.def(pool, u);
        if !hand.iter().any(|h| h.name == d.name) {
            hand.push(d);
        }
    }
    let outsider = pool
        .cards()
        .iter()
        .find(|c| !hand.iter().any(|h| h.name == c.name))
        .expect("the pool is larger than a hand");

    let mine: Vec<&PokemonInPlay> = ps.active.iter().chain(&ps.bench).collect();
    let theirs: Vec<&PokemonInPlay> = opp.active.iter().chain(&opp.bench).collect();
    let mut targets: Vec<(String, u32, Option<&PokemonInPlay>)> = mine
        .iter()
        .map(|m| (name_of(pool, st, m), m.field_index, Some(*m)))
        .collect();
    if let Some(t) = theirs.first() {
        if !setup {
            targets.push((name_of(pool, st, t), t.field_index + 100, None));
        }
    }
    if let Some(m) = mine.first() {
        targets.push((name_of(pool, st, m), 99, None));
    }

    for d in hand.iter().copied().chain([outsider]) {
        let in_hand = d.name != outsider.name;
        let basic = d.subkind == Subkind::Basic;
        for pos in ["active", "bench"] {
            let verdict = if !in_hand || !basic {
                false
            } else if setup {
                match pos {
                    "active" => ps.active.is_none(),
                    _ => ps.active.is_some() && ps.bench.len() < 5,
                }
            } else {
                pos == "bench" && ps.bench.len() < 5
            };
            out.push((
                with(tools::PLAY_POKEMON, &[("source_card", json!(d.name)), ("position", json!(pos))]),
                Some(verdict),
            ));
        }
        for tool in [tools::USE_SUPPORTER, tools::USE_ITEM, tools::PUT_STADIUM] {
            let kind_ok = match tool {
                tools::USE_SUPPORTER => d.subkind == Subkind::Supporter,
                tools::USE_ITEM => d.subkind == Subkind::Item,
                _ => d.subkind == Subkind::Stadium,
            };
            let verdict = if !in_hand || !kind_ok || setup {
                Some(false)
            } else if tool == tools::USE_SUPPORTER && (ps.flags.supporter_played || first_turn) {
                Some(false)
            } else if tool == tools::PUT_STADIUM && ps.flags.stadium_played {
                Some(false)
            } else {
                None
            };
            out.push((with(tool, &[("source_card", json!(d.name))]), verdict));
        }
        for (tname, fi, mon) in &targets {
            let args = [
                ("source_card", json!(d.name)),
                ("target_card", json!(tname)),
                ("target_index", json!(fi)),
            ];
            let live = in_hand && main && mon.is_some();
            let evolve = live && {
                let m = mon.unwrap();
                matches!(d.subkind, Subkind::Stage1 | Subkind::Stage2)
                    && d.evolves_from.as_deref() == Some(name_of(pool, st, m).as_str())
                    && st.turn_number > 2
                    && m.entered_play_turn < st.turn_number
                    && !m.evolved_this_turn
            };
            out.push((with(tools::EVOLVE_POKEMON, &args), Some(evolve)));
            let attach = live && d.is_energy() && !ps.flags.energy_attached;
            out.push((with(tools::ATTACH_ENERGY, &args), Some(attach)));
            let tool_ok = live && d.subkind == Subkind::Tool && mon.unwrap().attached_tool.is_none();
            out.push((with(tools::USE_TOOL, &args), Some(tool_ok)));
        }
    }

    if let Some(a) = &ps.active {
        let def = st.def(pool, a.top());
        let blocked = matches!(a.conditions.rotation, Some(Rotation::Asleep | Rotation::Paralyzed));
        for atk in &def.attacks {
            let ok = main && !first_turn && !blocked && pays(&atk.cost, &provided(pool, st, a));
            out.push((
                with(tools::ATTACK, &[("source_card", json!(def.name)), ("attack_name", json!(atk.name))]),
                Some(ok),
            ));
        }
        out.push((
            with(tools::ATTACK, &[("source_card", json!(def.name)), ("attack_name", json!("Hyper Beam"))]),
            Some(false),
        ));
        let units = provided(pool, st, a).len() as u32;
        let retreat = main
            && !ps.flags.retreated
            && !ps.bench.is_empty()
            && !blocked
            && units >= def.retreat_cost;
        out.push((with(tools::RETREAT, &[("source_card", json!(def.name))]), Some(retreat)));
    }
    for m in &mine {
        let def = st.def(pool, m.top());
        let ability = def.ability.as_ref().map_or("Nothing".to_string(), |a| a.name.clone());
        let verdict = if def.ability.is_none() || !main {
            Some(false)
        } else if def.ability.as_ref().unwrap().once_per_turn && m.ability_used {
            Some(false)
        } else {
            None
        };
        out.push((
            with(
                tools::USE_ABILITY,
                &[
                    ("source_card", json!(name_of(pool, st, m))),
                    ("source_index", json!(m.field_index)),
                    ("ability_name", json!(ability)),
                ],
            ),
            verdict,
        ));
    }
    let stadium = st.stadium.map(|(u, owner)| (st.def(pool, u), owner));
    let sname = stadium.map_or("Training Grounds".to_string(), |(d, _)| d.name.clone());
    let discard_ok = main
        && stadium.is_some_and(|(d, owner)| owner == me && d.stadium_discardable)
        && !ps.flags.stadium_discarded;
    out.push((with(tools::DISCARD_STADIUM, &[("source_card", json!(sname))]), Some(discard_ok)));
    let use_verdict = if !main || stadium.is_none() || ps.flags.stadium_used {
        Some(false)
    } else {
        None
    };
    out.push((with(tools::USE_STADIUM, &[("source_card", json!(sname))]), use_verdict));
    let pass_ok = main || ps.active.is_some();
    out.push((ActionRequest::pass_turn(), Some(pass_ok)));
    out.push((ActionRequest::new(tools::CHOOSE_CARD).arg("chosen_cards", Vec::<String>::new()), Some(false)));
    out
}

fn normalize(r: &ActionRequest) -> ActionRequest {
    let mut r = r.clone();
    if let Some(Value::Array(a)) = r.arguments.get_mut("chosen_cards") {
        a.sort_by_key(|v| v.to_string());
    }
    r
}

#[derive(Debug, Default)]
pub struct Checked {
    pub problems: Vec<String>,
    pub requests: usize,
    pub accepted: usize,
    pub decided: usize,
}

/// Problems found at `st`: listed actions that fail, generated requests
/// whose outcome disagrees with the listing or with the oracle.
pub fn check_state(pool: &CardPool, st: &GameState, out: &mut Checked) {
    let problems = &mut out.problems;
    let legal: Vec<ActionRequest> = legal_requests(pool, st).iter().map(normalize).collect();
    for r in &legal {
        let mut c = st.clone();
        if let Err(e) = apply_action(pool, &mut c, r) {
            problems.push(format!("listed {r:?} rejected: {e}"));
        }
    }
    for (r, verdict) in generate(pool, st) {
        let mut c = st.clone();
        let accepted = apply_action(pool, &mut c, &r).is_ok();
        out.requests += 1;
        out.accepted += accepted as usize;
        out.decided += verdict.is_some() as usize;
        let listed = legal.contains(&normalize(&r));
        if accepted != listed {
            problems.push(format!("{r:?}: accepted {accepted}, listed {listed}"));
        }
        if let Some(v) = verdict {
            if v != accepted {
                problems.push(format!("{r:?}: accepted {accepted}, oracle says {v}"));
            }
        }
    }
}
