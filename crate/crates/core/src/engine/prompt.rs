//! Choice prompts: construction, selection validity and enumeration.

use crate::card::CardIdx;
use crate::pool::CardPool;
use crate::state::{
    Candidate, CandidateRef, CardUid, ChoicePrompt, GameState, PlayerId, PokemonInPlay,
    SelectionConstraint, Visibility,
};

pub fn pokemon_label(name: &str, field_index: u32) -> String {
    format!("{name} #{field_index}")
}

/// Groups cards with the same definition into one candidate, in order of
/// first appearance.
pub fn card_candidates(pool: &CardPool, st: &GameState, uids: &[CardUid]) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    let mut keys: Vec<CardIdx> = Vec::new();
    for &uid in uids {
        let idx = st.idx(uid);
        match keys.iter().position(|&k| k == idx) {
            Some(i) => out[i].refs.push(CandidateRef::Card(uid)),
            None => {
                let def = pool.get(idx);
                keys.push(idx);
                out.push(Candidate {
                    label: def.name.clone(),
                    refs: vec![CandidateRef::Card(uid)],
                    card: Some(idx),
                    units: def.energy_units(),
                });
            }
        }
    }
    out
}

pub fn pokemon_candidate(
    pool: &CardPool,
    st: &GameState,
    player: PlayerId,
    mon: &PokemonInPlay,
) -> Candidate {
    let idx = st.idx(mon.top());
    Candidate {
        label: pokemon_label(&pool.get(idx).name, mon.field_index),
        refs: vec![CandidateRef::Pokemon {
            player,
            field_index: mon.field_index,
        }],
        card: Some(idx),
        units: 0,
    }
}

/// Face-down prize positions, labelled `Prize 1..n`.
pub fn prize_candidates(st: &GameState, player: PlayerId) -> Vec<Candidate> {
    st.players[player]
        .prizes
        .iter()
        .enumerate()
        .map(|(i, &uid)| Candidate {
            label: format!("Prize {}", i + 1),
            refs: vec![CandidateRef::Card(uid)],
            card: None,
            units: 0,
        })
        .collect()
}

/// A prompt that picks between `min` and `max` items; bounds are clamped to
/// what the candidates can supply.
pub fn prompt(
    chooser: PlayerId,
    reason: &str,
    candidates: Vec<Candidate>,
    min: u32,
    max: u32,
    visibility: Visibility,
) -> ChoicePrompt {
    let total: u32 = candidates.iter().map(|c| c.refs.len() as u32).sum();
    let max = max.min(total);
    ChoicePrompt {
        chooser,
        reason: reason.to_string(),
        candidates,
        min_count: min.min(max),
        max_count: max,
        constraint: None,
        visibility,
    }
}

pub fn is_valid_selection(p: &ChoicePrompt, picks: &[u8]) -> bool {
    if picks.len() != p.candidates.len() {
        return false;
    }
    let mut count = 0u32;
    for (c, &k) in p.candidates.iter().zip(picks) {
        if k as usize > c.refs.len() {
            return false;
        }
        count += k as u32;
    }
    if count < p.min_count || count > p.max_count {
        return false;
    }
    match p.constraint {
        None => true,
        Some(SelectionConstraint::ExactCover { units }) => {
            let picked = p.candidates.iter().zip(picks).filter(|(_, &k)| k > 0);
            let total: u32 = picked.clone().map(|(c, &k)| c.units * k as u32).sum();
            let smallest = picked.map(|(c, _)| c.units).min().unwrap_or(0);
            total >= units && (count == 0 || total - smallest < units)
        }
    }
}

/// Every valid selection, in lexicographic order of pick counts. Stops
/// after `limit` selections when given.
pub fn enumerate_selections(p: &ChoicePrompt, limit: Option<usize>) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; p.candidates.len()];
    let remaining: Vec<u32> = {
        let mut r = vec![0u32; p.candidates.len() + 1];
        for i in (0..p.candidates.len()).rev() {
            r[i] = r[i + 1] + p.candidates[i].refs.len() as u32;
        }
        r
    };
    fn rec(
        p: &ChoicePrompt,
        i: usize,
        count: u32,
        cur: &mut Vec<u8>,
        remaining: &[u32],
        out: &mut Vec<Vec<u8>>,
        limit: Option<usize>,
    ) {
        if limit.is_some_and(|l| out.len() >= l) {
            return;
        }
        if count + remaining[i] < p.min_count {
            return;
        }
        if i == p.candidates.len() {
            if is_valid_selection(p, cur) {
                out.push(cur.clone());
            }
            return;
        }
        let room = p.max_count - count;
        let n = (p.candidates[i].refs.len() as u32).min(room);
        for k in 0..=n {
            cur[i] = k as u8;
            rec(p, i + 1, count + k, cur, remaining, out, limit);
        }
        cur[i] = 0;
    }
    rec(p, 0, 0, &mut cur, &remaining, &mut out, limit);
    out
}

/// The concrete references a selection picks: the first `k` refs of each
/// candidate.
pub fn picked_refs(p: &ChoicePrompt, picks: &[u8]) -> Vec<CandidateRef> {
    p.candidates
        .iter()
        .zip(picks)
        .flat_map(|(c, &k)| c.refs.iter().take(k as usize).copied())
        .collect()
}

pub fn picked_cards(p: &ChoicePrompt, picks: &[u8]) -> Vec<CardUid> {
    picked_refs(p, picks)
        .into_iter()
        .filter_map(|r| match r {
            CandidateRef::Card(uid) => Some(uid),
            CandidateRef::Pokemon { .. } => None,
        })
        .collect()
}

/// Labels naming a selection, one per picked item.
pub fn selection_labels(p: &ChoicePrompt, picks: &[u8]) -> Vec<String> {
    p.candidates
        .iter()
        .zip(picks)
        .flat_map(|(c, &k)| std::iter::repeat_n(c.label.clone(), k as usize))
        .collect()
}
