//! Card movement primitives shared by actions and effect ops.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::card::CardIdx;
use crate::effect::Zone;
use crate::events::Event;
use crate::pool::CardPool;
use crate::state::{opponent, CardUid, GameResult, GameState, Phase, PlayerId, WinReason};

/// Draws up to `n` cards; a short deck draws what it has.
pub(crate) fn draw(st: &mut GameState, p: PlayerId, n: u32) -> u32 {
    let ps = &mut st.players[p];
    let k = (n as usize).min(ps.deck.len());
    for _ in 0..k {
        let uid = ps.deck.pop().expect("counted");
        ps.hand.push(uid);
    }
    if k > 0 {
        st.log_event(Event::Draw {
            player: p,
            count: k as u32,
        });
    }
    k as u32
}

pub(crate) fn shuffle_deck(st: &mut GameState, p: PlayerId) {
    let GameState { players, rng, .. } = st;
    players[p].deck.shuffle(rng);
    st.log_event(Event::Shuffle { player: p });
}

pub(crate) fn flip(st: &mut GameState, p: PlayerId) -> bool {
    let heads = st.rng.random_bool(0.5);
    st.log_event(Event::CoinFlip { player: p, heads });
    heads
}

pub(crate) fn zone(st: &GameState, p: PlayerId, z: Zone) -> &Vec<CardUid> {
    let ps = &st.players[p];
    match z {
        Zone::Deck => &ps.deck,
        Zone::Hand => &ps.hand,
        Zone::Discard => &ps.discard,
    }
}

pub(crate) fn zone_mut(st: &mut GameState, p: PlayerId, z: Zone) -> &mut Vec<CardUid> {
    let ps = &mut st.players[p];
    match z {
        Zone::Deck => &mut ps.deck,
        Zone::Hand => &mut ps.hand,
        Zone::Discard => &mut ps.discard,
    }
}

pub(crate) fn remove_from(v: &mut Vec<CardUid>, uid: CardUid) -> bool {
    match v.iter().position(|&u| u == uid) {
        Some(i) => {
            v.remove(i);
            true
        }
        None => false,
    }
}

/// First copy of `idx` in the hand, in hand order.
pub(crate) fn hand_copy(st: &GameState, p: PlayerId, idx: CardIdx) -> Option<CardUid> {
    st.players[p].hand.iter().copied().find(|&u| st.idx(u) == idx)
}

pub(crate) fn take_from_hand(st: &mut GameState, p: PlayerId, idx: CardIdx) -> CardUid {
    let uid = hand_copy(st, p, idx).expect("legal action names a card in hand");
    remove_from(&mut st.players[p].hand, uid);
    uid
}

pub(crate) fn names(pool: &CardPool, st: &GameState, uids: &[CardUid]) -> Vec<String> {
    uids.iter().map(|&u| st.def(pool, u).name.clone()).collect()
}

pub(crate) fn zone_name(z: Zone) -> &'static str {
    match z {
        Zone::Deck => "deck",
        Zone::Hand => "hand",
        Zone::Discard => "discard",
    }
}

/// Ends the game and drops any outstanding work.
pub(crate) fn finish(st: &mut GameState, winner: Option<PlayerId>, reason: WinReason) {
    st.result = Some(GameResult { winner, reason });
    st.phase = Phase::Finished;
    st.work.clear();
    st.pending = None;
    st.attack = None;
    st.log_event(Event::GameOver { winner, reason });
}

pub(crate) fn deck_out(st: &mut GameState, p: PlayerId) {
    finish(st, Some(opponent(p)), WinReason::DeckOut);
}
