//! Match setup: first player, opening hands, mulligans, prizes and the
//! face-down placement step.

use thiserror::Error;

use crate::events::Event;
use crate::pool::{CardPool, Deck};
use crate::state::{opponent, EngineConfig, GameState, Phase, OPENING_HAND, PRIZE_COUNT};

use super::work::Task;
use super::zones::{draw, flip, shuffle_deck};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetupError {
    #[error("invalid engine config: {0}")]
    Config(String),
    #[error("deck {0} has no Basic Pokemon")]
    NoBasic(String),
}

/// Builds a match ready for the first placement decision.
pub fn setup_game(
    pool: &CardPool,
    decks: [&Deck; 2],
    seed: u64,
    config: EngineConfig,
) -> Result<GameState, SetupError> {
    if config.turn_cap == 0 {
        return Err(SetupError::Config("turn_cap must be at least 1".into()));
    }
    for d in decks {
        if !d.cards.iter().any(|&c| pool.get(c).is_basic_pokemon()) {
            return Err(SetupError::NoBasic(d.deck_id.clone()));
        }
    }
    let mut st = GameState::blank(
        [
            (decks[0].deck_id.as_str(), decks[0].cards.as_slice()),
            (decks[1].deck_id.as_str(), decks[1].cards.as_slice()),
        ],
        seed,
        config,
    );
    let first = if flip(&mut st, 0) { 0 } else { 1 };
    st.first_player = first;
    st.log_event(Event::FirstPlayer { player: first });
    for p in [first, opponent(first)] {
        loop {
            shuffle_deck(&mut st, p);
            draw(&mut st, p, OPENING_HAND as u32);
            let has_basic = st.players[p]
                .hand
                .iter()
                .any(|&u| st.def(pool, u).is_basic_pokemon());
            if has_basic {
                break;
            }
            st.log_event(Event::Mulligan { player: p });
            let ps = &mut st.players[p];
            ps.mulligans += 1;
            let hand = std::mem::take(&mut ps.hand);
            ps.deck.extend(hand);
        }
    }
    for p in [first, opponent(first)] {
        let bonus = st.players[opponent(p)].mulligans;
        if draw(&mut st, p, bonus) > 0 {
            st.log_event(Event::BonusDraw {
                player: p,
                count: bonus,
            });
        }
    }
    for p in [first, opponent(first)] {
        let ps = &mut st.players[p];
        let n = PRIZE_COUNT.min(ps.deck.len());
        let at = ps.deck.len() - n;
        let prizes = ps.deck.split_off(at);
        ps.prizes = prizes;
        st.log_event(Event::PrizesSet {
            player: p,
            count: n as u32,
        });
    }
    st.phase = Phase::Setup;
    st.active_player = first;
    Ok(st)
}

/// Ends the acting player's placement. Once both are done the Pokemon are
/// revealed and the first turn starts.
pub(crate) fn finish_placement(pool: &CardPool, st: &mut GameState) {
    let p = st.active_player;
    st.players[p].setup_done = true;
    let other = opponent(p);
    if !st.players[other].setup_done {
        st.active_player = other;
        return;
    }
    st.log_event(Event::SetupRevealed);
    let placed: Vec<(usize, u32, String)> = (0..2)
        .flat_map(|q| {
            st.players[q]
                .in_play()
                .map(|m| (q, m.field_index, st.def(pool, m.top()).name.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    for (player, field_index, name) in placed {
        st.log_event(Event::PokemonPlaced {
            player,
            field_index,
            name,
        });
    }
    st.active_player = st.first_player;
    st.work.push(Task::StartTurn {
        player: st.first_player,
    });
}
