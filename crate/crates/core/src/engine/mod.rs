//! The rules engine: setup, legal actions, action application and the
//! work-stack driver.

pub mod prompt;
pub mod work;

mod exec;
mod interp;
mod legal;
mod setup;
mod turn;
mod zones;

pub use legal::{describe, legal_actions, legal_requests, parse_action};
pub use setup::{setup_game, SetupError};
pub use turn::{attack_damage, between_turns_upkeep, check_win};

use crate::action::{Action, ActionRequest, Rejection, RejectKind};
use crate::events::Event;
use crate::pool::CardPool;
use crate::state::{GameState, LogEntry};

use prompt::enumerate_selections;
use work::{Pending, Step};

/// Resolves prompts that admit at most one selection; parks the rest.
fn settle(pool: &CardPool, st: &mut GameState, mut s: Step) {
    while let Step::Ask(prompt, task) = s {
        if st.is_finished() {
            return;
        }
        let sels = enumerate_selections(&prompt, Some(2));
        if sels.len() > 1 {
            st.pending = Some(Pending { prompt, task });
            return;
        }
        let picks = sels
            .into_iter()
            .next()
            .unwrap_or_else(|| vec![0; prompt.candidates.len()]);
        s = exec::step(pool, st, task, Some((&prompt, &picks)));
    }
}

/// Runs queued work until the stack empties, a decision is needed or the
/// game ends.
fn run(pool: &CardPool, st: &mut GameState) {
    loop {
        if st.is_finished() {
            st.work.clear();
            return;
        }
        if st.pending.is_some() {
            return;
        }
        let Some(task) = st.work.pop() else {
            return;
        };
        let s = exec::step(pool, st, task, None);
        settle(pool, st, s);
    }
}

/// Whether a parsed action is currently legal, with the reason if not.
pub fn validate(pool: &CardPool, st: &GameState, a: &Action) -> Result<(), Rejection> {
    if st.is_finished() {
        return Err(Rejection::new(RejectKind::Finished, "the game is over"));
    }
    if legal_actions(pool, st).contains(a) {
        Ok(())
    } else {
        Err(legal::explain(pool, st, a))
    }
}

/// Parses, validates and applies one tool call for the acting player.
/// Returns the events it produced. A rejected request leaves the state
/// untouched.
pub fn apply_action(
    pool: &CardPool,
    st: &mut GameState,
    req: &ActionRequest,
) -> Result<Vec<Event>, Rejection> {
    let a = parse_action(pool, st, req)?;
    apply_typed(pool, st, &a)
}

/// Applies a typed action; see [`apply_action`].
pub fn apply_typed(pool: &CardPool, st: &mut GameState, a: &Action) -> Result<Vec<Event>, Rejection> {
    validate(pool, st, a)?;
    let actor = st.acting_player().expect("not finished");
    let start = st.action_log.len();
    st.action_log.push(LogEntry::Action {
        turn: st.turn_number,
        actor,
        request: describe(pool, st, a),
        public: legal::public_summary(pool, st, actor, a),
    });
    match a {
        Action::Choose { picks } => {
            let Pending { prompt, task } = st.pending.take().expect("validated");
            let s = exec::step(pool, st, task, Some((&prompt, picks)));
            settle(pool, st, s);
        }
        _ => exec::execute(pool, st, a),
    }
    run(pool, st);
    Ok(st.action_log[start..]
        .iter()
        .filter_map(|e| match e {
            LogEntry::Event { event, .. } => Some(event.clone()),
            LogEntry::Action { .. } => None,
        })
        .collect())
}
