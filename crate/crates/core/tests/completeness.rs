mod common;

use common::oracle::{check_state, Checked};
use common::sample_states;
use duelkit::pool::DeckLibrary;

#[test]
fn legal_set_matches_acceptance_on_sampled_states() {
    let lib = DeckLibrary::builtin();
    let states = sample_states(&lib, 300, 15, 31);
    let mut c = Checked::default();
    let mut problems = Vec::new();
    for (i, st) in states.iter().enumerate() {
        check_state(&lib.pool, st, &mut c);
        for p in c.problems.drain(..) {
            problems.push(format!("state {i} (turn {}, {:?}): {p}", st.turn_number, st.phase));
        }
    }
    eprintln!("{} requests, {} accepted, {} decided by the oracle", c.requests, c.accepted, c.decided);
    assert!(c.accepted > 1000 && c.requests - c.accepted > 1000);
    assert!(problems.is_empty(), "{} problems, first: {:#?}", problems.len(), &problems[..problems.len().min(10)]);
}
