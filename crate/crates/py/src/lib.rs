//! `pyduelkit`: the engine, one-game runner and replay check from Python.
//!
//! Structured values cross the boundary as JSON strings.

use std::path::PathBuf;

use duelkit::action::ActionRequest;
use duelkit::agents::AgentSpec;
use duelkit::engine::{apply_action, legal_requests, setup_game};
use duelkit::harness::{compute_invalid_rate, HarnessConfig};
use duelkit::observation::{build_observation, render_observation, RenderMode};
use duelkit::pool::DeckLibrary;
use duelkit::rating::{expected_score as glicko_expected, RatingState};
use duelkit::runner::{agent_seed, play_game, GameSetup, LogOptions};
use duelkit::state::{state_hash, EngineConfig, GameState};
use duelkit::trajectory::verify_log as verify;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::json;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn library() -> DeckLibrary {
    DeckLibrary::builtin()
}

/// Deck ids of the built-in library.
#[pyfunction]
fn deck_ids() -> Vec<String> {
    library().decks.into_iter().map(|d| d.deck_id).collect()
}

/// Plays one game between built-in or external agents and returns the
/// result line as JSON.
#[pyfunction]
#[pyo3(signature = (deck_a, deck_b=None, agent_a="random", agent_b="random", seed=0, log=None, action_mask=true))]
fn play(
    deck_a: &str,
    deck_b: Option<&str>,
    agent_a: &str,
    agent_b: &str,
    seed: u64,
    log: Option<PathBuf>,
    action_mask: bool,
) -> PyResult<String> {
    let result = play_json(deck_a, deck_b, [agent_a, agent_b], seed, log, action_mask);
    result.map_err(value_err)
}

fn play_json(
    deck_a: &str,
    deck_b: Option<&str>,
    agents: [&str; 2],
    seed: u64,
    log: Option<PathBuf>,
    action_mask: bool,
) -> Result<String, String> {
    let lib = library();
    let a = lib.deck(deck_a).map_err(|e| e.to_string())?;
    let b = lib.deck(deck_b.unwrap_or(deck_a)).map_err(|e| e.to_string())?;
    let specs = [AgentSpec::parse_short(agents[0]), AgentSpec::parse_short(agents[1])];
    let [sa, sb] = specs.map(|s| s.map_err(|e| e.to_string()));
    let specs = [sa?, sb?];
    let setup = GameSetup {
        pool: &lib.pool,
        decks: [a, b],
        agent_ids: [agents[0].to_string(), agents[1].to_string()],
        seed,
        engine: EngineConfig::default(),
        harness: HarnessConfig {
            legal_action_masking: action_mask,
            ..Default::default()
        },
        match_id: format!("py-{seed}"),
    };
    let mut x = specs[0].build(agent_seed(seed, 0), None);
    let mut y = specs[1].build(agent_seed(seed, 1), None);
    let opts = LogOptions {
        path: log,
        observations: true,
    };
    let out = play_game(&setup, [&mut *x, &mut *y], &opts).map_err(|e| e.to_string())?;
    Ok(json!({
        "winner": out.result.winner,
        "reason": out.result.reason,
        "turns": out.turns,
        "invalid_rate": out.accounting.iter().map(compute_invalid_rate).collect::<Vec<_>>(),
        "tool_calls": out.accounting.iter().map(|a| a.tool_calls).collect::<Vec<_>>(),
        "final_hash": out.final_hash,
        "log": out.log_path,
    })
    .to_string())
}

/// Re-executes a trajectory log; raises `RuntimeError` naming the failing
/// line.
#[pyfunction]
fn verify_log(path: PathBuf) -> PyResult<String> {
    let s = verify(&library().pool, &path).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(json!({"records": s.records, "actions": s.actions, "final_hash": s.final_hash}).to_string())
}

/// Glicko-2 expected score of the first player against the second.
#[pyfunction]
fn expected_score(mu: f64, phi: f64, opp_mu: f64, opp_phi: f64) -> f64 {
    glicko_expected(&RatingState::new(mu, phi, 0.06), &RatingState::new(opp_mu, opp_phi, 0.06))
}

/// A game driven step by step.
#[pyclass]
struct Game {
    lib: DeckLibrary,
    state: GameState,
}

#[pymethods]
impl Game {
    #[new]
    #[pyo3(signature = (deck_a, deck_b=None, seed=0))]
    fn new(deck_a: &str, deck_b: Option<&str>, seed: u64) -> PyResult<Self> {
        let lib = library();
        let state = {
            let a = lib.deck(deck_a).map_err(value_err)?;
            let b = lib.deck(deck_b.unwrap_or(deck_a)).map_err(value_err)?;
            setup_game(&lib.pool, [a, b], seed, EngineConfig::default()).map_err(value_err)?
        };
        Ok(Game { lib, state })
    }

    /// Seat that must act next, or `None` once the game is over.
    #[getter]
    fn acting_player(&self) -> Option<usize> {
        self.state.acting_player()
    }

    #[getter]
    fn finished(&self) -> bool {
        self.state.is_finished()
    }

    #[getter]
    fn turn(&self) -> u32 {
        self.state.turn_number
    }

    /// `{"winner": .., "reason": ..}` as JSON, or `None` while in progress.
    fn result(&self) -> Option<String> {
        self.state.result.map(|r| json!({"winner": r.winner, "reason": r.reason}).to_string())
    }

    fn state_hash(&self) -> String {
        state_hash(&self.state).to_string()
    }

    /// The legal action requests, each as a JSON object string.
    fn legal_actions(&self) -> Vec<String> {
        legal_requests(&self.lib.pool, &self.state)
            .iter()
            .map(|r| serde_json::to_string(r).expect("request serializes"))
            .collect()
    }

    /// `seat`'s rendered observation.
    #[pyo3(signature = (seat, action_mask=true, raw=false))]
    fn observation(&self, seat: usize, action_mask: bool, raw: bool) -> PyResult<String> {
        if seat > 1 {
            return Err(value_err("seat must be 0 or 1"));
        }
        let obs = build_observation(&self.lib.pool, &self.state, seat, action_mask);
        let mode = if raw { RenderMode::Raw } else { RenderMode::Structured };
        Ok(render_observation(&obs, mode))
    }

    /// Applies a JSON action request; raises `ValueError` when it is
    /// rejected, leaving the game unchanged.
    fn step(&mut self, action: &str) -> PyResult<()> {
        let req: ActionRequest = serde_json::from_str(action).map_err(value_err)?;
        apply_action(&self.lib.pool, &mut self.state, &req).map_err(value_err)?;
        Ok(())
    }
}

#[pymodule]
fn pyduelkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(deck_ids, m)?)?;
    m.add_function(wrap_pyfunction!(play, m)?)?;
    m.add_function(wrap_pyfunction!(verify_log, m)?)?;
    m.add_function(wrap_pyfunction!(expected_score, m)?)?;
    m.add_class::<Game>()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn play_json_is_deterministic() {
        let a = play_json("lugia-like", None, ["random", "heuristic"], 3, None, true).unwrap();
        let b = play_json("lugia-like", None, ["random", "heuristic"], 3, None, true).unwrap();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert!(v["turns"].as_u64().unwrap() > 0);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(play_json("nope", None, ["random", "random"], 0, None, true).is_err());
        assert!(play_json("lugia-like", None, ["wizard", "random"], 0, None, true).is_err());
    }
}
