//! Plays one game between two agents through the harness.

use std::io;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{setup_game, SetupError};
use crate::harness::{decision_step, Agent, DecisionAccounting, HarnessConfig, HistoryWindow, StepContext};
use crate::pool::{CardPool, Deck};
use crate::seed::{split, stream};
use crate::state::{state_hash, EngineConfig, GameResult, GameState, LogEntry, PlayerId};
use crate::trajectory::{
    ActionPayload, LogHeader, LogRecord, LoggedDeck, RecordKind, TrajectoryWriter, LOG_FORMAT,
};

#[derive(Debug, Clone)]
pub struct GameSetup<'a> {
    pub pool: &'a CardPool,
    pub decks: [&'a Deck; 2],
    pub agent_ids: [String; 2],
    pub seed: u64,
    pub engine: EngineConfig,
    pub harness: HarnessConfig,
    pub match_id: String,
}

#[derive(Debug, Clone, Default)]
pub struct LogOptions {
    pub path: Option<PathBuf>,
    pub observations: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub result: GameResult,
    pub turns: u32,
    pub decisions: u64,
    pub accounting: [DecisionAccounting; 2],
    pub final_hash: String,
    pub log_path: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("writing trajectory: {0}")]
    Io(#[from] io::Error),
}

fn agent_stream(seat: PlayerId) -> u64 {
    [stream::AGENT_SEAT_0, stream::AGENT_SEAT_1][seat]
}

/// Seed an agent in `seat` should be built with for game `seed`.
pub fn agent_seed(seed: u64, seat: PlayerId) -> u64 {
    split(seed, agent_stream(seat))
}

fn hash(st: &GameState) -> String {
    state_hash(st).to_string()
}

struct Logger {
    writer: Option<TrajectoryWriter>,
    observations: bool,
}

impl Logger {
    fn events_since(&mut self, st: &GameState, from: usize) -> io::Result<()> {
        let Some(w) = self.writer.as_mut() else {
            return Ok(());
        };
        let h = hash(st);
        for entry in &st.action_log[from..] {
            if let LogEntry::Event { turn, event } = entry {
                w.record(&LogRecord {
                    kind: RecordKind::Event,
                    turn: *turn,
                    actor: None,
                    payload: serde_json::to_value(event).expect("event serializes"),
                    post_state_hash: h.clone(),
                })?;
            }
        }
        Ok(())
    }
}

pub fn play_game(
    g: &GameSetup<'_>,
    agents: [&mut dyn Agent; 2],
    log: &LogOptions,
) -> Result<GameOutcome, GameError> {
    let engine_seed = split(g.seed, stream::ENGINE);
    let mut st = setup_game(g.pool, g.decks, engine_seed, g.engine)?;
    let writer = match &log.path {
        Some(path) => Some(TrajectoryWriter::create(
            path,
            &LogHeader {
                kind: "header".into(),
                format: LOG_FORMAT,
                match_id: g.match_id.clone(),
                pool_version: g.pool.pool_version().into(),
                decks: g.decks.iter().map(|d| LoggedDeck::of(g.pool, d)).collect(),
                agents: g.agent_ids.to_vec(),
                seed: g.seed,
                engine_seed,
                engine: g.engine,
                harness: g.harness,
            },
        )?),
        None => None,
    };
    let mut logger = Logger {
        writer,
        observations: log.observations,
    };
    logger.events_since(&st, 0)?;

    let mut acct = [DecisionAccounting::default(); 2];
    let mut history = [HistoryWindow::default(), HistoryWindow::default()];
    let mut fallback_rng = [stream::FALLBACK_SEAT_0, stream::FALLBACK_SEAT_1]
        .map(|s| ChaCha8Rng::seed_from_u64(split(g.seed, s)));
    let mut step_id = 0u64;

    while let Some(seat) = st.acting_player() {
        step_id += 1;
        let turn = st.turn_number;
        let pre_hash = logger.writer.is_some().then(|| hash(&st));
        let mark = st.action_log.len();
        let out = decision_step(
            g.pool,
            &mut st,
            seat,
            &mut *agents[seat],
            &g.harness,
            &mut acct[seat],
            &mut history[seat],
            &mut fallback_rng[seat],
            StepContext {
                match_id: &g.match_id,
                step_id,
            },
        );
        if let Some(w) = logger.writer.as_mut() {
            if logger.observations {
                w.record(&LogRecord {
                    kind: RecordKind::Observation,
                    turn,
                    actor: Some(seat),
                    payload: serde_json::to_value(&out.observation).expect("observation serializes"),
                    post_state_hash: pre_hash.expect("logging"),
                })?;
            }
            w.record(&LogRecord {
                kind: RecordKind::Action,
                turn,
                actor: Some(seat),
                payload: serde_json::to_value(ActionPayload {
                    step_id,
                    request: out.executed,
                    fallback: out.fallback,
                })
                .expect("payload serializes"),
                post_state_hash: hash(&st),
            })?;
        }
        logger.events_since(&st, mark)?;
    }

    let log_path = match logger.writer {
        Some(w) => Some(w.finish()?),
        None => None,
    };
    Ok(GameOutcome {
        result: st.result.expect("finished games have a result"),
        turns: st.turn_number,
        decisions: step_id,
        accounting: acct,
        final_hash: hash(&st),
        log_path,
    })
}

/// Convenience for callers that only need the outcome.
pub fn play_unlogged(g: &GameSetup<'_>, agents: [&mut dyn Agent; 2]) -> Result<GameOutcome, GameError> {
    play_game(g, agents, &LogOptions::default())
}

pub fn log_file_name(dir: &Path, match_id: &str) -> PathBuf {
    dir.join(format!("{match_id}.jsonl"))
}
