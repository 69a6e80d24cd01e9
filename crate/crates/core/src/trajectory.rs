//! Trajectory logs and replay.
//!
//! A log is line-delimited JSON: one header line, then one record per
//! observation, executed action and engine event. Every record carries the
//! state hash after it (observations carry the hash of the state they
//! describe). Replay rebuilds the game from the header and re-executes the
//! actions, comparing hashes line by line.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::action::ActionRequest;
use crate::card::CardIdx;
use crate::engine::{apply_action, setup_game};
use crate::events::Event;
use crate::harness::HarnessConfig;
use crate::pool::{Archetype, CardPool, Deck};
use crate::state::{state_hash, EngineConfig, GameState, PlayerId};

pub const LOG_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedDeck {
    pub deck_id: String,
    pub archetype: Archetype,
    /// card_ids in decklist order.
    pub cards: Vec<String>,
}

impl LoggedDeck {
    pub fn of(pool: &CardPool, deck: &Deck) -> Self {
        LoggedDeck {
            deck_id: deck.deck_id.clone(),
            archetype: deck.archetype,
            cards: deck.cards.iter().map(|&c| pool.get(c).card_id.clone()).collect(),
        }
    }

    pub fn to_deck(&self, pool: &CardPool) -> Result<Deck, String> {
        let cards = self
            .cards
            .iter()
            .map(|id| pool.by_id(id).ok_or_else(|| format!("unknown card_id {id}")))
            .collect::<Result<Vec<CardIdx>, _>>()?;
        Ok(Deck {
            deck_id: self.deck_id.clone(),
            archetype: self.archetype,
            cards,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub kind: String,
    pub format: u32,
    pub match_id: String,
    pub pool_version: String,
    pub decks: Vec<LoggedDeck>,
    pub agents: Vec<String>,
    /// Game seed; the engine stream is derived from it.
    pub seed: u64,
    pub engine_seed: u64,
    pub engine: EngineConfig,
    pub harness: HarnessConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Observation,
    Action,
    Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub kind: RecordKind,
    pub turn: u32,
    pub actor: Option<PlayerId>,
    pub payload: Value,
    pub post_state_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionPayload {
    pub step_id: u64,
    pub request: ActionRequest,
    pub fallback: bool,
}

/// Writes to a temp file beside the target and renames on `finish`.
pub struct TrajectoryWriter {
    out: BufWriter<NamedTempFile>,
    path: PathBuf,
}

impl TrajectoryWriter {
    pub fn create(path: &Path, header: &LogHeader) -> io::Result<Self> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        std::fs::create_dir_all(dir)?;
        let tmp = NamedTempFile::new_in(dir)?;
        let mut w = TrajectoryWriter {
            out: BufWriter::new(tmp),
            path: path.to_path_buf(),
        };
        w.line(header)?;
        Ok(w)
    }

    fn line(&mut self, v: &impl Serialize) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, v)?;
        self.out.write_all(b"\n")
    }

    pub fn record(&mut self, rec: &LogRecord) -> io::Result<()> {
        self.line(rec)
    }

    pub fn finish(self) -> io::Result<PathBuf> {
        let tmp = self.out.into_inner().map_err(|e| e.into_error())?;
        tmp.persist(&self.path).map_err(|e| e.error)?;
        Ok(self.path)
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("cannot read log: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("log pool_version {log:?} does not match pool {pool:?}")]
    VersionMismatch { log: String, pool: String },
    #[error("line {line}: cannot rebuild the game: {message}")]
    Setup { line: usize, message: String },
    #[error("line {line}: action rejected on replay: {message}")]
    Rejected { line: usize, message: String },
    #[error("line {line}: state hash {actual} differs from logged {logged}")]
    HashMismatch {
        line: usize,
        logged: String,
        actual: String,
    },
}

impl ReplayError {
    /// 1-based line of the failure, when it is tied to one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ReplayError::Malformed { line, .. }
            | ReplayError::Setup { line, .. }
            | ReplayError::Rejected { line, .. }
            | ReplayError::HashMismatch { line, .. } => Some(*line),
            _ => None,
        }
    }
}

fn malformed(line: usize, e: impl ToString) -> ReplayError {
    ReplayError::Malformed {
        line,
        message: e.to_string(),
    }
}

pub struct ParsedLog {
    pub header: LogHeader,
    /// `(line number, record)`.
    pub records: Vec<(usize, LogRecord)>,
}

pub fn read_log(path: &Path) -> Result<ParsedLog, ReplayError> {
    let reader = BufReader::new(File::open(path)?);
    let mut header = None;
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            header = Some(serde_json::from_str::<LogHeader>(&line).map_err(|e| malformed(n, e))?);
        } else {
            records.push((n, serde_json::from_str::<LogRecord>(&line).map_err(|e| malformed(n, e))?));
        }
    }
    let header = header.ok_or_else(|| malformed(1, "empty log"))?;
    if header.kind != "header" || header.format != LOG_FORMAT {
        return Err(malformed(1, "not a trajectory header of a supported format"));
    }
    Ok(ParsedLog { header, records })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub records: usize,
    pub actions: usize,
    pub final_hash: String,
}

/// Re-executes every action and checks every logged hash.
pub fn verify_log(pool: &CardPool, path: &Path) -> Result<VerifySummary, ReplayError> {
    let log = read_log(path)?;
    let h = &log.header;
    if h.pool_version != pool.pool_version() {
        return Err(ReplayError::VersionMismatch {
            log: h.pool_version.clone(),
            pool: pool.pool_version().into(),
        });
    }
    let setup_err = |message: String| ReplayError::Setup { line: 1, message };
    if h.decks.len() != 2 {
        return Err(setup_err("header needs two decks".into()));
    }
    let decks = [h.decks[0].to_deck(pool).map_err(setup_err)?, h.decks[1].to_deck(pool).map_err(setup_err)?];
    let mut st: GameState =
        setup_game(pool, [&decks[0], &decks[1]], h.engine_seed, h.engine).map_err(|e| setup_err(e.to_string()))?;
    let mut actions = 0;
    for (line, rec) in &log.records {
        if rec.kind == RecordKind::Action {
            let p: ActionPayload = serde_json::from_value(rec.payload.clone()).map_err(|e| malformed(*line, e))?;
            apply_action(pool, &mut st, &p.request).map_err(|r| ReplayError::Rejected {
                line: *line,
                message: r.to_string(),
            })?;
            actions += 1;
        }
        let actual = state_hash(&st).to_string();
        if actual != rec.post_state_hash {
            return Err(ReplayError::HashMismatch {
                line: *line,
                logged: rec.post_state_hash.clone(),
                actual,
            });
        }
    }
    Ok(VerifySummary {
        records: log.records.len(),
        actions,
        final_hash: state_hash(&st).to_string(),
    })
}

/// Turn-by-turn transcript: a `Setup` section, then one section per turn.
pub fn pretty_print(path: &Path) -> Result<String, ReplayError> {
    let log = read_log(path)?;
    let h = &log.header;
    let mut out = String::new();
    let _ = writeln!(out, "match {} (seed {})", h.match_id, h.seed);
    for (p, d) in h.decks.iter().enumerate() {
        let agent = h.agents.get(p).map(String::as_str).unwrap_or("?");
        let _ = writeln!(out, "player {p}: {agent} with {}", d.deck_id);
    }
    let mut section: Option<u32> = None;
    for (line, rec) in &log.records {
        if section != Some(rec.turn) {
            section = Some(rec.turn);
            if rec.turn == 0 {
                let _ = writeln!(out, "\n== Setup ==");
            } else {
                let _ = writeln!(out, "\n== Turn {} ==", rec.turn);
            }
        }
        match rec.kind {
            RecordKind::Observation => {}
            RecordKind::Action => {
                let p: ActionPayload = serde_json::from_value(rec.payload.clone()).map_err(|e| malformed(*line, e))?;
                let args = if p.request.arguments.is_empty() {
                    String::new()
                } else {
                    format!(" {}", Value::Object(p.request.arguments.clone()))
                };
                let fb = if p.fallback { " (fallback)" } else { "" };
                let _ = writeln!(
                    out,
                    "  player {}: {}{args}{fb}",
                    rec.actor.map_or("?".into(), |a| a.to_string()),
                    p.request.tool
                );
            }
            RecordKind::Event => {
                let e: Event = serde_json::from_value(rec.payload.clone()).map_err(|e| malformed(*line, e))?;
                let _ = writeln!(out, "    - {}", e.summary());
            }
        }
    }
    Ok(out)
}
