//! Round-robin and anchored tournaments.
//!
//! Results directory:
//!
//! ```text
//! manifest.toml     the manifest as run
//! records.jsonl     one MatchRecord per finished game, appended per period
//! failures.json     games that could not be played
//! ratings.json      final rating table
//! metrics.json      ratings, head-to-head matrix, invalid rates, tool calls
//! report.txt        the same as text
//! logs/             one trajectory log per game
//! snapshots.json    anchored only: one rating snapshot per round
//! state/state_rK    anchored only: evolving-agent state after round K
//! ```

mod manifest;
mod metrics;
mod schedule;

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use manifest::{AnchorSpec, EvolvingSpec, HookKind, Manifest, Mode};
pub use metrics::{aggregate_metrics, render_report, AgentMetrics, MetricsReport, RatingRow};
pub use schedule::{schedule_round_robin, Assignment, ScheduleError};

use crate::agents::external::{send_evolve, EvolveMessage};
use crate::agents::AgentSpec;
use crate::harness::DecisionAccounting;
use crate::pool::{Deck, DeckError, DeckLibrary};
use crate::rating::{rate_period, update_period, RatingError, RatingState, DEFAULT_TAU};
use crate::runner::{agent_seed, play_game, GameError, GameSetup, LogOptions};
use crate::seed::split;
use crate::state::{PlayerId, WinReason};

const DEFAULT_EVOLVE_TIMEOUT_MS: u64 = 600_000;
pub const NOTES_FILE: &str = "notes.txt";

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Deck(#[from] DeckError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Rating(#[from] RatingError),
    #[error("results directory: {0}")]
    Io(#[from] io::Error),
    #[error("worker pool: {0}")]
    Workers(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub game_id: String,
    /// Rating period: pairing cycle or anchored round, from 1.
    pub period: u32,
    pub agents: [String; 2],
    pub decks: [String; 2],
    pub seed: u64,
    /// Sums to 1.
    pub scores: [f64; 2],
    pub winner: Option<PlayerId>,
    pub reason: WinReason,
    pub accounting: [DecisionAccounting; 2],
    pub turns: u32,
    pub final_hash: String,
    /// Relative to the results directory.
    pub log_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFailure {
    pub game_id: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSnapshot {
    pub round: u32,
    pub rating: RatingState,
    pub games: usize,
    pub score: f64,
    /// State the next round reads, relative to the results directory.
    pub state_dir: String,
    pub hook_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TournamentReport {
    pub mode: Mode,
    pub records: Vec<MatchRecord>,
    pub failures: Vec<GameFailure>,
    pub metrics: MetricsReport,
    pub snapshots: Vec<RoundSnapshot>,
}

pub fn run_tournament(lib: &DeckLibrary, m: &Manifest, out: &Path) -> Result<TournamentReport, TournamentError> {
    match m.mode {
        Mode::RoundRobin => run_round_robin(lib, m, out),
        Mode::Anchored => run_anchored(lib, m, out),
    }
}

struct Job<'a> {
    game_id: String,
    period: u32,
    specs: [&'a AgentSpec; 2],
    decks: [&'a Deck; 2],
    seed: u64,
    state_dirs: [Option<PathBuf>; 2],
}

fn play_job(lib: &DeckLibrary, m: &Manifest, out: &Path, job: Job<'_>) -> Result<MatchRecord, GameFailure> {
    let fail = |e: GameError| GameFailure {
        game_id: job.game_id.clone(),
        error: e.to_string(),
    };
    let setup = GameSetup {
        pool: &lib.pool,
        decks: job.decks,
        agent_ids: job.specs.map(|s| s.agent_id.clone()),
        seed: job.seed,
        engine: m.engine,
        harness: m.harness,
        match_id: job.game_id.clone(),
    };
    let [d0, d1] = job.state_dirs.clone();
    let mut a0 = job.specs[0].build(agent_seed(job.seed, 0), d0);
    let mut a1 = job.specs[1].build(agent_seed(job.seed, 1), d1);
    let rel = format!("logs/{}.jsonl", job.game_id);
    let log = LogOptions {
        path: Some(out.join(&rel)),
        observations: m.log_observations,
    };
    let o = play_game(&setup, [&mut *a0, &mut *a1], &log).map_err(fail)?;
    Ok(MatchRecord {
        game_id: job.game_id,
        period: job.period,
        agents: setup.agent_ids,
        decks: job.decks.map(|d| d.deck_id.clone()),
        seed: job.seed,
        scores: [o.result.score(0), o.result.score(1)],
        winner: o.result.winner,
        reason: o.result.reason,
        accounting: o.accounting,
        turns: o.turns,
        final_hash: o.final_hash,
        log_path: Some(rel),
    })
}

fn prepare_out(m: &Manifest, out: &Path) -> Result<PathBuf, TournamentError> {
    fs::create_dir_all(out.join("logs"))?;
    let out = out.canonicalize()?;
    fs::write(out.join("manifest.toml"), m.to_toml())?;
    File::create(out.join("records.jsonl"))?;
    Ok(out)
}

fn append_records(out: &Path, records: &[MatchRecord]) -> io::Result<()> {
    let mut f = OpenOptions::new().append(true).open(out.join("records.jsonl"))?;
    for r in records {
        writeln!(f, "{}", serde_json::to_string(r).expect("record serializes"))?;
    }
    f.sync_data()
}

fn write_json(path: &Path, v: &impl Serialize) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("serializes");
    text.push('\n');
    fs::write(path, text)
}

fn finish(
    out: &Path,
    mode: Mode,
    agents: &[String],
    records: Vec<MatchRecord>,
    failures: Vec<GameFailure>,
    ratings: Vec<RatingRow>,
    snapshots: Vec<RoundSnapshot>,
) -> Result<TournamentReport, TournamentError> {
    write_json(&out.join("ratings.json"), &ratings)?;
    write_json(&out.join("failures.json"), &failures)?;
    let metrics = aggregate_metrics(agents, &records, ratings);
    write_json(&out.join("metrics.json"), &metrics)?;
    fs::write(out.join("report.txt"), render_report(&metrics))?;
    Ok(TournamentReport {
        mode,
        records,
        failures,
        metrics,
        snapshots,
    })
}

fn worker_pool(workers: usize) -> Result<rayon::ThreadPool, TournamentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| TournamentError::Workers(e.to_string()))
}

/// Plays the full schedule, one rating period per cycle. Games inside a
/// cycle run on the worker pool; ratings update after the cycle.
pub fn run_round_robin(lib: &DeckLibrary, m: &Manifest, out: &Path) -> Result<TournamentReport, TournamentError> {
    m.validate(lib)?;
    let out = prepare_out(m, out)?;
    let n = m.participants.len();
    let cycles = m.games_per_pair.unwrap_or(0);
    let schedule = schedule_round_robin(n, cycles)?;
    let pool = worker_pool(m.workers)?;
    let mut ratings = vec![RatingState::default(); n];
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for cycle in 1..=cycles {
        let jobs = schedule
            .iter()
            .enumerate()
            .filter(|(_, a)| a.cycle == cycle)
            .map(|(g, a)| {
                Ok((
                    a.seats,
                    Job {
                        game_id: format!("g{:05}", g + 1),
                        period: cycle,
                        specs: a.seats.map(|i| &m.participants[i]),
                        decks: m.decks_for(lib, g)?,
                        seed: split(m.master_seed, g as u64),
                        state_dirs: [None, None],
                    },
                ))
            })
            .collect::<Result<Vec<_>, TournamentError>>()?;
        let results: Vec<_> = pool.install(|| {
            jobs.into_par_iter()
                .map(|(seats, job)| (seats, play_job(lib, m, &out, job)))
                .collect()
        });
        let mut period = Vec::new();
        let mut done = Vec::new();
        for (seats, r) in results {
            match r {
                Ok(rec) => {
                    period.push((seats[0], seats[1], rec.scores[0]));
                    done.push(rec);
                }
                Err(f) => failures.push(f),
            }
        }
        append_records(&out, &done)?;
        records.extend(done);
        ratings = rate_period(&ratings, &period, DEFAULT_TAU)?;
    }
    let ids: Vec<String> = m.participants.iter().map(|p| p.agent_id.clone()).collect();
    let rows = ids.iter().zip(&ratings).map(|(id, r)| RatingRow::new(id, r)).collect();
    finish(&out, Mode::RoundRobin, &ids, records, failures, rows, Vec::new())
}

fn copy_dir(from: &Path, to: &Path) -> io::Result<()> {
    fs::create_dir_all(to)?;
    for entry in fs::read_dir(from)? {
        let entry = entry?;
        let target = to.join(entry.file_name());
        if entry.file_type()?.is_dir() {
            copy_dir(&entry.path(), &target)?;
        } else {
            fs::copy(entry.path(), &target)?;
        }
    }
    Ok(())
}

fn state_name(round: u32) -> String {
    format!("state/state_r{round}")
}

fn run_hook(ev: &EvolvingSpec, round: u32, trajectories: Vec<PathBuf>, dir: &Path) -> Result<(), String> {
    match ev.hook {
        HookKind::None => Ok(()),
        HookKind::AppendLine => OpenOptions::new()
            .create(true)
            .append(true)
            .open(dir.join(NOTES_FILE))
            .and_then(|mut f| writeln!(f, "round {round}"))
            .map_err(|e| e.to_string()),
        HookKind::External => {
            let timeout = Duration::from_millis(ev.evolve_timeout_ms.unwrap_or(DEFAULT_EVOLVE_TIMEOUT_MS));
            send_evolve(&ev.agent.command, &EvolveMessage::new(round, trajectories, dir.to_path_buf()), timeout)
        }
    }
}

/// Plays the evolving agent against every anchor for each round, sequentially,
/// applies one rating period to the evolving agent, then runs the evolution
/// hook on a fresh copy of its state. A failed hook leaves the new state
/// equal to the previous round's.
pub fn run_anchored(lib: &DeckLibrary, m: &Manifest, out: &Path) -> Result<TournamentReport, TournamentError> {
    m.validate(lib)?;
    let ev = m.evolving.as_ref().expect("validated");
    let rounds = m.rounds.unwrap_or(0);
    let per_anchor = m.games_per_anchor.unwrap_or(0);
    let out = prepare_out(m, out)?;
    let state_root = out.join("state");
    if state_root.exists() {
        fs::remove_dir_all(&state_root)?;
    }
    let r0 = out.join(state_name(0));
    match &ev.initial_state {
        Some(src) => copy_dir(src, &r0)?,
        None => fs::create_dir_all(&r0)?,
    }

    let mut rating = RatingState {
        frozen: false,
        ..ev.rating.unwrap_or_default()
    };
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut snapshots = Vec::new();
    let mut g = 0usize;
    for round in 1..=rounds {
        let current = out.join(state_name(round - 1));
        let mut results = Vec::new();
        let mut done = Vec::new();
        for anchor in &m.anchors {
            for k in 0..per_anchor {
                let seat = (k % 2) as usize;
                let mut specs = [&anchor.agent; 2];
                specs[seat] = &ev.agent;
                let mut state_dirs = [None, None];
                state_dirs[seat] = Some(current.clone());
                let job = Job {
                    game_id: format!("r{round:02}-g{:05}", g + 1),
                    period: round,
                    specs,
                    decks: m.decks_for(lib, g)?,
                    seed: split(m.master_seed, g as u64),
                    state_dirs,
                };
                g += 1;
                match play_job(lib, m, &out, job) {
                    Ok(rec) => {
                        results.push((anchor.rating, rec.scores[seat]));
                        done.push(rec);
                    }
                    Err(f) => failures.push(f),
                }
            }
        }
        append_records(&out, &done)?;
        rating = update_period(&rating, &results, DEFAULT_TAU)?;

        let next = out.join(state_name(round));
        copy_dir(&current, &next)?;
        let trajectories = done
            .iter()
            .filter_map(|r| r.log_path.as_ref().map(|p| out.join(p)))
            .collect();
        let hook_error = run_hook(ev, round, trajectories, &next).err();
        if hook_error.is_some() {
            fs::remove_dir_all(&next)?;
            copy_dir(&current, &next)?;
        }
        snapshots.push(RoundSnapshot {
            round,
            rating,
            games: results.len(),
            score: results.iter().map(|r| r.1).sum(),
            state_dir: state_name(round),
            hook_error,
        });
        write_json(&out.join("snapshots.json"), &snapshots)?;
        records.extend(done);
    }

    let mut ids = vec![ev.agent.agent_id.clone()];
    let mut rows = vec![RatingRow::new(&ev.agent.agent_id, &rating)];
    for a in &m.anchors {
        ids.push(a.agent.agent_id.clone());
        rows.push(RatingRow::new(&a.agent.agent_id, &a.rating));
    }
    finish(&out, Mode::Anchored, &ids, records, failures, rows, snapshots)
}

/// Reads `records.jsonl` from a results directory.
pub fn load_records(dir: &Path) -> Result<Vec<MatchRecord>, TournamentError> {
    let text = fs::read_to_string(dir.join("records.jsonl"))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| TournamentError::Io(e.into())))
        .collect()
}
