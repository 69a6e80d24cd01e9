//! `duelkit`: play games, run tournaments, check and print replays.
//!
//! Exit status is 0 on success, 2 for configuration errors (bad flags,
//! config files, manifests, pools or decks), 3 when a replay fails
//! verification and 1 for anything else.

mod config;

use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use duelkit::agents::stub;
use duelkit::harness::{compute_invalid_rate, FallbackPolicy, HarnessConfig};
use duelkit::pool::DeckLibrary;
use duelkit::runner::{agent_seed, play_game, GameSetup, LogOptions};
use duelkit::tournament::{render_report, run_tournament, Manifest, MetricsReport, TournamentError};
use duelkit::trajectory::{pretty_print, verify_log, ReplayError};
use serde_json::json;

use config::{load_library, PlayConfig};

#[derive(Parser)]
#[command(name = "duelkit", version, about = "Deterministic card-game engine and agent evaluation harness")]
struct Cli {
    /// Card pool TOML; the built-in pool when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pool: Option<PathBuf>,
    /// Decklist TOML; the built-in decks when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    decks: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and write its trajectory log.
    Play(PlayArgs),
    /// Run a round-robin or anchored tournament from a manifest.
    Tournament(TournamentArgs),
    /// Check or print a trajectory log.
    Replay {
        #[command(subcommand)]
        mode: ReplayMode,
    },
    /// Load the pool and decks and print a summary of each deck.
    ValidatePool,
    /// Print the ratings table and head-to-head matrix of a results directory.
    Report {
        /// Tournament results directory.
        dir: PathBuf,
    },
    /// Serve the agent protocol on stdin/stdout, always taking the first
    /// listed action.
    StubAgent,
}

#[derive(Subcommand)]
enum ReplayMode {
    /// Re-execute every action and compare every logged state hash.
    Verify { log: PathBuf },
    /// Print a turn-by-turn transcript.
    Pretty { log: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FallbackArg {
    Random,
    Pass,
}

/// Harness switches shared by `play` and `tournament`.
#[derive(Args, Default)]
struct HarnessFlags {
    /// Render observations as flat `path = value` lines.
    #[arg(long)]
    no_structured_obs: bool,
    /// Leave the legal-action list out of observations.
    #[arg(long)]
    no_action_mask: bool,
    /// Do not pass recent decisions to agents.
    #[arg(long)]
    no_history: bool,
    /// Rejected attempts allowed before the fallback acts.
    #[arg(long, value_name = "N")]
    retry_limit: Option<u32>,
    /// Action taken once retries run out.
    #[arg(long, value_enum)]
    fallback: Option<FallbackArg>,
}

impl HarnessFlags {
    fn apply(&self, mut h: HarnessConfig) -> HarnessConfig {
        if self.no_structured_obs {
            h.structured_observation = false;
        }
        if self.no_action_mask {
            h.legal_action_masking = false;
        }
        if self.no_history {
            h.history_enabled = false;
        }
        if let Some(n) = self.retry_limit {
            h.retry_limit = n;
        }
        if let Some(f) = self.fallback {
            h.fallback_policy = match f {
                FallbackArg::Random => FallbackPolicy::UniformRandomLegal,
                FallbackArg::Pass => FallbackPolicy::PassTurn,
            };
        }
        h
    }
}

#[derive(Args)]
struct PlayArgs {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    deck_a: Option<String>,
    /// Defaults to the first player's deck.
    #[arg(long)]
    deck_b: Option<String>,
    /// random, heuristic, scripted, faulty or external:<command>.
    #[arg(long)]
    agent_a: Option<String>,
    #[arg(long)]
    agent_b: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory log path [default: play-<seed>.jsonl].
    #[arg(long, value_name = "FILE")]
    log: Option<PathBuf>,
    /// Also log every observation shown to an agent.
    #[arg(long)]
    log_observations: bool,
    /// Turn limit before the game is drawn.
    #[arg(long)]
    turn_cap: Option<u32>,
    #[command(flatten)]
    harness: HarnessFlags,
}

#[derive(Args)]
struct TournamentArgs {
    /// Manifest TOML.
    manifest: PathBuf,
    /// Results directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Parallel games; 0 uses every available core.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the manifest's master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    harness: HarnessFlags,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(m: impl ToString) -> Self {
        Failure {
            code: 2,
            message: m.to_string(),
        }
    }

    fn runtime(m: impl ToString) -> Self {
        Failure {
            code: 1,
            message: m.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("duelkit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let lib = || library(&cli);
    match &cli.command {
        Command::StubAgent => stub::serve(io::stdin().lock(), io::stdout().lock()).map_err(Failure::runtime),
        Command::Replay { mode } => replay(&lib()?, mode),
        Command::Report { dir } => report(dir),
        Command::ValidatePool => {
            let lib = lib()?;
            println!("pool {}: {} cards", lib.pool.pool_version(), lib.pool.len());
            for d in &lib.decks {
                let k = d.kind_counts(&lib.pool);
                println!(
                    "{}: {} cards ({} pokemon, {} trainer, {} energy)",
                    d.deck_id,
                    d.cards.len(),
                    k.pokemon,
                    k.trainer,
                    k.energy
                );
            }
            Ok(())
        }
        Command::Play(args) => play(&lib()?, args),
        Command::Tournament(args) => tournament(&lib()?, args),
    }
}

fn library(cli: &Cli) -> Result<DeckLibrary, Failure> {
    load_library(cli.pool.as_deref(), cli.decks.as_deref()).map_err(Failure::config)
}

fn play(lib: &DeckLibrary, args: &PlayArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => PlayConfig::read(path).map_err(Failure::config)?,
        None => PlayConfig::default(),
    };
    cfg.override_with(
        args.deck_a.as_deref(),
        args.deck_b.as_deref(),
        args.agent_a.as_deref(),
        args.agent_b.as_deref(),
        args.seed,
    )
    .map_err(Failure::config)?;
    if let Some(cap) = args.turn_cap {
        cfg.engine.turn_cap = cap;
    }
    if args.log.is_some() {
        cfg.log = args.log.clone();
    }
    cfg.log_observations |= args.log_observations;
    cfg.harness = args.harness.apply(cfg.harness);
    let resolved = cfg.resolve(lib).map_err(Failure::config)?;

    let seed = cfg.seed;
    let setup = GameSetup {
        pool: &lib.pool,
        decks: resolved.decks,
        agent_ids: resolved.agents.clone().map(|a| a.agent_id),
        seed,
        engine: cfg.engine,
        harness: cfg.harness,
        match_id: format!("play-{seed}"),
    };
    let log_path = cfg.log.clone().unwrap_or_else(|| PathBuf::from(format!("play-{seed}.jsonl")));
    let mut a = resolved.agents[0].build(agent_seed(seed, 0), None);
    let mut b = resolved.agents[1].build(agent_seed(seed, 1), None);
    let log = LogOptions {
        path: Some(log_path),
        observations: cfg.log_observations,
    };
    let out = play_game(&setup, [&mut *a, &mut *b], &log).map_err(Failure::runtime)?;
    let line = json!({
        "winner": out.result.winner,
        "reason": out.result.reason,
        "turns": out.turns,
        "invalid_rate": out.accounting.iter().map(compute_invalid_rate).collect::<Vec<_>>(),
        "tool_calls": out.accounting.iter().map(|a| a.tool_calls).collect::<Vec<_>>(),
        "fallbacks": out.accounting.iter().map(|a| a.fallbacks).collect::<Vec<_>>(),
        "final_hash": out.final_hash,
        "log": out.log_path,
    });
    println!("{line}");
    Ok(())
}

fn tournament(lib: &DeckLibrary, args: &TournamentArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| Failure::config(format!("{}: {e}", args.manifest.display())))?;
    let mut m = Manifest::parse(&text).map_err(Failure::config)?;
    if let Some(w) = args.workers {
        m.workers = w;
    }
    if let Some(s) = args.seed {
        m.master_seed = s;
    }
    m.harness = args.harness.apply(m.harness);
    m.validate(lib).map_err(Failure::config)?;
    let rep = run_tournament(lib, &m, &args.out).map_err(|e| match e {
        TournamentError::Manifest(_) | TournamentError::Deck(_) | TournamentError::Schedule(_) => Failure::config(e),
        _ => Failure::runtime(e),
    })?;
    print!("{}", render_report(&rep.metrics));
    println!(
        "{} games, {} failures, results in {}",
        rep.records.len(),
        rep.failures.len(),
        args.out.display()
    );
    Ok(())
}

fn replay(lib: &DeckLibrary, mode: &ReplayMode) -> Result<(), Failure> {
    let classify = |e: ReplayError| match e {
        ReplayError::Io(_) => Failure::config(e),
        other => Failure {
            code: 3,
            message: format!("verification failed: {other}"),
        },
    };
    match mode {
        ReplayMode::Verify { log } => {
            let s = verify_log(&lib.pool, log).map_err(classify)?;
            println!(
                "ok: {} records, {} actions, final hash {}",
                s.records, s.actions, s.final_hash
            );
        }
        ReplayMode::Pretty { log } => print!("{}", pretty_print(log).map_err(classify)?),
    }
    Ok(())
}

fn report(dir: &Path) -> Result<(), Failure> {
    let path = dir.join("metrics.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let m: MetricsReport =
        serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    print!("{}", render_report(&m));
    Ok(())
}
