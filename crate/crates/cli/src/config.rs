//! Pool loading and the `play` config file.

use std::fs;
use std::path::{Path, PathBuf};

use duelkit::agents::AgentSpec;
use duelkit::harness::HarnessConfig;
use duelkit::pool::{Deck, DeckLibrary, DEFAULT_DECKS_TOML, DEFAULT_POOL_TOML};
use duelkit::state::EngineConfig;
use serde::Deserialize;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_library(pool: Option<&Path>, decks: Option<&Path>) -> Result<DeckLibrary, String> {
    let pool_doc = match pool {
        Some(p) => read(p)?,
        None => DEFAULT_POOL_TOML.to_string(),
    };
    let decks_doc = match decks {
        Some(p) => read(p)?,
        None => DEFAULT_DECKS_TOML.to_string(),
    };
    DeckLibrary::load(&pool_doc, &decks_doc).map_err(|e| e.to_string())
}

/// Settings for one game. Every key is optional.
///
/// ```toml
/// deck_a = "charizard-like"
/// deck_b = "lugia-like"
/// seed = 7
/// log = "game.jsonl"
/// log_observations = true
///
/// [agent_a]
/// agent_id = "h"
/// kind = "heuristic"
///
/// [harness]
/// legal_action_masking = false
///
/// [engine]
/// turn_cap = 120
/// ```
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlayConfig {
    pub deck_a: String,
    pub deck_b: Option<String>,
    pub agent_a: AgentSpec,
    pub agent_b: AgentSpec,
    pub seed: u64,
    pub log: Option<PathBuf>,
    pub log_observations: bool,
    pub harness: HarnessConfig,
    pub engine: EngineConfig,
}

impl Default for PlayConfig {
    fn default() -> Self {
        PlayConfig {
            deck_a: "charizard-like".into(),
            deck_b: None,
            agent_a: AgentSpec::random("random-a"),
            agent_b: AgentSpec::random("random-b"),
            seed: 0,
            log: None,
            log_observations: false,
            harness: HarnessConfig::default(),
            engine: EngineConfig::default(),
        }
    }
}

pub struct Resolved<'a> {
    pub decks: [&'a Deck; 2],
    pub agents: [AgentSpec; 2],
}

fn short_agent(text: &str, seat: &str) -> Result<AgentSpec, String> {
    let mut spec = AgentSpec::parse_short(text).map_err(|e| e.to_string())?;
    spec.agent_id = format!("{}-{seat}", spec.agent_id);
    Ok(spec)
}

impl PlayConfig {
    pub fn read(path: &Path) -> Result<PlayConfig, String> {
        toml::from_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn override_with(
        &mut self,
        deck_a: Option<&str>,
        deck_b: Option<&str>,
        agent_a: Option<&str>,
        agent_b: Option<&str>,
        seed: Option<u64>,
    ) -> Result<(), String> {
        if let Some(d) = deck_a {
            self.deck_a = d.into();
        }
        if let Some(d) = deck_b {
            self.deck_b = Some(d.into());
        }
        if let Some(a) = agent_a {
            self.agent_a = short_agent(a, "a")?;
        }
        if let Some(a) = agent_b {
            self.agent_b = short_agent(a, "b")?;
        }
        if let Some(s) = seed {
            self.seed = s;
        }
        Ok(())
    }

    /// Checks everything before a game starts.
    pub fn resolve<'a>(&self, lib: &'a DeckLibrary) -> Result<Resolved<'a>, String> {
        let a = lib.deck(&self.deck_a).map_err(|e| e.to_string())?;
        let b = lib
            .deck(self.deck_b.as_deref().unwrap_or(&self.deck_a))
            .map_err(|e| e.to_string())?;
        for spec in [&self.agent_a, &self.agent_b] {
            spec.validate().map_err(|e| e.to_string())?;
        }
        if self.engine.turn_cap == 0 {
            return Err("engine.turn_cap must be at least 1".into());
        }
        Ok(Resolved {
            decks: [a, b],
            agents: [self.agent_a.clone(), self.agent_b.clone()],
        })
    }
}
