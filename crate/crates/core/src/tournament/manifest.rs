use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::agents::{AgentKind, AgentSpec};
use crate::harness::HarnessConfig;
use crate::pool::{Deck, DeckLibrary};
use crate::rating::RatingState;
use crate::state::EngineConfig;

use super::TournamentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    RoundRobin,
    Anchored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorSpec {
    pub agent: AgentSpec,
    /// Forced frozen on load.
    pub rating: RatingState,
}

/// What runs between rounds of an anchored tournament.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HookKind {
    #[default]
    None,
    /// Appends `round <k>` to `notes.txt` in the new state dir.
    AppendLine,
    /// Sends an evolve message to the agent's command.
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolvingSpec {
    pub agent: AgentSpec,
    #[serde(default)]
    pub hook: HookKind,
    /// Copied into `state_r0`; empty when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<RatingState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve_timeout_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub mode: Mode,
    pub master_seed: u64,
    /// Mirror deck used by both seats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deck: Option<String>,
    /// Cross-deck table; game `g` uses entry `g % len` as (seat 0, seat 1).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deck_pairs: Vec<[String; 2]>,
    /// 0 means one per available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub log_observations: bool,
    #[serde(default)]
    pub harness: HarnessConfig,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub games_per_pair: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub participants: Vec<AgentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub games_per_anchor: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolving: Option<EvolvingSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anchors: Vec<AnchorSpec>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest, TournamentError> {
        let mut m: Manifest = toml::from_str(text).map_err(|e| TournamentError::Manifest(e.to_string()))?;
        for a in &mut m.anchors {
            a.rating.frozen = true;
        }
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    /// Checks everything that can fail before a game starts.
    pub fn validate(&self, lib: &DeckLibrary) -> Result<(), TournamentError> {
        let bad = |m: String| Err(TournamentError::Manifest(m));
        match (&self.deck, self.deck_pairs.is_empty()) {
            (Some(_), false) => return bad("set either deck or deck_pairs, not both".into()),
            (None, true) => return bad("a deck or deck_pairs table is required".into()),
            _ => {}
        }
        for id in self.deck.iter().chain(self.deck_pairs.iter().flatten()) {
            lib.deck(id)?;
        }
        let mut ids = HashSet::new();
        for spec in self.all_agents() {
            spec.validate()
                .map_err(|e| TournamentError::Manifest(e.to_string()))?;
            if !ids.insert(spec.agent_id.as_str()) {
                return bad(format!("agent_id {} appears twice", spec.agent_id));
            }
        }
        match self.mode {
            Mode::RoundRobin => {
                if self.participants.len() < 2 {
                    return bad("round robin needs at least 2 participants".into());
                }
                if self.games_per_pair.unwrap_or(0) == 0 {
                    return bad("round robin needs games_per_pair >= 1".into());
                }
                if self.evolving.is_some() || !self.anchors.is_empty() || self.rounds.is_some() {
                    return bad("evolving, anchors and rounds belong to anchored mode".into());
                }
            }
            Mode::Anchored => {
                if self.anchors.is_empty() {
                    return bad("anchored mode needs at least 1 anchor".into());
                }
                if self.rounds.unwrap_or(0) == 0 {
                    return bad("anchored mode needs rounds >= 1".into());
                }
                if self.games_per_anchor.unwrap_or(0) == 0 {
                    return bad("anchored mode needs games_per_anchor >= 1".into());
                }
                let Some(ev) = &self.evolving else {
                    return bad("anchored mode needs an evolving agent".into());
                };
                if ev.hook == HookKind::External && ev.agent.kind != AgentKind::External {
                    return bad("the external hook needs an external evolving agent".into());
                }
                if !self.participants.is_empty() || self.games_per_pair.is_some() {
                    return bad("participants and games_per_pair belong to round-robin mode".into());
                }
            }
        }
        Ok(())
    }

    fn all_agents(&self) -> impl Iterator<Item = &AgentSpec> {
        self.participants
            .iter()
            .chain(self.evolving.iter().map(|e| &e.agent))
            .chain(self.anchors.iter().map(|a| &a.agent))
    }

    /// Decks for global game index `g`.
    pub(crate) fn decks_for<'l>(&self, lib: &'l DeckLibrary, g: usize) -> Result<[&'l Deck; 2], TournamentError> {
        Ok(match &self.deck {
            Some(id) => {
                let d = lib.deck(id)?;
                [d, d]
            }
            None => {
                let [a, b] = &self.deck_pairs[g % self.deck_pairs.len()];
                [lib.deck(a)?, lib.deck(b)?]
            }
        })
    }
}
