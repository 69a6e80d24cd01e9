//! Built-in agents, the external-agent adapter and manifest specs.

mod builtin;
pub mod external;
pub mod stub;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{
    heuristic_policy, random_policy, FaultyAgent, HeuristicAgent, HeuristicWeights, RandomAgent,
    ScriptedAgent,
};
pub use external::ExternalAgent;

use crate::harness::Agent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Random,
    Heuristic,
    Scripted,
    Faulty,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub agent_id: String,
    pub kind: AgentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<HeuristicWeights>,
    /// External: program and arguments.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
    /// Faulty: one invalid attempt out of every `invalid_every`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invalid_every: Option<u32>,
    /// Faulty: a query before every `query_every`-th decision.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_every: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentSpecError {
    #[error("agent {0}: {1}")]
    Invalid(String, String),
}

impl AgentSpec {
    pub fn new(agent_id: &str, kind: AgentKind) -> Self {
        AgentSpec {
            agent_id: agent_id.to_string(),
            kind,
            weights: None,
            command: Vec::new(),
            timeout_ms: None,
            invalid_every: None,
            query_every: None,
        }
    }

    pub fn random(agent_id: &str) -> Self {
        AgentSpec::new(agent_id, AgentKind::Random)
    }

    pub fn heuristic(agent_id: &str, weights: HeuristicWeights) -> Self {
        AgentSpec {
            weights: Some(weights),
            ..AgentSpec::new(agent_id, AgentKind::Heuristic)
        }
    }

    pub fn external(agent_id: &str, command: Vec<String>) -> Self {
        AgentSpec {
            command,
            ..AgentSpec::new(agent_id, AgentKind::External)
        }
    }

    /// Parses `random`, `heuristic`, `scripted`, `faulty` or
    /// `external:<command words>`.
    pub fn parse_short(text: &str) -> Result<Self, AgentSpecError> {
        let spec = match text.split_once(':') {
            Some(("external", cmd)) => {
                AgentSpec::external("external", cmd.split_whitespace().map(str::to_string).collect())
            }
            _ => {
                let kind = match text {
                    "random" => AgentKind::Random,
                    "heuristic" => AgentKind::Heuristic,
                    "scripted" => AgentKind::Scripted,
                    "faulty" => AgentKind::Faulty,
                    _ => {
                        return Err(AgentSpecError::Invalid(
                            text.to_string(),
                            "expected random, heuristic, scripted, faulty or external:<command>".into(),
                        ))
                    }
                };
                AgentSpec::new(text, kind)
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), AgentSpecError> {
        let bad = |m: &str| Err(AgentSpecError::Invalid(self.agent_id.clone(), m.to_string()));
        if self.agent_id.is_empty() {
            return bad("agent_id is empty");
        }
        if self.weights.is_some() && self.kind != AgentKind::Heuristic {
            return bad("weights only apply to heuristic agents");
        }
        if let Some(w) = &self.weights {
            if !w.all_positive() {
                return bad("heuristic weights must be positive");
            }
        }
        if (self.kind == AgentKind::External) == self.command.is_empty() {
            return bad("external agents need a command, and only they take one");
        }
        if self.kind != AgentKind::Faulty && (self.invalid_every.is_some() || self.query_every.is_some()) {
            return bad("invalid_every and query_every only apply to faulty agents");
        }
        if self.invalid_every == Some(0) {
            return bad("invalid_every must be at least 1");
        }
        Ok(())
    }

    /// A fresh agent instance; fixed policies carry nothing between games.
    pub fn build(&self, seed: u64, state_dir: Option<PathBuf>) -> Box<dyn Agent> {
        match self.kind {
            AgentKind::Random => Box::new(RandomAgent::new(seed)),
            AgentKind::Heuristic => Box::new(HeuristicAgent::new(self.weights.unwrap_or_default(), seed)),
            AgentKind::Scripted => Box::new(ScriptedAgent),
            AgentKind::Faulty => Box::new(FaultyAgent::new(
                self.invalid_every.unwrap_or(10),
                self.query_every.unwrap_or(0),
                seed,
            )),
            AgentKind::External => Box::new(ExternalAgent::new(self.command.clone(), state_dir, self.timeout_ms)),
        }
    }
}

/// Random, default Heuristic and ten Heuristic variants.
pub fn reference_roster() -> Vec<AgentSpec> {
    let d = HeuristicWeights::default();
    let variants: [(&str, HeuristicWeights); 10] = [
        ("heuristic-aggro", HeuristicWeights { attack: 16.0, ..d }),
        ("heuristic-builder", HeuristicWeights { evolve_pokemon: 10.0, play_pokemon: 8.0, ..d }),
        ("heuristic-charger", HeuristicWeights { attach_energy: 10.0, ..d }),
        ("heuristic-trainer", HeuristicWeights { trainer: 8.0, ..d }),
        ("heuristic-cautious", HeuristicWeights { retreat: 4.0, pass_turn: 2.0, ..d }),
        ("heuristic-passive", HeuristicWeights { pass_turn: 4.0, attack: 2.0, ..d }),
        ("heuristic-ability", HeuristicWeights { use_ability: 10.0, ..d }),
        ("heuristic-flat", HeuristicWeights::uniform(1.0)),
        ("heuristic-rusher", HeuristicWeights { attack: 12.0, attach_energy: 9.0, trainer: 2.0, ..d }),
        ("heuristic-slow", HeuristicWeights { attack: 3.0, retreat: 3.0, pass_turn: 1.5, ..d }),
    ];
    let mut out = vec![AgentSpec::random("random"), AgentSpec::heuristic("heuristic", d)];
    out.extend(variants.into_iter().map(|(id, w)| AgentSpec::heuristic(id, w)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_ids_are_unique() {
        let r = reference_roster();
        assert_eq!(r.len(), 12);
        let mut ids: Vec<_> = r.iter().map(|s| s.agent_id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 12);
        assert!(r.iter().all(|s| s.validate().is_ok()));
    }

    #[test]
    fn spec_rejects_unknown_keys() {
        let err = toml::from_str::<AgentSpec>("agent_id = \"a\"\nkind = \"random\"\nspeed = 3\n");
        assert!(err.is_err());
    }
}
