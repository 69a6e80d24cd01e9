//! Fixed-policy agents.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::{tools, ActionRequest};
use crate::harness::{Agent, AgentError, DecisionRequest};
use crate::observation::PromptView;

/// Uniform over the legal set.
pub fn random_policy(legal: &[ActionRequest], rng: &mut ChaCha8Rng) -> ActionRequest {
    legal.choose(rng).expect("legal set is non-empty").clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeuristicWeights {
    pub attack: f64,
    pub evolve_pokemon: f64,
    pub attach_energy: f64,
    /// Items, Supporters, Tools and Stadium actions.
    pub trainer: f64,
    pub play_pokemon: f64,
    pub use_ability: f64,
    pub retreat: f64,
    pub pass_turn: f64,
}

impl Default for HeuristicWeights {
    fn default() -> Self {
        HeuristicWeights {
            attack: 8.0,
            evolve_pokemon: 6.0,
            attach_energy: 5.0,
            trainer: 4.0,
            play_pokemon: 4.0,
            use_ability: 4.0,
            retreat: 1.0,
            pass_turn: 0.5,
        }
    }
}

impl HeuristicWeights {
    pub fn uniform(w: f64) -> Self {
        HeuristicWeights {
            attack: w,
            evolve_pokemon: w,
            attach_energy: w,
            trainer: w,
            play_pokemon: w,
            use_ability: w,
            retreat: w,
            pass_turn: w,
        }
    }

    pub fn weight(&self, tool: &str) -> f64 {
        match tool {
            tools::ATTACK => self.attack,
            tools::EVOLVE_POKEMON => self.evolve_pokemon,
            tools::ATTACH_ENERGY => self.attach_energy,
            tools::PLAY_POKEMON => self.play_pokemon,
            tools::USE_ABILITY => self.use_ability,
            tools::RETREAT => self.retreat,
            tools::PASS_TURN => self.pass_turn,
            _ => self.trainer,
        }
    }

    pub fn all_positive(&self) -> bool {
        [
            self.attack,
            self.evolve_pokemon,
            self.attach_energy,
            self.trainer,
            self.play_pokemon,
            self.use_ability,
            self.retreat,
            self.pass_turn,
        ]
        .iter()
        .all(|w| w.is_finite() && *w > 0.0)
    }
}

fn labels(req: &ActionRequest) -> Vec<&str> {
    req.arguments
        .get("chosen_cards")
        .and_then(|v| v.as_array())
        .map(|a| a.iter().filter_map(|v| v.as_str()).collect())
        .unwrap_or_default()
}

/// Greedy answer to a card prompt: take as much as allowed, preferring
/// high-HP Pokemon. Required discards and retreat costs give up as little
/// as possible; optional discards are treated as paying for an effect and
/// are maximized.
fn greedy_choice(prompt: &PromptView, legal: &[ActionRequest]) -> ActionRequest {
    let value: HashMap<&str, f64> = prompt
        .candidates
        .iter()
        .map(|c| {
            let v = c.card.as_ref().and_then(|k| k.hp).map_or(10.0, f64::from);
            (c.label.as_str(), v)
        })
        .collect();
    let costly = prompt.reason.contains("discard") || prompt.reason == "put-back";
    let shed = prompt.reason == "retreat-energy" || costly && prompt.min_count > 0;
    let score = |r: &ActionRequest| {
        let picked = labels(r);
        let total: f64 = picked.iter().map(|l| value.get(l).copied().unwrap_or(10.0)).sum();
        let n = picked.len() as f64;
        if shed {
            (-n, -total)
        } else {
            (n, total)
        }
    };
    let mut best = &legal[0];
    let mut best_score = score(best);
    for r in &legal[1..] {
        let s = score(r);
        if s > best_score {
            best = r;
            best_score = s;
        }
    }
    best.clone()
}

/// Samples proportionally to the weight of each action's tool; card
/// prompts use [`greedy_choice`].
pub fn heuristic_policy(
    legal: &[ActionRequest],
    prompt: Option<&PromptView>,
    weights: &HeuristicWeights,
    rng: &mut ChaCha8Rng,
) -> ActionRequest {
    if let Some(p) = prompt {
        if legal.iter().all(|r| r.tool == tools::CHOOSE_CARD) {
            return greedy_choice(p, legal);
        }
    }
    let total: f64 = legal.iter().map(|r| weights.weight(&r.tool)).sum();
    let mut x = rng.random::<f64>() * total;
    for r in legal {
        x -= weights.weight(&r.tool);
        if x < 0.0 {
            return r.clone();
        }
    }
    legal[legal.len() - 1].clone()
}

pub struct RandomAgent {
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> Self {
        RandomAgent {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Agent for RandomAgent {
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
        Ok(random_policy(req.legal, &mut self.rng))
    }
}

pub struct HeuristicAgent {
    weights: HeuristicWeights,
    rng: ChaCha8Rng,
}

impl HeuristicAgent {
    pub fn new(weights: HeuristicWeights, seed: u64) -> Self {
        HeuristicAgent {
            weights,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Agent for HeuristicAgent {
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
        Ok(heuristic_policy(
            req.legal,
            req.observation.global.prompt.as_ref(),
            &self.weights,
            &mut self.rng,
        ))
    }
}

/// Always the first legal action.
pub struct ScriptedAgent;

impl Agent for ScriptedAgent {
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
        Ok(req.legal[0].clone())
    }
}

/// Random play with a fixed error pattern: every `invalid_every`-th action
/// attempt is an unknown tool, and every `query_every`-th decision opens
/// with one `query_card` call.
pub struct FaultyAgent {
    invalid_every: u64,
    query_every: u64,
    attempts: u64,
    decisions: u64,
    last_step: Option<u64>,
    rng: ChaCha8Rng,
}

impl FaultyAgent {
    pub fn new(invalid_every: u32, query_every: u32, seed: u64) -> Self {
        FaultyAgent {
            invalid_every: invalid_every.max(1) as u64,
            query_every: query_every as u64,
            attempts: 0,
            decisions: 0,
            last_step: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Agent for FaultyAgent {
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
        if self.last_step != Some(req.step_id) {
            self.last_step = Some(req.step_id);
            self.decisions += 1;
            if self.query_every > 0 && self.decisions.is_multiple_of(self.query_every) {
                return Ok(ActionRequest::new(tools::QUERY_CARD).arg("card_name", "Fire Energy"));
            }
        }
        self.attempts += 1;
        if self.attempts.is_multiple_of(self.invalid_every) {
            return Ok(ActionRequest::new("flip_table"));
        }
        Ok(random_policy(req.legal, &mut self.rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(tools: &[&str]) -> Vec<ActionRequest> {
        tools.iter().map(|t| ActionRequest::new(t)).collect()
    }

    #[test]
    fn single_action_is_forced() {
        let legal = set(&["pass_turn"]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(random_policy(&legal, &mut rng), legal[0]);
            assert_eq!(heuristic_policy(&legal, None, &HeuristicWeights::default(), &mut rng), legal[0]);
        }
    }

    #[test]
    fn random_is_uniform() {
        let legal = set(&["attack", "retreat", "use_item", "pass_turn"]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut counts = [0u32; 4];
        let n = 10_000;
        for _ in 0..n {
            let a = random_policy(&legal, &mut rng);
            counts[legal.iter().position(|r| *r == a).unwrap()] += 1;
        }
        let expected = n as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 3 degrees of freedom, 99.9th percentile.
        assert!(chi2 < 16.27, "chi2 {chi2}");
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn heuristic_follows_weights() {
        let legal = set(&["attack", "pass_turn"]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let hits = (0..n)
            .filter(|_| heuristic_policy(&legal, None, &HeuristicWeights::default(), &mut rng).tool == "attack")
            .count();
        let p = hits as f64 / n as f64;
        assert!((p - 8.0 / 8.5).abs() < 0.01, "{p}");
    }

    #[test]
    fn equal_weights_are_uniform() {
        let legal = set(&["attack", "retreat", "use_item", "pass_turn"]);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut counts = [0u32; 4];
        let n = 10_000;
        for _ in 0..n {
            let a = heuristic_policy(&legal, None, &HeuristicWeights::uniform(2.0), &mut rng);
            counts[legal.iter().position(|r| *r == a).unwrap()] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.02);
        }
    }

    #[test]
    fn same_seed_same_choice() {
        let legal = set(&["attack", "retreat", "use_item", "pass_turn"]);
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..50).map(|_| random_policy(&legal, &mut rng)).collect()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b: Vec<_> = (0..50).map(|_| random_policy(&legal, &mut rng)).collect();
        assert_eq!(a, b);
    }
}
