//! The agent-side scaffold: observation rendering, action masking,
//! history, retries, fallback and accounting.

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{tools, ActionRequest};
use crate::engine::{apply_action, legal_requests};
use crate::events::Event;
use crate::observation::{build_observation, render_observation, CardView, Observation, RenderMode};
use crate::pool::CardPool;
use crate::state::{opponent, GameState, PlayerId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackPolicy {
    UniformRandomLegal,
    PassTurn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarnessConfig {
    /// H1: structured rendering when true, flat raw dump when false.
    pub structured_observation: bool,
    /// H2: include the legal-action set in observations.
    pub legal_action_masking: bool,
    /// H3: keep a window of recent decision steps.
    pub history_enabled: bool,
    pub history_budget: usize,
    pub retry_limit: u32,
    pub fallback_policy: FallbackPolicy,
    /// Query-tool calls allowed per decision step.
    pub query_limit: u32,
    pub deadline_ms: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            structured_observation: true,
            legal_action_masking: true,
            history_enabled: true,
            history_budget: 8,
            retry_limit: 3,
            fallback_policy: FallbackPolicy::UniformRandomLegal,
            query_limit: 16,
            deadline_ms: 30_000,
        }
    }
}

impl HarnessConfig {
    pub fn render_mode(&self) -> RenderMode {
        if self.structured_observation {
            RenderMode::Structured
        } else {
            RenderMode::Raw
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionAccounting {
    pub decisions: u64,
    pub action_attempts: u64,
    pub invalid_attempts: u64,
    pub query_calls: u64,
    pub tool_calls: u64,
    pub fallbacks: u64,
}

impl DecisionAccounting {
    pub fn merge(&mut self, other: &DecisionAccounting) {
        self.decisions += other.decisions;
        self.action_attempts += other.action_attempts;
        self.invalid_attempts += other.invalid_attempts;
        self.query_calls += other.query_calls;
        self.tool_calls += other.tool_calls;
        self.fallbacks += other.fallbacks;
    }
}

/// `invalid_attempts / action_attempts`, absent when nothing was attempted.
pub fn compute_invalid_rate(acct: &DecisionAccounting) -> Option<f64> {
    (acct.action_attempts > 0).then(|| acct.invalid_attempts as f64 / acct.action_attempts as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryStep {
    pub step_id: u64,
    pub turn: u32,
    pub action: ActionRequest,
    pub fallback: bool,
    pub events: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HistoryWindow {
    steps: VecDeque<HistoryStep>,
}

impl HistoryWindow {
    pub fn steps(&self) -> Vec<HistoryStep> {
        self.steps.iter().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

pub fn manage_history(window: &mut HistoryWindow, step: HistoryStep, cfg: &HarnessConfig) {
    if !cfg.history_enabled || cfg.history_budget == 0 {
        window.steps.clear();
        return;
    }
    window.steps.push_back(step);
    while window.steps.len() > cfg.history_budget {
        window.steps.pop_front();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub tool: String,
    pub arguments: serde_json::Map<String, Value>,
    pub answer: Value,
}

/// Everything an agent is given for one decision.
pub struct DecisionRequest<'a> {
    pub match_id: &'a str,
    pub step_id: u64,
    pub seat: PlayerId,
    pub observation: &'a Observation,
    pub rendered: &'a str,
    pub history: &'a [HistoryStep],
    /// The engine legal set. In-process agents always receive it; it is
    /// rendered for external agents only when masking is on.
    pub legal: &'a [ActionRequest],
    pub choosing_card: bool,
    pub deadline_ms: u64,
    /// Rejection message for the previous attempt in this step.
    pub feedback: Option<&'a str>,
    pub query_results: &'a [QueryResult],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("agent timed out")]
    Timeout,
    #[error("malformed reply: {0}")]
    Malformed(String),
    #[error("step_id mismatch: expected {expected}, got {got}")]
    StepMismatch { expected: u64, got: u64 },
    #[error("transport failure: {0}")]
    Transport(String),
}

pub trait Agent: Send {
    /// One tool call: a game action or a query.
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError>;
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
        (**self).act(req)
    }
}

fn is_query(tool: &str) -> bool {
    tools::QUERIES.contains(&tool)
}

/// Answers an informational tool without touching the state.
pub fn answer_query(pool: &CardPool, st: &GameState, seat: PlayerId, req: &ActionRequest) -> Value {
    match req.tool.as_str() {
        tools::QUERY_CARD => {
            let key = req
                .arguments
                .get("card_name")
                .or_else(|| req.arguments.get("card_id"))
                .and_then(Value::as_str)
                .unwrap_or("");
            match pool.lookup(key) {
                Some(idx) => serde_json::to_value(CardView::of(pool.get(idx))).expect("card view"),
                None => json!({ "error": format!("card not found: {key}") }),
            }
        }
        tools::QUERY_DISCARD => {
            let who = match req.arguments.get("player") {
                Some(Value::String(s)) if s == "opponent" => opponent(seat),
                Some(Value::Number(n)) if n.as_u64() == Some(opponent(seat) as u64) => opponent(seat),
                _ => seat,
            };
            let names: Vec<String> = st.players[who]
                .discard
                .iter()
                .map(|&u| st.def(pool, u).name.clone())
                .collect();
            json!({ "player": who, "discard": names })
        }
        _ => json!({ "error": "skill not available" }),
    }
}

pub struct StepOutcome {
    pub observation: Observation,
    pub executed: ActionRequest,
    pub fallback: bool,
    pub events: Vec<Event>,
}

/// Identifies the decision for external agents and logs.
pub struct StepContext<'a> {
    pub match_id: &'a str,
    pub step_id: u64,
}

/// Runs one decision for `seat`, which must be the acting player.
#[allow(clippy::too_many_arguments)]
pub fn decision_step(
    pool: &CardPool,
    st: &mut GameState,
    seat: PlayerId,
    agent: &mut dyn Agent,
    cfg: &HarnessConfig,
    acct: &mut DecisionAccounting,
    history: &mut HistoryWindow,
    fallback_rng: &mut ChaCha8Rng,
    ctx: StepContext<'_>,
) -> StepOutcome {
    debug_assert_eq!(st.acting_player(), Some(seat));
    let observation = build_observation(pool, st, seat, cfg.legal_action_masking);
    let rendered = render_observation(&observation, cfg.render_mode());
    let legal = legal_requests(pool, st);
    let past = history.steps();
    let mut feedback: Option<String> = None;
    let mut queries: Vec<QueryResult> = Vec::new();
    let mut failures = 0u32;
    acct.decisions += 1;

    let mut executed = None;
    while failures <= cfg.retry_limit {
        let req = DecisionRequest {
            match_id: ctx.match_id,
            step_id: ctx.step_id,
            seat,
            observation: &observation,
            rendered: &rendered,
            history: &past,
            legal: &legal,
            choosing_card: observation.global.choosing_card,
            deadline_ms: cfg.deadline_ms,
            feedback: feedback.as_deref(),
            query_results: &queries,
        };
        let reply = agent.act(&req);
        acct.tool_calls += 1;
        match reply {
            Ok(call) if is_query(&call.tool) && (queries.len() as u32) < cfg.query_limit => {
                acct.query_calls += 1;
                let answer = answer_query(pool, st, seat, &call);
                queries.push(QueryResult {
                    tool: call.tool,
                    arguments: call.arguments,
                    answer,
                });
            }
            Ok(call) => {
                acct.action_attempts += 1;
                let result = if is_query(&call.tool) {
                    Err(format!("query limit of {} reached; submit a game action", cfg.query_limit))
                } else {
                    apply_action(pool, st, &call).map_err(|r| r.message)
                };
                match result {
                    Ok(events) => {
                        executed = Some((call, events));
                        break;
                    }
                    Err(msg) => {
                        acct.invalid_attempts += 1;
                        failures += 1;
                        feedback = Some(msg);
                    }
                }
            }
            Err(e) => {
                acct.action_attempts += 1;
                acct.invalid_attempts += 1;
                failures += 1;
                feedback = Some(e.to_string());
            }
        }
    }

    let (executed, fallback, events) = match executed {
        Some((call, events)) => (call, false, events),
        None => {
            acct.fallbacks += 1;
            let call = fallback_action(&legal, cfg.fallback_policy, fallback_rng);
            let events = apply_action(pool, st, &call).expect("fallback is drawn from the legal set");
            (call, true, events)
        }
    };
    manage_history(
        history,
        HistoryStep {
            step_id: ctx.step_id,
            turn: observation.global.turn_number,
            action: executed.clone(),
            fallback,
            events: events.iter().map(Event::summary).collect(),
        },
        cfg,
    );
    StepOutcome {
        observation,
        executed,
        fallback,
        events,
    }
}

fn fallback_action(legal: &[ActionRequest], policy: FallbackPolicy, rng: &mut ChaCha8Rng) -> ActionRequest {
    let pass = ActionRequest::pass_turn();
    match policy {
        FallbackPolicy::PassTurn if legal.contains(&pass) => pass,
        FallbackPolicy::PassTurn => legal[0].clone(),
        FallbackPolicy::UniformRandomLegal => legal.choose(rng).expect("legal set is non-empty").clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(i: u64) -> HistoryStep {
        HistoryStep {
            step_id: i,
            turn: 1,
            action: ActionRequest::pass_turn(),
            fallback: false,
            events: vec![],
        }
    }

    #[test]
    fn history_is_fifo() {
        let cfg = HarnessConfig {
            history_budget: 3,
            ..Default::default()
        };
        let mut w = HistoryWindow::default();
        for i in 0..4 {
            manage_history(&mut w, step(i), &cfg);
        }
        let ids: Vec<u64> = w.steps().iter().map(|s| s.step_id).collect();
        assert_eq!(ids, vec![1, 2, 3]);
    }

    #[test]
    fn disabled_or_zero_budget_keeps_nothing() {
        for cfg in [
            HarnessConfig {
                history_enabled: false,
                ..Default::default()
            },
            HarnessConfig {
                history_budget: 0,
                ..Default::default()
            },
        ] {
            let mut w = HistoryWindow::default();
            for i in 0..5 {
                manage_history(&mut w, step(i), &cfg);
            }
            assert!(w.is_empty());
        }
    }

    #[test]
    fn invalid_rate() {
        let mut a = DecisionAccounting {
            action_attempts: 60,
            invalid_attempts: 2,
            ..Default::default()
        };
        assert!((compute_invalid_rate(&a).unwrap() - 0.0333).abs() < 1e-4);
        a.invalid_attempts = 0;
        assert_eq!(compute_invalid_rate(&a), Some(0.0));
        assert_eq!(compute_invalid_rate(&DecisionAccounting::default()), None);
    }
}
