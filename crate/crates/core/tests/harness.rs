mod common;

use std::collections::BTreeSet;
use std::fs;

use duelkit::action::{tools, ActionRequest};
use duelkit::agents::external::rendered_actions;
use duelkit::agents::{ExternalAgent, FaultyAgent, RandomAgent};
use duelkit::engine::{legal_requests, setup_game};
use duelkit::harness::{
    decision_step, Agent, AgentError, DecisionAccounting, DecisionRequest, FallbackPolicy, HarnessConfig,
    HistoryWindow, StepContext,
};
use duelkit::observation::{build_observation, render_observation, RenderMode};
use duelkit::pool::DeckLibrary;
use duelkit::runner::{agent_seed, play_game, GameSetup, LogOptions};
use duelkit::state::{EngineConfig, GameState};
use duelkit::trajectory::{read_log, verify_log, RecordKind, ReplayError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Replies from a fixed script, then the first legal action.
struct Script(Vec<Result<ActionRequest, AgentError>>);

impl Agent for Script {
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
        if self.0.is_empty() {
            Ok(req.legal[0].clone())
        } else {
            self.0.remove(0)
        }
    }
}

fn opening(lib: &DeckLibrary) -> GameState {
    let d = lib.deck("charizard-like").unwrap();
    setup_game(&lib.pool, [d, d], 4, EngineConfig::default()).unwrap()
}

fn one_step(lib: &DeckLibrary, st: &mut GameState, agent: &mut dyn Agent, cfg: &HarnessConfig) -> (DecisionAccounting, bool, ActionRequest) {
    let seat = st.acting_player().unwrap();
    let mut acct = DecisionAccounting::default();
    let out = decision_step(
        &lib.pool,
        st,
        seat,
        agent,
        cfg,
        &mut acct,
        &mut HistoryWindow::default(),
        &mut ChaCha8Rng::seed_from_u64(1),
        StepContext { match_id: "t", step_id: 1 },
    );
    (acct, out.fallback, out.executed)
}

fn garbage() -> Result<ActionRequest, AgentError> {
    Ok(ActionRequest::new("dance"))
}

#[test]
fn two_bad_attempts_then_a_legal_one() {
    let lib = DeckLibrary::builtin();
    let mut st = opening(&lib);
    let legal = legal_requests(&lib.pool, &st);
    let mut agent = Script(vec![garbage(), Err(AgentError::Malformed("{".into()))]);
    let (acct, fallback, executed) = one_step(&lib, &mut st, &mut agent, &HarnessConfig::default());
    assert!(!fallback);
    assert_eq!(executed, legal[0]);
    assert_eq!((acct.action_attempts, acct.invalid_attempts, acct.tool_calls, acct.fallbacks), (3, 2, 3, 0));
}

#[test]
fn persistent_garbage_falls_back_after_the_retry_limit() {
    let lib = DeckLibrary::builtin();
    let cfg = HarnessConfig {
        retry_limit: 2,
        fallback_policy: FallbackPolicy::PassTurn,
        ..Default::default()
    };
    let mut st = opening(&lib);
    let legal = legal_requests(&lib.pool, &st);
    let mut agent = Script((0..10).map(|_| garbage()).collect());
    let (acct, fallback, executed) = one_step(&lib, &mut st, &mut agent, &cfg);
    assert!(fallback);
    assert!(legal.contains(&executed));
    assert_eq!((acct.action_attempts, acct.invalid_attempts, acct.fallbacks), (3, 3, 1));
    assert_eq!(agent.0.len(), 7);
}

#[test]
fn feedback_carries_the_rejection() {
    struct Echo(Vec<Option<String>>);
    impl Agent for Echo {
        fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
            self.0.push(req.feedback.map(str::to_string));
            if self.0.len() == 1 {
                Ok(ActionRequest::new("dance"))
            } else {
                Ok(req.legal[0].clone())
            }
        }
    }
    let lib = DeckLibrary::builtin();
    let mut st = opening(&lib);
    let mut agent = Echo(vec![]);
    one_step(&lib, &mut st, &mut agent, &HarnessConfig::default());
    assert_eq!(agent.0[0], None);
    assert!(agent.0[1].as_deref().unwrap().contains("dance"));
}

#[test]
fn queries_do_not_count_as_attempts() {
    let lib = DeckLibrary::builtin();
    let mut st = opening(&lib);
    let q = ActionRequest::new(tools::QUERY_CARD).arg("card_name", "Fire Energy");
    let mut agent = Script(vec![Ok(q.clone()), Ok(q)]);
    let (acct, fallback, _) = one_step(&lib, &mut st, &mut agent, &HarnessConfig::default());
    assert!(!fallback);
    assert_eq!((acct.query_calls, acct.action_attempts, acct.tool_calls), (2, 1, 3));
}

#[test]
fn faulty_agent_accounting() {
    let lib = DeckLibrary::builtin();
    let a = common::faulty_accounting(&lib, 10, 4, 1_000);
    assert!(a.action_attempts >= 1_000);
    let rate = a.invalid_attempts as f64 / a.action_attempts as f64;
    assert!((rate - 0.1).abs() <= 0.001, "{rate}");
    assert_eq!(a.tool_calls, a.action_attempts + a.query_calls);
    assert!(a.query_calls > 0);
}

#[test]
fn mirror_series_is_reproducible() {
    let lib = DeckLibrary::builtin();
    let a = common::random_mirror_run(&lib, 20, 606);
    let b = common::random_mirror_run(&lib, 20, 606);
    assert_eq!(a, b);
    let c = common::random_mirror_run(&lib, 20, 607);
    assert_ne!(a.0, c.0);
}

/// `path = value` facts of a JSON document, empty containers included.
fn facts(v: &Value, path: &str, out: &mut BTreeSet<String>) {
    let child = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| facts(x, &child(k), out)),
        Value::Array(a) if !a.is_empty() => a.iter().enumerate().for_each(|(i, x)| facts(x, &format!("{path}[{i}]"), out)),
        leaf => {
            out.insert(format!("{path} = {leaf}"));
        }
    }
}

#[test]
fn raw_and_structured_renderings_carry_the_same_facts() {
    let lib = DeckLibrary::builtin();
    for st in common::sample_states(&lib, 60, 11, 8) {
        let seat = st.acting_player().unwrap();
        let obs = build_observation(&lib.pool, &st, seat, true);
        let structured = render_observation(&obs, RenderMode::Structured);
        let raw = render_observation(&obs, RenderMode::Raw);
        let mut from_structured = BTreeSet::new();
        facts(&serde_json::from_str(&structured).unwrap(), "", &mut from_structured);
        let from_raw: BTreeSet<String> = raw.lines().map(str::to_string).collect();
        assert_eq!(from_structured, from_raw);
        let legal = legal_requests(&lib.pool, &st);
        assert_eq!(rendered_actions(&structured).unwrap(), legal);
        assert_eq!(rendered_actions(&raw).unwrap(), legal);
    }
}

fn logged_game(lib: &DeckLibrary, cfg: HarnessConfig, faulty: bool, dir: &std::path::Path) -> std::path::PathBuf {
    let d = lib.deck("gardevoir-like").unwrap();
    let setup = GameSetup {
        pool: &lib.pool,
        decks: [d, d],
        agent_ids: ["a".into(), "b".into()],
        seed: 321,
        engine: EngineConfig::default(),
        harness: cfg,
        match_id: "m1".into(),
    };
    let mut a: Box<dyn Agent> = if faulty {
        Box::new(FaultyAgent::new(5, 0, agent_seed(321, 0)))
    } else {
        Box::new(RandomAgent::new(agent_seed(321, 0)))
    };
    let mut b = RandomAgent::new(agent_seed(321, 1));
    let log = LogOptions {
        path: Some(dir.join("m1.jsonl")),
        observations: true,
    };
    let out = play_game(&setup, [&mut *a, &mut b], &log).unwrap();
    if faulty {
        assert!(out.accounting[0].invalid_attempts > 0);
    }
    out.log_path.unwrap()
}

#[test]
fn no_action_mask_removes_the_field_but_keeps_rejection() {
    let lib = DeckLibrary::builtin();
    let tmp = tempfile::tempdir().unwrap();
    let cfg = HarnessConfig {
        legal_action_masking: false,
        ..Default::default()
    };
    let path = logged_game(&lib, cfg, true, tmp.path());
    let log = read_log(&path).unwrap();
    let obs: Vec<_> = log.records.iter().filter(|(_, r)| r.kind == RecordKind::Observation).collect();
    assert!(!obs.is_empty());
    for (_, r) in obs {
        assert!(r.payload.get("available_actions").is_none());
    }
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.contains("available_actions"));
    verify_log(&lib.pool, &path).unwrap();

    let other = tmp.path().join("masked");
    fs::create_dir_all(&other).unwrap();
    let masked = logged_game(&lib, HarnessConfig::default(), false, &other);
    assert!(fs::read_to_string(masked).unwrap().contains("available_actions"));
}

#[test]
fn replay_verifies_and_pinpoints_tampering() {
    let lib = DeckLibrary::builtin();
    let tmp = tempfile::tempdir().unwrap();
    let path = logged_game(&lib, HarnessConfig::default(), false, tmp.path());
    let summary = verify_log(&lib.pool, &path).unwrap();
    assert!(summary.actions > 10);
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();

    // A changed hash on some action line.
    let n = lines.iter().enumerate().filter(|(_, l)| l.contains("\"kind\":\"action\"")).nth(7).unwrap().0;
    let mut v: Value = serde_json::from_str(lines[n]).unwrap();
    v["post_state_hash"] = Value::String("12345".into());
    let mut edited: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    edited[n] = v.to_string();
    let bad = tmp.path().join("bad.jsonl");
    fs::write(&bad, edited.join("\n") + "\n").unwrap();
    let err = verify_log(&lib.pool, &bad).unwrap_err();
    assert!(matches!(err, ReplayError::HashMismatch { .. }));
    assert_eq!(err.line(), Some(n + 1));

    // A different action: the replay diverges on that very line.
    let m = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.contains("\"kind\":\"action\"") && l.contains("pass_turn"))
        .nth(2)
        .unwrap()
        .0;
    let mut v: Value = serde_json::from_str(lines[m]).unwrap();
    v["payload"]["request"] = serde_json::json!({"tool": "retreat", "arguments": {"source_card": "Nothing"}});
    let mut edited: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    edited[m] = v.to_string();
    fs::write(&bad, edited.join("\n") + "\n").unwrap();
    let err = verify_log(&lib.pool, &bad).unwrap_err();
    assert!(matches!(err, ReplayError::Rejected { .. }));
    assert_eq!(err.line(), Some(m + 1));

    fs::write(&bad, "not json\n").unwrap();
    assert_eq!(verify_log(&lib.pool, &bad).unwrap_err().line(), Some(1));
}

fn sh(script: &str) -> Vec<String> {
    vec!["sh".into(), "-c".into(), script.into()]
}

#[test]
fn external_malformed_replies_are_invalid_attempts() {
    let lib = DeckLibrary::builtin();
    let scripts = [
        "while read l; do echo 'not json'; done",
        "while read l; do echo '{\"step_id\":999,\"tool\":\"pass_turn\",\"arguments\":{}}'; done",
        "while read l; do echo '{\"step_id\":1,\"tool\":\"pass_turn\"}'; done",
        "exit 0",
    ];
    for s in scripts {
        let mut st = opening(&lib);
        let mut agent = ExternalAgent::new(sh(s), None, Some(2_000));
        let (acct, fallback, _) = one_step(&lib, &mut st, &mut agent, &HarnessConfig::default());
        assert!(fallback, "{s}");
        assert_eq!((acct.action_attempts, acct.invalid_attempts), (4, 4), "{s}");
    }
}

#[test]
fn external_timeout_is_an_invalid_attempt() {
    let lib = DeckLibrary::builtin();
    let mut st = opening(&lib);
    let cfg = HarnessConfig {
        retry_limit: 1,
        ..Default::default()
    };
    let mut agent = ExternalAgent::new(sh("sleep 30"), None, Some(200));
    let start = std::time::Instant::now();
    let (acct, fallback, _) = one_step(&lib, &mut st, &mut agent, &cfg);
    assert!(fallback);
    assert_eq!(acct.invalid_attempts, 2);
    assert!(start.elapsed().as_secs() < 10);
}
