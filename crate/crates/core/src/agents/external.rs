//! External agents over line-delimited JSON on subprocess stdio.
//!
//! Requests (engine to agent), one JSON object per line:
//!
//! ```text
//! {"type":"act","protocol":1,"match_id":..,"step_id":..,"seat":..,
//!  "observation":"<rendered text>","history":[..],"choosing_card":..,
//!  "deadline_ms":..,"feedback":..,"query_results":[..]}
//! {"type":"evolve","protocol":1,"round":..,"trajectories":[..],"state_dir":".."}
//! ```
//!
//! Replies: `{"step_id":..,"tool":"..","arguments":{..}}` to `act` and
//! `{"type":"evolve_ack","ok":true}` (or `"ok":false,"error":".."`) to
//! `evolve`.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::action::ActionRequest;
use crate::harness::{Agent, AgentError, DecisionRequest, HistoryStep, QueryResult};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActMessage {
    #[serde(rename = "type")]
    pub kind: String,
    pub protocol: u32,
    pub match_id: String,
    pub step_id: u64,
    pub seat: usize,
    pub observation: String,
    pub history: Vec<HistoryStep>,
    pub choosing_card: bool,
    pub deadline_ms: u64,
    pub feedback: Option<String>,
    pub query_results: Vec<QueryResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveMessage {
    #[serde(rename = "type")]
    pub kind: String,
    pub protocol: u32,
    pub round: u32,
    pub trajectories: Vec<PathBuf>,
    pub state_dir: PathBuf,
}

impl EvolveMessage {
    pub fn new(round: u32, trajectories: Vec<PathBuf>, state_dir: PathBuf) -> Self {
        EvolveMessage {
            kind: "evolve".into(),
            protocol: PROTOCOL_VERSION,
            round,
            trajectories,
            state_dir,
        }
    }
}

/// Parses an `act` reply, checking the echoed step id and argument shape.
pub fn parse_reply(line: &str, step_id: u64) -> Result<ActionRequest, AgentError> {
    let v: Value = serde_json::from_str(line).map_err(|e| AgentError::Malformed(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| AgentError::Malformed("reply is not an object".into()))?;
    let got = obj
        .get("step_id")
        .and_then(Value::as_u64)
        .ok_or_else(|| AgentError::Malformed("missing step_id".into()))?;
    if got != step_id {
        return Err(AgentError::StepMismatch { expected: step_id, got });
    }
    if let Some(err) = obj.get("error") {
        return Err(AgentError::Malformed(format!("agent error: {err}")));
    }
    let tool = obj
        .get("tool")
        .and_then(Value::as_str)
        .ok_or_else(|| AgentError::Malformed("missing tool".into()))?;
    let arguments = match obj.get("arguments") {
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(AgentError::Malformed("arguments must be an object".into())),
        None => return Err(AgentError::Malformed("missing arguments".into())),
    };
    Ok(ActionRequest {
        tool: tool.to_string(),
        arguments,
    })
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Process {
    fn spawn(command: &[String], dir: Option<&Path>) -> Result<Process, AgentError> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| AgentError::Transport("empty command".into()))?;
        let mut cmd = Command::new(program);
        cmd.args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit());
        if let Some(d) = dir {
            cmd.env("DUELKIT_STATE_DIR", d);
        }
        let mut child = cmd
            .spawn()
            .map_err(|e| AgentError::Transport(format!("spawn {program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = child.stdout.take().expect("piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Process {
            child,
            stdin,
            lines: rx,
        })
    }

    fn send(&mut self, msg: &impl Serialize) -> Result<(), AgentError> {
        let mut line = serde_json::to_string(msg).expect("message serializes");
        line.push('\n');
        self.stdin
            .write_all(line.as_bytes())
            .and_then(|_| self.stdin.flush())
            .map_err(|e| AgentError::Transport(e.to_string()))
    }

    fn recv(&self, timeout: Duration) -> Result<String, AgentError> {
        match self.lines.recv_timeout(timeout) {
            Ok(l) => Ok(l),
            Err(RecvTimeoutError::Timeout) => Err(AgentError::Timeout),
            Err(RecvTimeoutError::Disconnected) => {
                Err(AgentError::Transport("agent closed its output".into()))
            }
        }
    }

    /// Drops replies that arrived after an earlier deadline.
    fn drain(&self) {
        while self.lines.try_recv().is_ok() {}
    }
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// An agent process started lazily on the first decision.
pub struct ExternalAgent {
    command: Vec<String>,
    state_dir: Option<PathBuf>,
    timeout_ms: Option<u64>,
    process: Option<Process>,
}

impl ExternalAgent {
    pub fn new(command: Vec<String>, state_dir: Option<PathBuf>, timeout_ms: Option<u64>) -> Self {
        ExternalAgent {
            command,
            state_dir,
            timeout_ms,
            process: None,
        }
    }

    fn process(&mut self) -> Result<&mut Process, AgentError> {
        if self.process.is_none() {
            self.process = Some(Process::spawn(&self.command, self.state_dir.as_deref())?);
        }
        Ok(self.process.as_mut().expect("spawned"))
    }
}

impl Agent for ExternalAgent {
    fn act(&mut self, req: &DecisionRequest<'_>) -> Result<ActionRequest, AgentError> {
        let msg = ActMessage {
            kind: "act".into(),
            protocol: PROTOCOL_VERSION,
            match_id: req.match_id.to_string(),
            step_id: req.step_id,
            seat: req.seat,
            observation: req.rendered.to_string(),
            history: req.history.to_vec(),
            choosing_card: req.choosing_card,
            deadline_ms: req.deadline_ms,
            feedback: req.feedback.map(str::to_string),
            query_results: req.query_results.to_vec(),
            state_dir: self.state_dir.clone(),
        };
        let timeout = Duration::from_millis(self.timeout_ms.unwrap_or(req.deadline_ms));
        let result = (|| {
            let p = self.process()?;
            p.drain();
            p.send(&msg)?;
            let line = p.recv(timeout)?;
            parse_reply(&line, req.step_id)
        })();
        if matches!(result, Err(AgentError::Transport(_))) {
            // Restart on the next attempt.
            self.process = None;
        }
        result
    }
}

/// Starts `command`, sends one evolve message and waits for the ack.
pub fn send_evolve(command: &[String], msg: &EvolveMessage, timeout: Duration) -> Result<(), String> {
    let mut p = Process::spawn(command, Some(&msg.state_dir)).map_err(|e| e.to_string())?;
    p.send(msg).map_err(|e| e.to_string())?;
    let line = p.recv(timeout).map_err(|e| e.to_string())?;
    let v: Value = serde_json::from_str(&line).map_err(|e| format!("malformed ack: {e}"))?;
    match (v.get("type").and_then(Value::as_str), v.get("ok").and_then(Value::as_bool)) {
        (Some("evolve_ack"), Some(true)) => Ok(()),
        (Some("evolve_ack"), _) => Err(v
            .get("error")
            .map(|e| e.to_string())
            .unwrap_or_else(|| "evolve failed".into())),
        _ => Err(format!("unexpected reply to evolve: {line}")),
    }
}

/// Reply helper for clients written against this crate.
pub fn reply_line(step_id: u64, req: &ActionRequest) -> String {
    json!({ "step_id": step_id, "tool": req.tool, "arguments": req.arguments }).to_string()
}

/// Reconstructs `available_actions` from a rendered observation in either
/// mode.
pub fn rendered_actions(observation: &str) -> Option<Vec<ActionRequest>> {
    if let Ok(v) = serde_json::from_str::<Value>(observation) {
        return serde_json::from_value(v.get("available_actions")?.clone()).ok();
    }
    // Raw mode: `available_actions[i].tool = ".."` and
    // `available_actions[i].arguments.key = <json>` lines.
    let mut out: Vec<ActionRequest> = Vec::new();
    for line in observation.lines() {
        let Some(rest) = line.strip_prefix("available_actions[") else {
            continue;
        };
        let (idx, rest) = rest.split_once(']')?;
        let i: usize = idx.parse().ok()?;
        let (path, value) = rest.split_once(" = ")?;
        let value: Value = serde_json::from_str(value).ok()?;
        if out.len() <= i {
            out.resize_with(i + 1, || ActionRequest::new(""));
        }
        match path {
            ".tool" => out[i].tool = value.as_str()?.to_string(),
            ".arguments" => {}
            p => {
                let key = p.strip_prefix(".arguments.")?;
                let (key, elem) = match key.split_once('[') {
                    Some((k, e)) => (k, Some(e.trim_end_matches(']').parse::<usize>().ok()?)),
                    None => (key, None),
                };
                let args: &mut Map<String, Value> = &mut out[i].arguments;
                match elem {
                    None => {
                        args.insert(key.to_string(), value);
                    }
                    Some(_) => {
                        let arr = args.entry(key.to_string()).or_insert_with(|| json!([]));
                        arr.as_array_mut()?.push(value);
                    }
                }
            }
        }
    }
    (!out.is_empty()).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reply_requires_arguments() {
        assert!(matches!(
            parse_reply(r#"{"step_id":3,"tool":"pass_turn"}"#, 3),
            Err(AgentError::Malformed(_))
        ));
        assert!(parse_reply(r#"{"step_id":3,"tool":"pass_turn","arguments":{}}"#, 3).is_ok());
    }

    #[test]
    fn reply_must_echo_step() {
        assert_eq!(
            parse_reply(r#"{"step_id":2,"tool":"pass_turn","arguments":{}}"#, 3),
            Err(AgentError::StepMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn garbage_is_malformed() {
        assert!(matches!(parse_reply("pass please", 1), Err(AgentError::Malformed(_))));
    }
}
