//! A deterministic protocol client: first listed action for `act`, one
//! marker line per `evolve`.

use std::fs::OpenOptions;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::external::{reply_line, rendered_actions};
use crate::action::ActionRequest;

pub const STUB_LOG: &str = "stub_log.txt";

fn evolve(v: &Value) -> Value {
    let round = v.get("round").and_then(Value::as_u64).unwrap_or(0);
    let Some(dir) = v.get("state_dir").and_then(Value::as_str) else {
        return json!({"type": "evolve_ack", "ok": false, "error": "missing state_dir"});
    };
    let write = || -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(Path::new(dir).join(STUB_LOG))?;
        writeln!(f, "round {round}")
    };
    match write() {
        Ok(()) => json!({"type": "evolve_ack", "ok": true}),
        Err(e) => json!({"type": "evolve_ack", "ok": false, "error": e.to_string()}),
    }
}

/// Answers one request line.
pub fn respond(line: &str) -> String {
    let Ok(v) = serde_json::from_str::<Value>(line) else {
        return json!({"type": "error", "error": "malformed request"}).to_string();
    };
    match v.get("type").and_then(Value::as_str) {
        Some("act") => {
            let step_id = v.get("step_id").and_then(Value::as_u64).unwrap_or(0);
            let obs = v.get("observation").and_then(Value::as_str).unwrap_or("");
            let action = rendered_actions(obs)
                .and_then(|a| a.into_iter().next())
                .unwrap_or_else(ActionRequest::pass_turn);
            reply_line(step_id, &action)
        }
        Some("evolve") => evolve(&v).to_string(),
        _ => json!({"type": "error", "error": "unknown request type"}).to_string(),
    }
}

pub fn serve(input: impl BufRead, mut output: impl Write) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(output, "{}", respond(&line))?;
        output.flush()?;
    }
    Ok(())
}
