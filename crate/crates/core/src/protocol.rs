//! Newline-delimited JSON protocol for external agents.
//!
//! The engine speaks first with a `phase_start` event. Each request line
//! `{"id", "tool", "arguments"}` gets exactly one response line
//! `{"id", "ok", "result" | "error"}`, followed by a `phase_start` event when
//! the call changed the phase, or an `episode_end` event when it ended the
//! episode.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::engine::{Episode, Phase};
use crate::error::Result;
use crate::policy::EpisodeOutcome;
use crate::toolapi::{ErrorCode, ToolError};
use crate::trajectory::TrajectoryWriter;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: Value,
    pub tool: String,
    #[serde(default)]
    pub arguments: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub id: Value,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ToolError>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    PhaseStart { phase: Phase, day: u32 },
    EpisodeEnd { reason: String, days: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ServeOutcome {
    /// The episode reached a terminal state.
    Finished(EpisodeOutcome),
    /// The client hung up or sent an unreadable line mid-episode.
    Broken { days: u32, message: String },
}

fn send(out: &mut impl Write, msg: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *out, msg)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn phase_start(ep: &Episode) -> Event {
    Event::PhaseStart {
        phase: ep.phase(),
        day: ep.day(),
    }
}

/// Serves one episode over `input`/`output`, writing completed days to
/// `trajectory` as they close.
pub fn serve<W: Write>(
    ep: &mut Episode,
    input: impl BufRead,
    mut output: impl Write,
    mut trajectory: Option<&mut TrajectoryWriter<W>>,
) -> Result<ServeOutcome> {
    send(&mut output, &phase_start(ep))?;
    let mut lines = input.lines();
    loop {
        let Some(line) = lines.next() else {
            return Ok(ServeOutcome::Broken {
                days: ep.days_completed(),
                message: "client closed the stream before the episode ended".into(),
            });
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let req: Request = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                let id = serde_json::from_str::<Value>(&line)
                    .ok()
                    .and_then(|v| v.get("id").cloned())
                    .unwrap_or(Value::Null);
                send(
                    &mut output,
                    &Response {
                        id,
                        ok: false,
                        result: None,
                        error: Some(ToolError::new(
                            ErrorCode::ProtocolError,
                            format!("unreadable request: {e}"),
                        )),
                    },
                )?;
                return Ok(ServeOutcome::Broken {
                    days: ep.days_completed(),
                    message: format!("unreadable request: {e}"),
                });
            }
        };
        let before = (ep.day(), ep.phase());
        let r = ep.call(&req.tool, req.arguments);
        send(
            &mut output,
            &Response {
                id: req.id,
                ok: r.ok,
                result: r.result,
                error: r.error,
            },
        )?;
        for record in ep.take_completed() {
            if let Some(t) = trajectory.as_deref_mut() {
                t.write_day(&record)?;
            }
        }
        if let Some(reason) = ep.ended() {
            let outcome = EpisodeOutcome {
                days: ep.days_completed(),
                reason,
            };
            send(
                &mut output,
                &Event::EpisodeEnd {
                    reason: reason.as_str().to_string(),
                    days: outcome.days,
                },
            )?;
            return Ok(ServeOutcome::Finished(outcome));
        }
        if (ep.day(), ep.phase()) != before {
            send(&mut output, &phase_start(ep))?;
        }
    }
}
