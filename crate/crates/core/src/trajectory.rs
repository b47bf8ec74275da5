//! Trajectory files: one JSON object per line.
//!
//! Line 1 is `{"header": {...}}` with the config and seed, then one line per
//! completed day (`day`, `date`, `strategy`, `tool_calls`, `day_report`), and
//! finally `{"episode_end": {...}}` when the episode finished cleanly.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::EpisodeConfig;
use crate::engine::{DayRecord, Episode};
use crate::error::{Error, Result};
use crate::policy::EpisodeOutcome;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: u32,
    pub agent: String,
    pub seed: u64,
    pub config: EpisodeConfig,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: Header,
}

#[derive(Serialize, Deserialize)]
struct FooterLine {
    episode_end: EpisodeOutcome,
}

pub struct TrajectoryWriter<W: Write> {
    out: W,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(mut out: W, header: &Header) -> Result<Self> {
        serde_json::to_writer(&mut out, &HeaderLine { header: header.clone() })?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(TrajectoryWriter { out })
    }

    /// Writes and flushes one day so a killed run leaves a valid prefix.
    pub fn write_day(&mut self, record: &DayRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }

    pub fn finish(mut self, outcome: &EpisodeOutcome) -> Result<W> {
        serde_json::to_writer(
            &mut self.out,
            &FooterLine {
                episode_end: outcome.clone(),
            },
        )?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn header_for(ep: &Episode, agent: &str) -> Header {
    Header {
        format_version: FORMAT_VERSION,
        agent: agent.to_string(),
        seed: ep.seed(),
        config: ep.config().clone(),
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub header: Header,
    pub days: Vec<DayRecord>,
    /// Verbatim text of each day line, for byte-level comparison.
    pub raw_days: Vec<String>,
    pub end: Option<EpisodeOutcome>,
}

impl Trajectory {
    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let first = lines.next().ok_or_else(|| Error::Schema("empty trajectory".into()))??;
        let header: HeaderLine =
            serde_json::from_str(&first).map_err(|e| Error::Schema(format!("bad header line: {e}")))?;
        let mut days = Vec::new();
        let mut raw_days = Vec::new();
        let mut end = None;
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if end.is_some() {
                return Err(Error::Schema(format!("line {} follows the episode_end line", i + 2)));
            }
            if line.starts_with("{\"episode_end\"") {
                let f: FooterLine =
                    serde_json::from_str(&line).map_err(|e| Error::Schema(format!("line {}: {e}", i + 2)))?;
                end = Some(f.episode_end);
                continue;
            }
            let rec: DayRecord =
                serde_json::from_str(&line).map_err(|e| Error::Schema(format!("line {}: {e}", i + 2)))?;
            days.push(rec);
            raw_days.push(line);
        }
        Ok(Trajectory {
            header: header.header,
            days,
            raw_days,
            end,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::parse(BufReader::new(f))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divergence {
    pub day: u32,
    /// JSON pointer of the first differing value within the day record.
    pub path: String,
    pub logged: Value,
    pub replayed: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayReport {
    pub days_checked: u32,
    pub divergence: Option<Divergence>,
}

/// Re-executes the logged calls under the logged config and seed and compares
/// every regenerated day line with the logged one byte for byte.
pub fn replay(traj: &Trajectory) -> Result<ReplayReport> {
    let mut ep = Episode::new(traj.header.config.clone(), traj.header.seed)?;
    let mut checked = 0;
    for (logged, raw) in traj.days.iter().zip(&traj.raw_days) {
        for call in &logged.tool_calls {
            ep.call(&call.tool, call.arguments.clone());
        }
        let mut produced = ep.take_completed();
        let logged_value: Value = serde_json::from_str(raw)?;
        if produced.len() != 1 {
            let replayed = Value::from(produced.len() as u64);
            return Ok(ReplayReport {
                days_checked: checked,
                divergence: Some(Divergence {
                    day: logged.day,
                    path: "/".into(),
                    logged: Value::from("one completed day"),
                    replayed,
                }),
            });
        }
        let text = serde_json::to_string(&produced.remove(0))?;
        if text != *raw {
            let replayed: Value = serde_json::from_str(&text)?;
            let (path, a, b) = first_difference(&logged_value, &replayed, String::new())
                .unwrap_or_else(|| ("".into(), logged_value.clone(), replayed.clone()));
            return Ok(ReplayReport {
                days_checked: checked,
                divergence: Some(Divergence {
                    day: logged.day,
                    path: if path.is_empty() { "/".into() } else { path },
                    logged: a,
                    replayed: b,
                }),
            });
        }
        checked += 1;
    }
    Ok(ReplayReport {
        days_checked: checked,
        divergence: None,
    })
}

fn first_difference(a: &Value, b: &Value, path: String) -> Option<(String, Value, Value)> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                let p = format!("{path}/{k}");
                match y.get(k) {
                    Some(vb) => {
                        if let Some(d) = first_difference(va, vb, p) {
                            return Some(d);
                        }
                    }
                    None => return Some((p, va.clone(), Value::Null)),
                }
            }
            y.iter()
                .find(|(k, _)| !x.contains_key(*k))
                .map(|(k, v)| (format!("{path}/{k}"), Value::Null, v.clone()))
        }
        (Value::Array(x), Value::Array(y)) => {
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                if let Some(d) = first_difference(va, vb, format!("{path}/{i}")) {
                    return Some(d);
                }
            }
            (x.len() != y.len()).then(|| (format!("{path}/length"), Value::from(x.len()), Value::from(y.len())))
        }
        _ => (a != b).then(|| (path, a.clone(), b.clone())),
    }
}
