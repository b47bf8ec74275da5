//! Prompt templates for external LLM agents and judges.
//!
//! The engine never renders these. Placeholders are written `{name}`.

pub const STRATEGY_PHASE: &str = include_str!("../assets/prompts/strategy_phase.txt");
pub const EXECUTION_PHASE: &str = include_str!("../assets/prompts/execution_phase.txt");
pub const MACRO_JUDGE: &str = include_str!("../assets/prompts/macro_judge.txt");

/// `(name, template)` pairs for every bundled prompt.
pub const ALL: [(&str, &str); 3] = [
    ("strategy_phase", STRATEGY_PHASE),
    ("execution_phase", EXECUTION_PHASE),
    ("macro_judge", MACRO_JUDGE),
];

/// Placeholder names in order of first appearance.
pub fn placeholders(template: &str) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        let tail = &rest[start + 1..];
        let Some(end) = tail.find('}') else { break };
        let name = &tail[..end];
        if !name.is_empty() && name.chars().all(|c| c.is_ascii_lowercase() || c == '_') && !out.contains(&name) {
            out.push(name);
        }
        rest = &tail[end + 1..];
    }
    out
}
