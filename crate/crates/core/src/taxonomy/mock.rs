//! Offline LLM doubles for tests, dry runs and fixture pipelines.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::llm::{LlmClient, LlmError};

#[derive(Debug, Clone)]
struct Rule {
    needle: String,
    step: Option<u8>,
    reply: String,
}

/// Answers by matching a substring of the prompt's citation block.
///
/// Step prompts get `YES`/`NO` (default `NO`); whole-manual prompts get
/// the scripted label or the configured default.
#[derive(Debug, Default)]
pub struct ScriptedLlmClient {
    rules: Vec<Rule>,
    default_label: Option<String>,
    calls: AtomicUsize,
}

impl ScriptedLlmClient {
    pub fn new() -> Self {
        Self::default()
    }

    /// Answer `YES` to `step` for citations containing `needle`.
    pub fn yes_at(mut self, needle: &str, step: u8) -> Self {
        self.rules.push(Rule { needle: needle.to_string(), step: Some(step), reply: "YES".into() });
        self
    }

    /// Reply to whole-manual prompts for citations containing `needle`.
    pub fn label(mut self, needle: &str, reply: &str) -> Self {
        self.rules.push(Rule { needle: needle.to_string(), step: None, reply: reply.to_string() });
        self
    }

    pub fn default_label(mut self, reply: &str) -> Self {
        self.default_label = Some(reply.to_string());
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

fn prompt_step(prompt: &str) -> Option<u8> {
    prompt.lines().find_map(|l| l.strip_prefix("Decision step: ").and_then(|s| s.trim().parse().ok()))
}

fn citation_block(prompt: &str) -> &str {
    prompt.rsplit("Citation:\n").next().unwrap_or(prompt)
}

impl LlmClient for ScriptedLlmClient {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let step = prompt_step(prompt);
        let block = citation_block(prompt);
        let hit = self.rules.iter().find(|r| r.step == step && block.contains(&r.needle));
        Ok(match (hit, step) {
            (Some(r), _) => r.reply.clone(),
            (None, Some(_)) => "NO".into(),
            (None, None) => self.default_label.clone().unwrap_or_else(|| "Category: 7".into()),
        })
    }

    fn model(&self) -> &str {
        "scripted"
    }
}

/// Replays a fixed queue of replies, then repeats the last one.
#[derive(Debug)]
pub struct SequenceClient {
    queue: Mutex<VecDeque<Result<String, LlmError>>>,
    last: Mutex<Option<Result<String, LlmError>>>,
    calls: AtomicUsize,
}

impl SequenceClient {
    pub fn new(replies: Vec<Result<String, LlmError>>) -> Self {
        Self { queue: Mutex::new(replies.into()), last: Mutex::new(None), calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl LlmClient for SequenceClient {
    fn complete(&self, _prompt: &str) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let next = self.queue.lock().expect("queue").pop_front();
        let mut last = self.last.lock().expect("last");
        match next {
            Some(r) => {
                *last = Some(r.clone());
                r
            }
            None => last.clone().unwrap_or_else(|| Err(LlmError::Transport("empty script".into()))),
        }
    }

    fn model(&self) -> &str {
        "sequence"
    }
}
