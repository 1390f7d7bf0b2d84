use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WakeWordConfig {
    pub phrases: Vec<String>,
    /// Minimum similarity in [0, 1] for a detection.
    pub threshold: f64,
    /// ASR chunk length in seconds.
    pub chunk_secs: f64,
}

impl Default for WakeWordConfig {
    fn default() -> Self {
        WakeWordConfig {
            phrases: ["vuebuds", "hey vue", "hey view", "view buds"].map(String::from).to_vec(),
            threshold: 0.8,
            chunk_secs: 2.3,
        }
    }
}

impl WakeWordConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.phrases.is_empty() {
            return Err(PipelineError::InvalidConfig("wake phrase list is empty".into()));
        }
        for p in &self.phrases {
            if p.is_empty() || normalize(p) != *p {
                return Err(PipelineError::InvalidConfig(format!(
                    "wake phrase {p:?} must be non-empty, lowercase and normalized"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(PipelineError::InvalidConfig("wake threshold must be in [0, 1]".into()));
        }
        if !(self.chunk_secs > 0.0 && self.chunk_secs.is_finite()) {
            return Err(PipelineError::InvalidConfig("chunk_secs must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WakeMatch {
    pub phrase: String,
    pub confidence: f64,
    /// Character range `[start, end)` in the normalized transcript.
    pub char_span: (usize, usize),
    /// Word range `[start, end)` in the normalized transcript.
    pub word_span: (usize, usize),
}

/// Lowercases, drops punctuation and collapses whitespace to single spaces.
pub fn normalize(text: &str) -> String {
    let cleaned: String = text
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `1 - levenshtein / max_len`, counted in characters.
pub fn similarity(a: &str, b: &str) -> f64 {
    let len = a.chars().count().max(b.chars().count());
    if len == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / len as f64
}

/// Character offsets of word starts and ends in a normalized string.
fn word_bounds(norm: &[char]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &c) in norm.iter().enumerate() {
        match (c == ' ', start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, norm.len()));
    }
    out
}

/// Fuzzy wake-phrase search. Windows start at a word and span the phrase
/// length ±2 characters; a window may end mid-word but not on a space.
///
/// The earliest word start with any window at or above the threshold is
/// reported, taking its best window: highest confidence, then longest
/// phrase, then shortest window. Once the longest phrase plus two characters
/// follow that start, later text cannot change the result.
pub fn wake_word_detect(transcript: &str, cfg: &WakeWordConfig) -> Option<WakeMatch> {
    let norm: Vec<char> = normalize(transcript).chars().collect();
    let words = word_bounds(&norm);
    for (ws, &(start, _)) in words.iter().enumerate() {
        let mut best: Option<(WakeMatch, usize)> = None;
        for phrase in &cfg.phrases {
            let plen = phrase.chars().count();
            for len in plen.saturating_sub(2).max(1)..=plen + 2 {
                let end = start + len;
                if end > norm.len() || norm[end - 1] == ' ' {
                    continue;
                }
                let window: String = norm[start..end].iter().collect();
                let confidence = similarity(&window, phrase);
                if confidence < cfg.threshold {
                    continue;
                }
                let key = (confidence, plen, std::cmp::Reverse(len));
                let better = best.as_ref().is_none_or(|(b, blen)| {
                    let cur = (b.confidence, b.phrase.chars().count(), std::cmp::Reverse(*blen));
                    key.partial_cmp(&cur) == Some(std::cmp::Ordering::Greater)
                });
                if better {
                    let we = words.iter().position(|&(_, e)| e >= end).unwrap_or(words.len() - 1);
                    let m = WakeMatch {
                        phrase: phrase.clone(),
                        confidence,
                        char_span: (start, end),
                        word_span: (ws, we + 1),
                    };
                    best = Some((m, len));
                }
            }
        }
        if let Some((m, _)) = best {
            return Some(m);
        }
    }
    None
}
