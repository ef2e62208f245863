//! Reject sampling of candidate QA pairs against judge scores.
//!
//! A judge rates every candidate on four aspects using a 1–5 scale; a
//! candidate survives only if every aspect reaches the "good" cut
//! (4 by default).

use std::collections::HashMap;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry::Registry;
use crate::taxonomy::Domain;

pub const DEFAULT_GOOD_THRESHOLD: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurationError {
    #[error("no judge scores for candidate(s): {}", .0.join(", "))]
    MissingScores(Vec<String>),
    #[error("threshold {0} outside 1..=5")]
    InvalidThreshold(u8),
    #[error("candidate {id}: {message}")]
    InvalidCandidate { id: String, message: String },
    #[error("judger unavailable for candidate {id}: {message}")]
    JudgerUnavailable { id: String, message: String },
    #[error("malformed judgment for candidate {id}: {message}")]
    MalformedJudgment { id: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateQA {
    pub id: String,
    pub domain: Domain,
    pub category: String,
    pub criterion: String,
    pub question: String,
    #[serde(default)]
    pub options: Vec<String>,
    pub gold: String,
    #[serde(default)]
    pub rationale: String,
}

impl CandidateQA {
    /// The gold answer must be one of the options (by text, or by letter in
    /// list order) whenever options are given.
    pub fn validate(&self) -> Result<(), CurationError> {
        if self.id.trim().is_empty() {
            return Err(CurationError::InvalidCandidate {
                id: self.id.clone(),
                message: "empty id".into(),
            });
        }
        if self.options.is_empty() {
            return Ok(());
        }
        let gold = self.gold.trim();
        let by_text = self.options.iter().any(|o| o.trim() == gold);
        let by_letter = gold.len() == 1
            && gold
                .chars()
                .next()
                .filter(char::is_ascii_alphabetic)
                .map(|c| ((c.to_ascii_lowercase() as u8 - b'a') as usize) < self.options.len())
                .unwrap_or(false);
        if by_text || by_letter {
            Ok(())
        } else {
            Err(CurationError::InvalidCandidate {
                id: self.id.clone(),
                message: format!("gold answer '{}' is not among the options", self.gold),
            })
        }
    }
}

/// The four aspect ratings, each in 1..=5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JudgerScores {
    pub question_validity: u8,
    pub answer_validity: u8,
    pub reasoning_validity: u8,
    pub criterion_relevance: u8,
}

impl JudgerScores {
    pub fn new(scores: [i64; 4]) -> Result<Self, String> {
        if let Some(bad) = scores.iter().find(|s| !(1..=5).contains(*s)) {
            return Err(format!("aspect score {bad} outside 1..=5"));
        }
        let [q, a, r, c] = scores.map(|s| s as u8);
        Ok(JudgerScores {
            question_validity: q,
            answer_validity: a,
            reasoning_validity: r,
            criterion_relevance: c,
        })
    }

    pub fn uniform(score: u8) -> Self {
        JudgerScores {
            question_validity: score,
            answer_validity: score,
            reasoning_validity: score,
            criterion_relevance: score,
        }
    }

    pub fn as_array(&self) -> [u8; 4] {
        [
            self.question_validity,
            self.answer_validity,
            self.reasoning_validity,
            self.criterion_relevance,
        ]
    }

    pub fn min_aspect(&self) -> u8 {
        self.as_array().into_iter().min().expect("four aspects")
    }

    /// True when every aspect is at or above `threshold`.
    pub fn passes(&self, threshold: u8) -> bool {
        self.min_aspect() >= threshold
    }
}

/// Unvalidated judge output; range checking happens in [`judge`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawJudgment {
    pub question_validity: i64,
    pub answer_validity: i64,
    pub reasoning_validity: i64,
    pub criterion_relevance: i64,
}

impl RawJudgment {
    fn as_array(&self) -> [i64; 4] {
        [
            self.question_validity,
            self.answer_validity,
            self.reasoning_validity,
            self.criterion_relevance,
        ]
    }
}

impl From<JudgerScores> for RawJudgment {
    fn from(s: JudgerScores) -> Self {
        RawJudgment {
            question_validity: s.question_validity.into(),
            answer_validity: s.answer_validity.into(),
            reasoning_validity: s.reasoning_validity.into(),
            criterion_relevance: s.criterion_relevance.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgerError {
    /// Worth retrying (timeouts, 5xx, dropped connections).
    #[error("transient: {0}")]
    Transient(String),
    #[error("unavailable: {0}")]
    Unavailable(String),
    #[error("malformed response: {0}")]
    Malformed(String),
}

/// Anything that can rate a candidate on the four aspects.
pub trait JudgerClient: Send + Sync {
    fn name(&self) -> &'static str;
    fn rate(&self, candidate: &CandidateQA) -> Result<RawJudgment, JudgerError>;
}

/// Returns the same four scores for every candidate.
pub struct ConstantJudger {
    scores: [i64; 4],
}

impl ConstantJudger {
    pub fn new(scores: [i64; 4]) -> Self {
        ConstantJudger { scores }
    }
}

impl JudgerClient for ConstantJudger {
    fn name(&self) -> &'static str {
        "constant"
    }

    fn rate(&self, _candidate: &CandidateQA) -> Result<RawJudgment, JudgerError> {
        let [q, a, r, c] = self.scores;
        Ok(RawJudgment {
            question_validity: q,
            answer_validity: a,
            reasoning_validity: r,
            criterion_relevance: c,
        })
    }
}

/// Draws i.i.d. uniform 1..=5 scores from a stream keyed by the seed and
/// the candidate id, so results do not depend on judging order.
pub struct SeededJudger {
    seed: u64,
}

impl SeededJudger {
    pub fn new(seed: u64) -> Self {
        SeededJudger { seed }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

impl JudgerClient for SeededJudger {
    fn name(&self) -> &'static str {
        "seeded"
    }

    fn rate(&self, candidate: &CandidateQA) -> Result<RawJudgment, JudgerError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(candidate.id.as_bytes()));
        let mut draw = || rng.random_range(1..=5i64);
        Ok(RawJudgment {
            question_validity: draw(),
            answer_validity: draw(),
            reasoning_validity: draw(),
            criterion_relevance: draw(),
        })
    }
}

/// Posts the candidate as JSON and expects a body with the four integer
/// fields `question_validity`, `answer_validity`, `reasoning_validity` and
/// `criterion_relevance`.
pub struct HttpJudger {
    url: String,
    agent: ureq::Agent,
}

impl HttpJudger {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpJudger {
            url: url.into(),
            agent,
        }
    }
}

impl JudgerClient for HttpJudger {
    fn name(&self) -> &'static str {
        "http"
    }

    fn rate(&self, candidate: &CandidateQA) -> Result<RawJudgment, JudgerError> {
        let body = serde_json::to_string(candidate).map_err(|e| JudgerError::Malformed(e.to_string()))?;
        let mut resp = self
            .agent
            .post(&self.url)
            .header("content-type", "application/json")
            .send(body)
            .map_err(|e| JudgerError::Transient(e.to_string()))?;
        let status = resp.status().as_u16();
        if status >= 500 || status == 429 {
            return Err(JudgerError::Transient(format!("HTTP {status}")));
        }
        if status >= 400 {
            return Err(JudgerError::Unavailable(format!("HTTP {status}")));
        }
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| JudgerError::Transient(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| JudgerError::Malformed(e.to_string()))
    }
}

/// Constructor parameters shared by all judger kinds.
#[derive(Debug, Clone)]
pub struct JudgerParams {
    pub seed: u64,
    pub constant: [i64; 4],
    pub url: Option<String>,
    pub timeout: Duration,
}

impl Default for JudgerParams {
    fn default() -> Self {
        JudgerParams {
            seed: 0,
            constant: [4; 4],
            url: None,
            timeout: Duration::from_secs(30),
        }
    }
}

pub fn judgers() -> Registry<JudgerParams, dyn JudgerClient> {
    Registry::new("judger")
        .with("constant", "fixed scores for every candidate", |p: &JudgerParams| {
            Ok(Box::new(ConstantJudger::new(p.constant)) as Box<dyn JudgerClient>)
        })
        .with("seeded", "uniform 1-5 scores from a seeded stream", |p: &JudgerParams| {
            Ok(Box::new(SeededJudger::new(p.seed)) as Box<dyn JudgerClient>)
        })
        .with("http", "POST candidates to a judging endpoint", |p: &JudgerParams| {
            let url = p.url.clone().ok_or("a judger URL is required")?;
            Ok(Box::new(HttpJudger::new(url, p.timeout)) as Box<dyn JudgerClient>)
        })
}

/// Rates one candidate, retrying transient failures up to `retries` times.
pub fn judge(
    candidate: &CandidateQA,
    judger: &dyn JudgerClient,
    retries: u32,
) -> Result<JudgerScores, CurationError> {
    let mut attempt = 0;
    loop {
        match judger.rate(candidate) {
            Ok(raw) => {
                return JudgerScores::new(raw.as_array()).map_err(|message| {
                    CurationError::MalformedJudgment {
                        id: candidate.id.clone(),
                        message,
                    }
                })
            }
            Err(JudgerError::Transient(msg)) if attempt < retries => {
                attempt += 1;
                log_retry(&candidate.id, attempt, &msg);
            }
            Err(JudgerError::Transient(message) | JudgerError::Unavailable(message)) => {
                return Err(CurationError::JudgerUnavailable {
                    id: candidate.id.clone(),
                    message,
                })
            }
            Err(JudgerError::Malformed(message)) => {
                return Err(CurationError::MalformedJudgment {
                    id: candidate.id.clone(),
                    message,
                })
            }
        }
    }
}

fn log_retry(id: &str, attempt: u32, msg: &str) {
    log::warn!("judger retry {attempt} for {id}: {msg}");
    std::thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
}

/// Judges every candidate with at most `max_in_flight` concurrent requests.
/// Results come back in input order.
pub fn judge_all(
    candidates: &[CandidateQA],
    judger: &dyn JudgerClient,
    retries: u32,
    max_in_flight: usize,
) -> Vec<Result<JudgerScores, CurationError>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_in_flight.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        candidates
            .par_iter()
            .map(|c| judge(c, judger, retries))
            .collect()
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub retained: Vec<CandidateQA>,
    pub rejected: Vec<CandidateQA>,
}

impl Partition {
    pub fn retained_fraction(&self) -> f64 {
        let total = self.retained.len() + self.rejected.len();
        if total == 0 {
            0.0
        } else {
            self.retained.len() as f64 / total as f64
        }
    }
}

/// Keeps candidates whose four aspects all reach `good_threshold`.
pub fn reject_sample(
    candidates: &[CandidateQA],
    scores: &HashMap<String, JudgerScores>,
    good_threshold: u8,
) -> Result<Partition, CurationError> {
    if !(1..=5).contains(&good_threshold) {
        return Err(CurationError::InvalidThreshold(good_threshold));
    }
    let missing: Vec<String> = candidates
        .iter()
        .filter(|c| !scores.contains_key(&c.id))
        .map(|c| c.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(CurationError::MissingScores(missing));
    }
    let (retained, rejected) = candidates
        .iter()
        .cloned()
        .partition(|c| scores[&c.id].passes(good_threshold));
    Ok(Partition { retained, rejected })
}
