//! Preposition correction by masked-token prediction.
//!
//! Every preposition of a candidate is masked in turn and a
//! [`MaskedPredictor`] ranks the possible fillers. The best filler is taken
//! only when it raises the LM score of the sentence by at least the
//! configured threshold.

use std::cmp::Ordering;
use std::io::{self, BufRead};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::{Candidate, CandidateBeam, Change, Stage};
use crate::lm::NGramModel;
use crate::morph::{Tagger, Upos};
use crate::text::{restore_case, Sentence};

pub const DEFAULT_THRESHOLD: f64 = 1.0;

pub const DEFAULT_PREPOSITIONS: [&str; 25] = [
    "в", "во", "на", "с", "со", "о", "об", "обо", "к", "ко", "из", "от", "до", "по", "за", "при", "у", "для",
    "про", "через", "над", "под", "перед", "между", "без",
];

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("predictor timed out")]
    Timeout,
    #[error("bad predictor response: {0}")]
    BadResponse(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepositionSet(Vec<String>);

impl Default for PrepositionSet {
    fn default() -> Self {
        PrepositionSet(DEFAULT_PREPOSITIONS.iter().map(|s| s.to_string()).collect())
    }
}

impl PrepositionSet {
    /// Lowercases and deduplicates; `None` for an empty list.
    pub fn new<I, S>(words: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut v: Vec<String> = Vec::new();
        for w in words {
            let w = w.as_ref().trim().to_lowercase();
            if !w.is_empty() && !v.contains(&w) {
                v.push(w);
            }
        }
        (!v.is_empty()).then_some(PrepositionSet(v))
    }

    /// One preposition per line; blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(reader: R) -> io::Result<Option<Self>> {
        let mut words = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                words.push(line.to_string());
            }
        }
        Ok(Self::new(words))
    }

    pub fn contains(&self, w: &str) -> bool {
        self.0.iter().any(|p| p == w)
    }

    pub fn words(&self) -> &[String] {
        &self.0
    }
}

/// Ranks the fillers for one masked position.
pub trait MaskedPredictor: Send + Sync {
    /// Scores for each of `candidates` given the words around the mask,
    /// sorted by score descending (ties by token). Scores are comparable
    /// only within one call.
    fn predict(&self, left: &[&str], right: &[&str], candidates: &[String]) -> Result<Vec<(String, f64)>, PredictError>;
}

fn rank(mut scored: Vec<(String, f64)>) -> Vec<(String, f64)> {
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
    scored
}

/// Fills the mask with each candidate and scores the whole sentence with
/// the n-gram model.
pub struct LmPredictor<'a> {
    model: &'a NGramModel,
}

impl<'a> LmPredictor<'a> {
    pub fn new(model: &'a NGramModel) -> Self {
        LmPredictor { model }
    }
}

impl MaskedPredictor for LmPredictor<'_> {
    fn predict(&self, left: &[&str], right: &[&str], candidates: &[String]) -> Result<Vec<(String, f64)>, PredictError> {
        let scored = candidates
            .iter()
            .map(|c| {
                let words: Vec<&str> = left.iter().copied().chain([c.as_str()]).chain(right.iter().copied()).collect();
                (c.clone(), self.model.score_words(&words))
            })
            .collect();
        Ok(rank(scored))
    }
}

#[derive(Serialize)]
struct RemoteRequest<'a> {
    left: &'a [&'a str],
    right: &'a [&'a str],
    candidates: &'a [String],
}

#[derive(Deserialize)]
struct RemoteResponse {
    scores: Vec<f64>,
}

/// Client for an out-of-process masked language model.
///
/// Sends `{"left": [...], "right": [...], "candidates": [...]}` as a JSON
/// POST and expects `{"scores": [...]}` with one score per candidate.
pub struct RemotePredictor {
    endpoint: String,
    agent: ureq::Agent,
}

impl RemotePredictor {
    pub fn new(endpoint: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        RemotePredictor {
            endpoint: endpoint.to_string(),
            agent,
        }
    }
}

fn map_transport(e: ureq::Error) -> PredictError {
    match e {
        ureq::Error::Timeout(_) => PredictError::Timeout,
        ureq::Error::Io(ref io) if matches!(io.kind(), io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock) => {
            PredictError::Timeout
        }
        other => PredictError::BadResponse(other.to_string()),
    }
}

impl MaskedPredictor for RemotePredictor {
    fn predict(&self, left: &[&str], right: &[&str], candidates: &[String]) -> Result<Vec<(String, f64)>, PredictError> {
        let body = RemoteRequest { left, right, candidates };
        let mut resp = self.agent.post(&self.endpoint).send_json(&body).map_err(map_transport)?;
        if resp.status() != 200 {
            return Err(PredictError::BadResponse(format!("HTTP {}", resp.status().as_u16())));
        }
        let parsed: RemoteResponse = resp.body_mut().read_json().map_err(|e| match e {
            ureq::Error::Timeout(_) => PredictError::Timeout,
            other => PredictError::BadResponse(other.to_string()),
        })?;
        if parsed.scores.len() != candidates.len() {
            return Err(PredictError::BadResponse(format!(
                "{} scores for {} candidates",
                parsed.scores.len(),
                candidates.len()
            )));
        }
        if parsed.scores.iter().any(|s| !s.is_finite()) {
            return Err(PredictError::BadResponse("non-finite score".into()));
        }
        Ok(rank(candidates.iter().cloned().zip(parsed.scores).collect()))
    }
}

/// Process one candidate left to right. A predictor failure aborts the
/// candidate and is returned alongside whatever was already accepted.
pub fn correct_candidate(
    predictor: &dyn MaskedPredictor,
    tagger: &dyn Tagger,
    model: &NGramModel,
    preps: &PrepositionSet,
    candidate: &Candidate,
    threshold: f64,
) -> (Candidate, Option<PredictError>) {
    let mut current = candidate.clone();
    let positions: Vec<usize> = tagger
        .tag(&current.sentence)
        .iter()
        .enumerate()
        .filter(|(_, e)| e.pos == Upos::ADP)
        .map(|(i, _)| i)
        .collect();
    for pos in positions {
        let sentence = &current.sentence;
        let words = sentence.lower_forms();
        let original = words[pos].to_string();
        let mut fillers: Vec<String> = preps.words().to_vec();
        if !preps.contains(&original) {
            fillers.push(original.clone());
        }
        let ranked = match predictor.predict(&words[..pos], &words[pos + 1..], &fillers) {
            Ok(r) => r,
            Err(e) => return (current, Some(e)),
        };
        let Some((best, top)) = ranked.first().cloned() else { continue };
        let original_score = ranked.iter().find(|(w, _)| *w == original).map(|(_, s)| *s);
        if best == original || original_score == Some(top) {
            continue;
        }
        let token = &sentence.tokens()[pos];
        let replacement = restore_case(token, &best);
        let new_sentence: Sentence = sentence.replace(pos, &replacement);
        let new_score = model.score(&new_sentence);
        let gain = new_score - current.score;
        if gain >= threshold {
            let before = token.surface.clone();
            current = current.derive(
                new_sentence,
                new_score,
                Change {
                    stage: Stage::MaskedPrep,
                    pos,
                    before,
                    after: replacement,
                    gain: Some(gain),
                },
            );
        }
    }
    (current, None)
}

/// Apply [`correct_candidate`] to every beam entry. Returns the new beam and
/// the first predictor error met, if any.
pub fn correct_prepositions(
    predictor: &dyn MaskedPredictor,
    tagger: &dyn Tagger,
    model: &NGramModel,
    preps: &PrepositionSet,
    beam: &CandidateBeam,
    threshold: f64,
) -> (CandidateBeam, Option<PredictError>) {
    let mut first_err = None;
    let mut out = Vec::with_capacity(beam.len());
    for c in beam.candidates() {
        let (fixed, err) = correct_candidate(predictor, tagger, model, preps, c, threshold);
        if first_err.is_none() {
            first_err = err;
        }
        out.push(fixed);
    }
    (beam.rebuild(out), first_err)
}
