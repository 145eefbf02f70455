//! Candidate beam shared by every correction stage.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::lm::NGramModel;
use crate::text::Sentence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Spell,
    Comma,
    OOb,
    MaskedPrep,
    Agreement,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Spell, Stage::Comma, Stage::OOb, Stage::MaskedPrep, Stage::Agreement];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Spell => "spell",
            Stage::Comma => "comma",
            Stage::OOb => "o_ob",
            Stage::MaskedPrep => "masked_prep",
            Stage::Agreement => "agreement",
        }
    }

    /// Stages whose substitutions must pass a language-model gain threshold.
    pub fn is_gated(self) -> bool {
        matches!(self, Stage::MaskedPrep | Stage::Agreement)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

/// One modification made to a candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Change {
    pub stage: Stage,
    /// Token index at the time of the change.
    pub pos: usize,
    /// Empty for insertions.
    pub before: String,
    pub after: String,
    /// LM score difference, recorded for gated stages.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub sentence: Sentence,
    pub score: f64,
    pub changes: Vec<Change>,
}

impl Candidate {
    pub fn new(sentence: Sentence, lm: Option<&NGramModel>) -> Self {
        let score = score_sentence(lm, &sentence);
        Candidate {
            sentence,
            score,
            changes: Vec::new(),
        }
    }

    /// Derive a new candidate with one more change.
    pub fn derive(&self, sentence: Sentence, score: f64, change: Change) -> Self {
        let mut changes = self.changes.clone();
        changes.push(change);
        Candidate {
            sentence,
            score,
            changes,
        }
    }

    pub fn text(&self) -> &str {
        self.sentence.source()
    }
}

/// LM score of a sentence, or 0 when no model is loaded.
pub fn score_sentence(lm: Option<&NGramModel>, sentence: &Sentence) -> f64 {
    lm.map_or(0.0, |m| m.score(sentence))
}

fn rank(a: &Candidate, b: &Candidate) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.text().cmp(b.text()))
}

/// Up to `width` alternative versions of one sentence, best first.
#[derive(Debug, Clone)]
pub struct CandidateBeam {
    width: usize,
    candidates: Vec<Candidate>,
}

impl CandidateBeam {
    pub fn new(width: usize) -> Self {
        assert!(width >= 1, "beam width must be at least 1");
        CandidateBeam {
            width,
            candidates: Vec::new(),
        }
    }

    pub fn seed(sentence: Sentence, width: usize, lm: Option<&NGramModel>) -> Self {
        let mut beam = Self::new(width);
        beam.candidates.push(Candidate::new(sentence, lm));
        beam
    }

    /// Rank, deduplicate and truncate a set of candidates.
    pub fn from_candidates(width: usize, mut candidates: Vec<Candidate>) -> Self {
        candidates.sort_by(rank);
        candidates.dedup_by(|a, b| a.text() == b.text());
        // dedup only drops adjacent duplicates; equal texts always have
        // equal scores, so they end up adjacent after ranking
        candidates.truncate(width);
        CandidateBeam { width, candidates }
    }

    /// Replace the contents, keeping the width.
    pub fn rebuild(&self, candidates: Vec<Candidate>) -> Self {
        Self::from_candidates(self.width, candidates)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn into_candidates(self) -> Vec<Candidate> {
        self.candidates
    }

    pub fn top(&self) -> Option<&Candidate> {
        self.candidates.first()
    }

    /// Check size, ordering, uniqueness and score consistency.
    pub fn check_invariants(&self, lm: Option<&NGramModel>) -> Result<(), String> {
        if self.candidates.len() > self.width {
            return Err(format!("{} candidates exceed width {}", self.candidates.len(), self.width));
        }
        for pair in self.candidates.windows(2) {
            if rank(&pair[0], &pair[1]) != Ordering::Less {
                return Err(format!("unsorted or duplicate: {:?} / {:?}", pair[0].text(), pair[1].text()));
            }
        }
        for c in &self.candidates {
            let expected = score_sentence(lm, &c.sentence);
            if (expected - c.score).abs() > 1e-9 {
                return Err(format!("stale score for {:?}: {} vs {}", c.text(), c.score, expected));
            }
        }
        Ok(())
    }
}
