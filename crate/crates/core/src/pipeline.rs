//! The correction pipeline: a beam of candidate versions of each sentence is
//! passed through the configured stages in order.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::beam::{Candidate, CandidateBeam, Change, Stage};
use crate::chains::{self, ChainStore};
use crate::lexicon::{DeletionIndex, FrequencyLexicon};
use crate::lm::NGramModel;
use crate::masked::{self, LmPredictor, MaskedPredictor, PrepositionSet};
use crate::morph::{MorphEntry, MorphLexicon, Tagger, Upos};
use crate::phonetic::PhoneticIndex;
use crate::rules::{self, RuleConfig};
use crate::text::{restore_case, sentence_spans, Sentence, TokenKind, Tokenizer};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage {stage} needs {artifact}, which is not loaded")]
    MissingArtifact { stage: Stage, artifact: &'static str },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpellConfig {
    /// Tokens of at most this many characters use `short_d`.
    pub short_len: usize,
    pub short_d: usize,
    pub max_d: usize,
    pub code_d: usize,
}

impl Default for SpellConfig {
    fn default() -> Self {
        SpellConfig {
            short_len: 4,
            short_d: 1,
            max_d: 2,
            code_d: 1,
        }
    }
}

impl SpellConfig {
    pub fn distance_for(&self, word: &str) -> usize {
        if word.chars().count() <= self.short_len {
            self.short_d
        } else {
            self.max_d
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub beam_width: usize,
    pub stages: Vec<Stage>,
    pub max_iterations: usize,
    pub spell: SpellConfig,
    pub masked_threshold: f64,
    pub min_gain: f64,
    pub rules: RuleConfig,
    pub prepositions: PrepositionSet,
    pub fold_yo: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            beam_width: 5,
            stages: Stage::ALL.to_vec(),
            max_iterations: 1,
            spell: SpellConfig::default(),
            masked_threshold: masked::DEFAULT_THRESHOLD,
            min_gain: chains::DEFAULT_MIN_GAIN,
            rules: RuleConfig::default(),
            prepositions: PrepositionSet::default(),
            fold_yo: false,
        }
    }
}

impl PipelineConfig {
    /// The enabled stages, with the rule switches applied.
    pub fn active_stages(&self) -> Vec<Stage> {
        self.stages
            .iter()
            .copied()
            .filter(|s| match s {
                Stage::Comma => self.rules.comma_rule_enabled,
                Stage::OOb => self.rules.prep_rule_enabled,
                _ => true,
            })
            .collect()
    }
}

/// Models and indexes. Each stage needs only some of them.
#[derive(Default)]
pub struct Artifacts {
    pub lexicon: Option<FrequencyLexicon>,
    pub index: Option<DeletionIndex>,
    pub phonetic: Option<PhoneticIndex>,
    pub lm: Option<NGramModel>,
    pub morph: Option<MorphLexicon>,
    pub chains: Option<ChainStore>,
    /// Used by the preposition stage instead of the LM-backed predictor.
    pub predictor: Option<Box<dyn MaskedPredictor>>,
}

impl Artifacts {
    /// Fill in the lookup indexes derivable from the lexicon.
    pub fn derive_indexes(&mut self, spell: &SpellConfig) {
        if let Some(lex) = &self.lexicon {
            if self.index.is_none() {
                self.index = Some(DeletionIndex::from_lexicon(lex, spell.max_d.max(spell.short_d)));
            }
            if self.phonetic.is_none() {
                self.phonetic = Some(PhoneticIndex::build(lex, spell.code_d));
            }
        }
    }
}

/// Tags tokens of the preposition set as ADP when no morphological
/// lexicon is loaded.
struct PrepositionTagger<'a>(&'a PrepositionSet);

impl Tagger for PrepositionTagger<'_> {
    fn tag(&self, sentence: &Sentence) -> Vec<MorphEntry> {
        sentence
            .tokens()
            .iter()
            .map(|t| {
                let pos = match t.kind {
                    TokenKind::Word if self.0.contains(&t.lower) => Upos::ADP,
                    TokenKind::Word => Upos::X,
                    TokenKind::Number => Upos::NUM,
                    TokenKind::Punct => Upos::PUNCT,
                };
                MorphEntry::unknown(&t.lower, pos)
            })
            .collect()
    }
}

/// Correction result for one input text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionResult {
    pub text: String,
    pub changes: Vec<LoggedChange>,
    /// Largest beam seen at any stage boundary or inside the spell stage.
    pub max_beam: usize,
    /// Stages skipped because the predictor failed.
    pub skipped: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoggedChange {
    pub sentence: usize,
    #[serde(flatten)]
    pub change: Change,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StreamStats {
    pub lines: usize,
    pub sentences: usize,
    pub changed_lines: usize,
    pub changes: BTreeMap<String, usize>,
    pub skipped: BTreeMap<String, usize>,
}

impl StreamStats {
    pub fn total_changes(&self) -> usize {
        self.changes.values().sum()
    }
}

pub struct Pipeline {
    config: PipelineConfig,
    artifacts: Artifacts,
    tokenizer: Tokenizer,
}

impl Pipeline {
    /// Check that every enabled stage has what it needs.
    pub fn new(config: PipelineConfig, mut artifacts: Artifacts) -> Result<Self, PipelineError> {
        if config.beam_width == 0 {
            return Err(PipelineError::Config("beam width must be at least 1".into()));
        }
        if config.max_iterations == 0 {
            return Err(PipelineError::Config("max_iterations must be at least 1".into()));
        }
        artifacts.derive_indexes(&config.spell);
        for stage in config.active_stages() {
            let missing = match stage {
                Stage::Spell if artifacts.lexicon.is_none() => Some("a lexicon"),
                Stage::MaskedPrep if artifacts.lm.is_none() => Some("a language model"),
                Stage::Agreement if artifacts.lm.is_none() => Some("a language model"),
                Stage::Agreement if artifacts.morph.is_none() => Some("a morphological lexicon"),
                Stage::Agreement if artifacts.chains.is_none() => Some("a chain store"),
                _ => None,
            };
            if let Some(artifact) = missing {
                return Err(PipelineError::MissingArtifact { stage, artifact });
            }
        }
        let mut config = config;
        if let Some(morph) = &artifacts.morph {
            config.rules = config.rules.with_lexicon(morph);
        }
        let tokenizer = Tokenizer::new(config.fold_yo);
        Ok(Pipeline {
            config,
            artifacts,
            tokenizer,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn artifacts(&self) -> &Artifacts {
        &self.artifacts
    }

    fn lm(&self) -> Option<&NGramModel> {
        self.artifacts.lm.as_ref()
    }

    /// Run every stage over one sentence. Returns the final beam, the largest
    /// beam size observed and the stages that were skipped.
    pub fn correct_sentence(&self, sentence: Sentence) -> (CandidateBeam, usize, Vec<Stage>) {
        let lm = self.lm();
        let mut beam = CandidateBeam::seed(sentence, self.config.beam_width, lm);
        let mut max_beam = beam.len();
        let mut skipped = Vec::new();
        for _ in 0..self.config.max_iterations {
            let before: Vec<String> = beam.candidates().iter().map(|c| c.text().to_string()).collect();
            for stage in self.config.active_stages() {
                let (next, inner_max, failed) = self.run_stage(stage, &beam);
                if failed && !skipped.contains(&stage) {
                    skipped.push(stage);
                }
                beam = next;
                debug_assert!(beam.check_invariants(lm).is_ok());
                max_beam = max_beam.max(inner_max).max(beam.len());
            }
            let after: Vec<&str> = beam.candidates().iter().map(Candidate::text).collect();
            if before == after {
                break;
            }
        }
        (beam, max_beam, skipped)
    }

    fn run_stage(&self, stage: Stage, beam: &CandidateBeam) -> (CandidateBeam, usize, bool) {
        let a = &self.artifacts;
        match stage {
            Stage::Spell => {
                let (b, m) = spell_stage(
                    &self.config.spell,
                    a.lexicon.as_ref().expect("checked in new"),
                    a.index.as_ref().expect("derived in new"),
                    a.phonetic.as_ref(),
                    self.lm(),
                    beam,
                );
                (b, m, false)
            }
            Stage::Comma => (self.rule_stage(beam, rules::comma_rule), 0, false),
            Stage::OOb => (self.rule_stage(beam, rules::o_ob_rule), 0, false),
            Stage::MaskedPrep => {
                let lm = a.lm.as_ref().expect("checked in new");
                let fallback = LmPredictor::new(lm);
                let predictor: &dyn MaskedPredictor = a.predictor.as_deref().unwrap_or(&fallback);
                let prep_tagger = PrepositionTagger(&self.config.prepositions);
                let tagger: &dyn Tagger = match &a.morph {
                    Some(m) => m,
                    None => &prep_tagger,
                };
                let (b, err) = masked::correct_prepositions(
                    predictor,
                    tagger,
                    lm,
                    &self.config.prepositions,
                    beam,
                    self.config.masked_threshold,
                );
                (b, 0, err.is_some())
            }
            Stage::Agreement => {
                let b = chains::correct_agreement(
                    a.chains.as_ref().expect("checked in new"),
                    a.lm.as_ref().expect("checked in new"),
                    a.morph.as_ref().expect("checked in new"),
                    beam,
                    self.config.min_gain,
                );
                (b, 0, false)
            }
        }
    }

    fn rule_stage(
        &self,
        beam: &CandidateBeam,
        rule: fn(&RuleConfig, &Sentence) -> (Sentence, Vec<Change>),
    ) -> CandidateBeam {
        let out = beam
            .candidates()
            .iter()
            .map(|c| {
                let (sentence, changes) = rule(&self.config.rules, &c.sentence);
                if changes.is_empty() {
                    return c.clone();
                }
                let mut next = Candidate::new(sentence, self.lm());
                next.changes = c.changes.iter().cloned().chain(changes).collect();
                next
            })
            .collect();
        beam.rebuild(out)
    }

    /// Correct a text of one or more sentences. Whitespace between sentences
    /// is kept, and a text nothing applies to comes back unchanged.
    pub fn run(&self, text: &str) -> CorrectionResult {
        let mut out = String::with_capacity(text.len());
        let mut changes = Vec::new();
        let mut max_beam = 0;
        let mut skipped: Vec<Stage> = Vec::new();
        let mut last = 0;
        for (i, (start, end)) in sentence_spans(text).into_iter().enumerate() {
            out.push_str(&text[last..start]);
            let (beam, m, sk) = self.correct_sentence(self.tokenizer.tokenize(&text[start..end]));
            max_beam = max_beam.max(m);
            for s in sk {
                if !skipped.contains(&s) {
                    skipped.push(s);
                }
            }
            match beam.top() {
                Some(top) if !top.changes.is_empty() => {
                    out.push_str(top.text());
                    changes.extend(top.changes.iter().map(|c| LoggedChange {
                        sentence: i,
                        change: c.clone(),
                    }));
                }
                _ => out.push_str(&text[start..end]),
            }
            last = end;
        }
        out.push_str(&text[last..]);
        CorrectionResult {
            text: out,
            changes,
            max_beam,
            skipped,
        }
    }

    /// Correct a line-oriented stream. Lines are processed in parallel
    /// batches and written in input order. When `log` is given, one JSON
    /// object per change is written to it.
    pub fn correct_stream<R: BufRead, W: Write>(
        &self,
        reader: R,
        mut writer: W,
        mut log: Option<&mut dyn Write>,
    ) -> io::Result<StreamStats> {
        const BATCH: usize = 512;
        let mut stats = StreamStats::default();
        let mut lines = reader.lines();
        let mut line_no = 0;
        loop {
            let mut batch = Vec::with_capacity(BATCH);
            for line in lines.by_ref().take(BATCH) {
                batch.push(line?);
            }
            if batch.is_empty() {
                break;
            }
            let results: Vec<CorrectionResult> = batch.par_iter().map(|l| self.run(l)).collect();
            for (line, res) in batch.iter().zip(&results) {
                writeln!(writer, "{}", res.text)?;
                stats.lines += 1;
                stats.sentences += sentence_spans(line).len();
                if res.text != *line {
                    stats.changed_lines += 1;
                }
                for c in &res.changes {
                    *stats.changes.entry(c.change.stage.to_string()).or_insert(0) += 1;
                    if let Some(log) = log.as_deref_mut() {
                        let record = LogRecord { line: line_no, logged: c };
                        serde_json::to_writer(&mut *log, &record)?;
                        writeln!(log)?;
                    }
                }
                for s in &res.skipped {
                    *stats.skipped.entry(s.to_string()).or_insert(0) += 1;
                }
                line_no += 1;
            }
        }
        writer.flush()?;
        Ok(stats)
    }
}

#[derive(Serialize)]
struct LogRecord<'a> {
    line: usize,
    #[serde(flatten)]
    logged: &'a LoggedChange,
}

/// Correction options for one unknown word: dictionary neighbours within the
/// length-dependent distance, or phonetic neighbours when there are none.
pub fn spell_options(
    config: &SpellConfig,
    index: &DeletionIndex,
    phonetic: Option<&PhoneticIndex>,
    word: &str,
) -> Vec<String> {
    let hits = index.lookup(word, config.distance_for(word));
    if !hits.is_empty() {
        return hits.into_iter().map(|s| s.term).collect();
    }
    phonetic
        .map(|p| p.candidates(word, config.code_d).into_iter().map(|c| c.word).collect())
        .unwrap_or_default()
}

/// Replace out-of-lexicon words, right to left. Every option of a flagged
/// word becomes its own candidate next to the unchanged one; the beam is cut
/// back to its width after each position. Also returns the largest beam
/// size seen.
pub fn spell_stage(
    config: &SpellConfig,
    lexicon: &FrequencyLexicon,
    index: &DeletionIndex,
    phonetic: Option<&PhoneticIndex>,
    lm: Option<&NGramModel>,
    beam: &CandidateBeam,
) -> (CandidateBeam, usize) {
    let mut positions: Vec<usize> = beam
        .candidates()
        .iter()
        .flat_map(|c| {
            c.sentence
                .tokens()
                .iter()
                .enumerate()
                .filter(|(_, t)| !lexicon.accepts(t))
                .map(|(i, _)| i)
        })
        .collect();
    positions.sort_unstable_by(|a, b| b.cmp(a));
    positions.dedup();

    let mut beam = beam.clone();
    let mut max_beam = beam.len();
    for pos in positions {
        let mut next = Vec::new();
        for cand in beam.candidates() {
            next.push(cand.clone());
            let Some(token) = cand.sentence.tokens().get(pos) else { continue };
            if lexicon.accepts(token) {
                continue;
            }
            for option in spell_options(config, index, phonetic, &token.lower) {
                let replacement = restore_case(token, &option);
                if replacement == token.surface {
                    continue;
                }
                let sentence = cand.sentence.replace(pos, &replacement);
                let score = crate::beam::score_sentence(lm, &sentence);
                next.push(cand.derive(
                    sentence,
                    score,
                    Change {
                        stage: Stage::Spell,
                        pos,
                        before: token.surface.clone(),
                        after: replacement,
                        gain: None,
                    },
                ));
            }
        }
        beam = beam.rebuild(next);
        max_beam = max_beam.max(beam.len());
    }
    (beam, max_beam)
}
