//! Grammatical chains: short word windows around a noun where the kept
//! (root) word stays lexical and its dependents are reduced to tags. Chains
//! counted over a correct corpus form a store; chains missing from it point
//! at agreement or government errors.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::beam::{Candidate, CandidateBeam, Change, Stage};
use crate::lm::NGramModel;
use crate::morph::{MorphEntry, MorphLexicon, Tagger, Upos};
use crate::text::{restore_case, Sentence};

pub const DEFAULT_MIN_GAIN: f64 = 0.1;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("chain store parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Obl,
    Nmod,
    Amod,
    Nummod,
    Case,
    Advmod,
    Unk,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Obl => "obl",
            Relation::Nmod => "nmod",
            Relation::Amod => "amod",
            Relation::Nummod => "nummod",
            Relation::Case => "case",
            Relation::Advmod => "advmod",
            Relation::Unk => "unk",
        }
    }

    /// Relation implied by the part of speech of the non-noun word.
    fn for_pos(pos: Upos) -> Self {
        match pos {
            Upos::ADP => Relation::Case,
            Upos::ADJ | Upos::DET => Relation::Amod,
            Upos::NUM => Relation::Nummod,
            Upos::ADV => Relation::Obl,
            _ => Relation::Unk,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "obl" => Relation::Obl,
            "nmod" => Relation::Nmod,
            "amod" => Relation::Amod,
            "nummod" => Relation::Nummod,
            "case" => Relation::Case,
            "advmod" => Relation::Advmod,
            "unk" => Relation::Unk,
            _ => return Err(format!("unknown relation {s:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    pub root: String,
    pub rel: Relation,
    pub dep_tags: Vec<String>,
}

impl Chain {
    pub fn arity(&self) -> usize {
        self.dep_tags.len() + 1
    }

    /// `root<TAB>rel<TAB>tag1;tag2`. Tags never contain `;` or tabs, so the
    /// key is unambiguous.
    pub fn key(&self) -> String {
        format!("{}\t{}\t{}", self.root, self.rel, self.dep_tags.join(";"))
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.root, self.rel, self.dep_tags.join(" ; "))
    }
}

/// A chain together with where it came from in the sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatedChain {
    pub chain: Chain,
    /// Token indices of the window, in order.
    pub positions: Vec<usize>,
    pub root: usize,
    pub noun: usize,
}

const GOVERNORS: [Upos; 3] = [Upos::VERB, Upos::ADV, Upos::ADP];

fn build_chain(window: &[usize], tags: &[MorphEntry], surface: &[&str]) -> Option<LocatedChain> {
    let nouns: Vec<usize> = window.iter().copied().filter(|&i| tags[i].pos == Upos::NOUN).collect();
    let [noun] = nouns[..] else { return None };
    let governor = GOVERNORS
        .iter()
        .find_map(|&g| window.iter().copied().find(|&i| tags[i].pos == g));
    let (root, rel) = match governor {
        Some(g) => (g, Relation::for_pos(tags[g].pos)),
        None => {
            let first_dep = window.iter().copied().find(|&i| i != noun)?;
            (noun, Relation::for_pos(tags[first_dep].pos))
        }
    };
    let dep_tags = window
        .iter()
        .filter(|&&i| i != root)
        .map(|&i| tags[i].tag_string())
        .collect();
    Some(LocatedChain {
        chain: Chain {
            root: surface[root].to_string(),
            rel,
            dep_tags,
        },
        positions: window.to_vec(),
        root,
        noun,
    })
}

/// Chains for every run of 2 or 3 adjacent word tokens holding exactly one
/// noun. Punctuation breaks adjacency.
///
/// The root is the first verb, adverb or preposition of the window (in that
/// order of preference); without one the noun is the root. The relation is
/// named after the part of speech of the non-noun word.
pub fn extract_located(sentence: &Sentence, tags: &[MorphEntry]) -> Vec<LocatedChain> {
    let tokens = sentence.tokens();
    let lower: Vec<&str> = tokens.iter().map(|t| t.lower.as_str()).collect();
    let mut out = Vec::new();
    for start in 0..tokens.len() {
        for size in [2, 3] {
            let end = start + size;
            if end > tokens.len() || !tokens[start..end].iter().all(|t| t.is_word()) {
                continue;
            }
            let window: Vec<usize> = (start..end).collect();
            if let Some(c) = build_chain(&window, tags, &lower) {
                out.push(c);
            }
        }
    }
    out
}

pub fn extract_chains(tagger: &dyn Tagger, sentence: &Sentence) -> Vec<Chain> {
    let tags = tagger.tag(sentence);
    extract_located(sentence, &tags).into_iter().map(|c| c.chain).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainStore {
    counts: HashMap<String, u64>,
}

impl ChainStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build<'a, I>(sentences: I, tagger: &dyn Tagger) -> Self
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        let mut store = Self::new();
        for s in sentences {
            for c in extract_chains(tagger, s) {
                store.add(&c, 1);
            }
        }
        store
    }

    pub fn add(&mut self, chain: &Chain, count: u64) {
        *self.counts.entry(chain.key()).or_insert(0) += count;
    }

    pub fn count(&self, chain: &Chain) -> u64 {
        self.counts.get(&chain.key()).copied().unwrap_or(0)
    }

    pub fn contains(&self, chain: &Chain) -> bool {
        self.count(chain) > 0
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `root<TAB>rel<TAB>tag1;tag2<TAB>count`, sorted by key.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut keys: Vec<(&String, &u64)> = self.counts.iter().collect();
        keys.sort();
        for (k, c) in keys {
            writeln!(out, "{k}\t{c}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self, ChainError> {
        let mut store = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: &str| ChainError::Parse { line: i + 1, msg: msg.to_string() };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(err("expected root<TAB>rel<TAB>tags<TAB>count"));
            }
            let rel: Relation = fields[1].parse().map_err(|e: String| err(&e))?;
            let count: u64 = fields[3].trim().parse().map_err(|_| err("bad count"))?;
            if count == 0 || fields[0].is_empty() || fields[2].is_empty() {
                return Err(err("empty field or zero count"));
            }
            let chain = Chain {
                root: fields[0].to_string(),
                rel,
                dep_tags: fields[2].split(';').map(str::to_string).collect(),
            };
            store.add(&chain, count);
        }
        Ok(store)
    }
}

/// Alternative analyses for a token: the other forms of its paradigm.
fn variants<'a>(lexicon: &'a MorphLexicon, entry: &MorphEntry) -> Vec<&'a MorphEntry> {
    lexicon
        .paradigm(&entry.lemma, entry.pos)
        .map(|p| p.into_iter().filter(|e| e.form != entry.form).collect())
        .unwrap_or_default()
}

/// Try to repair one candidate. Each chain that is absent from the store is
/// visited once; the noun (and, in adjective-agreement chains, the
/// adjective) is re-inflected, and among the variants whose chain is
/// attested the one with the largest LM gain above `min_gain` is applied.
pub fn correct_candidate(
    store: &ChainStore,
    model: &NGramModel,
    lexicon: &MorphLexicon,
    candidate: &Candidate,
    min_gain: f64,
) -> Candidate {
    let mut current = candidate.clone();
    let initial = extract_located(&current.sentence, &lexicon.tag_sentence(&current.sentence));
    for flagged in initial.iter().filter(|c| !store.contains(&c.chain)) {
        let tags = lexicon.tag_sentence(&current.sentence);
        let lower: Vec<&str> = current.sentence.tokens().iter().map(|t| t.lower.as_str()).collect();
        let Some(located) = build_chain(&flagged.positions, &tags, &lower) else { continue };
        if store.contains(&located.chain) {
            continue;
        }
        let mut targets = vec![located.noun];
        if located.chain.rel == Relation::Amod {
            targets.extend(
                located
                    .positions
                    .iter()
                    .copied()
                    .filter(|&i| matches!(tags[i].pos, Upos::ADJ | Upos::DET)),
            );
        }
        let mut best: Option<(f64, usize, String, Sentence)> = None;
        for &pos in &targets {
            for variant in variants(lexicon, &tags[pos]) {
                let mut alt_tags = tags.clone();
                alt_tags[pos] = variant.clone();
                let mut alt_lower = lower.clone();
                alt_lower[pos] = &variant.form;
                let Some(alt) = build_chain(&located.positions, &alt_tags, &alt_lower) else { continue };
                if !store.contains(&alt.chain) {
                    continue;
                }
                let token = &current.sentence.tokens()[pos];
                let replacement = restore_case(token, &variant.form);
                let sentence = current.sentence.replace(pos, &replacement);
                let gain = model.score(&sentence) - current.score;
                if best.as_ref().is_none_or(|b| gain > b.0) {
                    best = Some((gain, pos, replacement, sentence));
                }
            }
        }
        if let Some((gain, pos, replacement, sentence)) = best {
            if gain > min_gain {
                let before = current.sentence.tokens()[pos].surface.clone();
                let score = current.score + gain;
                current = current.derive(
                    sentence,
                    score,
                    Change {
                        stage: Stage::Agreement,
                        pos,
                        before,
                        after: replacement,
                        gain: Some(gain),
                    },
                );
            }
        }
    }
    current
}

pub fn correct_agreement(
    store: &ChainStore,
    model: &NGramModel,
    lexicon: &MorphLexicon,
    beam: &CandidateBeam,
    min_gain: f64,
) -> CandidateBeam {
    let out = beam
        .candidates()
        .iter()
        .map(|c| correct_candidate(store, model, lexicon, c, min_gain))
        .collect();
    beam.rebuild(out)
}
