#![allow(dead_code)]

pub mod oracles;
pub mod synth;

use l2gec::lexicon::FrequencyLexicon;
use l2gec::lm::{NGramCounts, NGramModel, DEFAULT_UNK_LOGPROB};
use l2gec::text::{tokenize, Sentence};

pub fn sentences(lines: &[impl AsRef<str>]) -> Vec<Sentence> {
    lines.iter().map(|l| tokenize(l.as_ref())).collect()
}

pub fn train_lm(sents: &[Sentence]) -> NGramModel {
    let counts = NGramCounts::from_sentences(sents).expect("non-empty corpus");
    NGramModel::estimate(&counts, DEFAULT_UNK_LOGPROB).expect("estimable corpus")
}

pub fn train_lexicon(sents: &[Sentence]) -> FrequencyLexicon {
    FrequencyLexicon::from_sentences(sents)
}
