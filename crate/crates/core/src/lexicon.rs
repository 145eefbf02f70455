//! Frequency dictionary and symmetric-delete candidate index.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::text::{casefold, Sentence, Token};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Restricted Damerau-Levenshtein (optimal string alignment) distance over
/// characters: unit-cost insertion, deletion, substitution and adjacent
/// transposition, with no substring edited twice.
pub fn osa_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    osa_chars(&a, &b)
}

pub fn osa_chars<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    // three rolling rows: i-2, i-1, i
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(prev2[j - 2] + 1);
            }
            cur[j] = v;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Word and bigram counts from a correct-text corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyLexicon {
    words: HashMap<String, u64>,
    bigrams: HashMap<(String, String), u64>,
}

impl FrequencyLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sentences<'a, I>(sentences: I) -> Self
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        let mut lex = Self::new();
        for s in sentences {
            lex.add_sentence(s);
        }
        lex
    }

    /// Count word tokens and pairs of adjacent word tokens.
    pub fn add_sentence(&mut self, sentence: &Sentence) {
        let tokens = sentence.tokens();
        for (i, t) in tokens.iter().enumerate() {
            if !t.is_word() {
                continue;
            }
            *self.words.entry(t.lower.clone()).or_insert(0) += 1;
            if let Some(next) = tokens.get(i + 1).filter(|n| n.is_word()) {
                *self
                    .bigrams
                    .entry((t.lower.clone(), next.lower.clone()))
                    .or_insert(0) += 1;
            }
        }
    }

    pub fn insert(&mut self, word: &str, count: u64) {
        *self.words.entry(casefold(word, false)).or_insert(0) += count;
    }

    /// Drop words (and bigrams containing them) seen fewer than `min` times.
    pub fn retain_min_count(&mut self, min: u64) {
        self.words.retain(|_, c| *c >= min);
        let words = &self.words;
        self.bigrams
            .retain(|(a, b), _| words.contains_key(a) && words.contains_key(b));
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains_key(word) || self.words.contains_key(&casefold(word, false))
    }

    /// Whether a token passes the dictionary check. Only word tokens can
    /// fail it.
    pub fn accepts(&self, token: &Token) -> bool {
        !token.is_word() || self.contains(&token.lower)
    }

    pub fn count(&self, word: &str) -> u64 {
        self.words.get(word).copied().unwrap_or(0)
    }

    pub fn bigram_count(&self, first: &str, second: &str) -> u64 {
        self.bigrams
            .get(&(first.to_string(), second.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words sorted by count descending, then alphabetically.
    pub fn entries(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.words.iter().map(|(w, &c)| (w.as_str(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn bigram_entries(&self) -> Vec<(&str, &str, u64)> {
        let mut v: Vec<(&str, &str, u64)> = self
            .bigrams
            .iter()
            .map(|((a, b), &c)| (a.as_str(), b.as_str(), c))
            .collect();
        v.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| (a.0, a.1).cmp(&(b.0, b.1))));
        v
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (w, c) in self.entries() {
            writeln!(out, "{w}\t{c}")?;
        }
        Ok(())
    }

    pub fn write_bigrams_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (a, b, c) in self.bigram_entries() {
            writeln!(out, "{a} {b}\t{c}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self, LexiconError> {
        let mut lex = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (word, count) = parse_count_line(&line, i + 1)?;
            if word.contains(' ') {
                return Err(LexiconError::Parse { line: i + 1, msg: "word contains a space".into() });
            }
            lex.insert(word, count);
        }
        Ok(lex)
    }

    /// Merge a bigram file into this lexicon.
    pub fn read_bigrams_tsv<R: BufRead>(&mut self, reader: R) -> Result<(), LexiconError> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (pair, count) = parse_count_line(&line, i + 1)?;
            let (a, b) = pair.split_once(' ').ok_or_else(|| LexiconError::Parse {
                line: i + 1,
                msg: "bigram must be two space-separated words".into(),
            })?;
            *self
                .bigrams
                .entry((casefold(a, false), casefold(b, false)))
                .or_insert(0) += count;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::read_tsv(BufReader::new(File::open(path)?))
    }
}

fn parse_count_line(line: &str, lineno: usize) -> Result<(&str, u64), LexiconError> {
    let (key, count) = line.split_once('\t').ok_or_else(|| LexiconError::Parse {
        line: lineno,
        msg: "expected `entry<TAB>count`".into(),
    })?;
    let count: u64 = count.trim().parse().map_err(|_| LexiconError::Parse {
        line: lineno,
        msg: format!("bad count {count:?}"),
    })?;
    if count == 0 || key.is_empty() {
        return Err(LexiconError::Parse { line: lineno, msg: "empty entry or zero count".into() });
    }
    Ok((key, count))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    pub term: String,
    pub distance: usize,
    pub count: u64,
}

/// Symmetric-delete index: every term is posted under each string reachable
/// from it by at most `max_distance` character deletions.
#[derive(Debug, Clone)]
pub struct DeletionIndex {
    max_distance: usize,
    terms: Vec<(String, u64)>,
    postings: HashMap<String, Vec<u32>>,
}

/// All strings obtainable from `word` by deleting at most `d` characters,
/// including `word` itself.
pub fn deletion_variants(word: &str, d: usize) -> HashSet<String> {
    let mut seen: HashSet<String> = HashSet::new();
    seen.insert(word.to_string());
    let mut frontier = vec![word.chars().collect::<Vec<char>>()];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &frontier {
            for i in 0..w.len() {
                let mut v = w.clone();
                v.remove(i);
                if seen.insert(v.iter().collect()) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    seen
}

impl DeletionIndex {
    /// Build from `(term, count)` pairs. Duplicate terms have their counts
    /// summed.
    pub fn build<'a, I>(entries: I, max_distance: usize) -> Self
    where
        I: IntoIterator<Item = (&'a str, u64)>,
    {
        assert!(max_distance <= 3, "deletion index supports distances up to 3");
        let mut merged: HashMap<&str, u64> = HashMap::new();
        for (t, c) in entries {
            *merged.entry(t).or_insert(0) += c;
        }
        let mut terms: Vec<(String, u64)> = merged.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
        terms.sort();
        let mut postings: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, (term, _)) in terms.iter().enumerate() {
            for v in deletion_variants(term, max_distance) {
                postings.entry(v).or_default().push(id as u32);
            }
        }
        DeletionIndex {
            max_distance,
            terms,
            postings,
        }
    }

    pub fn from_lexicon(lexicon: &FrequencyLexicon, max_distance: usize) -> Self {
        Self::build(lexicon.words.iter().map(|(w, &c)| (w.as_str(), c)), max_distance)
    }

    pub fn max_distance(&self) -> usize {
        self.max_distance
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn num_variants(&self) -> usize {
        self.postings.len()
    }

    /// Terms posted under a deletion variant.
    pub fn posting(&self, variant: &str) -> Vec<&str> {
        self.postings
            .get(variant)
            .map(|ids| ids.iter().map(|&i| self.terms[i as usize].0.as_str()).collect())
            .unwrap_or_default()
    }

    /// Every indexed term within OSA distance `d` of `query`, sorted by
    /// distance, then count descending, then term. `d` is capped at the
    /// index's build distance.
    pub fn lookup(&self, query: &str, d: usize) -> Vec<Suggestion> {
        let d = d.min(self.max_distance);
        let q: Vec<char> = query.chars().collect();
        let mut candidates: HashSet<u32> = HashSet::new();
        for v in deletion_variants(query, d) {
            if let Some(ids) = self.postings.get(&v) {
                candidates.extend(ids.iter().copied());
            }
        }
        let mut out: Vec<Suggestion> = candidates
            .into_iter()
            .filter_map(|id| {
                let (term, count) = &self.terms[id as usize];
                let t: Vec<char> = term.chars().collect();
                if t.len().abs_diff(q.len()) > d {
                    return None;
                }
                let distance = osa_chars(&q, &t);
                (distance <= d).then(|| Suggestion {
                    term: term.clone(),
                    distance,
                    count: *count,
                })
            })
            .collect();
        sort_suggestions(&mut out);
        out
    }
}

pub fn sort_suggestions(s: &mut [Suggestion]) {
    s.sort_by(|a, b| {
        a.distance
            .cmp(&b.distance)
            .then_with(|| b.count.cmp(&a.count))
            .then_with(|| a.term.cmp(&b.term))
    });
}
