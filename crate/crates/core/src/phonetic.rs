//! Soundex-style phonetic codes for Russian and a code-keyed word index.
//!
//! Letter classes:
//!
//! | digit | letters |
//! |-------|---------|
//! | 0 | а э и о у ы е ё ю я й |
//! | 1 | б п |
//! | 2 | в ф |
//! | 3 | г к х |
//! | 4 | д т |
//! | 5 | ж ш щ ч |
//! | 6 | з с ц |
//! | 7 | л |
//! | 8 | м н |
//! | 9 | р |
//!
//! `ь`, `ъ` and non-Cyrillic characters are dropped. A doubled letter
//! (`нн`, `сс`) yields one digit; different letters of one class do not
//! collapse. Codes are not truncated.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use thiserror::Error;

use crate::lexicon::{osa_distance, DeletionIndex, FrequencyLexicon};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhoneticError {
    #[error("no encodable letters in {0:?}")]
    EmptyCode(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhoneticCode(String);

impl PhoneticCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for PhoneticCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn digit(c: char) -> Option<char> {
    Some(match c {
        'а' | 'э' | 'и' | 'о' | 'у' | 'ы' | 'е' | 'ё' | 'ю' | 'я' | 'й' => '0',
        'б' | 'п' => '1',
        'в' | 'ф' => '2',
        'г' | 'к' | 'х' => '3',
        'д' | 'т' => '4',
        'ж' | 'ш' | 'щ' | 'ч' => '5',
        'з' | 'с' | 'ц' => '6',
        'л' => '7',
        'м' | 'н' => '8',
        'р' => '9',
        _ => return None,
    })
}

pub fn encode(word: &str) -> Result<PhoneticCode, PhoneticError> {
    let mut code = String::new();
    let mut prev: Option<char> = None;
    for c in word.chars().flat_map(char::to_lowercase) {
        let Some(d) = digit(c) else { continue };
        if prev != Some(c) {
            code.push(d);
        }
        prev = Some(c);
    }
    if code.is_empty() {
        Err(PhoneticError::EmptyCode(word.to_string()))
    } else {
        Ok(PhoneticCode(code))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhoneticCandidate {
    pub word: String,
    pub code_distance: usize,
    pub distance: usize,
    pub count: u64,
}

/// Maps phonetic codes to the dictionary words that share them, with a
/// deletion index over the codes for approximate code lookup.
#[derive(Debug, Clone)]
pub struct PhoneticIndex {
    by_code: HashMap<String, Vec<(String, u64)>>,
    codes: DeletionIndex,
}

impl PhoneticIndex {
    /// Index every encodable lexicon word. `max_code_distance` bounds the
    /// code distance usable at lookup time.
    pub fn build(lexicon: &FrequencyLexicon, max_code_distance: usize) -> Self {
        let mut by_code: HashMap<String, Vec<(String, u64)>> = HashMap::new();
        for (w, c) in lexicon.entries() {
            if let Ok(code) = encode(w) {
                by_code.entry(code.0).or_default().push((w.to_string(), c));
            }
        }
        for words in by_code.values_mut() {
            words.sort();
        }
        let codes = DeletionIndex::build(by_code.keys().map(|c| (c.as_str(), 1)), max_code_distance);
        PhoneticIndex { by_code, codes }
    }

    pub fn words_for(&self, code: &PhoneticCode) -> Vec<&str> {
        self.by_code
            .get(code.as_str())
            .map(|v| v.iter().map(|(w, _)| w.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn num_codes(&self) -> usize {
        self.by_code.len()
    }

    /// Every word whose code lies within `code_d` of the query's code.
    pub fn neighbors(&self, word: &str, code_d: usize) -> Vec<PhoneticCandidate> {
        let Ok(code) = encode(word) else { return Vec::new() };
        let mut out = Vec::new();
        for hit in self.codes.lookup(code.as_str(), code_d) {
            for (w, c) in &self.by_code[&hit.term] {
                out.push(PhoneticCandidate {
                    word: w.clone(),
                    code_distance: hit.distance,
                    distance: osa_distance(word, w),
                    count: *c,
                });
            }
        }
        out.sort_by(|a, b| {
            a.distance
                .cmp(&b.distance)
                .then_with(|| b.count.cmp(&a.count))
                .then_with(|| a.word.cmp(&b.word))
        });
        out
    }

    /// Phonetic neighbours restricted to those at minimal edit distance from
    /// the query word.
    pub fn candidates(&self, word: &str, code_d: usize) -> Vec<PhoneticCandidate> {
        let mut all = self.neighbors(word, code_d);
        if let Some(best) = all.first().map(|c| c.distance) {
            all.retain(|c| c.distance == best);
        }
        all
    }

    /// `code<TAB>word1,word2,…` lines sorted by code.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let sorted: BTreeMap<&String, &Vec<(String, u64)>> = self.by_code.iter().collect();
        for (code, words) in sorted {
            let list: Vec<&str> = words.iter().map(|(w, _)| w.as_str()).collect();
            writeln!(out, "{}\t{}", code, list.join(","))?;
        }
        Ok(())
    }
}
