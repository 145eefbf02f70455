//! Tokenization, sentence representation and corpus ingestion.
//!
//! Every other module sees text through [`Sentence`]: a list of [`Token`]s
//! plus the whitespace gaps between them, so an unmodified sentence always
//! detokenizes back to its source string.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Word,
    Punct,
    Number,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    /// NFC surface form as it appears in the sentence.
    pub surface: String,
    /// Casefolded `surface`.
    pub lower: String,
    /// Character offsets into the sentence source (end exclusive).
    pub start: usize,
    pub end: usize,
    pub kind: TokenKind,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

/// Lowercase a string, optionally folding `ё` into `е`.
pub fn casefold(s: &str, fold_yo: bool) -> String {
    let lower = s.to_lowercase();
    if fold_yo {
        lower.replace('ё', "е")
    } else {
        lower
    }
}

/// A tokenized sentence.
///
/// `gaps[i]` is the text preceding token `i`; the final gap trails the last
/// token. Editing operations return a new sentence with a rebuilt source and
/// fresh offsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence {
    source: String,
    tokens: Vec<Token>,
    gaps: Vec<String>,
    fold_yo: bool,
}

impl Sentence {
    pub fn empty() -> Self {
        Sentence {
            source: String::new(),
            tokens: Vec::new(),
            gaps: vec![String::new()],
            fold_yo: false,
        }
    }

    /// Build a sentence from bare surfaces using default spacing: one space
    /// between tokens and none before punctuation.
    pub fn from_surfaces<S: AsRef<str>>(surfaces: &[S]) -> Self {
        let mut parts = Vec::with_capacity(surfaces.len());
        let mut gaps = Vec::with_capacity(surfaces.len() + 1);
        for (i, s) in surfaces.iter().enumerate() {
            let surface: String = s.as_ref().nfc().collect();
            let kind = classify(&surface);
            gaps.push(if i == 0 { String::new() } else { default_gap(kind).to_string() });
            parts.push((surface, kind));
        }
        gaps.push(String::new());
        Self::assemble(parts, gaps, false)
    }

    fn assemble(parts: Vec<(String, TokenKind)>, gaps: Vec<String>, fold_yo: bool) -> Self {
        debug_assert_eq!(gaps.len(), parts.len() + 1);
        let mut source = String::new();
        let mut tokens = Vec::with_capacity(parts.len());
        let mut offset = 0usize;
        for ((surface, kind), gap) in parts.into_iter().zip(gaps.iter()) {
            source.push_str(gap);
            offset += gap.chars().count();
            let len = surface.chars().count();
            source.push_str(&surface);
            tokens.push(Token {
                lower: casefold(&surface, fold_yo),
                surface,
                start: offset,
                end: offset + len,
                kind,
            });
            offset += len;
        }
        source.push_str(gaps.last().map(String::as_str).unwrap_or(""));
        Sentence {
            source,
            tokens,
            gaps,
            fold_yo,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Lowercased token forms, the view used by the language model.
    pub fn lower_forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.lower.as_str()).collect()
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    fn parts(&self) -> Vec<(String, TokenKind)> {
        self.tokens
            .iter()
            .map(|t| (t.surface.clone(), t.kind))
            .collect()
    }

    /// Substitute the surface of token `idx`, keeping the surrounding gaps.
    pub fn replace(&self, idx: usize, surface: &str) -> Sentence {
        let mut parts = self.parts();
        let surface: String = surface.nfc().collect();
        let kind = classify(&surface);
        parts[idx] = (surface, kind);
        Self::assemble(parts, self.gaps.clone(), self.fold_yo)
    }

    /// Insert a token before position `idx` (`idx == len` appends).
    pub fn insert(&self, idx: usize, surface: &str) -> Sentence {
        let mut parts = self.parts();
        let mut gaps = self.gaps.clone();
        let surface: String = surface.nfc().collect();
        let kind = classify(&surface);
        if parts.is_empty() {
            gaps.insert(0, String::new());
        } else if idx == 0 {
            let next_gap = default_gap(parts[0].1).to_string();
            gaps.insert(1, next_gap);
        } else {
            gaps.insert(idx, default_gap(kind).to_string());
        }
        parts.insert(idx, (surface, kind));
        Self::assemble(parts, gaps, self.fold_yo)
    }
}

fn default_gap(kind: TokenKind) -> &'static str {
    match kind {
        TokenKind::Punct => "",
        _ => " ",
    }
}

fn is_combining(c: char) -> bool {
    matches!(c as u32, 0x0300..=0x036F)
}

fn is_hyphen(c: char) -> bool {
    c == '-' || c == '\u{2010}'
}

fn classify(surface: &str) -> TokenKind {
    if surface.chars().any(char::is_alphabetic) {
        TokenKind::Word
    } else if surface.chars().next().is_some_and(char::is_numeric) {
        TokenKind::Number
    } else {
        TokenKind::Punct
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tokenizer {
    /// Fold `ё` into `е` in lowercase forms. Off by default.
    pub fold_yo: bool,
}

impl Tokenizer {
    pub fn new(fold_yo: bool) -> Self {
        Tokenizer { fold_yo }
    }

    pub fn tokenize(&self, text: &str) -> Sentence {
        let chars: Vec<char> = text.nfc().collect();
        let mut parts = Vec::new();
        let mut gaps = Vec::new();
        let mut gap = String::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '\u{feff}' {
                gap.push(c);
                i += 1;
                continue;
            }
            let start = i;
            let kind = if c.is_alphabetic() {
                i = scan_letters(&chars, i);
                while i + 1 < chars.len() && is_hyphen(chars[i]) && chars[i + 1].is_alphabetic() {
                    i = scan_letters(&chars, i + 1);
                }
                TokenKind::Word
            } else if c.is_numeric() {
                while i < chars.len() && chars[i].is_numeric() {
                    i += 1;
                }
                TokenKind::Number
            } else {
                i += 1;
                TokenKind::Punct
            };
            gaps.push(std::mem::take(&mut gap));
            parts.push((chars[start..i].iter().collect::<String>(), kind));
        }
        gaps.push(gap);
        Sentence::assemble(parts, gaps, self.fold_yo)
    }
}

fn scan_letters(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && (chars[i].is_alphabetic() || is_combining(chars[i])) {
        i += 1;
    }
    i
}

pub fn tokenize(text: &str) -> Sentence {
    Tokenizer::default().tokenize(text)
}

pub fn detokenize(sentence: &Sentence) -> String {
    sentence.source().to_string()
}

/// Carry the capitalization pattern of `original` over to a lowercase
/// `replacement`.
pub fn restore_case(original: &Token, replacement: &str) -> String {
    let letters: Vec<char> = original.surface.chars().filter(|c| c.is_alphabetic()).collect();
    let all_caps = letters.len() > 1 && letters.iter().all(|c| c.is_uppercase());
    if all_caps {
        return replacement.to_uppercase();
    }
    let mut chars = original.surface.chars();
    let title = chars.next().is_some_and(char::is_uppercase) && !chars.any(char::is_uppercase);
    if title {
        let mut out = String::with_capacity(replacement.len());
        let mut rc = replacement.chars();
        if let Some(first) = rc.next() {
            out.extend(first.to_uppercase());
        }
        out.extend(rc);
        return out;
    }
    replacement.to_string()
}

/// Split a paragraph into sentences: a boundary follows a run of `.`, `!`
/// or `?` when whitespace and then an uppercase letter come next.
///
/// Returns byte ranges of the sentences; the text between consecutive ranges
/// is whitespace only.
pub fn sentence_spans(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if start.is_none() {
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            start = Some(pos);
        }
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '.' | '!' | '?') {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |(p, _)| *p);
            let mut k = j;
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            if k > j && k < chars.len() && chars[k].1.is_uppercase() {
                spans.push((start.take().unwrap_or(pos), end));
                i = k;
                continue;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    if let Some(s) = start {
        let end = text.trim_end().len();
        if end > s {
            spans.push((s, end));
        }
    }
    spans
}

pub fn split_sentences(text: &str) -> Vec<&str> {
    sentence_spans(text).into_iter().map(|(s, e)| &text[s..e]).collect()
}

/// How a corpus file is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LineMode {
    /// One sentence per line.
    #[default]
    Sentence,
    /// One paragraph per line, split into sentences on terminal punctuation.
    Paragraph,
}

/// Line-oriented UTF-8 corpus reader. Blank lines are skipped.
pub struct CorpusReader<R> {
    lines: io::Lines<R>,
    mode: LineMode,
    pending: std::collections::VecDeque<String>,
    first: bool,
}

impl CorpusReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>, mode: LineMode) -> io::Result<Self> {
        Ok(Self::new(BufReader::new(File::open(path)?), mode))
    }
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(reader: R, mode: LineMode) -> Self {
        CorpusReader {
            lines: reader.lines(),
            mode,
            pending: Default::default(),
            first: true,
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = io::Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(s) = self.pending.pop_front() {
                return Some(Ok(s));
            }
            let mut line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e)),
            };
            if self.first {
                self.first = false;
                if let Some(stripped) = line.strip_prefix('\u{feff}') {
                    line = stripped.to_string();
                }
            }
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            match self.mode {
                LineMode::Sentence => return Some(Ok(line.to_string())),
                LineMode::Paragraph => self
                    .pending
                    .extend(split_sentences(line).into_iter().map(str::to_string)),
            }
        }
    }
}
