//! Trigram language model with interpolated Kneser-Ney smoothing.
//!
//! Counting pads every sentence with two `<s>` markers and one `</s>`.
//! Estimation turns the counts into backoff tables in the same shape as an
//! ARPA file: each stored n-gram carries its full interpolated
//! log10-probability and, when it is a context, the log10 interpolation
//! weight used for unseen continuations. Scoring walks those tables the way
//! any ARPA consumer does, so models estimated here and models imported from
//! elsewhere go through one code path.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::text::Sentence;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";
pub const ORDER: usize = 3;

pub const DEFAULT_UNK_LOGPROB: f64 = -7.0;
/// Log-probability used for entries that can never be predicted (`<s>`).
const NEVER: f64 = -99.0;
const NONE: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum LmError {
    #[error("corpus contains no sentences")]
    EmptyCorpus,
    #[error("cannot estimate discount for order {order}: n1={n1}, n2={n2}")]
    DegenerateCounts { order: usize, n1: u64, n2: u64 },
    #[error("ARPA parse error at line {line}: {msg}")]
    ArpaParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

type Key = [u32; ORDER];

/// Right-align an n-gram into a fixed-width key.
fn key(ids: &[u32]) -> Key {
    debug_assert!(!ids.is_empty() && ids.len() <= ORDER);
    let mut k = [NONE; ORDER];
    k[ORDER - ids.len()..].copy_from_slice(ids);
    k
}

fn key_ids(k: &Key) -> &[u32] {
    let first = k.iter().position(|&x| x != NONE).unwrap_or(ORDER);
    &k[first..]
}

#[derive(Debug, Clone, Default)]
struct Vocab {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocab {
    fn intern(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.ids.get(w) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(w.to_string());
        self.ids.insert(w.to_string(), id);
        id
    }

    fn get(&self, w: &str) -> Option<u32> {
        self.ids.get(w).copied()
    }

    fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    fn render(&self, ids: &[u32]) -> String {
        ids.iter().map(|&i| self.word(i)).collect::<Vec<_>>().join(" ")
    }
}

/// Raw n-gram counts of orders 1..=3 over padded sentences.
#[derive(Debug, Clone)]
pub struct NGramCounts {
    vocab: Vocab,
    orders: [HashMap<Key, u64>; ORDER],
    sentences: u64,
}

impl Default for NGramCounts {
    fn default() -> Self {
        let mut vocab = Vocab::default();
        vocab.intern(BOS);
        vocab.intern(EOS);
        NGramCounts {
            vocab,
            orders: Default::default(),
            sentences: 0,
        }
    }
}

impl NGramCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Count every sentence of a corpus.
    pub fn from_sentences<'a, I>(sentences: I) -> Result<Self, LmError>
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        let mut counts = Self::new();
        for s in sentences {
            counts.add(&s.lower_forms());
        }
        if counts.sentences == 0 {
            return Err(LmError::EmptyCorpus);
        }
        Ok(counts)
    }

    /// Add one sentence given as lowercase tokens.
    pub fn add(&mut self, words: &[&str]) {
        let bos = self.vocab.intern(BOS);
        let mut padded = vec![bos; ORDER - 1];
        padded.extend(words.iter().map(|w| self.vocab.intern(w)));
        padded.push(self.vocab.intern(EOS));
        for i in ORDER - 1..padded.len() {
            for n in 1..=ORDER {
                *self.orders[n - 1].entry(key(&padded[i + 1 - n..=i])).or_insert(0) += 1;
            }
        }
        self.sentences += 1;
    }

    pub fn sentences(&self) -> u64 {
        self.sentences
    }

    /// Count of an n-gram given as space-separated tokens.
    pub fn count(&self, ngram: &str) -> u64 {
        let ids: Option<Vec<u32>> = ngram.split_whitespace().map(|w| self.vocab.get(w)).collect();
        match ids {
            Some(ids) if !ids.is_empty() && ids.len() <= ORDER => {
                self.orders[ids.len() - 1].get(&key(&ids)).copied().unwrap_or(0)
            }
            _ => 0,
        }
    }

    pub fn num_ngrams(&self, order: usize) -> usize {
        self.orders[order - 1].len()
    }

    /// All n-grams of all orders with their counts, sorted by n-gram text.
    pub fn entries(&self) -> Vec<(String, u64)> {
        let mut out: Vec<(String, u64)> = self
            .orders
            .iter()
            .flat_map(|m| m.iter().map(|(k, &c)| (self.vocab.render(key_ids(k)), c)))
            .collect();
        out.sort();
        out
    }

    /// Write the counts as `ngram<TAB>count` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (ngram, count) in self.entries() {
            writeln!(out, "{ngram}\t{count}")?;
        }
        Ok(())
    }
}

fn discount(order: usize, counts: impl Iterator<Item = u64>) -> Result<f64, LmError> {
    let (mut n1, mut n2) = (0u64, 0u64);
    for c in counts {
        match c {
            1 => n1 += 1,
            2 => n2 += 1,
            _ => {}
        }
    }
    if n1 == 0 {
        return Err(LmError::DegenerateCounts { order, n1, n2 });
    }
    Ok(n1 as f64 / (n1 as f64 + 2.0 * n2 as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    logprob: f64,
    backoff: f64,
}

/// Per-context totals: sum of counts and number of distinct continuations.
#[derive(Default, Clone, Copy)]
struct ContextStats {
    total: f64,
    types: f64,
}

fn context_stats(counts: &HashMap<Key, u64>) -> HashMap<Key, ContextStats> {
    let mut out: HashMap<Key, ContextStats> = HashMap::new();
    for (k, &c) in counts {
        let ids = key_ids(k);
        let ctx = key(&ids[..ids.len() - 1]);
        let e = out.entry(ctx).or_default();
        e.total += c as f64;
        e.types += 1.0;
    }
    out
}

/// Backoff n-gram model of order 3.
#[derive(Debug, Clone)]
pub struct NGramModel {
    vocab: Vocab,
    tables: Vec<HashMap<Key, Entry>>,
    order: usize,
    unk: u32,
    bos: u32,
    eos: u32,
    discounts: Option<[f64; ORDER]>,
}

impl NGramModel {
    /// Interpolated Kneser-Ney with one discount per order, `D = n1/(n1+2*n2)`.
    ///
    /// Orders 2 and 3 use raw counts; the unigram level uses continuation
    /// counts (number of distinct left neighbours) interpolated with a
    /// uniform distribution. `<unk>` receives `10^unk_logprob` of the
    /// unigram mass and the rest is scaled to keep every distribution
    /// normalized.
    pub fn estimate(counts: &NGramCounts, unk_logprob: f64) -> Result<Self, LmError> {
        if counts.sentences == 0 {
            return Err(LmError::EmptyCorpus);
        }
        let mut vocab = counts.vocab.clone();
        let unk = vocab.intern(UNK);
        let bos = vocab.intern(BOS);
        let eos = vocab.intern(EOS);
        let [c1, c2, c3] = &counts.orders;

        let mut continuation: HashMap<u32, u64> = HashMap::new();
        for k in c2.keys() {
            *continuation.entry(k[ORDER - 1]).or_insert(0) += 1;
        }
        let d1 = discount(1, continuation.values().copied())?;
        let d2 = discount(2, c2.values().copied())?;
        let d3 = discount(3, c3.values().copied())?;

        let p_unk = 10f64.powf(unk_logprob);
        let cont_total: f64 = continuation.values().map(|&c| c as f64).sum();
        let predicted: Vec<u32> = c1.keys().map(|k| k[ORDER - 1]).collect();
        let uniform = 1.0 / predicted.len() as f64;
        let gamma1 = d1 * continuation.len() as f64 / cont_total;
        let mut p1: HashMap<u32, f64> = HashMap::new();
        for &w in &predicted {
            let n = continuation.get(&w).copied().unwrap_or(0) as f64;
            let p = ((n - d1).max(0.0) / cont_total + gamma1 * uniform) * (1.0 - p_unk);
            p1.insert(w, p);
        }

        let ctx2 = context_stats(c2);
        let ctx3 = context_stats(c3);
        let lambda = |stats: &ContextStats, d: f64| d * stats.types / stats.total;

        let mut p2: HashMap<Key, f64> = HashMap::new();
        for (k, &c) in c2 {
            let ids = key_ids(k);
            let st = &ctx2[&key(&ids[..1])];
            let p = (c as f64 - d2).max(0.0) / st.total + lambda(st, d2) * p1[&ids[1]];
            p2.insert(*k, p);
        }
        let prob2 = |v: u32, w: u32| -> f64 {
            match p2.get(&key(&[v, w])) {
                Some(&p) => p,
                None => ctx2.get(&key(&[v])).map_or(1.0, |st| lambda(st, d2)) * p1[&w],
            }
        };

        let mut tables: Vec<HashMap<Key, Entry>> = vec![HashMap::new(); ORDER];
        for (&w, &p) in &p1 {
            let backoff = ctx2.get(&key(&[w])).map_or(0.0, |st| lambda(st, d2).log10());
            tables[0].insert(key(&[w]), Entry { logprob: p.log10(), backoff });
        }
        tables[0].insert(
            key(&[bos]),
            Entry {
                logprob: NEVER,
                backoff: ctx2.get(&key(&[bos])).map_or(0.0, |st| lambda(st, d2).log10()),
            },
        );
        tables[0].insert(key(&[unk]), Entry { logprob: unk_logprob, backoff: 0.0 });

        for (k, &p) in &p2 {
            let backoff = ctx3.get(k).map_or(0.0, |st| lambda(st, d3).log10());
            tables[1].insert(*k, Entry { logprob: p.log10(), backoff });
        }
        // <s> <s> never occurs as a bigram but is the first trigram context.
        let bb = key(&[bos, bos]);
        if let Some(st) = ctx3.get(&bb) {
            tables[1].insert(bb, Entry { logprob: NEVER, backoff: lambda(st, d3).log10() });
        }

        for (k, &c) in c3 {
            let ids = key_ids(k);
            let st = &ctx3[&key(&ids[..2])];
            let p = (c as f64 - d3).max(0.0) / st.total + lambda(st, d3) * prob2(ids[1], ids[2]);
            tables[2].insert(*k, Entry { logprob: p.log10(), backoff: 0.0 });
        }

        Ok(NGramModel {
            vocab,
            tables,
            order: ORDER,
            unk,
            bos,
            eos,
            discounts: Some([d1, d2, d3]),
        })
    }

    /// Discounts per order (1..=3); `None` for imported models.
    pub fn discounts(&self) -> Option<[f64; ORDER]> {
        self.discounts
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn id(&self, word: &str) -> u32 {
        self.vocab.get(word).unwrap_or(self.unk)
    }

    fn cond(&self, ctx: &[u32], w: u32) -> f64 {
        let mut ctx = &ctx[ctx.len().saturating_sub(self.order - 1)..];
        let mut acc = 0.0;
        loop {
            let mut k = [NONE; ORDER];
            k[ORDER - 1 - ctx.len()..ORDER - 1].copy_from_slice(ctx);
            k[ORDER - 1] = w;
            if let Some(e) = self.tables[ctx.len()].get(&k) {
                return acc + e.logprob;
            }
            if ctx.is_empty() {
                return acc + self.tables[0].get(&key(&[self.unk])).map_or(DEFAULT_UNK_LOGPROB, |e| e.logprob);
            }
            acc += self.tables[ctx.len() - 1].get(&key(ctx)).map_or(0.0, |e| e.backoff);
            ctx = &ctx[1..];
        }
    }

    /// log10 p(word | context) for lowercase tokens; the context may hold
    /// `<s>` markers.
    pub fn logprob(&self, context: &[&str], word: &str) -> f64 {
        let ctx: Vec<u32> = context.iter().map(|w| self.id(w)).collect();
        self.cond(&ctx, self.id(word))
    }

    /// log10 probability of a token sequence padded with `<s> <s> … </s>`.
    /// Tokens are lowercased before lookup.
    pub fn score_words<S: AsRef<str>>(&self, words: &[S]) -> f64 {
        let mut hist = vec![self.bos; ORDER - 1];
        let mut total = 0.0;
        for w in words {
            let id = self.id(&w.as_ref().to_lowercase());
            total += self.cond(&hist[hist.len() - (ORDER - 1)..], id);
            hist.push(id);
        }
        total + self.cond(&hist[hist.len() - (ORDER - 1)..], self.eos)
    }

    pub fn score(&self, sentence: &Sentence) -> f64 {
        self.score_words(&sentence.lower_forms())
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.vocab.get(word).is_some_and(|id| id != self.unk && id != self.bos)
    }

    /// Words that can be predicted: the vocabulary plus `</s>` and `<unk>`.
    pub fn predictable(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.tables[0]
            .keys()
            .map(|k| k[ORDER - 1])
            .filter(|&id| id != self.bos)
            .map(|id| self.vocab.word(id))
            .collect();
        out.sort_unstable();
        out
    }

    /// Every stored history: the empty context plus each stored n-gram
    /// below the model order.
    pub fn contexts(&self) -> Vec<Vec<&str>> {
        let mut out: Vec<Vec<&str>> = vec![Vec::new()];
        for table in &self.tables[..self.order - 1] {
            for k in table.keys() {
                out.push(key_ids(k).iter().map(|&i| self.vocab.word(i)).collect());
            }
        }
        out.sort();
        out
    }

    pub fn num_ngrams(&self, order: usize) -> usize {
        self.tables.get(order - 1).map_or(0, HashMap::len)
    }

    pub fn write_arpa<W: Write>(&self, mut out: W) -> io::Result<()> {
        let order = self.order();
        writeln!(out, "\\data\\")?;
        for n in 1..=order {
            writeln!(out, "ngram {}={}", n, self.tables[n - 1].len())?;
        }
        for n in 1..=order {
            writeln!(out)?;
            writeln!(out, "\\{n}-grams:")?;
            let sorted: BTreeMap<String, &Entry> = self.tables[n - 1]
                .iter()
                .map(|(k, e)| (self.vocab.render(key_ids(k)), e))
                .collect();
            for (ngram, e) in sorted {
                if n < order {
                    writeln!(out, "{}\t{}\t{}", e.logprob, ngram, e.backoff)?;
                } else {
                    writeln!(out, "{}\t{}", e.logprob, ngram)?;
                }
            }
        }
        writeln!(out)?;
        writeln!(out, "\\end\\")?;
        Ok(())
    }

    pub fn save_arpa(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_arpa(&mut w)?;
        w.flush()
    }

    pub fn load_arpa(path: impl AsRef<Path>) -> Result<Self, LmError> {
        Self::read_arpa(BufReader::new(File::open(path)?))
    }

    pub fn read_arpa<R: BufRead>(reader: R) -> Result<Self, LmError> {
        let err = |line: usize, msg: &str| LmError::ArpaParse { line, msg: msg.to_string() };
        let mut vocab = Vocab::default();
        let mut tables: Vec<HashMap<Key, Entry>> = vec![HashMap::new(); ORDER];
        let mut declared: Vec<usize> = Vec::new();
        #[derive(PartialEq)]
        enum State {
            Start,
            Data,
            Grams(usize),
            End,
        }
        let mut state = State::Start;
        let mut last = 0;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            last = lineno;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if state == State::End {
                return Err(err(lineno, "content after \\end\\"));
            }
            if line == "\\data\\" {
                if state != State::Start {
                    return Err(err(lineno, "duplicate \\data\\ header"));
                }
                state = State::Data;
                continue;
            }
            if line == "\\end\\" {
                if !matches!(state, State::Grams(_)) {
                    return Err(err(lineno, "\\end\\ before any n-gram section"));
                }
                state = State::End;
                continue;
            }
            if let Some(n) = line.strip_prefix('\\').and_then(|l| l.strip_suffix("-grams:")) {
                let n: usize = n.parse().map_err(|_| err(lineno, "bad section header"))?;
                if state == State::Start {
                    return Err(err(lineno, "missing \\data\\ header"));
                }
                if n == 0 || n > declared.len() {
                    return Err(err(lineno, "section order not declared in \\data\\"));
                }
                if let State::Grams(prev) = state {
                    if tables[prev - 1].len() != declared[prev - 1] {
                        return Err(err(lineno, "n-gram count does not match header"));
                    }
                }
                state = State::Grams(n);
                continue;
            }
            match state {
                State::Start => {
                    if line.starts_with('\\') || line.starts_with("ngram") {
                        return Err(err(lineno, "missing \\data\\ header"));
                    }
                    // free text before the header is allowed
                }
                State::Data => {
                    let rest = line
                        .strip_prefix("ngram ")
                        .ok_or_else(|| err(lineno, "expected `ngram N=count`"))?;
                    let (n, c) = rest.split_once('=').ok_or_else(|| err(lineno, "expected `ngram N=count`"))?;
                    let n: usize = n.trim().parse().map_err(|_| err(lineno, "bad order"))?;
                    let c: usize = c.trim().parse().map_err(|_| err(lineno, "bad count"))?;
                    if n != declared.len() + 1 {
                        return Err(err(lineno, "orders must be declared in sequence"));
                    }
                    if n > ORDER {
                        return Err(err(lineno, "only models up to order 3 are supported"));
                    }
                    declared.push(c);
                }
                State::Grams(n) => {
                    let fields: Vec<&str> = line.split(['\t', ' ']).filter(|f| !f.is_empty()).collect();
                    if fields.len() != n + 1 && fields.len() != n + 2 {
                        return Err(err(lineno, "wrong number of fields"));
                    }
                    let logprob: f64 = fields[0].parse().map_err(|_| err(lineno, "bad log-probability"))?;
                    let backoff: f64 = match fields.get(n + 1) {
                        Some(b) => b.parse().map_err(|_| err(lineno, "bad backoff weight"))?,
                        None => 0.0,
                    };
                    if !logprob.is_finite() || !backoff.is_finite() {
                        return Err(err(lineno, "non-finite value"));
                    }
                    let ids: Vec<u32> = fields[1..=n].iter().map(|w| vocab.intern(w)).collect();
                    tables[n - 1].insert(key(&ids), Entry { logprob, backoff });
                }
                State::End => unreachable!(),
            }
        }
        if state != State::End {
            return Err(err(last + 1, "missing \\end\\"));
        }
        for (n, &c) in declared.iter().enumerate() {
            if tables[n].len() != c {
                return Err(err(last, "n-gram count does not match header"));
            }
        }
        let unk = vocab.intern(UNK);
        let bos = vocab.intern(BOS);
        let eos = vocab.intern(EOS);
        tables[0]
            .entry(key(&[unk]))
            .or_insert(Entry { logprob: DEFAULT_UNK_LOGPROB, backoff: 0.0 });
        Ok(NGramModel {
            vocab,
            tables,
            order: declared.len().max(1),
            unk,
            bos,
            eos,
            discounts: None,
        })
    }
}
