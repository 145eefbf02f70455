//! MaxMatch evaluation against M2 gold annotations.
//!
//! System edits are read off a token-level Levenshtein alignment of source
//! and hypothesis. Out of all ways to cut the minimum-cost alignments into
//! edits, the one sharing the most edits with the gold set is used.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_MERGE_WINDOW: usize = 2;
pub const DEFAULT_BETA: f64 = 0.5;

#[derive(Debug, Error)]
pub enum M2Error {
    #[error("M2 parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{gold} annotated sentences but {hyp} hypotheses")]
    LengthMismatch { gold: usize, hyp: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EditSpan {
    pub start: usize,
    pub end: usize,
    pub replacement: String,
    #[serde(rename = "type")]
    pub etype: String,
    pub annotator: usize,
}

/// What two edits must share to count as the same correction.
pub type EditKey = (usize, usize, String);

impl EditSpan {
    pub fn key(&self) -> EditKey {
        (self.start, self.end, self.replacement.clone())
    }

    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }
}

fn overlaps(a: &EditKey, b: &EditKey) -> bool {
    // a precedes b in sorted order
    b.0 < a.1 || (a.0 == a.1 && b.0 == b.1 && a.0 == b.0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub source: Vec<String>,
    /// Gold edits per annotator id, sorted and disjoint. An annotator with
    /// an empty list marked the sentence as correct.
    pub gold: BTreeMap<usize, Vec<EditSpan>>,
}

impl AnnotatedSentence {
    /// Annotator ids with their gold sets; a sentence without any `A` line
    /// counts as one annotator with no edits.
    pub fn annotators(&self) -> Vec<(usize, &[EditSpan])> {
        if self.gold.is_empty() {
            return vec![(0, &[])];
        }
        self.gold.iter().map(|(a, e)| (*a, e.as_slice())).collect()
    }
}

fn parse_edit(line: &str, lineno: usize, len: usize) -> Result<Option<EditSpan>, M2Error> {
    let err = |msg: String| M2Error::Parse { line: lineno, msg };
    let fields: Vec<&str> = line[2..].split("|||").collect();
    if fields.len() != 6 {
        return Err(err(format!("expected 6 |||-separated fields, found {}", fields.len())));
    }
    let annotator: usize = fields[5].trim().parse().map_err(|_| err(format!("bad annotator id {:?}", fields[5])))?;
    let etype = fields[1].to_string();
    if etype == "noop" {
        return Ok(Some(EditSpan {
            start: usize::MAX,
            end: usize::MAX,
            replacement: String::new(),
            etype,
            annotator,
        }));
    }
    let span: Vec<&str> = fields[0].split_whitespace().collect();
    let [s, e] = span[..] else { return Err(err(format!("bad span {:?}", fields[0]))) };
    let start: usize = s.parse().map_err(|_| err(format!("bad span start {s:?}")))?;
    let end: usize = e.parse().map_err(|_| err(format!("bad span end {e:?}")))?;
    if start > end || end > len {
        return Err(err(format!("span {start}..{end} outside sentence of {len} tokens")));
    }
    let replacement = match fields[2].trim() {
        "-NONE-" => String::new(),
        r => r.split_whitespace().collect::<Vec<_>>().join(" "),
    };
    Ok(Some(EditSpan {
        start,
        end,
        replacement,
        etype,
        annotator,
    }))
}

fn finish(
    source: Vec<String>,
    edits: Vec<Numbered>,
    out: &mut Vec<AnnotatedSentence>,
) -> Result<(), M2Error> {
    let mut gold: BTreeMap<usize, Vec<Numbered>> = BTreeMap::new();
    for (line, e) in edits {
        let list = gold.entry(e.annotator).or_default();
        if e.start != usize::MAX {
            list.push((line, e));
        }
    }
    let mut normalized = BTreeMap::new();
    for (a, mut list) in gold {
        list.sort_by_key(|x| x.1.key());
        for pair in list.windows(2) {
            if overlaps(&pair[0].1.key(), &pair[1].1.key()) {
                return Err(M2Error::Parse {
                    line: pair[1].0,
                    msg: format!("overlapping edits for annotator {a}"),
                });
            }
        }
        normalized.insert(a, list.into_iter().map(|(_, e)| e).collect());
    }
    out.push(AnnotatedSentence { source, gold: normalized });
    Ok(())
}

/// An edit with the line it came from.
type Numbered = (usize, EditSpan);

/// Parse M2 text: an `S` line with the tokenized source, then `A` lines,
/// then a blank line.
pub fn parse_m2<R: BufRead>(reader: R) -> Result<Vec<AnnotatedSentence>, M2Error> {
    let mut out = Vec::new();
    let mut current: Option<(Vec<String>, Vec<Numbered>)> = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some((s, e)) = current.take() {
                finish(s, e, &mut out)?;
            }
        } else if let Some(rest) = line.strip_prefix("S ").or(if line == "S" { Some("") } else { None }) {
            if let Some((s, e)) = current.take() {
                finish(s, e, &mut out)?;
            }
            current = Some((rest.split_whitespace().map(str::to_string).collect(), Vec::new()));
        } else if line.starts_with("A ") {
            let Some((source, edits)) = current.as_mut() else {
                return Err(M2Error::Parse { line: lineno, msg: "A line before any S line".into() });
            };
            if let Some(e) = parse_edit(line, lineno, source.len())? {
                edits.push((lineno, e));
            }
        } else {
            return Err(M2Error::Parse { line: lineno, msg: format!("unexpected line {line:?}") });
        }
    }
    if let Some((s, e)) = current.take() {
        finish(s, e, &mut out)?;
    }
    Ok(out)
}

pub fn load_m2(path: impl AsRef<Path>) -> Result<Vec<AnnotatedSentence>, M2Error> {
    parse_m2(BufReader::new(File::open(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Match,
    Sub,
    Del,
    Ins,
}

impl Op {
    fn step(self) -> (usize, usize) {
        match self {
            Op::Match | Op::Sub => (1, 1),
            Op::Del => (1, 0),
            Op::Ins => (0, 1),
        }
    }
}

/// Edges of the minimum-cost alignment lattice leaving each node.
struct Lattice {
    m: usize,
    out: Vec<Vec<Op>>,
}

impl Lattice {
    fn new<S: AsRef<str>, H: AsRef<str>>(src: &[S], hyp: &[H]) -> Self {
        let (n, m) = (src.len(), hyp.len());
        let idx = |i: usize, j: usize| i * (m + 1) + j;
        let same = |i: usize, j: usize| src[i].as_ref() == hyp[j].as_ref();
        let mut fwd = vec![usize::MAX; (n + 1) * (m + 1)];
        fwd[0] = 0;
        for i in 0..=n {
            for j in 0..=m {
                let mut best = fwd[idx(i, j)];
                if i > 0 {
                    best = best.min(fwd[idx(i - 1, j)] + 1);
                }
                if j > 0 {
                    best = best.min(fwd[idx(i, j - 1)] + 1);
                }
                if i > 0 && j > 0 {
                    best = best.min(fwd[idx(i - 1, j - 1)] + usize::from(!same(i - 1, j - 1)));
                }
                fwd[idx(i, j)] = best;
            }
        }
        let mut bwd = vec![usize::MAX; (n + 1) * (m + 1)];
        bwd[idx(n, m)] = 0;
        for i in (0..=n).rev() {
            for j in (0..=m).rev() {
                let mut best = bwd[idx(i, j)];
                if i < n {
                    best = best.min(bwd[idx(i + 1, j)] + 1);
                }
                if j < m {
                    best = best.min(bwd[idx(i, j + 1)] + 1);
                }
                if i < n && j < m {
                    best = best.min(bwd[idx(i + 1, j + 1)] + usize::from(!same(i, j)));
                }
                bwd[idx(i, j)] = best;
            }
        }
        let total = fwd[idx(n, m)];
        let mut out = vec![Vec::new(); (n + 1) * (m + 1)];
        for i in 0..=n {
            for j in 0..=m {
                let here = fwd[idx(i, j)];
                if here + bwd[idx(i, j)] != total {
                    continue;
                }
                let mut ops = Vec::new();
                if i < n && j < m {
                    let (op, cost) = if same(i, j) { (Op::Match, 0) } else { (Op::Sub, 1) };
                    if here + cost + bwd[idx(i + 1, j + 1)] == total {
                        ops.push(op);
                    }
                }
                if i < n && here + 1 + bwd[idx(i + 1, j)] == total {
                    ops.push(Op::Del);
                }
                if j < m && here + 1 + bwd[idx(i, j + 1)] == total {
                    ops.push(Op::Ins);
                }
                out[idx(i, j)] = ops;
            }
        }
        Lattice { m, out }
    }

    fn ops(&self, i: usize, j: usize) -> &[Op] {
        &self.out[i * (self.m + 1) + j]
    }
}

/// Score of a partial decomposition: more gold matches, then fewer edits,
/// then the lexicographically smaller edit list.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Best {
    tp: usize,
    edits: Vec<EditKey>,
}

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        (std::cmp::Reverse(self.tp), self.edits.len(), &self.edits)
            < (std::cmp::Reverse(other.tp), other.edits.len(), &other.edits)
    }
}

fn edit_key<H: AsRef<str>>(hyp: &[H], from: (usize, usize), to: (usize, usize)) -> EditKey {
    let words: Vec<&str> = hyp[from.1..to.1].iter().map(AsRef::as_ref).collect();
    (from.0, to.0, words.join(" "))
}

/// Edits turning `source` into `hypothesis`, chosen to agree with `gold`
/// as much as possible. Each edit covers one to `merge_window` adjacent
/// non-matching alignment operations. Insertions at one position always
/// form a single edit, however many tokens they add.
pub fn extract_edits<S: AsRef<str>, H: AsRef<str>>(
    source: &[S],
    hypothesis: &[H],
    gold: &[EditKey],
    merge_window: usize,
) -> Vec<EditKey> {
    let window = merge_window.max(1);
    let lattice = Lattice::new(source, hypothesis);
    let gold: BTreeSet<&EditKey> = gold.iter().collect();
    let (n, m) = (source.len(), hypothesis.len());
    let idx = |i: usize, j: usize, after_ins: bool| (i * (m + 1) + j) * 2 + usize::from(after_ins);
    let mut best: Vec<Option<Best>> = vec![None; (n + 1) * (m + 1) * 2];
    best[idx(n, m, false)] = Some(Best { tp: 0, edits: Vec::new() });
    best[idx(n, m, true)] = Some(Best { tp: 0, edits: Vec::new() });

    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if (i, j) == (n, m) || lattice.ops(i, j).is_empty() {
                continue;
            }
            for after_ins in [false, true] {
                let mut cur: Option<Best> = None;
                let mut consider = |cand: Best| {
                    if cur.as_ref().is_none_or(|c| cand.better_than(c)) {
                        cur = Some(cand);
                    }
                };
                if lattice.ops(i, j).contains(&Op::Match) {
                    if let Some(b) = &best[idx(i + 1, j + 1, false)] {
                        consider(b.clone());
                    }
                }
                // every chunk of 1..=window non-match steps starting here
                let mut stack: Vec<((usize, usize), usize, bool)> = vec![((i, j), 0, true)];
                while let Some(((ci, cj), len, pure_ins)) = stack.pop() {
                    for &op in lattice.ops(ci, cj) {
                        if op == Op::Match || (len >= window && !(pure_ins && op == Op::Ins)) {
                            continue;
                        }
                        let (di, dj) = op.step();
                        let to = (ci + di, cj + dj);
                        let ins = pure_ins && op == Op::Ins;
                        stack.push((to, len + 1, ins));
                        if ins && after_ins {
                            continue;
                        }
                        let Some(rest) = &best[idx(to.0, to.1, ins)] else { continue };
                        let key = edit_key(hypothesis, (i, j), to);
                        let mut edits = Vec::with_capacity(rest.edits.len() + 1);
                        let hit = usize::from(gold.contains(&key));
                        edits.push(key);
                        edits.extend(rest.edits.iter().cloned());
                        consider(Best { tp: rest.tp + hit, edits });
                    }
                }
                best[idx(i, j, after_ins)] = cur;
            }
        }
    }
    best[idx(0, 0, false)].take().map(|b| b.edits).unwrap_or_default()
}

/// `(1 + β²)PR / (β²P + R)`, or 0 when the denominator vanishes.
pub fn f_beta(p: f64, r: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * p + r;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * p * r / denom
    }
}

/// Precision and recall from counts, with 0/0 read as 1.
pub fn precision_recall(tp: usize, fp: usize, fn_: usize) -> (f64, f64) {
    let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    (ratio(tp, tp + fp), ratio(tp, tp + fn_))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceScore {
    pub index: usize,
    pub annotator: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub edits: Vec<EditKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub beta: f64,
    pub f: f64,
    pub sentences: Vec<SentenceScore>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Summary table with one row per metric.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let rows: [(&str, String); 7] = [
            ("TP", self.tp.to_string()),
            ("FP", self.fp.to_string()),
            ("FN", self.fn_.to_string()),
            ("Precision", format!("{:.4}", self.precision)),
            ("Recall", format!("{:.4}", self.recall)),
            ("beta", format!("{}", self.beta)),
            ("F", format!("{:.4}", self.f)),
        ];
        for (name, value) in rows {
            let _ = writeln!(s, "{name:<10} {value:>10}");
        }
        s
    }
}

/// Score hypotheses (token lists) against annotated sentences. For each
/// sentence the annotator giving the best sentence-level F wins, with ties
/// going to more true positives, then fewer misses, then fewer false
/// alarms, then the lower annotator id.
pub fn score<H: AsRef<str>>(
    annotated: &[AnnotatedSentence],
    hypotheses: &[Vec<H>],
    beta: f64,
    merge_window: usize,
) -> Result<EvalReport, M2Error> {
    if annotated.len() != hypotheses.len() {
        return Err(M2Error::LengthMismatch { gold: annotated.len(), hyp: hypotheses.len() });
    }
    let mut sentences = Vec::with_capacity(annotated.len());
    for (index, (sent, hyp)) in annotated.iter().zip(hypotheses).enumerate() {
        let mut chosen: Option<(f64, SentenceScore)> = None;
        for (annotator, gold) in sent.annotators() {
            let keys: Vec<EditKey> = gold.iter().map(EditSpan::key).collect();
            let edits = extract_edits(&sent.source, hyp, &keys, merge_window);
            let tp = edits.iter().filter(|e| keys.contains(e)).count();
            let s = SentenceScore {
                index,
                annotator,
                tp,
                fp: edits.len() - tp,
                fn_: keys.len() - tp,
                edits,
            };
            let (p, r) = precision_recall(s.tp, s.fp, s.fn_);
            let f = f_beta(p, r, beta);
            let better = match &chosen {
                None => true,
                Some((bf, b)) => {
                    (f, s.tp, std::cmp::Reverse(s.fn_), std::cmp::Reverse(s.fp))
                        .partial_cmp(&(*bf, b.tp, std::cmp::Reverse(b.fn_), std::cmp::Reverse(b.fp)))
                        == Some(std::cmp::Ordering::Greater)
                }
            };
            if better {
                chosen = Some((f, s));
            }
        }
        sentences.push(chosen.expect("at least one annotator").1);
    }
    let tp = sentences.iter().map(|s| s.tp).sum();
    let fp = sentences.iter().map(|s| s.fp).sum();
    let fn_ = sentences.iter().map(|s| s.fn_).sum();
    let (precision, recall) = precision_recall(tp, fp, fn_);
    Ok(EvalReport {
        tp,
        fp,
        fn_,
        precision,
        recall,
        beta,
        f: f_beta(precision, recall, beta),
        sentences,
    })
}

/// Whitespace tokenization, the format of M2 sources and hypothesis files.
pub fn split_tokens(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        split_tokens(s)
    }

    fn key(s: usize, e: usize, r: &str) -> EditKey {
        (s, e, r.to_string())
    }

    const SAMPLE: &str = "\
S я думаю что он прав
A 2 2|||Punct|||,|||REQUIRED|||-NONE-|||0
A 2 2|||Punct|||,|||REQUIRED|||-NONE-|||1

S о учёбе
A 0 1|||Prep|||об|||REQUIRED|||-NONE-|||0

S всё хорошо
A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0

S мы мы идём
A 1 2|||Del|||-NONE-|||REQUIRED|||-NONE-|||0
";

    #[test]
    fn parses_sample() {
        let s = parse_m2(SAMPLE.as_bytes()).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].gold.len(), 2);
        assert_eq!(s[1].gold[&0][0].key(), key(0, 1, "об"));
        assert!(s[2].gold[&0].is_empty());
        assert_eq!(s[3].gold[&0][0].key(), key(1, 2, ""));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "S а б\nA 0 1|||X|||в|||REQUIRED|||0\n";
        assert!(matches!(parse_m2(bad.as_bytes()), Err(M2Error::Parse { line: 2, .. })));
        let overlap = "S а б в\nA 0 2|||X|||г|||REQUIRED|||-NONE-|||0\nA 1 3|||X|||д|||REQUIRED|||-NONE-|||0\n";
        assert!(matches!(parse_m2(overlap.as_bytes()), Err(M2Error::Parse { line: 3, .. })));
        let ins = "S а б\nA 1 1|||X|||г|||REQUIRED|||-NONE-|||0\nA 1 1|||X|||д|||REQUIRED|||-NONE-|||0\n";
        assert!(parse_m2(ins.as_bytes()).is_err());
        assert!(parse_m2("A 0 1|||X|||в|||REQUIRED|||-NONE-|||0\n".as_bytes()).is_err());
        assert!(parse_m2("S а\nA 0 5|||X|||в|||REQUIRED|||-NONE-|||0\n".as_bytes()).is_err());
    }

    #[test]
    fn identity_has_no_edits() {
        let s = toks("я думаю что он прав");
        assert!(extract_edits(&s, &s, &[], 2).is_empty());
    }

    #[test]
    fn single_substitution() {
        let e = extract_edits(&toks("о учёбе"), &toks("об учёбе"), &[key(0, 1, "об")], 2);
        assert_eq!(e, [key(0, 1, "об")]);
    }

    #[test]
    fn gold_steers_the_split() {
        let src = toks("а б в");
        let hyp = toks("а x y в");
        // free choice merges into one edit
        assert_eq!(extract_edits(&src, &hyp, &[], 2), [key(1, 2, "x y")]);
        let gold = [key(1, 1, "x"), key(1, 2, "y")];
        assert_eq!(extract_edits(&src, &hyp, &gold, 2), gold);
    }

    #[test]
    fn metric_values() {
        let f = |p, r| f_beta(p, r, 0.5);
        assert!((f(0.6617, 0.1266) - 0.3586).abs() < 5e-4);
        assert!((f(0.6589, 0.1016) - 0.3142).abs() < 5e-4);
        let (p, r) = precision_recall(1, 1, 3);
        assert_eq!((p, r), (0.5, 0.25));
        assert!((f(p, r) - 0.4167).abs() < 5e-5);
        assert_eq!(precision_recall(0, 0, 0), (1.0, 1.0));
        assert_eq!(f_beta(0.0, 0.0, 0.5), 0.0);
    }

    #[test]
    fn scores_sample() {
        let gold = parse_m2(SAMPLE.as_bytes()).unwrap();
        let hyp = vec![
            toks("я думаю , что он прав"),
            toks("об учёбе"),
            toks("всё хорошо"),
            toks("мы идём"),
        ];
        let r = score(&gold, &hyp, 0.5, 2).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (3, 0, 0));
        assert_eq!(r.f, 1.0);
        assert!(score(&gold, &hyp[..2], 0.5, 2).is_err());
        assert!(r.to_table().contains("Precision"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["fn"], 0);
    }

    #[test]
    fn annotator_selection() {
        let m2 = "S а б\nA 0 1|||X|||в|||REQUIRED|||-NONE-|||0\nA 1 2|||X|||г|||REQUIRED|||-NONE-|||1\n";
        let gold = parse_m2(m2.as_bytes()).unwrap();
        let r = score(&gold, &[toks("а г")], 0.5, 2).unwrap();
        assert_eq!(r.sentences[0].annotator, 1);
        assert_eq!(r.tp, 1);
        // relabelling annotators does not change the totals
        let swapped = "S а б\nA 0 1|||X|||в|||REQUIRED|||-NONE-|||1\nA 1 2|||X|||г|||REQUIRED|||-NONE-|||0\n";
        let r2 = score(&parse_m2(swapped.as_bytes()).unwrap(), &[toks("а г")], 0.5, 2).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (r2.tp, r2.fp, r2.fn_));
    }

    // ---- brute-force oracle ------------------------------------------------

    fn all_paths(src: &[String], hyp: &[String]) -> Vec<Vec<Op>> {
        let lattice = Lattice::new(src, hyp);
        let mut out = Vec::new();
        let mut stack = vec![((0usize, 0usize), Vec::new())];
        while let Some(((i, j), path)) = stack.pop() {
            if (i, j) == (src.len(), hyp.len()) {
                out.push(path);
                continue;
            }
            for &op in lattice.ops(i, j) {
                let (di, dj) = op.step();
                let mut p = path.clone();
                p.push(op);
                stack.push(((i + di, j + dj), p));
            }
        }
        out
    }

    /// Every way of cutting the non-match runs of a path into chunks.
    fn decompositions(path: &[Op], hyp: &[String], window: usize) -> Vec<Vec<EditKey>> {
        #[allow(clippy::too_many_arguments)]
        fn go(
            path: &[Op],
            k: usize,
            pos: (usize, usize),
            last_ins_at: Option<(usize, usize)>,
            acc: &mut Vec<EditKey>,
            hyp: &[String],
            window: usize,
            out: &mut Vec<Vec<EditKey>>,
        ) {
            if k == path.len() {
                out.push(acc.clone());
                return;
            }
            if path[k] == Op::Match {
                go(path, k + 1, (pos.0 + 1, pos.1 + 1), None, acc, hyp, window, out);
                return;
            }
            let mut to = pos;
            for len in 1.. {
                if k + len > path.len() || path[k + len - 1] == Op::Match {
                    break;
                }
                let (di, dj) = path[k + len - 1].step();
                to = (to.0 + di, to.1 + dj);
                let pure_ins = to.0 == pos.0;
                if len > window && !pure_ins {
                    break;
                }
                if pure_ins && last_ins_at == Some(pos) {
                    continue;
                }
                acc.push(edit_key(hyp, pos, to));
                go(path, k + len, to, pure_ins.then_some(to), acc, hyp, window, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        go(path, 0, (0, 0), None, &mut Vec::new(), hyp, window, &mut out);
        out
    }

    fn oracle(src: &[String], hyp: &[String], gold: &[EditKey], window: usize) -> Vec<EditKey> {
        let mut best: Option<Best> = None;
        for path in all_paths(src, hyp) {
            for edits in decompositions(&path, hyp, window) {
                let tp = edits.iter().filter(|e| gold.contains(e)).count();
                let cand = Best { tp, edits };
                if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                    best = Some(cand);
                }
            }
        }
        best.unwrap().edits
    }

    fn instance() -> impl Strategy<Value = (Vec<String>, Vec<String>, Vec<EditKey>)> {
        let word = prop::sample::select(vec!["а", "б", "в", "г"]).prop_map(str::to_string);
        (prop::collection::vec(word.clone(), 0..=6), prop::collection::vec((0usize..4, 0usize..7, word), 0..=2), any::<u8>())
            .prop_map(|(src, ops, gold_mask)| {
                let mut hyp = src.clone();
                for (kind, at, w) in ops {
                    let at = if hyp.is_empty() { 0 } else { at % (hyp.len() + 1) };
                    match kind {
                        0 if at < hyp.len() => hyp[at] = w,
                        1 if at < hyp.len() => {
                            hyp.remove(at);
                        }
                        _ => hyp.insert(at, w),
                    }
                }
                // gold: a subset of the free extraction plus a few decoys
                let free = extract_edits(&src, &hyp, &[], 1);
                let mut gold: Vec<EditKey> =
                    free.iter().enumerate().filter(|(i, _)| gold_mask >> i & 1 == 1).map(|(_, e)| e.clone()).collect();
                if gold_mask & 0x80 != 0 {
                    gold.push((0, 0, "б".into()));
                }
                if gold_mask & 0x40 != 0 && !src.is_empty() {
                    gold.push((0, 1, "в".into()));
                }
                (src, hyp, gold)
            })
    }

    proptest! {
        #[test]
        fn dp_matches_brute_force((src, hyp, gold) in instance(), window in 1usize..=3) {
            prop_assert_eq!(extract_edits(&src, &hyp, &gold, window), oracle(&src, &hyp, &gold, window));
        }

        #[test]
        fn f_measure_properties(p in 0.0f64..=1.0, r in 0.0f64..=1.0, dp in 0.0f64..0.2, dr in 0.0f64..0.2) {
            let f = f_beta(p, r, 0.5);
            if p + r > 0.0 {
                let h = 2.0 * p * r / (p + r);
                prop_assert!((f_beta(p, r, 1.0) - h).abs() < 1e-12);
            }
            prop_assert!(f >= p.min(r) - 1e-12 && f <= p.max(r) + 1e-12);
            prop_assert!(f_beta((p + dp).min(1.0), r, 0.5) >= f - 1e-12);
            prop_assert!(f_beta(p, (r + dr).min(1.0), 0.5) >= f - 1e-12);
        }
    }
}
