//! Slow, direct reference implementations used to check the library.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Restricted Damerau-Levenshtein distance, full-matrix textbook version.
pub fn osa(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d[i][j] = d[i][j].min(d[i - 2][j - 2] + 1);
            }
        }
    }
    d[a.len()][b.len()]
}

/// Interpolated Kneser-Ney trigram probabilities computed straight from
/// the definition over padded sentences.
pub struct KnOracle {
    c: [HashMap<Vec<String>, u64>; 3],
    d: [f64; 3],
    cont: HashMap<String, u64>,
    cont_total: f64,
    words: BTreeSet<String>,
    p_unk: f64,
}

fn discount(counts: impl Iterator<Item = u64>) -> f64 {
    let (mut n1, mut n2) = (0.0, 0.0);
    for c in counts {
        if c == 1 {
            n1 += 1.0;
        } else if c == 2 {
            n2 += 1.0;
        }
    }
    n1 / (n1 + 2.0 * n2)
}

impl KnOracle {
    pub fn new(sentences: &[&[&str]], unk_logprob: f64) -> Self {
        let mut c: [HashMap<Vec<String>, u64>; 3] = Default::default();
        let mut words = BTreeSet::new();
        for s in sentences {
            let mut p: Vec<String> = vec!["<s>".into(), "<s>".into()];
            p.extend(s.iter().map(|w| w.to_string()));
            p.push("</s>".into());
            for i in 2..p.len() {
                words.insert(p[i].clone());
                for n in 1..=3 {
                    *c[n - 1].entry(p[i + 1 - n..=i].to_vec()).or_insert(0) += 1;
                }
            }
        }
        let mut cont: HashMap<String, u64> = HashMap::new();
        for k in c[1].keys() {
            *cont.entry(k[1].clone()).or_insert(0) += 1;
        }
        let cont_total = cont.values().sum::<u64>() as f64;
        let d = [
            discount(cont.values().copied()),
            discount(c[1].values().copied()),
            discount(c[2].values().copied()),
        ];
        KnOracle { c, d, cont, cont_total, words, p_unk: 10f64.powf(unk_logprob) }
    }

    pub fn discounts(&self) -> [f64; 3] {
        self.d
    }

    pub fn p1(&self, w: &str) -> f64 {
        if !self.words.contains(w) {
            return self.p_unk;
        }
        let n = *self.cont.get(w).unwrap_or(&0) as f64;
        let d = self.d[0];
        let types = self.cont.len() as f64;
        (1.0 - self.p_unk)
            * ((n - d).max(0.0) / self.cont_total + d * types / self.cont_total / self.words.len() as f64)
    }

    /// Total count and number of distinct continuations of a history.
    fn history(&self, h: &[&str]) -> (f64, f64) {
        let order = h.len() + 1;
        let mut total = 0.0;
        let mut types = 0.0;
        for (k, &n) in &self.c[order - 1] {
            if k[..h.len()].iter().zip(h).all(|(a, b)| a == b) {
                total += n as f64;
                types += 1.0;
            }
        }
        (total, types)
    }

    fn count(&self, ngram: &[&str]) -> f64 {
        let k: Vec<String> = ngram.iter().map(|s| s.to_string()).collect();
        *self.c[ngram.len() - 1].get(&k).unwrap_or(&0) as f64
    }

    pub fn p2(&self, v: &str, w: &str) -> f64 {
        let (total, types) = self.history(&[v]);
        if total == 0.0 || !self.words.contains(w) {
            return self.p1(w);
        }
        let d = self.d[1];
        (self.count(&[v, w]) - d).max(0.0) / total + d * types / total * self.p1(w)
    }

    pub fn p3(&self, u: &str, v: &str, w: &str) -> f64 {
        let (total, types) = self.history(&[u, v]);
        if total == 0.0 || !self.words.contains(w) {
            return self.p2(v, w);
        }
        let d = self.d[2];
        (self.count(&[u, v, w]) - d).max(0.0) / total + d * types / total * self.p2(v, w)
    }

    /// log10 probability of a sentence with `<s> <s>` … `</s>` padding.
    pub fn score(&self, words: &[&str]) -> f64 {
        let mut p: Vec<&str> = vec!["<s>", "<s>"];
        p.extend(words);
        p.push("</s>");
        (2..p.len()).map(|i| self.p3(p[i - 2], p[i - 1], p[i]).log10()).sum()
    }
}

/// An M2 edit: (start, end, replacement).
pub type Edit = (usize, usize, String);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Op {
    Keep,
    Sub,
    Del,
    Ins,
}

/// Every alignment of minimum Levenshtein cost, found by exhaustive
/// recursion over all operation sequences.
fn min_alignments(src: &[String], hyp: &[String]) -> Vec<Vec<Op>> {
    #[allow(clippy::too_many_arguments)]
    fn go(
        src: &[String],
        hyp: &[String],
        i: usize,
        j: usize,
        cost: usize,
        path: &mut Vec<Op>,
        best: &mut usize,
        out: &mut Vec<Vec<Op>>,
    ) {
        if cost > *best {
            return;
        }
        if i == src.len() && j == hyp.len() {
            if cost < *best {
                *best = cost;
                out.clear();
            }
            out.push(path.clone());
            return;
        }
        if i < src.len() && j < hyp.len() {
            let op = if src[i] == hyp[j] { Op::Keep } else { Op::Sub };
            path.push(op);
            go(src, hyp, i + 1, j + 1, cost + usize::from(op == Op::Sub), path, best, out);
            path.pop();
        }
        if i < src.len() {
            path.push(Op::Del);
            go(src, hyp, i + 1, j, cost + 1, path, best, out);
            path.pop();
        }
        if j < hyp.len() {
            path.push(Op::Ins);
            go(src, hyp, i, j + 1, cost + 1, path, best, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    let mut best = usize::MAX;
    go(src, hyp, 0, 0, 0, &mut Vec::new(), &mut best, &mut out);
    out
}

/// All ways to group the non-keep operations of an alignment into edits:
/// consecutive operations may be grouped up to `window` at a time, a group
/// of insertions only may be any length, and two insertion-only groups may
/// not sit at the same source position.
fn groupings(path: &[Op], hyp: &[String], window: usize) -> Vec<Vec<Edit>> {
    let mut results = Vec::new();
    // ops that may start a new edit even though the previous op is an edit
    let n = path.len();
    let edits_ops: Vec<usize> = (0..n).filter(|&k| path[k] != Op::Keep).collect();
    let free_cuts: Vec<usize> = edits_ops
        .iter()
        .copied()
        .filter(|&k| k > 0 && path[k - 1] != Op::Keep)
        .collect();
    for mask in 0u32..(1 << free_cuts.len()) {
        let cut_at: BTreeSet<usize> =
            free_cuts.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &k)| k).collect();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &k in &edits_ops {
            let continues = k > 0 && path[k - 1] != Op::Keep && !cut_at.contains(&k);
            if continues {
                groups.last_mut().unwrap().push(k);
            } else {
                groups.push(vec![k]);
            }
        }
        let mut pos = BTreeMap::new();
        let (mut i, mut j) = (0, 0);
        for (k, op) in path.iter().enumerate() {
            pos.insert(k, (i, j));
            match op {
                Op::Keep | Op::Sub => {
                    i += 1;
                    j += 1;
                }
                Op::Del => i += 1,
                Op::Ins => j += 1,
            }
        }
        pos.insert(n, (i, j));
        let mut ok = true;
        let mut edits = Vec::new();
        let mut last_ins: Option<usize> = None;
        for g in &groups {
            let pure_ins = g.iter().all(|&k| path[k] == Op::Ins);
            if g.len() > window && !pure_ins {
                ok = false;
                break;
            }
            let (i0, j0) = pos[&g[0]];
            let (i1, j1) = pos[&(g[g.len() - 1] + 1)];
            if pure_ins && last_ins == Some(i0) {
                ok = false;
                break;
            }
            last_ins = pure_ins.then_some(i0);
            edits.push((i0, i1, hyp[j0..j1].join(" ")));
        }
        if ok {
            results.push(edits);
        }
    }
    results
}

/// Every legal edit decomposition over every minimum-cost alignment.
pub fn decompositions(src: &[String], hyp: &[String], window: usize) -> Vec<Vec<Edit>> {
    min_alignments(src, hyp).iter().flat_map(|p| groupings(p, hyp, window)).collect()
}

/// The MaxMatch choice by brute force: most gold hits, then fewest edits,
/// then the lexicographically smallest edit list.
pub fn maxmatch(src: &[String], hyp: &[String], gold: &[Edit], window: usize) -> Vec<Edit> {
    let mut best: Option<(usize, usize, Vec<Edit>)> = None;
    for edits in decompositions(src, hyp, window) {
        let tp = edits.iter().filter(|e| gold.contains(e)).count();
        let better = match &best {
            None => true,
            Some((btp, bn, be)) => (Reverse(tp), edits.len(), &edits) < (Reverse(*btp), *bn, be),
        };
        if better {
            best = Some((tp, edits.len(), edits));
        }
    }
    best.map(|b| b.2).unwrap_or_default()
}
