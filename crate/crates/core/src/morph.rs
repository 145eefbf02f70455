//! Dictionary-driven morphology: analysis, paradigm generation and a simple
//! disambiguating tagger.
//!
//! The lexicon is a TSV file with one analysis per line:
//! `form<TAB>lemma<TAB>UPOS<TAB>Key=Val|Key=Val` (`_` for no features).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::text::{casefold, Sentence, TokenKind};

#[derive(Debug, Error)]
pub enum MorphError {
    #[error("morph lexicon parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown lemma {lemma:?} ({pos})")]
    UnknownLemma { lemma: String, pos: Upos },
    #[error(transparent)]
    Io(#[from] io::Error),
}

macro_rules! closed_set {
    ($name:ident { $($variant:ident),* $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name { $($variant),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => stringify!($variant)),* }
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $(stringify!($variant) => Ok($name::$variant),)*
                    _ => Err(format!("unknown {} {:?}", stringify!($name), s)),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

closed_set!(Upos {
    ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X,
});

// Declared in case-insensitive alphabetical order so that ordered maps
// render features the conventional way.
closed_set!(FeatKey {
    Animacy, Aspect, Case, Degree, Foreign, Gender, Mood, Number, NumType, Person, Polarity,
    PronType, Tense, Variant, VerbForm, Voice,
});

/// Tie-break order used when a form has analyses with several parts of
/// speech and no frequency table is loaded.
pub const POS_PRIORITY: &[Upos] = &[
    Upos::ADP,
    Upos::CCONJ,
    Upos::SCONJ,
    Upos::PART,
    Upos::PRON,
    Upos::DET,
    Upos::NOUN,
    Upos::PROPN,
    Upos::VERB,
    Upos::AUX,
    Upos::ADJ,
    Upos::NUM,
    Upos::ADV,
    Upos::INTJ,
    Upos::PUNCT,
    Upos::SYM,
    Upos::X,
];

fn priority(pos: Upos) -> usize {
    POS_PRIORITY.iter().position(|&p| p == pos).unwrap_or(POS_PRIORITY.len())
}

/// Morphological features, kept sorted by key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Feats(BTreeMap<FeatKey, String>);

impl Feats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: FeatKey, value: &str) -> Self {
        self.0.insert(key, value.to_string());
        self
    }

    pub fn get(&self, key: FeatKey) -> Option<&str> {
        self.0.get(&key).map(String::as_str)
    }

    pub fn set(&mut self, key: FeatKey, value: &str) {
        self.0.insert(key, value.to_string());
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every feature of `subset` is present here with the same value.
    pub fn contains(&self, subset: &Feats) -> bool {
        subset.0.iter().all(|(k, v)| self.0.get(k) == Some(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatKey, &str)> {
        self.0.iter().map(|(k, v)| (*k, v.as_str()))
    }
}

impl FromStr for Feats {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut feats = Feats::new();
        if s == "_" || s.is_empty() {
            return Ok(feats);
        }
        for part in s.split('|') {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("bad feature {part:?}"))?;
            if v.is_empty() {
                return Err(format!("empty value for {k}"));
            }
            feats.0.insert(k.parse()?, v.to_string());
        }
        Ok(feats)
    }
}

impl fmt::Display for Feats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join("|"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MorphEntry {
    pub form: String,
    pub lemma: String,
    pub pos: Upos,
    pub feats: Feats,
}

impl MorphEntry {
    pub fn unknown(form: &str, pos: Upos) -> Self {
        MorphEntry {
            form: form.to_string(),
            lemma: form.to_string(),
            pos,
            feats: Feats::new(),
        }
    }

    /// `POS | Key=Val | Key=Val`, the form used inside grammatical chains.
    pub fn tag_string(&self) -> String {
        let mut s = self.pos.to_string();
        for (k, v) in self.feats.iter() {
            s.push_str(" | ");
            s.push_str(k.as_str());
            s.push('=');
            s.push_str(v);
        }
        s
    }
}

/// Anything that assigns one analysis to each token of a sentence.
pub trait Tagger: Send + Sync {
    fn tag(&self, sentence: &Sentence) -> Vec<MorphEntry>;
}

#[derive(Debug, Clone, Default)]
pub struct MorphLexicon {
    entries: Vec<MorphEntry>,
    by_form: HashMap<String, Vec<usize>>,
    paradigms: HashMap<(String, Upos), Vec<usize>>,
    tag_freq: Option<HashMap<(String, Upos), u64>>,
}

impl MorphLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, entry: MorphEntry) {
        let id = self.entries.len();
        self.by_form.entry(entry.form.clone()).or_default().push(id);
        self.paradigms
            .entry((entry.lemma.clone(), entry.pos))
            .or_default()
            .push(id);
        self.entries.push(entry);
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self, MorphError> {
        let mut lex = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let err = |msg: String| MorphError::Parse { line: lineno, msg };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 tab-separated fields, got {}", fields.len())));
            }
            let pos: Upos = fields[2].parse().map_err(err)?;
            let feats: Feats = fields[3].parse().map_err(err)?;
            if fields[0].is_empty() || fields[1].is_empty() {
                return Err(err("empty form or lemma".into()));
            }
            lex.add(MorphEntry {
                form: casefold(fields[0], false),
                lemma: casefold(fields[1], false),
                pos,
                feats,
            });
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MorphError> {
        Self::read_tsv(BufReader::new(File::open(path)?))
    }

    /// Load a `form<TAB>POS<TAB>count` table used to disambiguate forms
    /// with several parts of speech.
    pub fn read_tag_frequencies<R: BufRead>(&mut self, reader: R) -> Result<(), MorphError> {
        let mut table = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: String| MorphError::Parse { line: i + 1, msg };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err("expected form<TAB>POS<TAB>count".into()));
            }
            let pos: Upos = fields[1].parse().map_err(err)?;
            let count: u64 = fields[2].trim().parse().map_err(|_| err("bad count".into()))?;
            table.insert((casefold(fields[0], false), pos), count);
        }
        self.tag_freq = Some(table);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MorphEntry] {
        &self.entries
    }

    /// All analyses of a (lowercase) form, in lexicon order.
    pub fn analyze(&self, form: &str) -> Vec<&MorphEntry> {
        self.by_form
            .get(form)
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    pub fn paradigm(&self, lemma: &str, pos: Upos) -> Result<Vec<&MorphEntry>, MorphError> {
        self.paradigms
            .get(&(lemma.to_string(), pos))
            .map(|ids| ids.iter().map(|&i| &self.entries[i]).collect())
            .ok_or_else(|| MorphError::UnknownLemma {
                lemma: lemma.to_string(),
                pos,
            })
    }

    /// Forms of `lemma` whose features include all of `feats`, deduplicated
    /// in paradigm order.
    pub fn generate(&self, lemma: &str, pos: Upos, feats: &Feats) -> Result<Vec<String>, MorphError> {
        let mut out: Vec<String> = Vec::new();
        for e in self.paradigm(lemma, pos)? {
            if e.feats.contains(feats) && !out.contains(&e.form) {
                out.push(e.form.clone());
            }
        }
        Ok(out)
    }

    /// Pick one analysis for a form: unambiguous entries win outright, then
    /// the most frequent part of speech when a frequency table is loaded,
    /// then [`POS_PRIORITY`]. Within a part of speech the first listed
    /// analysis is used.
    pub fn disambiguate(&self, form: &str) -> Option<&MorphEntry> {
        self.best(self.analyze(form))
    }

    fn best<'a>(&self, cands: Vec<&'a MorphEntry>) -> Option<&'a MorphEntry> {
        if cands.len() <= 1 {
            return cands.into_iter().next();
        }
        let freq = |e: &MorphEntry| {
            self.tag_freq
                .as_ref()
                .and_then(|t| t.get(&(e.form.clone(), e.pos)))
                .copied()
                .unwrap_or(0)
        };
        cands
            .into_iter()
            .enumerate()
            .min_by_key(|(i, e)| (std::cmp::Reverse(freq(e)), priority(e.pos), *i))
            .map(|(_, e)| e)
    }

    /// Tag every token. A preposition needs a complement, so a form that
    /// could be ADP is given another analysis when no word or number
    /// follows it (`О, как красиво!`).
    pub fn tag_sentence(&self, sentence: &Sentence) -> Vec<MorphEntry> {
        let tokens = sentence.tokens();
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut pick = self.disambiguate(&t.lower);
                let complement = tokens.get(i + 1).is_some_and(|n| n.kind != TokenKind::Punct);
                if pick.is_some_and(|e| e.pos == Upos::ADP) && !complement {
                    let others: Vec<&MorphEntry> =
                        self.analyze(&t.lower).into_iter().filter(|e| e.pos != Upos::ADP).collect();
                    if !others.is_empty() {
                        pick = self.best(others);
                    }
                }
                match pick {
                    Some(e) => e.clone(),
                    None => MorphEntry::unknown(
                        &t.lower,
                        match t.kind {
                            TokenKind::Word => Upos::X,
                            TokenKind::Number => Upos::NUM,
                            TokenKind::Punct => Upos::PUNCT,
                        },
                    ),
                }
            })
            .collect()
    }
}

impl Tagger for MorphLexicon {
    fn tag(&self, sentence: &Sentence) -> Vec<MorphEntry> {
        self.tag_sentence(sentence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    const FIXTURE: &str = "\
место\tместо\tNOUN\tAnimacy=Inan|Case=Nom|Gender=Neut|Number=Sing
мест\tместо\tNOUN\tAnimacy=Inan|Case=Gen|Gender=Neut|Number=Plur
местах\tместо\tNOUN\tAnimacy=Inan|Case=Loc|Gender=Neut|Number=Plur
о\tо\tADP\t_
о\tо\tINTJ\t_
что\tчто\tPRON\tCase=Nom
что\tчто\tSCONJ\t_
";

    fn lex() -> MorphLexicon {
        MorphLexicon::read_tsv(FIXTURE.as_bytes()).unwrap()
    }

    #[test]
    fn analysis() {
        let l = lex();
        let a = l.analyze("местах");
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].pos, Upos::NOUN);
        assert_eq!(a[0].feats.get(FeatKey::Case), Some("Loc"));
        assert!(l.analyze("бдыщ").is_empty());
    }

    #[test]
    fn generation() {
        let l = lex();
        let want = Feats::new().with(FeatKey::Case, "Gen").with(FeatKey::Number, "Plur");
        assert_eq!(l.generate("место", Upos::NOUN, &want).unwrap(), ["мест"]);
        let contradictory = Feats::new().with(FeatKey::Case, "Dat").with(FeatKey::Number, "Plur");
        assert!(l.generate("место", Upos::NOUN, &contradictory).unwrap().is_empty());
        assert!(matches!(
            l.generate("стол", Upos::NOUN, &want),
            Err(MorphError::UnknownLemma { .. })
        ));
    }

    #[test]
    fn tag_string_format() {
        let e = &lex().analyze("мест")[0].clone();
        assert_eq!(e.tag_string(), "NOUN | Animacy=Inan | Case=Gen | Gender=Neut | Number=Plur");
    }

    #[test]
    fn feats_order_is_case_insensitive() {
        let f: Feats = "NumType=Card|Number=Plur".parse().unwrap();
        assert_eq!(f.to_string(), "Number=Plur|NumType=Card");
    }

    #[test]
    fn priority_and_frequency_disambiguation() {
        let mut l = lex();
        let tags: Vec<Upos> = l.tag_sentence(&tokenize("о что ?")).iter().map(|e| e.pos).collect();
        assert_eq!(tags, [Upos::ADP, Upos::SCONJ, Upos::PUNCT]);
        l.read_tag_frequencies("что\tPRON\t10\nчто\tSCONJ\t3\n".as_bytes()).unwrap();
        assert_eq!(l.tag_sentence(&tokenize("что"))[0].pos, Upos::PRON);
    }

    #[test]
    fn unknown_words_are_x() {
        let tags = lex().tag_sentence(&tokenize("бдыщ хрясь 5"));
        assert_eq!(tags.iter().map(|e| e.pos).collect::<Vec<_>>(), [Upos::X, Upos::X, Upos::NUM]);
        assert!(lex().tag_sentence(&tokenize("")).is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            MorphLexicon::read_tsv("a\tb\tNOUN\n".as_bytes()),
            Err(MorphError::Parse { line: 1, .. })
        ));
        assert!(MorphLexicon::read_tsv("a\tb\tNOUNY\t_\n".as_bytes()).is_err());
        assert!(MorphLexicon::read_tsv("a\tb\tNOUN\tCase\n".as_bytes()).is_err());
        assert!(MorphLexicon::read_tsv("a\tb\tNOUN\tColour=Red\n".as_bytes()).is_err());
    }
}
