//! Template-based synthetic Russian corpus built on the bundled
//! morphological lexicon, plus typo and grammar corruptors.

#![allow(dead_code)]

use std::collections::HashSet;
use std::path::Path;

use l2gec::morph::{FeatKey, Feats, MorphLexicon, Upos};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn morph_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/morph_ru.tsv")
}

pub fn load_morph() -> MorphLexicon {
    MorphLexicon::load(morph_path()).expect("bundled morph lexicon")
}

struct Noun {
    lemma: &'static str,
    gender: &'static str,
    animate: bool,
    /// Preposition taking the locative, if the noun names a place.
    place: Option<&'static str>,
    plural: bool,
}

const fn n(lemma: &'static str, gender: &'static str, animate: bool, place: Option<&'static str>, plural: bool) -> Noun {
    Noun { lemma, gender, animate, place, plural }
}

const NOUNS: &[Noun] = &[
    n("место", "Neut", false, Some("на"), true),
    n("перспектива", "Fem", false, None, true),
    n("рынок", "Masc", false, Some("на"), true),
    n("природа", "Fem", false, None, false),
    n("учёба", "Fem", false, None, false),
    n("явление", "Neut", false, None, true),
    n("стол", "Masc", false, Some("на"), true),
    n("дом", "Masc", false, Some("в"), true),
    n("город", "Masc", false, Some("в"), true),
    n("книга", "Fem", false, None, true),
    n("студент", "Masc", true, None, true),
    n("студентка", "Fem", true, None, true),
    n("школа", "Fem", false, Some("в"), true),
    n("друг", "Masc", true, None, true),
    n("журнал", "Masc", false, None, true),
    n("письмо", "Neut", false, None, true),
    n("работа", "Fem", false, Some("на"), true),
    n("учитель", "Masc", true, None, true),
    n("статья", "Fem", false, None, true),
    n("университет", "Masc", false, Some("в"), true),
    n("парк", "Masc", false, Some("в"), true),
    n("ошибка", "Fem", false, None, true),
];

const READABLE: &[&str] = &["книга", "журнал", "письмо", "статья"];
const TRANSITIVE: &[&str] = &["читать", "писать", "знать", "перекрасить"];
const ADJECTIVES: &[(&str, Upos)] = &[
    ("новый", Upos::ADJ),
    ("большой", Upos::ADJ),
    ("хороший", Upos::ADJ),
    ("этот", Upos::DET),
];

/// Grammatical person/number/gender of a subject.
#[derive(Clone)]
struct Subject {
    words: Vec<String>,
    person: &'static str,
    number: &'static str,
    gender: Option<&'static str>,
}

pub struct Synth {
    lex: MorphLexicon,
    rng: ChaCha8Rng,
}

fn feats(pairs: &[(FeatKey, &str)]) -> Feats {
    pairs.iter().fold(Feats::new(), |f, (k, v)| f.with(*k, v))
}

impl Synth {
    pub fn new(lex: MorphLexicon, seed: u64) -> Self {
        Synth { lex, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn lexicon(&self) -> &MorphLexicon {
        &self.lex
    }

    fn form(&self, lemma: &str, pos: Upos, f: &[(FeatKey, &str)]) -> String {
        let forms = self.lex.generate(lemma, pos, &feats(f)).expect("lemma in lexicon");
        forms.into_iter().next().unwrap_or_else(|| panic!("no form of {lemma} for {f:?}"))
    }

    fn noun_form(&self, noun: &Noun, case: &str, number: &str) -> String {
        self.form(noun.lemma, Upos::NOUN, &[(FeatKey::Case, case), (FeatKey::Number, number)])
    }

    /// Adjective or determiner agreeing with a noun.
    fn modifier(&self, lemma: &str, pos: Upos, noun: &Noun, case: &str, number: &str) -> String {
        let mut f = vec![(FeatKey::Case, case), (FeatKey::Number, number)];
        if number == "Sing" {
            f.push((FeatKey::Gender, noun.gender));
        }
        let masc_or_plural = noun.gender == "Masc" || number == "Plur";
        if case == "Acc" && masc_or_plural {
            f.push((FeatKey::Animacy, if noun.animate { "Anim" } else { "Inan" }));
        }
        self.form(lemma, pos, &f)
    }

    fn pick_noun(&mut self, filter: impl Fn(&Noun) -> bool) -> &'static Noun {
        let options: Vec<&'static Noun> = NOUNS.iter().filter(|n| filter(n)).collect();
        options.choose(&mut self.rng).expect("non-empty noun filter")
    }

    fn number_for(&mut self, noun: &Noun) -> &'static str {
        if noun.plural && self.rng.gen_bool(0.3) {
            "Plur"
        } else {
            "Sing"
        }
    }

    fn noun_phrase(&mut self, noun: &Noun, case: &str, number: &str) -> Vec<String> {
        let mut out = Vec::new();
        if self.rng.gen_bool(0.4) {
            let (lemma, pos) = *ADJECTIVES.choose(&mut self.rng).unwrap();
            out.push(self.modifier(lemma, pos, noun, case, number));
        }
        out.push(self.noun_form(noun, case, number));
        out
    }

    fn subject(&mut self, allow_first: bool) -> Subject {
        let roll = self.rng.gen_range(0..if allow_first { 6 } else { 4 });
        let pron = |w: &str, person, number, gender| Subject {
            words: vec![w.to_string()],
            person,
            number,
            gender,
        };
        match roll {
            0 => pron("он", "3", "Sing", Some("Masc")),
            1 => pron("она", "3", "Sing", Some("Fem")),
            2 => pron("они", "3", "Plur", None),
            3 => {
                let noun = self.pick_noun(|n| n.animate);
                let number = self.number_for(noun);
                let words = self.noun_phrase(noun, "Nom", number);
                Subject { words, person: "3", number, gender: (number == "Sing").then_some(noun.gender) }
            }
            4 => pron("мы", "1", "Plur", None),
            _ => pron("я", "1", "Sing", None),
        }
    }

    fn verb(&mut self, lemma: &str, subj: &Subject, past: bool) -> String {
        if past {
            match subj.gender {
                Some(g) if subj.number == "Sing" => {
                    self.form(lemma, Upos::VERB, &[(FeatKey::Tense, "Past"), (FeatKey::Gender, g)])
                }
                _ => self.form(lemma, Upos::VERB, &[(FeatKey::Tense, "Past"), (FeatKey::Number, "Plur")]),
            }
        } else {
            let tense = if lemma == "перекрасить" { "Fut" } else { "Pres" };
            self.form(
                lemma,
                Upos::VERB,
                &[(FeatKey::Tense, tense), (FeatKey::Person, subj.person), (FeatKey::Number, subj.number)],
            )
        }
    }

    fn clause(&mut self, allow_first: bool) -> Vec<String> {
        let past = self.rng.gen_bool(0.4);
        let subj = self.subject(allow_first && !past);
        let mut out = subj.words.clone();
        match self.rng.gen_range(0..4) {
            0 => {
                let verb = *TRANSITIVE.choose(&mut self.rng).unwrap();
                out.push(self.verb(verb, &subj, past));
                let noun = self.pick_noun(|n| READABLE.contains(&n.lemma) || (!n.animate && n.place.is_some()));
                let number = self.number_for(noun);
                out.extend(self.noun_phrase(noun, "Acc", number));
            }
            1 => {
                let verb = *["жить", "работать", "стоять"].choose(&mut self.rng).unwrap();
                out.push(self.verb(verb, &subj, past));
                let noun = self.pick_noun(|n| n.place.is_some());
                let number = self.number_for(noun);
                out.push(noun.place.unwrap().to_string());
                out.extend(self.noun_phrase(noun, "Loc", number));
            }
            2 => {
                let verb = *["говорить", "думать"].choose(&mut self.rng).unwrap();
                out.push(self.verb(verb, &subj, past));
                let noun = self.pick_noun(|_| true);
                let number = self.number_for(noun);
                let np = self.noun_phrase(noun, "Loc", number);
                let first = np[0].chars().next().unwrap();
                let ob = "аиоуыэ".contains(first);
                out.push(if ob { "об" } else { "о" }.to_string());
                out.extend(np);
            }
            _ => {
                let verb = *["работать", "жить", "говорить"].choose(&mut self.rng).unwrap();
                out.push(self.verb(verb, &subj, past));
                let noun = self.pick_noun(|n| n.animate);
                let number = self.number_for(noun);
                if self.rng.gen_bool(0.5) {
                    out.push("со".to_string());
                    out.push(self.modifier("свой", Upos::DET, noun, "Ins", number));
                    out.push(self.noun_form(noun, "Ins", number));
                } else {
                    let form = self.noun_form(noun, "Ins", number);
                    out.push(if form.starts_with('с') { "со" } else { "с" }.to_string());
                    out.push(form);
                }
            }
        }
        out
    }

    /// One sentence as space-separated tokens, capitalized, with final
    /// punctuation attached.
    pub fn sentence(&mut self) -> String {
        let words: Vec<String> = match self.rng.gen_range(0..10) {
            0..=5 => self.clause(true),
            6 => {
                let mut w = self.clause(false);
                w.push(",".into());
                w.push(["и", "а", "но"].choose(&mut self.rng).unwrap().to_string());
                w.extend(self.clause(false));
                w
            }
            7 => {
                let subj = self.subject(true);
                let past = subj.person == "3" && self.rng.gen_bool(0.4);
                let mut w = subj.words.clone();
                w.push(self.verb("думать", &subj, past));
                w.push(",".into());
                w.push("что".into());
                w.extend(self.clause(true));
                w
            }
            8 => {
                let adv = *["здесь", "там", "теперь"].choose(&mut self.rng).unwrap();
                let q = *["мало", "много"].choose(&mut self.rng).unwrap();
                let noun = self.pick_noun(|n| n.plural && !n.animate);
                vec![adv.to_string(), q.to_string(), self.noun_form(noun, "Gen", "Plur")]
            }
            _ => {
                let noun = self.pick_noun(|n| n.place.is_some() || READABLE.contains(&n.lemma));
                let number = self.number_for(noun);
                let mut w = self.noun_phrase(noun, "Nom", number);
                w.push(",".into());
                let mut f = vec![(FeatKey::Case, "Nom"), (FeatKey::Number, number)];
                if number == "Sing" {
                    f.push((FeatKey::Gender, noun.gender));
                }
                w.push(self.form("который", Upos::PRON, &f));
                let subj = Subject {
                    words: vec![],
                    person: "3",
                    number,
                    gender: (number == "Sing").then_some(noun.gender),
                };
                w.push(self.verb("стоять", &subj, true));
                let place = self.pick_noun(|p| p.place.is_some() && p.lemma != noun.lemma);
                w.push(place.place.unwrap().to_string());
                w.push(self.noun_form(place, "Loc", "Sing"));
                w
            }
        };
        let mut s = String::new();
        for (i, w) in words.iter().enumerate() {
            if i > 0 && w != "," {
                s.push(' ');
            }
            if i == 0 {
                let mut c = w.chars();
                s.extend(c.next().unwrap().to_uppercase());
                s.push_str(c.as_str());
            } else {
                s.push_str(w);
            }
        }
        s.push('.');
        s
    }

    pub fn corpus(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.sentence()).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

const ALPHABET: &str = "абвгдеёжзийклмнопрстуфхцчшщъыьэюя";

/// One random single-character edit (insert, delete, substitute or swap
/// adjacent letters) of a lowercase word.
pub fn typo(word: &str, rng: &mut impl Rng) -> String {
    let chars: Vec<char> = word.chars().collect();
    let alphabet: Vec<char> = ALPHABET.chars().collect();
    loop {
        let mut c = chars.clone();
        match rng.gen_range(0..4) {
            0 => {
                let at = rng.gen_range(0..=c.len());
                c.insert(at, *alphabet.choose(rng).unwrap());
            }
            1 if c.len() > 1 => {
                c.remove(rng.gen_range(0..c.len()));
            }
            2 => {
                let at = rng.gen_range(0..c.len());
                c[at] = *alphabet.choose(rng).unwrap();
            }
            3 if c.len() > 1 => {
                let at = rng.gen_range(0..c.len() - 1);
                c.swap(at, at + 1);
            }
            _ => continue,
        }
        let out: String = c.into_iter().collect();
        if out != word {
            return out;
        }
    }
}

/// A corrupted token: index among the sentence's tokens, the original
/// surface and the typo that replaced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corruption {
    pub index: usize,
    pub original: String,
    pub corrupted: String,
}

/// Replace each word token with probability `rate` by a typo that is not a
/// dictionary word. Returns the corrupted sentence (tokens joined as in the
/// input) and what was changed.
pub fn corrupt(
    sentence: &str,
    rate: f64,
    known: &HashSet<String>,
    rng: &mut impl Rng,
) -> (String, Vec<Corruption>) {
    let s = l2gec::text::tokenize(sentence);
    let mut out = s.clone();
    let mut changes = Vec::new();
    for (i, t) in s.tokens().iter().enumerate() {
        if !t.is_word() || !rng.gen_bool(rate) {
            continue;
        }
        let mut bad = typo(&t.lower, rng);
        let mut tries = 0;
        while known.contains(&bad) && tries < 50 {
            bad = typo(&t.lower, rng);
            tries += 1;
        }
        if known.contains(&bad) {
            continue;
        }
        let surface = l2gec::text::restore_case(t, &bad);
        out = out.replace(i, &surface);
        changes.push(Corruption { index: i, original: t.surface.clone(), corrupted: surface });
    }
    (out.source().to_string(), changes)
}

/// Grammar errors the gated stages should catch: `со своим` written as
/// `с своим`, and the genitive plural after мало/много replaced by the
/// genitive singular.
pub fn grammar_error(sentence: &str, lex: &MorphLexicon) -> Option<String> {
    if sentence.contains("со сво") {
        return Some(sentence.replacen("со сво", "с сво", 1));
    }
    let s = l2gec::text::tokenize(sentence);
    let toks = s.tokens();
    for i in 1..toks.len() {
        if matches!(toks[i - 1].lower.as_str(), "мало" | "много") {
            let e = lex.analyze(&toks[i].lower).into_iter().find(|e| e.pos == Upos::NOUN)?;
            let f = Feats::new().with(FeatKey::Case, "Gen").with(FeatKey::Number, "Sing");
            let sing = lex.generate(&e.lemma, Upos::NOUN, &f).ok()?.into_iter().next()?;
            if sing != toks[i].lower {
                return Some(s.replace(i, &sing).source().to_string());
            }
        }
    }
    None
}
