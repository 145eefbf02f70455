//! Two unconditional rewrite rules: commas before subordinating words and
//! the choice between `о` and `об`.

use std::collections::BTreeSet;

use crate::beam::{Change, Stage};
use crate::morph::MorphLexicon;
use crate::text::{restore_case, Sentence};

const KOTORYJ_FORMS: [&str; 13] = [
    "который", "которого", "которому", "котором", "которым",
    "которая", "которой", "которую", "которою",
    "которое",
    "которые", "которых", "которыми",
];

const PREPOSITIONS: &[&str] = &crate::masked::DEFAULT_PREPOSITIONS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleConfig {
    pub comma_rule_enabled: bool,
    pub prep_rule_enabled: bool,
    pub comma_triggers: BTreeSet<String>,
    pub comma_blockers: BTreeSet<String>,
    pub iotified_vowels: BTreeSet<char>,
}

impl Default for RuleConfig {
    fn default() -> Self {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        RuleConfig {
            comma_rule_enabled: true,
            prep_rule_enabled: true,
            comma_triggers: ["а", "что"].iter().chain(&KOTORYJ_FORMS).map(|s| s.to_string()).collect(),
            comma_blockers: set(&["потому", "не", "ни"]),
            iotified_vowels: ['е', 'ё', 'ю', 'я'].into_iter().collect(),
        }
    }
}

impl RuleConfig {
    /// Add every form the lexicon lists under the lemma `который`.
    pub fn with_lexicon(mut self, lexicon: &MorphLexicon) -> Self {
        for e in lexicon.entries() {
            if e.lemma == "который" {
                self.comma_triggers.insert(e.form.to_lowercase());
            }
        }
        self
    }
}

/// Insert commas before trigger words, recording each insertion. A trigger
/// that follows any punctuation mark, a blocker word, or nothing at all is
/// left alone. A form of `который` governed by a preposition takes the
/// comma before the preposition: `город, в котором`.
pub fn comma_rule(config: &RuleConfig, sentence: &Sentence) -> (Sentence, Vec<Change>) {
    let mut out = sentence.clone();
    let mut changes = Vec::new();
    let mut i = 1;
    while i < out.len() {
        let tokens = out.tokens();
        let tok = &tokens[i];
        let mut at = i;
        if tok.is_word()
            && tok.lower.starts_with("котор")
            && config.comma_triggers.contains(&tok.lower)
            && PREPOSITIONS.contains(&tokens[i - 1].lower.as_str())
        {
            at = i - 1;
        }
        let prev = &tokens[at.saturating_sub(1)];
        let first_word = !tokens[..at].iter().any(|t| t.is_word());
        if tok.is_word()
            && config.comma_triggers.contains(&tok.lower)
            && !first_word
            && prev.is_word()
            && !config.comma_blockers.contains(&prev.lower)
        {
            out = out.insert(at, ",");
            changes.push(Change {
                stage: Stage::Comma,
                pos: at,
                before: String::new(),
                after: ",".into(),
                gain: None,
            });
            i += 1;
        }
        i += 1;
    }
    (out, changes)
}

pub fn apply_comma_rule(config: &RuleConfig, sentence: &Sentence) -> Sentence {
    comma_rule(config, sentence).0
}

fn wants_ob(config: &RuleConfig, next: &str) -> Option<bool> {
    let c = next.chars().next()?;
    if !matches!(c, 'а'..='я' | 'ё') {
        return None;
    }
    let vowel = matches!(c, 'а' | 'и' | 'о' | 'у' | 'ы' | 'э');
    Some(vowel && !config.iotified_vowels.contains(&c))
}

/// Rewrite `о`/`об` according to the first letter of the next word.
pub fn o_ob_rule(config: &RuleConfig, sentence: &Sentence) -> (Sentence, Vec<Change>) {
    let mut out = sentence.clone();
    let mut changes = Vec::new();
    for i in 0..sentence.len().saturating_sub(1) {
        let tok = &out.tokens()[i];
        if tok.lower != "о" && tok.lower != "об" {
            continue;
        }
        let next = &out.tokens()[i + 1];
        if !next.is_word() {
            continue;
        }
        let Some(ob) = wants_ob(config, &next.lower) else { continue };
        let want = if ob { "об" } else { "о" };
        if tok.lower == want {
            continue;
        }
        let replacement = restore_case(tok, want);
        changes.push(Change {
            stage: Stage::OOb,
            pos: i,
            before: tok.surface.clone(),
            after: replacement.clone(),
            gain: None,
        });
        out = out.replace(i, &replacement);
    }
    (out, changes)
}

pub fn apply_o_ob_rule(config: &RuleConfig, sentence: &Sentence) -> Sentence {
    o_ob_rule(config, sentence).0
}
